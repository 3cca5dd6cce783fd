//! Resolving command-line flags into field, ordering, rotation set and state.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde_json::Value;

use gfwigner::field::{
    make_field, normal_basis, normal_self_dual_basis, ordering, polynomial_basis, self_dual_basis, Basis, BasisKind, OrderStrategy, Ordering,
};
use gfwigner::pauli::{DensityMatrix, OperatorMatrix, StateVector};
use gfwigner::phase_space::{build_mubs, Line};
use gfwigner::random::{random_density, rng};
use gfwigner::rotations::{canonical_rotation_set, RotationSet};
use gfwigner::{Elem, GaloisField};

use crate::Failure;

pub struct Setup {
    pub field: Arc<GaloisField>,
    pub ord: Arc<Ordering>,
    pub rot: RotationSet,
}

pub enum StateInput {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn density(&self) -> DensityMatrix {
        match self {
            StateInput::Pure(s) => DensityMatrix::pure(s),
            StateInput::Mixed(m) => m.clone(),
        }
    }
}

fn read_json(path: &str) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn as_u32(v: &Value, key: &str) -> Result<u32, Failure> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as u32)
        .ok_or_else(|| Failure::Input(format!("field spec: missing integer {key:?}")))
}

/// A JSON field spec file, or the inline forms `p^n` and `d`.
pub fn load_field(spec: &str) -> Result<(Arc<GaloisField>, Option<Value>), Failure> {
    if Path::new(spec).exists() {
        let v = read_json(spec)?;
        let p = as_u32(&v, "p")?;
        let n = as_u32(&v, "n")?;
        let poly: Option<Vec<u32>> = match v.get("poly") {
            None | Some(Value::Null) => None,
            Some(Value::Array(items)) => Some(
                items
                    .iter()
                    .map(|c| c.as_u64().map(|x| x as u32).ok_or_else(|| Failure::Input("field spec: poly entries must be integers".into())))
                    .collect::<Result<_, _>>()?,
            ),
            Some(_) => return Err(Failure::Input("field spec: poly must be a list".into())),
        };
        let f = make_field(p, n, poly.as_deref())?;
        return Ok((f, v.get("ordering").cloned()));
    }
    let (p, n) = match spec.split_once('^') {
        Some((p, n)) => (parse_u32(p)?, parse_u32(n)?),
        None => prime_power(parse_u32(spec)?).ok_or_else(|| Failure::Input(format!("{spec} is not a prime power")))?,
    };
    Ok((make_field(p, n, None)?, None))
}

fn parse_u32(s: &str) -> Result<u32, Failure> {
    s.trim().parse().map_err(|_| Failure::Input(format!("not a field size or file: {s:?}")))
}

fn prime_power(d: u32) -> Option<(u32, u32)> {
    let p = (2..=d).find(|k| d.is_multiple_of(*k))?;
    let mut m = d;
    let mut n = 0;
    while m.is_multiple_of(p) {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p, n))
}

fn named_basis(f: &Arc<GaloisField>, name: &str) -> Result<Basis, Failure> {
    match name {
        "poly" | "polynomial" => Ok(polynomial_basis(f)),
        "self-dual" | "selfdual" => self_dual_basis(f).ok_or_else(|| Failure::Input("field has no self-dual basis".into())),
        "normal" => normal_basis(f).ok_or_else(|| Failure::Input("no normal basis found".into())),
        list => {
            let elems = list.split(',').map(|s| f.parse(s.trim())).collect::<Result<Vec<_>, _>>()?;
            Ok(Basis::new(f, elems, BasisKind::Custom)?)
        }
    }
}

fn strategy_from(f: &Arc<GaloisField>, name: &str, basis: Option<&str>) -> Result<OrderStrategy, Failure> {
    match name {
        "primitive" => Ok(OrderStrategy::PrimitivePower { primitive: None }),
        "trace" => Ok(OrderStrategy::TraceMajor { primitive: None }),
        "radix" => {
            let b = match basis {
                Some(b) => named_basis(f, b)?,
                None if f.n() == 1 => polynomial_basis(f),
                None => normal_self_dual_basis(f).or_else(|| self_dual_basis(f)).unwrap_or_else(|| polynomial_basis(f)),
            };
            Ok(OrderStrategy::Radix { basis: Some(b) })
        }
        other => Err(Failure::Input(format!("unknown ordering {other:?}"))),
    }
}

/// `--ordering strategy[:basis]` wins over the field file's ordering block.
pub fn resolve_ordering(f: &Arc<GaloisField>, flag: Option<&str>, from_file: Option<&Value>) -> Result<Arc<Ordering>, Failure> {
    let strategy = match (flag, from_file) {
        (Some(s), _) => {
            let (name, basis) = match s.split_once(':') {
                Some((a, b)) => (a, Some(b)),
                None => (s, None),
            };
            strategy_from(f, name, basis)?
        }
        (None, Some(v)) => {
            let name = v.get("strategy").and_then(Value::as_str).unwrap_or("primitive");
            let basis = match v.get("basis") {
                Some(Value::Array(items)) => {
                    Some(items.iter().map(|x| x.as_str().unwrap_or("").to_string()).collect::<Vec<_>>().join(","))
                }
                Some(Value::String(s)) => Some(s.clone()),
                _ => None,
            };
            strategy_from(f, name, basis.as_deref())?
        }
        (None, None) => OrderStrategy::PrimitivePower { primitive: None },
    };
    Ok(Arc::new(ordering(f, strategy)?))
}

/// `canonical`, `canonical:<basis>`, `signs:<path>`, `h:<path>` or a
/// rotation-set JSON path.
pub fn resolve_rotations(f: &Arc<GaloisField>, flag: &str) -> Result<RotationSet, Failure> {
    let (kind, arg) = match flag.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (flag, None),
    };
    match (kind, arg) {
        ("canonical", None) => Ok(canonical_rotation_set(f, None)?),
        ("canonical", Some(b)) => Ok(canonical_rotation_set(f, Some(&named_basis(f, b)?))?),
        ("signs", Some(path)) | ("h", Some(path)) => {
            let mut v = read_json(path)?;
            if v.get(kind).is_none() {
                return Err(Failure::Input(format!("{path}: missing {kind:?}")));
            }
            v["kind"] = Value::from("shifted");
            Ok(RotationSet::from_json(f, &v)?)
        }
        _ if Path::new(flag).exists() => Ok(RotationSet::from_json(f, &read_json(flag)?)?),
        _ => Err(Failure::Input(format!("unrecognized rotation set {flag:?}"))),
    }
}

pub fn setup(field: &str, ord: Option<&str>, rot: &str) -> Result<Setup, Failure> {
    let (field, ord_block) = load_field(field)?;
    let ord = resolve_ordering(&field, ord, ord_block.as_ref())?;
    let rot = resolve_rotations(&field, rot)?;
    Ok(Setup { field, ord, rot })
}

fn example_state(s: &Setup, n: u32) -> Result<StateInput, Failure> {
    let f = &s.field;
    if f.p() != 2 || f.n() != n {
        return Err(Failure::Input(format!("this example state lives in GF({})", 1u32 << n)));
    }
    let h = C64::new(0.5f64.sqrt(), 0.0);
    let top = f.prim_pow(f.d() as i64 - 1);
    Ok(StateInput::Pure(StateVector::from_terms(&s.ord, &[(Elem::ZERO, h), (top, h)])?))
}

fn number(v: &Value) -> Option<C64> {
    match v {
        Value::Number(x) => x.as_f64().map(|r| C64::new(r, 0.0)),
        Value::Array(p) if p.len() == 2 => Some(C64::new(p[0].as_f64()?, p[1].as_f64()?)),
        _ => None,
    }
}

fn state_from_json(s: &Setup, v: &Value) -> Result<StateInput, Failure> {
    let bad = |m: &str| Failure::Input(format!("state: {m}"));
    if let Some(map) = v.get("amplitudes").and_then(Value::as_object) {
        let terms = map
            .iter()
            .map(|(k, a)| Ok((s.field.parse(k)?, number(a).ok_or_else(|| bad("amplitudes must be numbers or [re, im]"))?)))
            .collect::<Result<Vec<_>, Failure>>()?;
        return Ok(StateInput::Pure(StateVector::from_terms(&s.ord, &terms)?));
    }
    let re = v.get("re").and_then(Value::as_array).ok_or_else(|| bad("expected \"amplitudes\" or \"re\"/\"im\""))?;
    let empty = Vec::new();
    let im = v.get("im").and_then(Value::as_array).unwrap_or(&empty);
    let d = s.ord.d();
    let flat = |x: &Value| x.as_f64().ok_or_else(|| bad("entries must be numbers"));
    if re.first().is_some_and(Value::is_array) {
        let get = |rows: &Vec<Value>, i: usize, j: usize| -> Result<f64, Failure> {
            match rows.get(i) {
                None if rows.is_empty() => Ok(0.0),
                None => Err(bad("matrix has wrong shape")),
                Some(r) => flat(r.as_array().and_then(|r| r.get(j)).ok_or_else(|| bad("matrix has wrong shape"))?),
            }
        };
        if re.len() != d {
            return Err(bad("matrix has wrong shape"));
        }
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = C64::new(get(re, i, j)?, get(im, i, j)?);
            }
        }
        return Ok(StateInput::Mixed(DensityMatrix::new(OperatorMatrix::new(s.ord.clone(), m)?)?));
    }
    if re.len() != d || (!im.is_empty() && im.len() != d) {
        return Err(bad("vector has wrong length"));
    }
    let mut v = DVector::zeros(d);
    for i in 0..d {
        v[i] = C64::new(flat(&re[i])?, im.get(i).map(flat).transpose()?.unwrap_or(0.0));
    }
    Ok(StateInput::Pure(StateVector::normalized(s.ord.clone(), v)?))
}

/// Named examples, `random:<seed>`, `line:<μ>,<ν>`, `vertical:<ν>`, or a JSON file.
pub fn load_state(s: &Setup, spec: &str) -> Result<StateInput, Failure> {
    let f = &s.field;
    match spec {
        "gf4-paper-state" => return example_state(s, 2),
        "gf8-paper-state" => return example_state(s, 3),
        "vacuum" => return Ok(StateInput::Pure(StateVector::basis(&s.ord, Elem::ZERO))),
        "maximally-mixed" => return Ok(StateInput::Mixed(DensityMatrix::maximally_mixed(&s.ord))),
        _ => {}
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed.parse().map_err(|_| Failure::Input(format!("bad seed in {spec:?}")))?;
        return Ok(StateInput::Mixed(random_density(&s.ord, &mut rng(seed))));
    }
    let line = if let Some(rest) = spec.strip_prefix("line:") {
        let (mu, nu) = rest.split_once(',').ok_or_else(|| Failure::Input("line states are written line:<mu>,<nu>".into()))?;
        Some(Line::Sloped { mu: f.parse(mu.trim())?, nu: f.parse(nu.trim())? })
    } else if let Some(nu) = spec.strip_prefix("vertical:") {
        Some(Line::Vertical { nu: f.parse(nu.trim())? })
    } else {
        None
    };
    if let Some(line) = line {
        let m = build_mubs(&s.ord, &s.rot)?;
        return Ok(StateInput::Pure(m.state(&line).clone()));
    }
    if Path::new(spec).exists() {
        return state_from_json(s, &read_json(spec)?);
    }
    Err(Failure::Input(format!("unknown state {spec:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_fields() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(6), None);
        let (f, _) = load_field("3^2").unwrap();
        assert_eq!(f.d(), 9);
        assert!(load_field("12").is_err());
    }

    #[test]
    fn rotation_flags() {
        let (f, _) = load_field("4").unwrap();
        assert!(resolve_rotations(&f, "canonical:poly").is_ok());
        assert!(resolve_rotations(&f, "bogus").is_err());
    }

    #[test]
    fn radix_flag_with_explicit_basis() {
        let (f, _) = load_field("8").unwrap();
        let o = resolve_ordering(&f, Some("radix:t^3,t^6,t^5"), None).unwrap();
        assert_eq!(o.index(f.prim_pow(1)), 6);
        let default = resolve_ordering(&f, Some("radix"), None).unwrap();
        assert_eq!(default.elems(), o.elems());
    }
}
