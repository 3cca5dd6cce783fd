//! Rotation operators `V_μ`, diagonal in the conjugate basis with
//! eigenphases `c_{κ,μ}`, together with the char-2 cocycle and the auxiliary
//! `U` and `S` operators.
//!
//! Every admissible set is stored as a canonical set plus a shift function
//! `h` with `h(0) = 0`; the shifted set is `V_{μ,h(μ)} = V_μ X_{h(μ)}`, i.e.
//! `c'_{κ,μ} = c_{κ,μ} χ(−κ h(μ))`. In characteristic 2 the same set can be
//! described by per-μ sign flips on the basis coefficients.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{expand, self_dual_basis, Basis, BasisKind, Elem, GaloisField, Ordering};
use crate::pauli::{build_fourier, build_x, OperatorMatrix, TIGHT_TOL};
use crate::phase::UnitPhase;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationKind {
    Canonical,
    Shifted,
}

/// The table `c_{κ,μ}` and its provenance.
#[derive(Clone, Debug)]
pub struct RotationSet {
    field: Arc<GaloisField>,
    kind: RotationKind,
    basis: Option<Basis>,
    shift: Vec<Elem>,
    c: Vec<UnitPhase>,
}

impl PartialEq for RotationSet {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.c == other.c
    }
}

/// `c_{κ,μ} = χ(−2^{-1} κ² μ)`.
pub fn canonical_rotation_set_odd(field: &Arc<GaloisField>) -> Result<RotationSet> {
    if field.is_even() {
        return Err(Error::EvenCharacteristic);
    }
    let d = field.d();
    let half = field.inv_nz(field.scalar(2));
    let mut c = Vec::with_capacity(d * d);
    for k in field.elements() {
        let k2 = field.mul(half, field.mul(k, k));
        for mu in field.elements() {
            c.push(field.character(field.neg(field.mul(k2, mu))));
        }
    }
    Ok(RotationSet { field: field.clone(), kind: RotationKind::Canonical, basis: None, shift: vec![Elem::ZERO; d], c })
}

/// Principal square roots `c_{σ_l,μ} = √χ(σ_l² μ)` on the basis, extended by
/// `c_{κ+α,μ} = c_{κ,μ} c_{α,μ} χ(μακ)`.
pub fn canonical_rotation_set_even(field: &Arc<GaloisField>, basis: &Basis) -> Result<RotationSet> {
    if !field.is_even() {
        return Err(Error::OddCharacteristic);
    }
    let d = field.d();
    let den = field.phase_den();
    let mut c = vec![UnitPhase::one(den); d * d];
    for mu in field.elements() {
        let roots: Vec<UnitPhase> =
            basis.elems().iter().map(|&s| field.character(field.mul(field.mul(s, s), mu)).sqrt().with_den(den)).collect();
        for k in field.elements() {
            let coords = expand(field, k, basis);
            let mut acc = Elem::ZERO;
            let mut val = UnitPhase::one(den);
            for (l, &a) in coords.iter().enumerate() {
                if a == 1 {
                    let s = basis.elems()[l];
                    val = val * roots[l] * field.character(field.mul(mu, field.mul(s, acc)));
                    acc = field.add(acc, s);
                }
            }
            debug_assert_eq!(acc, k);
            c[k.code() * d + mu.code()] = val;
        }
    }
    Ok(RotationSet {
        field: field.clone(),
        kind: RotationKind::Canonical,
        basis: Some(basis.clone()),
        shift: vec![Elem::ZERO; d],
        c,
    })
}

/// Canonical set for either characteristic. Char 2 falls back to the first
/// self-dual basis when none is given.
pub fn canonical_rotation_set(field: &Arc<GaloisField>, basis: Option<&Basis>) -> Result<RotationSet> {
    if field.is_even() {
        match basis {
            Some(b) => canonical_rotation_set_even(field, b),
            None => {
                let b = self_dual_basis(field).ok_or(Error::MissingBasis)?;
                canonical_rotation_set_even(field, &b)
            }
        }
    } else {
        canonical_rotation_set_odd(field)
    }
}

/// Apply a further shift `h` (table indexed by element code).
pub fn shifted_rotation_set(rot: &RotationSet, h: &[Elem]) -> Result<RotationSet> {
    let f = &rot.field;
    let d = f.d();
    if h.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: h.len() });
    }
    for &e in h {
        f.check(e)?;
    }
    if !h[0].is_zero() {
        return Err(Error::ShiftAtZero);
    }
    let mut out = rot.clone();
    for mu in f.elements() {
        let hm = h[mu.code()];
        if hm.is_zero() {
            continue;
        }
        out.shift[mu.code()] = f.add(out.shift[mu.code()], hm);
        for k in f.elements() {
            let idx = k.code() * d + mu.code();
            out.c[idx] *= f.character(f.neg(f.mul(k, hm)));
        }
    }
    if out.shift.iter().any(|e| !e.is_zero()) {
        out.kind = RotationKind::Shifted;
    }
    Ok(out)
}

/// Char-2 sign bits to shift: `h(μ) = Σ_l bit_l σ'_l`.
pub fn signs_to_shift(field: &GaloisField, basis: &Basis, signs: &[Vec<u8>]) -> Result<Vec<Elem>> {
    if !field.is_even() {
        return Err(Error::OddCharacteristic);
    }
    if signs.len() != field.d() {
        return Err(Error::LengthMismatch { expected: field.d(), got: signs.len() });
    }
    signs
        .iter()
        .map(|bits| {
            if bits.len() != basis.len() {
                return Err(Error::LengthMismatch { expected: basis.len(), got: bits.len() });
            }
            Ok(bits.iter().zip(basis.dual_elems()).fold(Elem::ZERO, |acc, (&b, &s)| if b & 1 == 1 { field.add(acc, s) } else { acc }))
        })
        .collect()
}

/// Char-2 shift to sign bits: `bit_l = tr(σ_l h(μ))`.
pub fn shift_to_signs(field: &GaloisField, basis: &Basis, h: &[Elem]) -> Result<Vec<Vec<u8>>> {
    if !field.is_even() {
        return Err(Error::OddCharacteristic);
    }
    Ok(h.iter().map(|&hm| basis.elems().iter().map(|&s| field.trace(field.mul(s, hm)) as u8).collect()).collect())
}

impl RotationSet {
    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn kind(&self) -> RotationKind {
        self.kind
    }

    pub fn basis(&self) -> Option<&Basis> {
        self.basis.as_ref()
    }

    /// `h(μ)` relative to the canonical set.
    pub fn shift(&self, mu: Elem) -> Elem {
        self.shift[mu.code()]
    }

    pub fn shift_table(&self) -> &[Elem] {
        &self.shift
    }

    /// Per-μ sign bits on the basis coefficients (char 2 only).
    pub fn signs(&self) -> Option<Vec<Vec<u8>>> {
        let b = self.basis.as_ref()?;
        shift_to_signs(&self.field, b, &self.shift).ok()
    }

    #[inline]
    pub fn c(&self, k: Elem, mu: Elem) -> UnitPhase {
        self.c[k.code() * self.field.d() + mu.code()]
    }

    /// `φ(τ,υ) = c_{τ,τ^{-1}υ}`, and 1 on the axes.
    #[inline]
    pub fn phi(&self, tau: Elem, upsilon: Elem) -> UnitPhase {
        if tau.is_zero() || upsilon.is_zero() {
            return UnitPhase::one(self.field.phase_den());
        }
        let f = &self.field;
        self.c(tau, f.mul(f.inv_nz(tau), upsilon))
    }

    pub fn check_field(&self, f: &GaloisField) -> Result<()> {
        if *self.field == *f {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    /// Worst-case violation count of `c_{κ+α,μ} c*_{κ,μ} = c_{α,μ} χ(−μακ)`.
    pub fn functional_equation_failures(&self) -> usize {
        let f = &self.field;
        let mut bad = 0;
        for mu in f.elements() {
            for k in f.elements() {
                for a in f.elements() {
                    let lhs = self.c(f.add(k, a), mu) * self.c(k, mu).conj();
                    let rhs = self.c(a, mu) * f.character(f.neg(f.mul(mu, f.mul(a, k))));
                    if lhs != rhs {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        let mut v = json!({
            "kind": match self.kind { RotationKind::Canonical => "canonical", RotationKind::Shifted => "shifted" },
        });
        if let Some(b) = &self.basis {
            v["basis"] = json!(b.elems().iter().map(|&e| f.format(e)).collect::<Vec<_>>());
        }
        if self.kind == RotationKind::Shifted {
            v["h"] = json!(self.shift.iter().map(|&e| f.format(e)).collect::<Vec<_>>());
            if let Some(signs) = self.signs() {
                let map: BTreeMap<String, Vec<u8>> = f.elements().map(|mu| (f.format(mu), signs[mu.code()].clone())).collect();
                v["signs"] = json!(map);
            }
        }
        v
    }

    /// Parse the JSON form. `h` may be a list in element-code order or an
    /// object keyed by μ; `signs` is an object keyed by μ (char 2 only).
    pub fn from_json(field: &Arc<GaloisField>, v: &Value) -> Result<RotationSet> {
        let parse_err = |m: &str| Error::Parse(format!("rotation set: {m}"));
        let basis = match v.get("basis") {
            Some(Value::Array(items)) => {
                let elems = items
                    .iter()
                    .map(|s| s.as_str().ok_or_else(|| parse_err("basis entries must be strings")).and_then(|s| field.parse(s)))
                    .collect::<Result<Vec<_>>>()?;
                let kind = BasisKind::Custom;
                Some(Basis::new(field, elems, kind)?)
            }
            Some(_) => return Err(parse_err("basis must be a list")),
            None => None,
        };
        let base = canonical_rotation_set(field, basis.as_ref())?;
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or("canonical");
        let d = field.d();
        let mut h = vec![Elem::ZERO; d];
        let mut h_set = vec![false; d];
        match v.get("h") {
            Some(Value::Array(items)) => {
                if items.len() != d {
                    return Err(Error::LengthMismatch { expected: d, got: items.len() });
                }
                for (i, s) in items.iter().enumerate() {
                    h[i] = field.parse(s.as_str().ok_or_else(|| parse_err("h entries must be strings"))?)?;
                    h_set[i] = true;
                }
            }
            Some(Value::Object(map)) => {
                for (k, s) in map {
                    let mu = field.parse(k)?;
                    h[mu.code()] = field.parse(s.as_str().ok_or_else(|| parse_err("h entries must be strings"))?)?;
                    h_set[mu.code()] = true;
                }
            }
            Some(_) => return Err(parse_err("h must be a list or an object")),
            None => {}
        }
        if let Some(signs) = v.get("signs") {
            let b = base.basis.as_ref().ok_or(Error::OddCharacteristic)?;
            let map = signs.as_object().ok_or_else(|| parse_err("signs must be an object"))?;
            let mut bits = vec![vec![0u8; b.len()]; d];
            for (k, arr) in map {
                let mu = field.parse(k)?;
                let row: Vec<u8> = arr
                    .as_array()
                    .ok_or_else(|| parse_err("sign rows must be lists"))?
                    .iter()
                    .map(|x| x.as_u64().map(|b| b as u8).ok_or_else(|| parse_err("sign bits must be 0 or 1")))
                    .collect::<Result<_>>()?;
                if row.iter().any(|&x| x > 1) {
                    return Err(parse_err("sign bits must be 0 or 1"));
                }
                bits[mu.code()] = row;
            }
            let hs = signs_to_shift(field, b, &bits)?;
            for i in 0..d {
                if h_set[i] && h[i] != hs[i] {
                    return Err(parse_err("signs and h disagree"));
                }
                h[i] = hs[i];
            }
        }
        match kind {
            "canonical" if h.iter().all(|e| e.is_zero()) => Ok(base),
            "canonical" => Err(parse_err("canonical set cannot carry a shift")),
            "shifted" => shifted_rotation_set(&base, &h),
            other => Err(parse_err(&format!("unknown kind {other:?}"))),
        }
    }
}

/// `V_μ = Σ_κ c_{κ,μ} |κ̃⟩⟨κ̃| = F diag(c_{·,μ}) F†`.
pub fn build_v(ord: &Arc<Ordering>, rot: &RotationSet, mu: Elem) -> Result<OperatorMatrix> {
    rot.check_field(ord.field())?;
    let f = build_fourier(ord);
    let diag = OperatorMatrix::diagonal(ord, |k| rot.c(k, mu).to_complex());
    f.conjugate(&diag)
}

/// `V_{μ,ν} = V_μ X_ν`.
pub fn build_v_shifted(ord: &Arc<Ordering>, rot: &RotationSet, mu: Elem, nu: Elem) -> Result<OperatorMatrix> {
    build_v(ord, rot, mu)?.mul(&build_x(ord, nu))
}

/// Result of checking `V_μ² = X_{μ^{2^{n-1}}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareCheck {
    pub root: Elem,
    pub deviation: f64,
}

/// Char 2: `V_μ² = X_{μ^{2^{n-1}}}`. Returns the shift and the deviation.
pub fn verify_square_even(ord: &Arc<Ordering>, rot: &RotationSet, mu: Elem) -> Result<SquareCheck> {
    let f = ord.field();
    if !f.is_even() {
        return Err(Error::OddCharacteristic);
    }
    let root = f.pow(mu, 1u64 << (f.n() - 1));
    let v = build_v(ord, rot, mu)?;
    let deviation = v.mul(&v)?.max_diff(&build_x(ord, root))?;
    Ok(SquareCheck { root, deviation })
}

/// Char 2: the ν′ with `V_{μ,ν} V_{μ,ν′} = I`, namely `μ^{2^{n-1}} + ν`.
pub fn inverse_shift(field: &GaloisField, mu: Elem, nu: Elem) -> Result<Elem> {
    if !field.is_even() {
        return Err(Error::OddCharacteristic);
    }
    Ok(field.add(field.pow(mu, 1u64 << (field.n() - 1)), nu))
}

/// `f(μ,μ′)` with `V_μ V_{μ′} = V_{μ+μ′} X_{f(μ,μ′)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleTable {
    d: usize,
    f: Vec<Elem>,
}

impl CocycleTable {
    pub fn get(&self, mu: Elem, mu2: Elem) -> Elem {
        self.f[mu.code() * self.d + mu2.code()]
    }
}

/// Solve `c_{σ,μ} c_{σ,μ′} = χ(σ f) c_{σ,μ+μ′}` on the basis elements by
/// testing every candidate f.
pub fn cocycle(rot: &RotationSet) -> Result<CocycleTable> {
    let f = &rot.field;
    if !f.is_even() {
        return Err(Error::OddCharacteristic);
    }
    let basis = rot.basis.as_ref().ok_or(Error::MissingBasis)?;
    let d = f.d();
    let mut table = vec![Elem::ZERO; d * d];
    for mu in f.elements() {
        for mu2 in f.elements() {
            let sum = f.add(mu, mu2);
            let sol = f
                .elements()
                .find(|&cand| {
                    basis.elems().iter().all(|&s| rot.c(s, mu) * rot.c(s, mu2) == f.character(f.mul(s, cand)) * rot.c(s, sum))
                })
                .ok_or(Error::NoSolution)?;
            table[mu.code() * d + mu2.code()] = sol;
        }
    }
    Ok(CocycleTable { d, f: table })
}

/// `U_μ = F V_μ F† = Σ_κ c_{−κ,μ}|κ⟩⟨κ|`.
pub fn build_u(ord: &Arc<Ordering>, rot: &RotationSet, mu: Elem) -> Result<OperatorMatrix> {
    rot.check_field(ord.field())?;
    let f = ord.field().clone();
    Ok(OperatorMatrix::diagonal(ord, |k| rot.c(f.neg(k), mu).to_complex()))
}

/// Squeezing operator `S_ξ = Σ_κ |κ⟩⟨ξκ|`.
pub fn build_s(ord: &Arc<Ordering>, xi: Elem) -> Result<OperatorMatrix> {
    let f = ord.field();
    f.check(xi)?;
    if xi.is_zero() {
        return Err(Error::ZeroSqueeze);
    }
    let d = ord.d();
    let mut m = DMatrix::zeros(d, d);
    for k in f.elements() {
        m[(ord.index(k), ord.index(f.mul(xi, k)))] = C64::new(1.0, 0.0);
    }
    OperatorMatrix::new(ord.clone(), m)
}

/// Largest deviation of `V_μ V_{μ′}` from `V_{μ+μ′} X_{f(μ,μ′)}` over all pairs.
pub fn group_law_deviation(ord: &Arc<Ordering>, rot: &RotationSet) -> Result<f64> {
    let f = ord.field();
    let table = if f.is_even() { Some(cocycle(rot)?) } else { None };
    let vs: Vec<OperatorMatrix> = f.elements().map(|mu| build_v(ord, rot, mu)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for mu in f.elements() {
        for mu2 in f.elements() {
            let lhs = vs[mu.code()].mul(&vs[mu2.code()])?;
            let mut rhs = vs[f.add(mu, mu2).code()].clone();
            if let Some(t) = &table {
                rhs = rhs.mul(&build_x(ord, t.get(mu, mu2)))?;
            }
            worst = worst.max(lhs.max_diff(&rhs)?);
        }
    }
    Ok(worst)
}

/// Whether the group law holds within the single-product tolerance.
pub fn group_law_holds(ord: &Arc<Ordering>, rot: &RotationSet) -> Result<bool> {
    Ok(group_law_deviation(ord, rot)? < TIGHT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, ordering, OrderStrategy};
    use crate::pauli::{build_z, TIGHT_TOL};

    fn setup(p: u32, n: u32) -> (Arc<GaloisField>, Arc<Ordering>) {
        let f = make_field(p, n, None).unwrap();
        let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
        (f, o)
    }

    fn gf4_normal_basis(f: &GaloisField) -> Basis {
        Basis::new(f, vec![f.prim_pow(1), f.prim_pow(2)], BasisKind::SelfDual).unwrap()
    }

    #[test]
    fn odd_canonical_values() {
        let (f, _) = setup(3, 1);
        let rot = canonical_rotation_set_odd(&f).unwrap();
        assert_eq!(rot.c(Elem(1), Elem(1)), UnitPhase::new(1, 3));
        for k in f.elements() {
            assert!(rot.c(k, Elem::ZERO).is_one());
        }
        assert_eq!(canonical_rotation_set_odd(&make_field(2, 2, None).unwrap()).unwrap_err(), Error::EvenCharacteristic);
    }

    #[test]
    fn even_canonical_values_gf4() {
        let (f, _) = setup(2, 2);
        let rot = canonical_rotation_set_even(&f, &gf4_normal_basis(&f)).unwrap();
        let one = Elem::ONE;
        let i = UnitPhase::new(1, 4);
        assert!(rot.c(Elem::ZERO, one).is_one());
        assert_eq!(rot.c(f.prim_pow(1), one), i);
        assert_eq!(rot.c(f.prim_pow(2), one), i);
        assert_eq!(rot.c(f.prim_pow(3), one), UnitPhase::new(1, 2));
        assert_eq!(canonical_rotation_set_even(&make_field(3, 1, None).unwrap(), &gf4_normal_basis(&f)).unwrap_err(), Error::OddCharacteristic);
    }

    #[test]
    fn functional_equation_holds() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let (f, _) = setup(p, n);
            let rot = canonical_rotation_set(&f, None).unwrap();
            assert_eq!(rot.functional_equation_failures(), 0, "GF({p}^{n})");
        }
    }

    #[test]
    fn shift_at_zero_rejected() {
        let (f, _) = setup(2, 2);
        let rot = canonical_rotation_set(&f, None).unwrap();
        let mut h = vec![Elem::ZERO; 4];
        h[0] = Elem::ONE;
        assert_eq!(shifted_rotation_set(&rot, &h).unwrap_err(), Error::ShiftAtZero);
        assert_eq!(shifted_rotation_set(&rot, &[Elem::ZERO; 4]).unwrap(), rot);
    }

    #[test]
    fn signs_and_shift_interconvert() {
        let (f, _) = setup(2, 3);
        let b = self_dual_basis(&f).unwrap();
        for code in 0..f.d() {
            let h = vec![Elem::ZERO, Elem(code as u16), Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO];
            let s = shift_to_signs(&f, &b, &h).unwrap();
            assert_eq!(signs_to_shift(&f, &b, &s).unwrap(), h);
        }
    }

    #[test]
    fn sign_flip_matches_shift() {
        let (f, _) = setup(2, 2);
        let b = gf4_normal_basis(&f);
        let rot = canonical_rotation_set_even(&f, &b).unwrap();
        let mut h = vec![Elem::ZERO; 4];
        h[Elem::ONE.code()] = f.prim_pow(1);
        let shifted = shifted_rotation_set(&rot, &h).unwrap();
        let signs = shifted.signs().unwrap();
        for (l, &s) in b.elems().iter().enumerate() {
            let flipped = shifted.c(s, Elem::ONE) != rot.c(s, Elem::ONE);
            assert_eq!(flipped, signs[Elem::ONE.code()][l] == 1);
        }
    }

    #[test]
    fn v_conjugation_law() {
        let (f, o) = setup(3, 1);
        let rot = canonical_rotation_set(&f, None).unwrap();
        for mu in f.elements() {
            let v = build_v(&o, &rot, mu).unwrap();
            for a in f.elements() {
                let lhs = v.conjugate(&build_z(&o, a)).unwrap();
                let rhs = build_z(&o, a).mul(&build_x(&o, f.mul(mu, a))).unwrap().scale(rot.c(a, mu).to_complex());
                assert!(lhs.max_diff(&rhs).unwrap() < TIGHT_TOL);
                let x = build_x(&o, a);
                assert!(v.mul(&x).unwrap().max_diff(&x.mul(&v).unwrap()).unwrap() < TIGHT_TOL);
            }
        }
    }

    #[test]
    fn square_law_and_inverse() {
        let (f, o) = setup(2, 2);
        let rot = canonical_rotation_set(&f, None).unwrap();
        let chk = verify_square_even(&o, &rot, f.prim_pow(1)).unwrap();
        assert_eq!(chk.root, f.prim_pow(2));
        assert!(chk.deviation < TIGHT_TOL);
        assert_eq!(verify_square_even(&o, &rot, Elem::ZERO).unwrap().root, Elem::ZERO);
        for mu in f.elements() {
            for nu in f.elements() {
                let inv = inverse_shift(&f, mu, nu).unwrap();
                let prod = build_v_shifted(&o, &rot, mu, nu).unwrap().mul(&build_v_shifted(&o, &rot, mu, inv).unwrap()).unwrap();
                assert!(prod.max_diff(&OperatorMatrix::identity(&o)).unwrap() < TIGHT_TOL);
            }
        }
        let (g, og) = setup(2, 1);
        let r2 = canonical_rotation_set(&g, None).unwrap();
        let chk = verify_square_even(&og, &r2, Elem::ONE).unwrap();
        assert_eq!(chk.root, Elem::ONE);
        assert!(chk.deviation < TIGHT_TOL);
    }

    #[test]
    fn cocycle_symmetric_and_zero_row() {
        let (f, o) = setup(2, 3);
        let rot = canonical_rotation_set(&f, None).unwrap();
        let t = cocycle(&rot).unwrap();
        for a in f.elements() {
            assert_eq!(t.get(Elem::ZERO, a), Elem::ZERO);
            for b in f.elements() {
                assert_eq!(t.get(a, b), t.get(b, a));
            }
        }
        assert!(group_law_holds(&o, &rot).unwrap());
    }

    #[test]
    fn odd_group_law() {
        for (p, n) in [(3, 1), (5, 1), (3, 2)] {
            let (f, o) = setup(p, n);
            let rot = canonical_rotation_set(&f, None).unwrap();
            assert!(group_law_deviation(&o, &rot).unwrap() < TIGHT_TOL);
        }
    }

    #[test]
    fn u_and_s_operators() {
        let (f, o) = setup(3, 1);
        let rot = canonical_rotation_set(&f, None).unwrap();
        let fr = build_fourier(&o);
        for mu in f.elements() {
            let u = build_u(&o, &rot, mu).unwrap();
            let via_f = fr.conjugate(&build_v(&o, &rot, mu).unwrap()).unwrap();
            assert!(u.max_diff(&via_f).unwrap() < TIGHT_TOL);
        }
        let u1 = build_u(&o, &rot, Elem::ONE).unwrap();
        let lhs = u1.conjugate(&build_x(&o, Elem::ONE)).unwrap();
        let rhs = build_z(&o, Elem::ONE).adjoint().mul(&build_x(&o, Elem::ONE)).unwrap().scale(rot.phi(Elem::ONE, Elem::ONE).conj().to_complex());
        assert!(lhs.max_diff(&rhs).unwrap() < TIGHT_TOL);

        let (g, og) = setup(5, 1);
        let s = build_s(&og, Elem(2)).unwrap();
        for k in g.elements() {
            // S_2 |2κ⟩ = |κ⟩, so |κ⟩ ↦ |3κ⟩
            assert_eq!(s.get(g.mul(Elem(3), k), k), C64::new(1.0, 0.0));
        }
        assert!(s.unitarity_error() < TIGHT_TOL);
        assert_eq!(build_s(&og, Elem::ZERO).unwrap_err(), Error::ZeroSqueeze);
        assert!(build_s(&og, Elem::ONE).unwrap().max_diff(&OperatorMatrix::identity(&og)).unwrap() == 0.0);
    }

    #[test]
    fn json_round_trip() {
        let (f, _) = setup(2, 3);
        let rot = canonical_rotation_set(&f, None).unwrap();
        let h: Vec<Elem> = (0..8).map(|c| if c == 0 { Elem::ZERO } else { Elem(((c * 3) % 8) as u16) }).collect();
        let shifted = shifted_rotation_set(&rot, &h).unwrap();
        for r in [&rot, &shifted] {
            let v = r.to_json();
            let back = RotationSet::from_json(&f, &v).unwrap();
            assert_eq!(&back, r);
            assert_eq!(back.to_json(), v);
        }
        let bad = json!({"kind": "shifted", "h": ["1", "0", "0", "0", "0", "0", "0", "0"]});
        assert_eq!(RotationSet::from_json(&f, &bad).unwrap_err(), Error::ShiftAtZero);
    }
}
