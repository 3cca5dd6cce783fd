//! State reconstruction from line probabilities.
//!
//! Writing `ρ = Σ f_{κ,λ} D(κ,λ)`, the sloped tomogram is
//! `ω(μ,ν) = Σ_κ f_{κ,μκ} χ(κν)` and the vertical one is
//! `ω̃(ν) = Σ_λ f_{0,λ} χ(−νλ)`; both invert with a single character sum.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand_distr::{Binomial, Distribution};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, GaloisField, Ordering};
use crate::pauli::{DensityMatrix, OperatorMatrix};
use crate::phase_space::{Line, MubFamily};
use crate::random::rng;
use crate::rotations::RotationSet;

/// Line probabilities for every sloped line and every vertical line.
#[derive(Clone, Debug, PartialEq)]
pub struct Tomogram {
    field: Arc<GaloisField>,
    sloped: Vec<Option<f64>>,
    vertical: Vec<Option<f64>>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

impl Tomogram {
    pub fn empty(field: &Arc<GaloisField>) -> Self {
        let d = field.d();
        Self { field: field.clone(), sloped: vec![None; d * d], vertical: vec![None; d], shots: None, seed: None }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn sloped(&self, mu: Elem, nu: Elem) -> Option<f64> {
        self.sloped[mu.code() * self.field.d() + nu.code()]
    }

    pub fn vertical(&self, k: Elem) -> Option<f64> {
        self.vertical[k.code()]
    }

    pub fn set_sloped(&mut self, mu: Elem, nu: Elem, p: f64) {
        let d = self.field.d();
        self.sloped[mu.code() * d + nu.code()] = Some(p);
    }

    pub fn set_vertical(&mut self, k: Elem, p: f64) {
        self.vertical[k.code()] = Some(p);
    }

    pub fn get(&self, line: &Line) -> Option<f64> {
        match *line {
            Line::Sloped { mu, nu } => self.sloped(mu, nu),
            Line::Vertical { nu } => self.vertical(nu),
        }
    }

    fn first_missing(&self) -> Option<String> {
        let f = &self.field;
        for mu in f.elements() {
            for nu in f.elements() {
                if self.sloped(mu, nu).is_none() {
                    return Some(format!("sloped entry mu={} nu={}", f.format(mu), f.format(nu)));
                }
            }
        }
        f.elements().find(|&k| self.vertical(k).is_none()).map(|k| format!("vertical entry {}", f.format(k)))
    }

    pub fn is_complete(&self) -> bool {
        self.first_missing().is_none()
    }

    /// Largest deviation from normalization per basis (complete tomograms).
    pub fn normalization_error(&self) -> f64 {
        let f = &self.field;
        let mut worst = (self.vertical.iter().flatten().sum::<f64>() - 1.0).abs();
        for mu in f.elements() {
            let s: f64 = f.elements().filter_map(|nu| self.sloped(mu, nu)).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        let mut sloped = serde_json::Map::new();
        for mu in f.elements() {
            let row: BTreeMap<String, f64> =
                f.elements().filter_map(|nu| self.sloped(mu, nu).map(|p| (f.format(nu), p))).collect();
            sloped.insert(f.format(mu), json!(row));
        }
        let vertical: BTreeMap<String, f64> = f.elements().filter_map(|k| self.vertical(k).map(|p| (f.format(k), p))).collect();
        json!({ "sloped": sloped, "vertical": vertical, "shots": self.shots, "seed": self.seed })
    }

    /// Parse the JSON form; absent entries stay missing.
    pub fn from_json(field: &Arc<GaloisField>, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("tomogram: {m}"));
        let mut t = Tomogram::empty(field);
        if let Some(s) = v.get("sloped") {
            let rows = s.as_object().ok_or_else(|| bad("sloped must be an object"))?;
            for (mk, row) in rows {
                let mu = field.parse(mk)?;
                for (nk, p) in row.as_object().ok_or_else(|| bad("sloped rows must be objects"))? {
                    t.set_sloped(mu, field.parse(nk)?, p.as_f64().ok_or_else(|| bad("probabilities must be numbers"))?);
                }
            }
        }
        if let Some(s) = v.get("vertical") {
            for (kk, p) in s.as_object().ok_or_else(|| bad("vertical must be an object"))? {
                t.set_vertical(field.parse(kk)?, p.as_f64().ok_or_else(|| bad("probabilities must be numbers"))?);
            }
        }
        t.shots = v.get("shots").and_then(Value::as_u64);
        t.seed = v.get("seed").and_then(Value::as_u64);
        Ok(t)
    }
}

fn check_provenance(rho: &DensityMatrix, mubs: &MubFamily) -> Result<()> {
    if **rho.ordering() == **mubs.ordering() {
        Ok(())
    } else {
        Err(Error::ProvenanceMismatch)
    }
}

/// `ω(μ,ν) = ⟨ψ_ν^μ|ρ|ψ_ν^μ⟩`, `ω̃(κ) = ⟨κ̃|ρ|κ̃⟩`.
pub fn tomogram_of(rho: &DensityMatrix, mubs: &MubFamily) -> Result<Tomogram> {
    check_provenance(rho, mubs)?;
    let f = rho.ordering().field();
    let mut t = Tomogram::empty(f);
    for mu in f.elements() {
        for nu in f.elements() {
            t.set_sloped(mu, nu, rho.expectation(mubs.state(&Line::Sloped { mu, nu }))?);
        }
    }
    for k in f.elements() {
        t.set_vertical(k, rho.expectation(mubs.state(&Line::Vertical { nu: k }))?);
    }
    Ok(t)
}

/// `f_{κ,λ} = (1/d) Tr[D(κ,λ)† ρ]` from the matrix entries:
/// `f_{κ,λ} = (1/d) φ*(κ,λ) Σ_x χ(−κ(x+λ)) ρ_{x+λ,x}`.
pub fn displacement_coefficients(rho: &OperatorMatrix, rot: &RotationSet) -> Vec<C64> {
    let f = rho.ordering().field();
    let d = f.d();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for k in f.elements() {
        for l in f.elements() {
            let s: C64 = f
                .elements()
                .map(|x| {
                    let y = f.add(x, l);
                    f.character(f.neg(f.mul(k, y))).to_complex() * rho.get(y, x)
                })
                .sum();
            out[k.code() * d + l.code()] = rot.phi(k, l).conj().to_complex() * s / d as f64;
        }
    }
    out
}

/// Output of [`reconstruct`].
#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Symmetrized estimate `(ρ̂ + ρ̂†)/2`.
    pub rho: OperatorMatrix,
    /// `max |ρ̂ − ρ̂†|` before symmetrization.
    pub asymmetry: f64,
    /// Largest gap between `f_{0,0}` from the vertical tomogram and
    /// `(1/d) Σ_ν ω(μ,ν)` over all slopes.
    pub f00_discrepancy: f64,
}

impl Reconstruction {
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.rho.clone())
    }
}

/// Invert a complete tomogram.
pub fn reconstruct(t: &Tomogram, ord: &Arc<Ordering>, rot: &RotationSet) -> Result<Reconstruction> {
    if let Some(m) = t.first_missing() {
        return Err(Error::IncompleteTomogram(m));
    }
    let f = ord.field();
    if *t.field != **f {
        return Err(Error::MixedFields);
    }
    rot.check_field(f)?;
    let d = f.d();
    let inv_d = 1.0 / d as f64;
    let mut coef = vec![C64::new(0.0, 0.0); d * d];
    for k in f.nonzero() {
        let k_inv = f.inv_nz(k);
        for l in f.elements() {
            let mu = f.mul(k_inv, l);
            let s: C64 = f
                .elements()
                .map(|nu| f.character(f.neg(f.mul(k, nu))).to_complex() * t.sloped(mu, nu).unwrap())
                .sum();
            coef[k.code() * d + l.code()] = s * inv_d;
        }
    }
    for l in f.elements() {
        let s: C64 = f.elements().map(|nu| f.character(f.mul(nu, l)).to_complex() * t.vertical(nu).unwrap()).sum();
        coef[l.code()] = s * inv_d;
    }
    let f00 = coef[0].re;
    let f00_discrepancy = f
        .elements()
        .map(|mu| (f.elements().map(|nu| t.sloped(mu, nu).unwrap()).sum::<f64>() * inv_d - f00).abs())
        .fold(0.0, f64::max);

    // ⟨y|ρ|x⟩ = Σ_κ f_{κ,y−x} φ(κ,y−x) χ(κy)
    let m = DMatrix::from_fn(d, d, |i, j| {
        let y = ord.elem(i);
        let l = f.sub(y, ord.elem(j));
        f.elements()
            .map(|k| coef[k.code() * d + l.code()] * (rot.phi(k, l) * f.character(f.mul(k, y))).to_complex())
            .sum()
    });
    let raw = OperatorMatrix::new(ord.clone(), m)?;
    let asymmetry = raw.hermiticity_error();
    let rho = raw.add(&raw.adjoint())?.scale(C64::new(0.5, 0.0));
    Ok(Reconstruction { rho, asymmetry, f00_discrepancy })
}

/// Sample every basis multinomially with `shots` draws (conditional
/// binomials, one seeded generator per call).
pub fn simulate_counts(rho: &DensityMatrix, mubs: &MubFamily, shots: u64, seed: u64) -> Result<Tomogram> {
    if shots == 0 {
        return Err(Error::Parse("shots must be positive".into()));
    }
    if !rho.is_physical() {
        return Err(Error::NonPhysicalState(format!("minimum eigenvalue {:e}", rho.min_eigenvalue())));
    }
    let exact = tomogram_of(rho, mubs)?;
    let f = rho.ordering().field().clone();
    let mut g = rng(seed);
    let mut sample = |probs: Vec<f64>| -> Vec<f64> {
        let clipped: Vec<f64> = probs.iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let mut remaining_n = shots;
        let mut remaining_p = 1.0;
        let mut out = Vec::with_capacity(clipped.len());
        for (i, p) in clipped.iter().map(|p| p / total).enumerate() {
            let k = if i + 1 == clipped.len() || remaining_n == 0 {
                remaining_n
            } else {
                let q = (p / remaining_p).clamp(0.0, 1.0);
                Binomial::new(remaining_n, q).expect("valid binomial").sample(&mut g)
            };
            remaining_n -= k;
            remaining_p -= p;
            out.push(k as f64 / shots as f64);
        }
        out
    };
    let mut t = Tomogram::empty(&f);
    for mu in f.elements() {
        let freq = sample(f.elements().map(|nu| exact.sloped(mu, nu).unwrap()).collect());
        for (nu, p) in f.elements().zip(freq) {
            t.set_sloped(mu, nu, p);
        }
    }
    let freq = sample(f.elements().map(|k| exact.vertical(k).unwrap()).collect());
    for (k, p) in f.elements().zip(freq) {
        t.set_vertical(k, p);
    }
    t.shots = Some(shots);
    t.seed = Some(seed);
    Ok(t)
}

fn hermitian_eigen(op: &OperatorMatrix) -> (Vec<f64>, DMatrix<C64>) {
    let h = (op.matrix() + op.matrix().adjoint()) * C64::new(0.5, 0.0);
    let e = h.symmetric_eigen();
    (e.eigenvalues.iter().cloned().collect(), e.eigenvectors)
}

fn rebuild(ord: &Arc<Ordering>, vals: &[f64], vecs: &DMatrix<C64>) -> OperatorMatrix {
    let d = vals.len();
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(vals[i], 0.0) } else { C64::new(0.0, 0.0) });
    OperatorMatrix::new(ord.clone(), vecs * diag * vecs.adjoint()).expect("same dimension")
}

/// Nearest state by eigenvalue clipping followed by trace renormalization.
pub fn project_psd(op: &OperatorMatrix) -> Result<DensityMatrix> {
    let (vals, vecs) = hermitian_eigen(op);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let tr: f64 = clipped.iter().sum();
    if tr <= 0.0 {
        return Err(Error::NonPhysicalState("no positive eigenvalues".into()));
    }
    let scaled: Vec<f64> = clipped.iter().map(|v| v / tr).collect();
    DensityMatrix::new(rebuild(op.ordering(), &scaled, &vecs))
}

fn psd_sqrt(op: &OperatorMatrix) -> OperatorMatrix {
    let (vals, vecs) = hermitian_eigen(op);
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    rebuild(op.ordering(), &roots, &vecs)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let s = psd_sqrt(rho.op());
    let inner = s.mul(sigma.op())?.mul(&s)?;
    let (vals, _) = hermitian_eigen(&inner);
    let t: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(t * t)
}

/// One row of a shot-noise study.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ShotRow {
    pub shots: u64,
    pub fidelity: f64,
    pub raw_min_eigenvalue: f64,
    pub max_entry_error: f64,
}

/// Simulate, reconstruct, project and score for each shot count.
pub fn shot_study(rho: &DensityMatrix, mubs: &MubFamily, shots: &[u64], seed: u64) -> Result<Vec<ShotRow>> {
    let ord = rho.ordering();
    shots
        .iter()
        .map(|&n| {
            let t = simulate_counts(rho, mubs, n, seed)?;
            let rec = reconstruct(&t, ord, mubs.rotations())?;
            let raw = DensityMatrix::new(rec.rho.clone())?;
            let proj = project_psd(&rec.rho)?;
            Ok(ShotRow {
                shots: n,
                fidelity: fidelity(rho, &proj)?,
                raw_min_eigenvalue: raw.min_eigenvalue(),
                max_entry_error: rec.rho.max_diff(rho.op())?,
            })
        })
        .collect()
}

/// `max |ρ̂ − ρ|` after an exact round trip.
pub fn round_trip_error(rho: &DensityMatrix, mubs: &MubFamily) -> Result<f64> {
    let t = tomogram_of(rho, mubs)?;
    reconstruct(&t, rho.ordering(), mubs.rotations())?.rho.max_diff(rho.op())
}
