//! Phase space over GF(d) × GF(d): lines and striations, the kernel
//! `Δ(α,β) = (1/d) Σ χ(αλ − βκ) D(κ,λ)`, the Wigner map, line states, and
//! the enumeration of Wigner functions obtained from shifted rotation sets.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, GaloisField, Ordering};
use crate::pauli::{
    build_displacement, build_fourier, build_x, build_z, ordering_json, DensityMatrix, OperatorMatrix, StateVector, TOL,
};
use crate::random::rng;
use crate::rotations::{build_s, build_u, build_v, shifted_rotation_set, RotationSet};

/// Largest d for which all `d^{d-1}` shift functions are enumerated.
pub const MAX_ENUMERATION_D: usize = 8;

/// A line `β = μα + ν` or a vertical line `α = ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    Sloped { mu: Elem, nu: Elem },
    Vertical { nu: Elem },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Finite(Elem),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intersection {
    Point(Elem, Elem),
    Parallel,
    Identical,
}

impl Line {
    pub fn slope(&self) -> Slope {
        match *self {
            Line::Sloped { mu, .. } => Slope::Finite(mu),
            Line::Vertical { .. } => Slope::Infinite,
        }
    }

    /// Coefficients of `ζα + ηβ = ϑ`.
    fn coefficients(&self, f: &GaloisField) -> (Elem, Elem, Elem) {
        match *self {
            Line::Sloped { mu, nu } => (f.neg(mu), Elem::ONE, nu),
            Line::Vertical { nu } => (Elem::ONE, Elem::ZERO, nu),
        }
    }

    pub fn contains(&self, f: &GaloisField, a: Elem, b: Elem) -> bool {
        match *self {
            Line::Sloped { mu, nu } => b == f.add(f.mul(mu, a), nu),
            Line::Vertical { nu } => a == nu,
        }
    }

    pub fn label(&self, f: &GaloisField) -> String {
        match *self {
            Line::Sloped { mu, nu } => format!("beta={}*alpha+{}", f.format(mu), f.format(nu)),
            Line::Vertical { nu } => format!("alpha={}", f.format(nu)),
        }
    }
}

/// The d points of a line, in element-code order of the free coordinate.
pub fn line_points(f: &GaloisField, line: &Line) -> Vec<(Elem, Elem)> {
    match *line {
        Line::Sloped { mu, nu } => f.elements().map(|a| (a, f.add(f.mul(mu, a), nu))).collect(),
        Line::Vertical { nu } => f.elements().map(|b| (nu, b)).collect(),
    }
}

/// Intersection of `ζα + ηβ = ϑ` and `ζ′α + η′β = ϑ′` in closed form.
pub fn intersect(f: &GaloisField, l1: &Line, l2: &Line) -> Intersection {
    let (z1, e1, t1) = l1.coefficients(f);
    let (z2, e2, t2) = l2.coefficients(f);
    let det = f.sub(f.mul(z2, e1), f.mul(z1, e2));
    if det.is_zero() {
        return if l1 == l2 { Intersection::Identical } else { Intersection::Parallel };
    }
    let a = f.mul(f.sub(f.mul(e1, t2), f.mul(e2, t1)), f.inv_nz(det));
    let b = f.mul(f.sub(f.mul(z1, t2), f.mul(z2, t1)), f.inv_nz(f.neg(det)));
    Intersection::Point(a, b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Striation {
    pub slope: Slope,
    pub lines: Vec<Line>,
}

/// All d+1 striations: finite slopes in element-code order, then vertical.
pub fn striation_table(f: &GaloisField) -> Vec<Striation> {
    let mut out: Vec<Striation> = f
        .elements()
        .map(|mu| Striation { slope: Slope::Finite(mu), lines: f.elements().map(|nu| Line::Sloped { mu, nu }).collect() })
        .collect();
    out.push(Striation { slope: Slope::Infinite, lines: f.elements().map(|nu| Line::Vertical { nu }).collect() });
    out
}

/// Nonzero displacement labels on the ray of the given slope.
pub fn ray_operator_labels(f: &GaloisField, slope: Slope) -> Vec<(Elem, Elem)> {
    match slope {
        Slope::Finite(mu) => f.nonzero().map(|a| (a, f.mul(mu, a))).collect(),
        Slope::Infinite => f.nonzero().map(|b| (Elem::ZERO, b)).collect(),
    }
}

/// A real (or complex, for non-Hermitian operators) function on phase space.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    ord: Arc<Ordering>,
    values: Vec<C64>,
}

impl WignerGrid {
    pub fn from_fn(ord: &Arc<Ordering>, f: impl Fn(Elem, Elem) -> C64) -> Self {
        let field = ord.field();
        let d = ord.d();
        let mut values = vec![C64::new(0.0, 0.0); d * d];
        for a in field.elements() {
            for b in field.elements() {
                values[a.code() * d + b.code()] = f(a, b);
            }
        }
        Self { ord: ord.clone(), values }
    }

    pub fn ordering(&self) -> &Arc<Ordering> {
        &self.ord
    }

    pub fn d(&self) -> usize {
        self.ord.d()
    }

    /// Real part of `W(α,β)`.
    #[inline]
    pub fn get(&self, a: Elem, b: Elem) -> f64 {
        self.values[a.code() * self.d() + b.code()].re
    }

    #[inline]
    pub fn get_complex(&self, a: Elem, b: Elem) -> C64 {
        self.values[a.code() * self.d() + b.code()]
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn total(&self) -> C64 {
        self.values.iter().sum()
    }

    pub fn max_diff(&self, other: &WignerGrid) -> Result<f64> {
        if *self.ord != *other.ord {
            return Err(Error::MixedOrdering);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `(1/d) Σ` of W over the points of a line.
    pub fn line_sum(&self, line: &Line) -> f64 {
        let f = self.ord.field();
        line_points(f, line).iter().map(|&(a, b)| self.get(a, b)).sum::<f64>() / self.d() as f64
    }

    /// Probability of `|α̃⟩`: `(1/d) Σ_β W(α,β)`.
    pub fn marginal_alpha(&self, a: Elem) -> f64 {
        self.line_sum(&Line::Vertical { nu: a })
    }

    /// Probability of `|β⟩`: `(1/d) Σ_α W(α,β)`.
    pub fn marginal_beta(&self, b: Elem) -> f64 {
        self.line_sum(&Line::Sloped { mu: Elem::ZERO, nu: b })
    }

    /// Line sums for every line, grouped by striation.
    pub fn line_sum_table(&self) -> Vec<(Line, f64)> {
        striation_table(self.ord.field()).iter().flat_map(|s| s.lines.iter().map(|l| (*l, self.line_sum(l)))).collect()
    }

    /// Header row of α labels, then one row per β (both in ordering order).
    pub fn to_csv(&self) -> String {
        let labels = self.ord.labels();
        let mut out = String::from("beta\\alpha,");
        out.push_str(&labels.join(","));
        out.push('\n');
        for (j, lb) in labels.iter().enumerate() {
            let b = self.ord.elem(j);
            let row: Vec<String> = (0..self.d()).map(|i| fmt_real(self.get(self.ord.elem(i), b))).collect();
            out.push_str(lb);
            out.push(',');
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, rot: Option<&RotationSet>) -> Value {
        let d = self.d();
        let rows: Vec<Vec<f64>> =
            (0..d).map(|j| (0..d).map(|i| clean(self.get(self.ord.elem(i), self.ord.elem(j)))).collect()).collect();
        let mut v = json!({ "dim": d, "ordering": ordering_json(&self.ord), "rows_beta_cols_alpha": rows });
        if let Some(r) = rot {
            v["rotations"] = r.to_json();
        }
        v
    }
}

// rounding noise below 1e-12 is printed as zero so exports are stable
fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn fmt_real(x: f64) -> String {
    format!("{}", clean(x))
}

/// `G[λ][s] = Σ_κ χ(κs) φ(κ,λ)`, indexed by element codes.
fn phase_sums(rot: &RotationSet) -> Vec<C64> {
    let f = rot.field();
    let d = f.d();
    let mut g = vec![C64::new(0.0, 0.0); d * d];
    for l in f.elements() {
        for s in f.elements() {
            g[l.code() * d + s.code()] = f.elements().map(|k| (f.character(f.mul(k, s)) * rot.phi(k, l)).to_complex()).sum();
        }
    }
    g
}

/// The d² phase-point operators of one rotation set.
#[derive(Clone, Debug)]
pub struct KernelSet {
    ord: Arc<Ordering>,
    rot: RotationSet,
    kernels: Vec<OperatorMatrix>,
}

/// `Δ(α,β)` for every phase point; entries are
/// `⟨y|Δ(α,β)|x⟩ = (1/d) χ(αλ) Σ_κ χ(κ(y−β)) φ(κ,λ)` with `λ = y − x`.
pub fn build_kernel(ord: &Arc<Ordering>, rot: &RotationSet) -> Result<KernelSet> {
    rot.check_field(ord.field())?;
    let f = ord.field();
    let d = f.d();
    let g = phase_sums(rot);
    let inv_d = 1.0 / d as f64;
    let kernels: Vec<OperatorMatrix> = (0..d * d)
        .into_par_iter()
        .map(|idx| {
            let a = Elem((idx / d) as u16);
            let b = Elem((idx % d) as u16);
            let m = DMatrix::from_fn(d, d, |i, j| {
                let y = ord.elem(i);
                let x = ord.elem(j);
                let l = f.sub(y, x);
                f.character(f.mul(a, l)).to_complex() * g[l.code() * d + f.sub(y, b).code()] * inv_d
            });
            OperatorMatrix::new(ord.clone(), m).expect("kernel has the ordering's dimension")
        })
        .collect();
    Ok(KernelSet { ord: ord.clone(), rot: rot.clone(), kernels })
}

impl KernelSet {
    pub fn get(&self, a: Elem, b: Elem) -> &OperatorMatrix {
        &self.kernels[a.code() * self.ord.d() + b.code()]
    }

    pub fn ordering(&self) -> &Arc<Ordering> {
        &self.ord
    }

    pub fn rotations(&self) -> &RotationSet {
        &self.rot
    }

    pub fn d(&self) -> usize {
        self.ord.d()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovarianceMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl CovarianceMode {
    /// Exhaustive for d ≤ 4, otherwise 200 seeded tuples.
    pub fn default_for(d: usize) -> Self {
        if d <= 4 {
            CovarianceMode::Exhaustive
        } else {
            CovarianceMode::Sampled { count: 200, seed: 0x5717 }
        }
    }
}

/// Maximum deviations for the four kernel postulates.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SwReport {
    pub d: usize,
    pub hermiticity: f64,
    pub normalization: f64,
    pub covariance: f64,
    pub covariance_tuples: usize,
    pub orthogonality: f64,
}

impl SwReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.hermiticity < tol && self.normalization < tol && self.covariance < tol && self.orthogonality < tol
    }

    pub fn worst(&self) -> f64 {
        self.hermiticity.max(self.normalization).max(self.covariance).max(self.orthogonality)
    }
}

pub fn sw_report(k: &KernelSet, mode: CovarianceMode) -> Result<SwReport> {
    let f = k.ord.field();
    let d = f.d();
    let ord = &k.ord;
    let hermiticity = k.kernels.iter().map(|m| m.hermiticity_error()).fold(0.0, f64::max);

    let mut sum = OperatorMatrix::zeros(ord);
    for m in &k.kernels {
        sum = sum.add(m)?;
    }
    let normalization = sum.scale(C64::new(1.0 / d as f64, 0.0)).max_diff(&OperatorMatrix::identity(ord))?;

    let tuples: Vec<(Elem, Elem, Elem, Elem)> = match mode {
        CovarianceMode::Exhaustive => {
            let mut v = Vec::with_capacity(d.pow(4));
            for kk in f.elements() {
                for l in f.elements() {
                    for a in f.elements() {
                        for b in f.elements() {
                            v.push((kk, l, a, b));
                        }
                    }
                }
            }
            v
        }
        CovarianceMode::Sampled { count, seed } => {
            let mut r = rng(seed);
            let mut pick = || Elem(r.random_range(0..d) as u16);
            (0..count).map(|_| (pick(), pick(), pick(), pick())).collect()
        }
    };
    let covariance = tuples
        .par_iter()
        .map(|&(kk, l, a, b)| -> Result<f64> {
            let dis = build_displacement(ord, kk, l, &k.rot)?;
            dis.conjugate(k.get(a, b))?.max_diff(k.get(f.add(a, kk), f.add(b, l)))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let flat: Vec<Vec<C64>> = k.kernels.iter().map(|m| m.matrix().iter().cloned().collect()).collect();
    let orthogonality = (0..d * d)
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for (j, fj) in flat.iter().enumerate() {
                // Tr[Δ_i Δ_j†] = Σ (Δ_i)_{rc} conj((Δ_j)_{rc})
                let t: C64 = flat[i].iter().zip(fj).map(|(x, y)| x * y.conj()).sum();
                let target = if i == j { d as f64 } else { 0.0 };
                worst = worst.max((t - C64::new(target, 0.0)).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    Ok(SwReport { d, hermiticity, normalization, covariance, covariance_tuples: tuples.len(), orthogonality })
}

/// `W_f(α,β) = Tr[f Δ(α,β)]`.
pub fn wigner_map(op: &OperatorMatrix, k: &KernelSet) -> Result<WignerGrid> {
    if op.dim() != k.d() {
        return Err(Error::DimensionMismatch(k.d(), op.dim()));
    }
    if **op.ordering() != *k.ord {
        return Err(Error::MixedOrdering);
    }
    let d = k.d();
    let values = k.kernels.iter().map(|m| op.trace_product(m)).collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(values.len(), d * d);
    Ok(WignerGrid { ord: k.ord.clone(), values })
}

/// `f = (1/d) Σ W_f(α,β) Δ(α,β)`.
pub fn inverse_map(w: &WignerGrid, k: &KernelSet) -> Result<OperatorMatrix> {
    if w.d() != k.d() {
        return Err(Error::DimensionMismatch(k.d(), w.d()));
    }
    if *w.ord != *k.ord {
        return Err(Error::MixedOrdering);
    }
    let d = k.d();
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for (wv, m) in w.values.iter().zip(&k.kernels) {
        acc += m.matrix() * *wv;
    }
    OperatorMatrix::new(k.ord.clone(), acc / C64::new(d as f64, 0.0))
}

/// The constant c in `Tr(fg) = c Σ W_f W_g`, measured on the given operators.
pub fn overlap_constant(fop: &OperatorMatrix, gop: &OperatorMatrix, k: &KernelSet) -> Result<C64> {
    let wf = wigner_map(fop, k)?;
    let wg = wigner_map(gop, k)?;
    let s: C64 = wf.values.iter().zip(&wg.values).map(|(a, b)| a * b).sum();
    Ok(fop.trace_product(gop)? / s)
}

/// Line states: `|ψ_ν^μ⟩ = X_ν V_μ|0⟩` and the vertical family `Z_ν F|0⟩`.
#[derive(Clone, Debug)]
pub struct MubFamily {
    ord: Arc<Ordering>,
    rot: RotationSet,
    sloped: Vec<StateVector>,
    vertical: Vec<StateVector>,
    eigen: Vec<C64>,
}

pub fn build_mubs(ord: &Arc<Ordering>, rot: &RotationSet) -> Result<MubFamily> {
    rot.check_field(ord.field())?;
    let f = ord.field();
    let d = f.d();
    let zero = StateVector::basis(ord, Elem::ZERO);
    let mut sloped = Vec::with_capacity(d * d);
    let mut eigen = Vec::with_capacity(d * d * d);
    for mu in f.elements() {
        let base = build_v(ord, rot, mu)?.apply(&zero)?;
        for nu in f.elements() {
            let s = build_x(ord, nu).apply(&base)?;
            for a in f.elements() {
                let op = build_z(ord, a).mul(&build_x(ord, f.mul(mu, a)))?;
                eigen.push(s.inner(&op.apply(&s)?)?);
            }
            sloped.push(s);
        }
    }
    let vac = build_fourier(ord).apply(&zero)?;
    let vertical = f.elements().map(|nu| build_z(ord, nu).apply(&vac)).collect::<Result<Vec<_>>>()?;
    Ok(MubFamily { ord: ord.clone(), rot: rot.clone(), sloped, vertical, eigen })
}

/// Largest deviations from unbiasedness and from orthonormality.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MubReport {
    pub cross: f64,
    pub orthonormal: f64,
}

impl MubFamily {
    pub fn ordering(&self) -> &Arc<Ordering> {
        &self.ord
    }

    pub fn rotations(&self) -> &RotationSet {
        &self.rot
    }

    pub fn state(&self, line: &Line) -> &StateVector {
        let d = self.ord.d();
        match *line {
            Line::Sloped { mu, nu } => &self.sloped[mu.code() * d + nu.code()],
            Line::Vertical { nu } => &self.vertical[nu.code()],
        }
    }

    /// Eigenvalue of `Z_α X_{μα}` on `|ψ_ν^μ⟩`, computed as an expectation.
    pub fn eigenvalue(&self, mu: Elem, nu: Elem, a: Elem) -> C64 {
        let d = self.ord.d();
        self.eigen[(mu.code() * d + nu.code()) * d + a.code()]
    }

    /// The d bases, one per striation, as lists of states.
    pub fn bases(&self) -> Vec<Vec<&StateVector>> {
        striation_table(self.ord.field()).iter().map(|s| s.lines.iter().map(|l| self.state(l)).collect()).collect()
    }

    pub fn report(&self) -> Result<MubReport> {
        let d = self.ord.d() as f64;
        let bases = self.bases();
        let mut cross: f64 = 0.0;
        let mut orthonormal: f64 = 0.0;
        for (i, bi) in bases.iter().enumerate() {
            for (j, bj) in bases.iter().enumerate().skip(i) {
                for (u, su) in bi.iter().enumerate() {
                    for (v, sv) in bj.iter().enumerate() {
                        let ip = su.inner(sv)?;
                        if i == j {
                            let target = if u == v { 1.0 } else { 0.0 };
                            orthonormal = orthonormal.max((ip - C64::new(target, 0.0)).norm());
                        } else {
                            cross = cross.max((ip.norm_sqr() - 1.0 / d).abs());
                        }
                    }
                }
            }
        }
        Ok(MubReport { cross, orthonormal })
    }
}

/// Largest violation of `(1/d) Σ_line W = ⟨ψ_line|ρ|ψ_line⟩` over all lines.
pub fn verify_line_identity(rho: &DensityMatrix, k: &KernelSet, mubs: &MubFamily) -> Result<f64> {
    if k.rot != mubs.rot {
        return Err(Error::ProvenanceMismatch);
    }
    let w = wigner_map(rho.op(), k)?;
    let mut worst: f64 = 0.0;
    for (line, s) in w.line_sum_table() {
        worst = worst.max((s - rho.expectation(mubs.state(&line))?).abs());
    }
    Ok(worst)
}

/// Direct evaluation of
/// `W(α,β) = (1/d) Σ_{γ,μ,ν} χ(γ(ν−β) + α(ν−μ)) φ(γ,ν−μ) ρ_{μν}`.
pub fn wigner_of_density(rho: &DensityMatrix, rot: &RotationSet) -> Result<WignerGrid> {
    let ord = rho.ordering();
    rot.check_field(ord.field())?;
    let f = ord.field();
    let inv_d = 1.0 / f.d() as f64;
    let entries: Vec<(Elem, Elem, C64)> = f
        .elements()
        .flat_map(|m| f.elements().map(move |n| (m, n)))
        .map(|(m, n)| (m, n, rho.get(m, n)))
        .filter(|e| e.2.norm() > 0.0)
        .collect();
    Ok(WignerGrid::from_fn(ord, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for &(m, n, r) in &entries {
            let dn = f.sub(n, m);
            for g in f.elements() {
                let ph = f.character(f.add(f.mul(g, f.sub(n, b)), f.mul(a, dn))) * rot.phi(g, dn);
                acc += ph.to_complex() * r;
            }
        }
        acc * inv_d
    }))
}

/// Wigner function built from the set shifted by `h` (relative to `rot`).
pub fn alternate_wigner(rho: &DensityMatrix, rot: &RotationSet, h: &[Elem]) -> Result<WignerGrid> {
    wigner_of_density(rho, &shifted_rotation_set(rot, h)?)
}

/// Prediction for a constant shift `h(μ) = κ` (μ ≠ 0):
/// `W′(α,β) = W(α,β+κ) − ρ_{β+κ,β+κ} + ρ_{β,β}`.
pub fn constant_shift_prediction(rho: &DensityMatrix, w: &WignerGrid, kappa: Elem) -> WignerGrid {
    let f = w.ord.field().clone();
    WignerGrid::from_fn(&w.ord, |a, b| {
        let bk = f.add(b, kappa);
        C64::new(w.get(a, bk) - rho.get(bk, bk).re + rho.get(b, b).re, 0.0)
    })
}

/// Prediction for a linear shift `h(ξ) = κξ`:
/// `W′(α,β) = W(α−κ,β) − p(α−κ) + p(α)` with `p` the conjugate-basis marginal.
pub fn linear_shift_prediction(w: &WignerGrid, kappa: Elem) -> WignerGrid {
    let f = w.ord.field().clone();
    WignerGrid::from_fn(&w.ord, |a, b| {
        let ak = f.sub(a, kappa);
        C64::new(w.get(ak, b) - w.marginal_alpha(ak) + w.marginal_alpha(a), 0.0)
    })
}

/// Shift function with index `i`: `h(e)` for the nonzero element with code
/// `c` is base-d digit `c−1` of `i`.
pub fn shift_from_index(d: usize, mut i: u64) -> Vec<Elem> {
    let mut h = vec![Elem::ZERO; d];
    for slot in h.iter_mut().skip(1) {
        *slot = Elem((i % d as u64) as u16);
        i /= d as u64;
    }
    h
}

/// Condition-based certificate for char-2 states with real amplitudes.
///
/// A pair `μ ≠ ν` with `ρ_{μν} ≠ 0` and `γ ≠ 0` with `tr(γ(μ+ν)) = 0` makes
/// the grid depend on the bit `tr(γ h(γ^{-1}(μ+ν)))`; all other terms are
/// blind to `h`. The predicted number of grids is `2^{Σ_s rank_s}` where
/// `rank_s` is the GF(2)-rank of the γ's attached to slot `s`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct NwCertificate {
    pub conditions: Vec<(String, String)>,
    pub slot_ranks: BTreeMap<String, usize>,
    pub predicted: u64,
    #[serde(skip)]
    relevant: Vec<(Elem, Elem)>,
}

impl NwCertificate {
    /// The bits `tr(γ h(s))` that distinguish grids.
    pub fn signature(&self, f: &GaloisField, h: &[Elem]) -> Vec<u8> {
        self.relevant.iter().map(|&(g, s)| f.trace(f.mul(g, h[s.code()])) as u8).collect()
    }
}

fn gf2_rank(f: &GaloisField, elems: &[Elem]) -> usize {
    let mut rows: Vec<u32> =
        elems.iter().map(|&e| f.coeffs(e).iter().enumerate().fold(0u32, |acc, (i, &c)| acc | (c << i))).collect();
    let mut rank = 0;
    for bit in 0..f.n() {
        if let Some(pos) = rows.iter().position(|&r| r >> bit & 1 == 1) {
            let pivot = rows.swap_remove(pos);
            for r in rows.iter_mut() {
                if *r >> bit & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// `None` unless the field has characteristic 2 and the state is real.
pub fn nw_certificate(state: &StateVector, rot: &RotationSet) -> Option<NwCertificate> {
    let f = rot.field();
    if !f.is_even() || state.vector().iter().any(|z| z.im.abs() > TOL) {
        return None;
    }
    let support: Vec<Elem> = state.support().into_iter().map(|(e, _)| e).collect();
    let mut relevant = BTreeSet::new();
    let mut conditions = Vec::new();
    for (i, &m) in support.iter().enumerate() {
        for &n in &support[i + 1..] {
            let dl = f.add(m, n);
            for g in f.nonzero() {
                if f.trace(f.mul(g, dl)) == 0 {
                    let s = f.mul(f.inv_nz(g), dl);
                    if relevant.insert((g, s)) {
                        conditions.push((f.format(g), f.format(s)));
                    }
                }
            }
        }
    }
    let mut by_slot: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    for &(g, s) in &relevant {
        by_slot.entry(s).or_default().push(g);
    }
    let slot_ranks: BTreeMap<String, usize> = by_slot.iter().map(|(s, gs)| (f.format(*s), gf2_rank(f, gs))).collect();
    let predicted = 1u64 << slot_ranks.values().sum::<usize>();
    Some(NwCertificate { conditions, slot_ranks, predicted, relevant: relevant.into_iter().collect() })
}

/// One equivalence class of shift functions.
#[derive(Clone, Debug)]
pub struct WignerClass {
    /// The lowest-index shift function of the class.
    pub representative: Vec<Elem>,
    pub size: u64,
    pub grid: WignerGrid,
    pub signatures: BTreeSet<Vec<u8>>,
}

#[derive(Clone, Debug)]
pub struct DistinctReport {
    pub total_structures: u64,
    pub classes: Vec<WignerClass>,
    pub certificate: Option<NwCertificate>,
}

impl DistinctReport {
    pub fn distinct(&self) -> usize {
        self.classes.len()
    }

    /// Every class carries exactly one signature and no two share one.
    pub fn certificate_matches(&self) -> Option<bool> {
        let cert = self.certificate.as_ref()?;
        let mut seen = BTreeSet::new();
        let one_each = self.classes.iter().all(|c| c.signatures.len() == 1 && seen.insert(c.signatures.iter().next().cloned()));
        Some(one_each && cert.predicted == self.classes.len() as u64)
    }

    pub fn to_json(&self) -> Value {
        let f = self.classes.first().map(|c| c.grid.ord.field().clone());
        let reps: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                let f = f.as_ref().unwrap();
                json!(c.representative.iter().map(|&e| f.format(e)).collect::<Vec<_>>())
            })
            .collect();
        json!({
            "total_structures": self.total_structures,
            "distinct": self.distinct(),
            "representatives": reps,
            "class_sizes": self.classes.iter().map(|c| c.size).collect::<Vec<_>>(),
            "certificate": self.certificate,
        })
    }
}

// (grid, representative index, class size, signatures)
type ClassAcc = (Vec<f64>, u64, u64, BTreeSet<Vec<u8>>);

struct Partial {
    reps: Vec<ClassAcc>,
    scratch: Vec<f64>,
}

const GRID_TOL: f64 = 1e-9;

fn grids_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < GRID_TOL)
}

/// Enumerate all `d^{d−1}` shift functions and group the resulting grids.
///
/// The grid is `W′ = Σ_{γ,δ} t(γ,δ) B_{γ,δ}` with
/// `B_{γ,δ}(α,β) = (1/d) Σ_μ χ(γ(μ+δ−β) + αδ) φ(γ,δ) ρ_{μ,μ+δ}` and
/// `t(γ,δ) = χ(−γ h(γ^{-1}δ))` (1 when γ or δ vanishes), so only the
/// nonzero differences δ of the state's support enter.
pub fn count_distinct_wigner(state: &StateVector, rot: &RotationSet) -> Result<DistinctReport> {
    let ord = state.ordering().clone();
    rot.check_field(ord.field())?;
    let f = ord.field().clone();
    let d = f.d();
    if d > MAX_ENUMERATION_D {
        return Err(Error::TooLarge(d, MAX_ENUMERATION_D));
    }
    let rho = DensityMatrix::pure(state);
    let inv_d = 1.0 / d as f64;
    let entries: Vec<(Elem, Elem, C64)> = f
        .elements()
        .flat_map(|m| f.elements().map(move |n| (m, n)))
        .map(|(m, n)| (m, n, rho.get(m, n)))
        .filter(|e| e.2.norm() > TOL)
        .collect();
    let deltas: BTreeSet<Elem> = entries.iter().map(|&(m, n, _)| f.sub(n, m)).collect();

    let term = |g: Elem, dl: Elem| -> Vec<C64> {
        let mut grid = vec![C64::new(0.0, 0.0); d * d];
        for &(_, n, r) in entries.iter().filter(|e| f.sub(e.1, e.0) == dl) {
            for a in f.elements() {
                for b in f.elements() {
                    let ph = f.character(f.add(f.mul(g, f.sub(n, b)), f.mul(a, dl))) * rot.phi(g, dl);
                    grid[a.code() * d + b.code()] += ph.to_complex() * r * inv_d;
                }
            }
        }
        grid
    };

    let mut base = vec![0.0f64; d * d];
    // (slot index, t-values per h(slot), B grid)
    let mut affected: Vec<(usize, Vec<C64>, Vec<C64>)> = Vec::new();
    for &dl in &deltas {
        for g in f.elements() {
            let b = term(g, dl);
            if g.is_zero() || dl.is_zero() {
                for (x, y) in base.iter_mut().zip(&b) {
                    *x += y.re;
                }
            } else {
                let slot = f.mul(f.inv_nz(g), dl);
                let t: Vec<C64> = f.elements().map(|hv| f.character(f.neg(f.mul(g, hv))).to_complex()).collect();
                affected.push((slot.code(), t, b));
            }
        }
    }

    let certificate = nw_certificate(state, rot);
    let total = (d as u64).pow(d as u32 - 1);
    let partial = (0..total)
        .into_par_iter()
        .fold(
            || Partial { reps: Vec::new(), scratch: vec![0.0; d * d] },
            |mut acc, i| {
                let h = shift_from_index(d, i);
                acc.scratch.copy_from_slice(&base);
                for (slot, t, b) in &affected {
                    let tv = t[h[*slot].code()];
                    for (x, y) in acc.scratch.iter_mut().zip(b) {
                        *x += tv.re * y.re - tv.im * y.im;
                    }
                }
                let sig = certificate.as_ref().map(|c| c.signature(&f, &h));
                match acc.reps.iter_mut().find(|r| grids_equal(&r.0, &acc.scratch)) {
                    Some(r) => {
                        r.1 += 1;
                        r.2 = r.2.min(i);
                        if let Some(s) = sig {
                            r.3.insert(s);
                        }
                    }
                    None => {
                        let sigs = sig.into_iter().collect();
                        acc.reps.push((acc.scratch.clone(), 1, i, sigs));
                    }
                }
                acc
            },
        )
        .reduce(
            || Partial { reps: Vec::new(), scratch: Vec::new() },
            |mut a, b| {
                for rep in b.reps {
                    match a.reps.iter_mut().find(|r| grids_equal(&r.0, &rep.0)) {
                        Some(r) => {
                            r.1 += rep.1;
                            r.2 = r.2.min(rep.2);
                            r.3.extend(rep.3);
                        }
                        None => a.reps.push(rep),
                    }
                }
                a
            },
        );

    let mut reps = partial.reps;
    reps.sort_by_key(|r| r.2);
    let classes = reps
        .into_iter()
        .map(|(grid, size, first, signatures)| {
            let values = grid.into_iter().map(|x| C64::new(x, 0.0)).collect();
            WignerClass {
                representative: shift_from_index(d, first),
                size,
                grid: WignerGrid { ord: ord.clone(), values },
                signatures,
            }
        })
        .collect();
    Ok(DistinctReport { total_structures: total, classes, certificate })
}

/// A unitary whose action on W is checked against a relabeling of phase space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    V(Elem),
    U(Elem),
    S(Elem),
}

/// Odd characteristic only. Returns the largest deviation of
/// `W_{TρT†}` from the relabeled grid:
/// `V_μ: W(α, β−μα)`, `U_μ: W(α+μβ, β)`, `S_ξ: W(ξ^{-1}α, ξβ)`.
pub fn covariant_transform_check(rho: &DensityMatrix, rot: &RotationSet, which: Transform) -> Result<f64> {
    let ord = rho.ordering();
    let f = ord.field().clone();
    if f.is_even() {
        return Err(Error::EvenCharacteristic);
    }
    let op = transform_operator(ord, rot, which)?;
    let k = build_kernel(ord, rot)?;
    let w = wigner_map(rho.op(), &k)?;
    let moved = wigner_map(&op.conjugate(rho.op())?, &k)?;
    let expected = WignerGrid::from_fn(ord, |a, b| match which {
        Transform::V(mu) => w.get_complex(a, f.sub(b, f.mul(mu, a))),
        Transform::U(mu) => w.get_complex(f.add(a, f.mul(mu, b)), b),
        Transform::S(xi) => w.get_complex(f.mul(f.inv_nz(xi), a), f.mul(xi, b)),
    });
    moved.max_diff(&expected)
}

pub fn transform_operator(ord: &Arc<Ordering>, rot: &RotationSet, which: Transform) -> Result<OperatorMatrix> {
    match which {
        Transform::V(mu) => build_v(ord, rot, mu),
        Transform::U(mu) => build_u(ord, rot, mu),
        Transform::S(xi) => build_s(ord, xi),
    }
}

/// The product `V_{−ξ(ξ−1)μ^{-1}} U_{ξ^{-1}μ} V_{(ξ−1)μ^{-1}} U_{−μ}`,
/// which acts on Wigner functions exactly like `S_{ξ^{-1}}`.
pub fn squeeze_composition(ord: &Arc<Ordering>, rot: &RotationSet, xi: Elem, mu: Elem) -> Result<OperatorMatrix> {
    let f = ord.field();
    if f.is_even() {
        return Err(Error::EvenCharacteristic);
    }
    if xi.is_zero() {
        return Err(Error::ZeroSqueeze);
    }
    let mu_inv = f.inv(mu)?;
    let xm1 = f.sub(xi, Elem::ONE);
    let v1 = build_v(ord, rot, f.neg(f.mul(xi, f.mul(xm1, mu_inv))))?;
    let u1 = build_u(ord, rot, f.mul(f.inv_nz(xi), mu))?;
    let v2 = build_v(ord, rot, f.mul(xm1, mu_inv))?;
    let u2 = build_u(ord, rot, f.neg(mu))?;
    v1.mul(&u1)?.mul(&v2)?.mul(&u2)
}

/// Largest difference between the grids of `MρM†` (M the composition above)
/// and `S_{ξ^{-1}} ρ S_{ξ^{-1}}†`.
pub fn squeeze_composition_check(rho: &DensityMatrix, rot: &RotationSet, xi: Elem, mu: Elem) -> Result<f64> {
    let ord = rho.ordering();
    let m = squeeze_composition(ord, rot, xi, mu)?;
    let s = build_s(ord, ord.field().inv(xi)?)?;
    let k = build_kernel(ord, rot)?;
    wigner_map(&m.conjugate(rho.op())?, &k)?.max_diff(&wigner_map(&s.conjugate(rho.op())?, &k)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, ordering, OrderStrategy};
    use crate::pauli::{build_x, build_z};
    use crate::random::{random_density, random_hermitian};
    use crate::rotations::canonical_rotation_set;

    fn setup(p: u32, n: u32) -> (Arc<GaloisField>, Arc<Ordering>, RotationSet) {
        let f = make_field(p, n, None).unwrap();
        let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
        let r = canonical_rotation_set(&f, None).unwrap();
        (f, o, r)
    }

    #[test]
    fn axes_meet_at_origin() {
        let (f, _, _) = setup(2, 2);
        let h = Line::Sloped { mu: Elem::ZERO, nu: Elem::ZERO };
        let v = Line::Vertical { nu: Elem::ZERO };
        assert_eq!(intersect(&f, &h, &v), Intersection::Point(Elem::ZERO, Elem::ZERO));
        let l2 = Line::Sloped { mu: Elem::ZERO, nu: Elem::ONE };
        assert_eq!(intersect(&f, &h, &l2), Intersection::Parallel);
        assert_eq!(intersect(&f, &h, &h), Intersection::Identical);
    }

    #[test]
    fn closed_form_intersection_matches_scan() {
        let (f, _, _) = setup(3, 2);
        let lines: Vec<Line> = striation_table(&f).into_iter().flat_map(|s| s.lines).collect();
        for l1 in &lines {
            for l2 in &lines {
                let common: Vec<(Elem, Elem)> =
                    line_points(&f, l1).into_iter().filter(|&(a, b)| l2.contains(&f, a, b)).collect();
                match intersect(&f, l1, l2) {
                    Intersection::Point(a, b) => assert_eq!(common, vec![(a, b)]),
                    Intersection::Parallel => assert!(common.is_empty()),
                    Intersection::Identical => assert_eq!(common.len(), f.d()),
                }
            }
        }
    }

    #[test]
    fn striations_partition() {
        let (f, _, _) = setup(2, 3);
        let table = striation_table(&f);
        assert_eq!(table.len(), f.d() + 1);
        for s in &table {
            let mut seen = BTreeSet::new();
            for l in &s.lines {
                for pt in line_points(&f, l) {
                    assert!(seen.insert(pt));
                }
            }
            assert_eq!(seen.len(), f.d() * f.d());
        }
    }

    #[test]
    fn d3_horizontal_ray_labels() {
        let (f, _, _) = setup(3, 1);
        assert_eq!(ray_operator_labels(&f, Slope::Finite(Elem::ZERO)), vec![(Elem(1), Elem(0)), (Elem(2), Elem(0))]);
    }

    #[test]
    fn ray_operators_commute() {
        let (f, o, _) = setup(2, 2);
        for mu in f.elements() {
            let ops: Vec<OperatorMatrix> = ray_operator_labels(&f, Slope::Finite(mu))
                .into_iter()
                .map(|(a, b)| build_z(&o, a).mul(&build_x(&o, b)).unwrap())
                .collect();
            for a in &ops {
                for b in &ops {
                    assert!(a.mul(b).unwrap().max_diff(&b.mul(a).unwrap()).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn d2_origin_kernel_spectrum() {
        let (_, o, r) = setup(2, 1);
        let k = build_kernel(&o, &r).unwrap();
        let ev = k.get(Elem::ZERO, Elem::ZERO).matrix().clone().symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s3 = 3f64.sqrt();
        assert!((ev[0] - (1.0 - s3) / 2.0).abs() < 1e-12);
        assert!((ev[1] - (1.0 + s3) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sw_postulates_small() {
        for (p, n) in [(2, 1), (3, 1), (2, 2)] {
            let (_, o, r) = setup(p, n);
            let k = build_kernel(&o, &r).unwrap();
            let rep = sw_report(&k, CovarianceMode::Exhaustive).unwrap();
            assert!(rep.passes(TOL), "{rep:?}");
        }
    }

    #[test]
    fn symbols_of_pauli_operators() {
        let (f, o, r) = setup(2, 2);
        let k = build_kernel(&o, &r).unwrap();
        for kk in f.elements() {
            let wz = wigner_map(&build_z(&o, kk), &k).unwrap();
            let wx = wigner_map(&build_x(&o, kk), &k).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert!((wz.get_complex(a, b) - f.character(f.mul(b, kk)).to_complex()).norm() < TOL);
                    assert!((wx.get_complex(a, b) - f.character(f.neg(f.mul(a, kk))).to_complex()).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_overlap_constant() {
        let (_, o, r) = setup(2, 2);
        let k = build_kernel(&o, &r).unwrap();
        let mut g = rng(11);
        let a = random_hermitian(&o, &mut g);
        let b = random_hermitian(&o, &mut g);
        let back = inverse_map(&wigner_map(&a, &k).unwrap(), &k).unwrap();
        assert!(back.max_diff(&a).unwrap() < TOL);
        let c = overlap_constant(&a, &b, &k).unwrap();
        assert!((c - C64::new(0.25, 0.0)).norm() < TOL);
    }

    #[test]
    fn line_states_are_deltas() {
        let (f, o, r) = setup(3, 1);
        let k = build_kernel(&o, &r).unwrap();
        let mubs = build_mubs(&o, &r).unwrap();
        for s in striation_table(&f) {
            for l in &s.lines {
                let w = wigner_map(&mubs.state(l).projector(), &k).unwrap();
                for a in f.elements() {
                    for b in f.elements() {
                        let target = if l.contains(&f, a, b) { 1.0 } else { 0.0 };
                        assert!((w.get(a, b) - target).abs() < TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn mub_eigenvalues_follow_rotation_phases() {
        let (f, o, r) = setup(2, 2);
        let mubs = build_mubs(&o, &r).unwrap();
        for mu in f.elements() {
            for nu in f.elements() {
                for a in f.elements() {
                    let expected = (f.character(f.mul(a, nu)) * r.c(a, mu).conj()).to_complex();
                    assert!((mubs.eigenvalue(mu, nu, a) - expected).norm() < 1e-12);
                }
            }
        }
        let rep = mubs.report().unwrap();
        assert!(rep.cross < TOL && rep.orthonormal < TOL);
    }

    #[test]
    fn direct_formula_matches_kernel() {
        let (_, o, r) = setup(3, 1);
        let k = build_kernel(&o, &r).unwrap();
        let rho = random_density(&o, &mut rng(5));
        let a = wigner_map(rho.op(), &k).unwrap();
        let b = wigner_of_density(&rho, &r).unwrap();
        assert!(a.max_diff(&b).unwrap() < TOL);
        assert!(a.max_imag() < TOL);
    }

    #[test]
    fn provenance_mismatch_detected() {
        let (f, o, r) = setup(2, 2);
        let mut h = vec![Elem::ZERO; 4];
        h[1] = Elem::ONE;
        let other = shifted_rotation_set(&r, &h).unwrap();
        let k = build_kernel(&o, &r).unwrap();
        let mubs = build_mubs(&o, &other).unwrap();
        let rho = DensityMatrix::maximally_mixed(&o);
        assert_eq!(verify_line_identity(&rho, &k, &mubs).unwrap_err(), Error::ProvenanceMismatch);
        assert!(f.d() == 4);
    }

    #[test]
    fn gf4_two_grids() {
        let (f, o, r) = setup(2, 2);
        let psi = StateVector::from_terms(&o, &[(Elem::ZERO, C64::new(1.0, 0.0)), (f.prim_pow(3), C64::new(1.0, 0.0))]).unwrap();
        let rep = count_distinct_wigner(&psi, &r).unwrap();
        assert_eq!(rep.total_structures, 64);
        assert_eq!(rep.distinct(), 2);
        assert_eq!(rep.classes.iter().map(|c| c.size).sum::<u64>(), 64);
        assert_eq!(rep.certificate.as_ref().unwrap().predicted, 2);
        assert_eq!(rep.certificate_matches(), Some(true));
    }

    #[test]
    fn diagonal_state_has_one_grid() {
        let (_, o, r) = setup(2, 2);
        let psi = StateVector::basis(&o, Elem::ONE);
        assert_eq!(count_distinct_wigner(&psi, &r).unwrap().distinct(), 1);
    }

    #[test]
    fn shift_closed_forms() {
        for (p, n) in [(2, 2), (3, 1)] {
            let (f, o, r) = setup(p, n);
            let rho = random_density(&o, &mut rng(9));
            let w = wigner_of_density(&rho, &r).unwrap();
            for kappa in f.nonzero() {
                let h: Vec<Elem> = f.elements().map(|m| if m.is_zero() { Elem::ZERO } else { kappa }).collect();
                let alt = alternate_wigner(&rho, &r, &h).unwrap();
                assert!(alt.max_diff(&constant_shift_prediction(&rho, &w, kappa)).unwrap() < TOL);
                let h: Vec<Elem> = f.elements().map(|m| f.mul(kappa, m)).collect();
                let alt = alternate_wigner(&rho, &r, &h).unwrap();
                assert!(alt.max_diff(&linear_shift_prediction(&w, kappa)).unwrap() < TOL);
            }
        }
    }

    #[test]
    fn odd_covariance_laws() {
        let (f, o, r) = setup(5, 1);
        let rho = random_density(&o, &mut rng(2));
        for m in f.elements() {
            assert!(covariant_transform_check(&rho, &r, Transform::V(m)).unwrap() < TOL);
            assert!(covariant_transform_check(&rho, &r, Transform::U(m)).unwrap() < TOL);
        }
        for xi in f.nonzero() {
            assert!(covariant_transform_check(&rho, &r, Transform::S(xi)).unwrap() < TOL);
        }
        for xi in f.nonzero() {
            for m in f.nonzero() {
                assert!(squeeze_composition_check(&rho, &r, xi, m).unwrap() < TOL);
            }
        }
        let (_, o2, r2) = setup(2, 2);
        let rho2 = DensityMatrix::maximally_mixed(&o2);
        assert_eq!(covariant_transform_check(&rho2, &r2, Transform::V(Elem::ONE)).unwrap_err(), Error::EvenCharacteristic);
    }
}
