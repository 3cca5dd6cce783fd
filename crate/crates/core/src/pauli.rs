//! The generalized Pauli group as dense matrices.
//!
//! Rows and columns are field elements, mapped to matrix indices by the
//! [`Ordering`] stored in every [`OperatorMatrix`] and [`StateVector`].
//! Combining objects built under different orderings is an error.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Ordering};
use crate::phase::UnitPhase;
use crate::rotations::RotationSet;

/// Tolerance for whole-matrix assertions.
pub const TOL: f64 = 1e-9;
/// Tolerance for single products.
pub const TIGHT_TOL: f64 = 1e-12;

fn same(a: &Arc<Ordering>, b: &Arc<Ordering>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::MixedOrdering)
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A d×d complex matrix indexed by field elements.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    ord: Arc<Ordering>,
    m: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(ord: Arc<Ordering>, m: DMatrix<C64>) -> Result<Self> {
        let d = ord.d();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(d, m.nrows().max(m.ncols())));
        }
        Ok(Self { ord, m })
    }

    pub(crate) fn from_raw(ord: Arc<Ordering>, m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), ord.d());
        Self { ord, m }
    }

    pub fn zeros(ord: &Arc<Ordering>) -> Self {
        let d = ord.d();
        Self { ord: ord.clone(), m: DMatrix::zeros(d, d) }
    }

    pub fn identity(ord: &Arc<Ordering>) -> Self {
        let d = ord.d();
        Self { ord: ord.clone(), m: DMatrix::identity(d, d) }
    }

    /// Diagonal operator `Σ_α f(α)|α⟩⟨α|`.
    pub fn diagonal(ord: &Arc<Ordering>, f: impl Fn(Elem) -> C64) -> Self {
        let d = ord.d();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = f(ord.elem(i));
        }
        Self { ord: ord.clone(), m }
    }

    pub fn ordering(&self) -> &Arc<Ordering> {
        &self.ord
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    /// `⟨row|A|col⟩`.
    pub fn get(&self, row: Elem, col: Elem) -> C64 {
        self.m[(self.ord.index(row), self.ord.index(col))]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same(&self.ord, &other.ord)?;
        Ok(Self { ord: self.ord.clone(), m: &self.m * &other.m })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same(&self.ord, &other.ord)?;
        Ok(Self { ord: self.ord.clone(), m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same(&self.ord, &other.ord)?;
        Ok(Self { ord: self.ord.clone(), m: &self.m - &other.m })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { ord: self.ord.clone(), m: &self.m * z }
    }

    pub fn adjoint(&self) -> Self {
        Self { ord: self.ord.clone(), m: self.m.adjoint() }
    }

    /// `A B A†`.
    pub fn conjugate(&self, b: &Self) -> Result<Self> {
        same(&self.ord, &b.ord)?;
        Ok(Self { ord: self.ord.clone(), m: &self.m * &b.m * self.m.adjoint() })
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        same(&self.ord, &other.ord)?;
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.m[(i, j)] * other.m[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Largest entry of `|A - B|`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        same(&self.ord, &other.ord)?;
        Ok(max_abs(&(&self.m - &other.m)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        max_abs(&(&self.m * self.m.adjoint() - DMatrix::<C64>::identity(d, d)))
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        same(&self.ord, &v.ord)?;
        Ok(StateVector { ord: self.ord.clone(), v: &self.m * &v.v })
    }

    /// JSON export with separate real and imaginary grids.
    pub fn to_json(&self) -> Value {
        let d = self.dim();
        let grid = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|i| (0..d).map(|j| f(&self.m[(i, j)])).collect()).collect()
        };
        json!({
            "dim": d,
            "ordering": ordering_json(&self.ord),
            "re": grid(|z| z.re),
            "im": grid(|z| z.im),
        })
    }

    /// Row-major CSV, each cell written as a `re,im` column pair.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = String::new();
        let header: Vec<String> = self.ord.labels().iter().flat_map(|l| [format!("re[{l}]"), format!("im[{l}]")]).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..d {
            let cells: Vec<String> = (0..d).flat_map(|j| [self.m[(i, j)].re.to_string(), self.m[(i, j)].im.to_string()]).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn ordering_json(ord: &Ordering) -> Value {
    json!({ "strategy": ord.strategy().name(), "labels": ord.labels() })
}

/// A ket indexed by field elements.
#[derive(Clone, Debug)]
pub struct StateVector {
    ord: Arc<Ordering>,
    v: DVector<C64>,
}

impl StateVector {
    pub fn new(ord: Arc<Ordering>, v: DVector<C64>) -> Result<Self> {
        if v.len() != ord.d() {
            return Err(Error::DimensionMismatch(ord.d(), v.len()));
        }
        Ok(Self { ord, v })
    }

    /// Normalize the given amplitudes; fails on a zero vector.
    pub fn normalized(ord: Arc<Ordering>, v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm < TOL {
            return Err(Error::NormZero);
        }
        Self::new(ord, v / C64::new(norm, 0.0))
    }

    /// Normalized superposition of the listed basis kets.
    pub fn from_terms(ord: &Arc<Ordering>, terms: &[(Elem, C64)]) -> Result<Self> {
        let mut v = DVector::zeros(ord.d());
        for &(e, a) in terms {
            ord.field().check(e)?;
            v[ord.index(e)] += a;
        }
        Self::normalized(ord.clone(), v)
    }

    /// `|α⟩`.
    pub fn basis(ord: &Arc<Ordering>, a: Elem) -> Self {
        let mut v = DVector::zeros(ord.d());
        v[ord.index(a)] = C64::new(1.0, 0.0);
        Self { ord: ord.clone(), v }
    }

    pub fn ordering(&self) -> &Arc<Ordering> {
        &self.ord
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.v
    }

    pub fn amp(&self, a: Elem) -> C64 {
        self.v[self.ord.index(a)]
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same(&self.ord, &other.ord)?;
        Ok(self.v.dotc(&other.v))
    }

    pub fn projector(&self) -> OperatorMatrix {
        OperatorMatrix { ord: self.ord.clone(), m: &self.v * self.v.adjoint() }
    }

    /// Nonzero amplitudes as (element, amplitude) pairs.
    pub fn support(&self) -> Vec<(Elem, C64)> {
        (0..self.dim()).filter(|&i| self.v[i].norm() > TOL).map(|i| (self.ord.elem(i), self.v[i])).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "ordering": ordering_json(&self.ord),
            "re": self.v.iter().map(|z| z.re).collect::<Vec<_>>(),
            "im": self.v.iter().map(|z| z.im).collect::<Vec<_>>(),
        })
    }
}

/// A density operator `ρ = Σ ρ_{μν}|μ⟩⟨ν|`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: OperatorMatrix,
}

impl DensityMatrix {
    /// Accepts Hermitian, unit-trace operators; positivity is checked separately.
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let herm = op.hermiticity_error();
        if herm > TOL {
            return Err(Error::NonPhysicalState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::NonPhysicalState(format!("trace {tr} is not 1")));
        }
        Ok(Self { op })
    }

    pub(crate) fn from_raw(op: OperatorMatrix) -> Self {
        Self { op }
    }

    pub fn pure(s: &StateVector) -> Self {
        Self { op: s.projector() }
    }

    pub fn maximally_mixed(ord: &Arc<Ordering>) -> Self {
        let d = ord.d();
        Self { op: OperatorMatrix::identity(ord).scale(C64::new(1.0 / d as f64, 0.0)) }
    }

    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn ordering(&self) -> &Arc<Ordering> {
        self.op.ordering()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `ρ_{μν} = ⟨μ|ρ|ν⟩`.
    pub fn get(&self, mu: Elem, nu: Elem) -> C64 {
        self.op.get(mu, nu)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.op.m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() > -TOL
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        same(self.ordering(), psi.ordering())?;
        Ok(psi.v.dotc(&(&self.op.m * &psi.v)).re)
    }
}

/// `Z_β|α⟩ = χ(αβ)|α⟩`.
pub fn build_z(ord: &Arc<Ordering>, beta: Elem) -> OperatorMatrix {
    let f = ord.field().clone();
    OperatorMatrix::diagonal(ord, |a| f.character(f.mul(a, beta)).to_complex())
}

/// `X_β|α⟩ = |α+β⟩`.
pub fn build_x(ord: &Arc<Ordering>, beta: Elem) -> OperatorMatrix {
    let f = ord.field();
    let d = ord.d();
    let mut m = DMatrix::zeros(d, d);
    for a in f.elements() {
        m[(ord.index(f.add(a, beta)), ord.index(a))] = C64::new(1.0, 0.0);
    }
    OperatorMatrix::from_raw(ord.clone(), m)
}

/// `F = d^{-1/2} Σ χ(αβ)|α⟩⟨β|`.
pub fn build_fourier(ord: &Arc<Ordering>) -> OperatorMatrix {
    let f = ord.field();
    let d = ord.d();
    let s = 1.0 / (d as f64).sqrt();
    let m = DMatrix::from_fn(d, d, |i, j| f.character(f.mul(ord.elem(i), ord.elem(j))).to_complex() * s);
    OperatorMatrix::from_raw(ord.clone(), m)
}

/// `|α̃⟩ = F|α⟩`.
pub fn conjugate_ket(ord: &Arc<Ordering>, a: Elem) -> StateVector {
    let f = ord.field();
    let s = 1.0 / (ord.d() as f64).sqrt();
    let v = DVector::from_fn(ord.d(), |i, _| f.character(f.mul(ord.elem(i), a)).to_complex() * s);
    StateVector { ord: ord.clone(), v }
}

/// The displacement phase `φ(τ,υ)` of a rotation set.
pub fn phase_phi(tau: Elem, upsilon: Elem, rot: &RotationSet) -> UnitPhase {
    rot.phi(tau, upsilon)
}

/// `D(α,β) = φ(α,β) Z_α X_β`.
pub fn build_displacement(ord: &Arc<Ordering>, a: Elem, b: Elem, rot: &RotationSet) -> Result<OperatorMatrix> {
    rot.check_field(ord.field())?;
    let f = ord.field();
    let d = ord.d();
    let phi = rot.phi(a, b);
    let mut m = DMatrix::zeros(d, d);
    for x in f.elements() {
        let y = f.add(x, b);
        m[(ord.index(y), ord.index(x))] = (phi * f.character(f.mul(a, y))).to_complex();
    }
    Ok(OperatorMatrix::from_raw(ord.clone(), m))
}

/// Parity `P|α⟩ = |−α⟩`; odd characteristic only.
pub fn build_parity(ord: &Arc<Ordering>) -> Result<OperatorMatrix> {
    let f = ord.field();
    if f.is_even() {
        return Err(Error::EvenCharacteristic);
    }
    let d = ord.d();
    let mut m = DMatrix::zeros(d, d);
    for a in f.elements() {
        m[(ord.index(f.neg(a)), ord.index(a))] = C64::new(1.0, 0.0);
    }
    Ok(OperatorMatrix::from_raw(ord.clone(), m))
}
