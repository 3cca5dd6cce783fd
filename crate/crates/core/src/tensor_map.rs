//! Field-labelled states as n-particle states of local dimension p.
//!
//! A basis `{σ_j}` identifies `|α⟩` with `|a₁⟩⊗…⊗|a_n⟩`, `α = Σ a_j σ_j`.
//! Flat index of a digit tuple: `Σ a_j p^{j−1}` (a₁ varies fastest).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{combine, expand, Basis, Elem, GaloisField, Ordering};
use crate::pauli::{build_z, DensityMatrix, OperatorMatrix, StateVector};
use crate::phase::UnitPhase;

pub const SCHMIDT_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TensorState {
    field: Arc<GaloisField>,
    basis: Basis,
    amps: DVector<C64>,
}

fn validate_basis(field: &GaloisField, b: &Basis) -> Result<()> {
    if b.len() != field.n() as usize || b.elems().iter().any(|e| !field.contains(*e)) {
        return Err(Error::BasisMismatch);
    }
    Basis::new(field, b.elems().to_vec(), b.kind()).map(|_| ()).map_err(|_| Error::BasisMismatch)
}

pub fn digits_to_index(digits: &[u32], p: u32) -> usize {
    digits.iter().rev().fold(0usize, |acc, &a| acc * p as usize + a as usize)
}

pub fn index_to_digits(mut idx: usize, p: u32, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let a = (idx % p as usize) as u32;
            idx /= p as usize;
            a
        })
        .collect()
}

impl TensorState {
    /// Build directly from flat amplitudes in digit-tuple order.
    pub fn new(field: &Arc<GaloisField>, basis: Basis, amps: DVector<C64>) -> Result<Self> {
        validate_basis(field, &basis)?;
        if amps.len() != field.d() {
            return Err(Error::DimensionMismatch(field.d(), amps.len()));
        }
        Ok(Self { field: field.clone(), basis, amps })
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn n(&self) -> usize {
        self.field.n() as usize
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amp(&self, digits: &[u32]) -> C64 {
        self.amps[digits_to_index(digits, self.p())]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Nonzero amplitudes as `(digit tuple, amplitude)`.
    pub fn support(&self) -> Vec<(Vec<u32>, C64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(i, z)| (index_to_digits(i, self.p(), self.n()), *z))
            .collect()
    }

    /// Ket label such as `|10⟩`, digits written a₁ first.
    pub fn ket_label(digits: &[u32]) -> String {
        let inner: Vec<String> = digits.iter().map(u32::to_string).collect();
        let sep = if digits.iter().any(|&a| a > 9) { "," } else { "" };
        format!("|{}⟩", inner.join(sep))
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "dim": self.amps.len(),
            "p": f.p(),
            "n": f.n(),
            "basis": self.basis.elems().iter().map(|&e| f.format(e)).collect::<Vec<_>>(),
            "re": self.amps.iter().map(|z| z.re).collect::<Vec<_>>(),
            "im": self.amps.iter().map(|z| z.im).collect::<Vec<_>>(),
        })
    }
}

/// Place the amplitude of `|α⟩` at the digit tuple of `α` in `b`.
pub fn to_physical(s: &StateVector, b: &Basis) -> Result<TensorState> {
    let ord = s.ordering();
    let f = ord.field();
    validate_basis(f, b)?;
    let mut amps = DVector::zeros(f.d());
    for &a in ord.elems() {
        amps[digits_to_index(&expand(f, a, b), f.p())] = s.amp(a);
    }
    Ok(TensorState { field: f.clone(), basis: b.clone(), amps })
}

/// Inverse of [`to_physical`], laid out in `ord`.
pub fn from_physical(t: &TensorState, ord: &Arc<Ordering>) -> Result<StateVector> {
    let f = ord.field();
    if **f != *t.field {
        return Err(Error::BasisMismatch);
    }
    let mut v = DVector::zeros(f.d());
    for (i, z) in t.amps.iter().enumerate() {
        let a = combine(f, &index_to_digits(i, f.p(), t.n()), &t.basis)?;
        v[ord.index(a)] = *z;
    }
    StateVector::new(ord.clone(), v)
}

/// Pure-state extraction from a density matrix.
pub fn pure_from_density(rho: &DensityMatrix) -> Result<StateVector> {
    let m = rho.op().matrix();
    let purity = (m * m).trace().re;
    if (purity - 1.0).abs() > SCHMIDT_THRESHOLD {
        return Err(Error::MixedStateUnsupported);
    }
    let e = m.clone().symmetric_eigen();
    let (k, _) = e.eigenvalues.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    StateVector::normalized(rho.ordering().clone(), e.eigenvectors.column(k).into_owned())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl SchmidtReport {
    pub fn is_product(&self) -> bool {
        self.rank == 1
    }
}

/// Schmidt rank across the cut `slots | rest` (slots are 0-based).
pub fn product_check(t: &TensorState, slots: &[usize]) -> Result<SchmidtReport> {
    let n = t.n();
    let p = t.p();
    if slots.iter().any(|&s| s >= n) {
        return Err(Error::LengthMismatch { expected: n, got: slots.iter().max().map_or(0, |m| m + 1) });
    }
    let a: Vec<usize> = (0..n).filter(|j| slots.contains(j)).collect();
    let b: Vec<usize> = (0..n).filter(|j| !slots.contains(j)).collect();
    let rows = (p as usize).pow(a.len() as u32);
    let cols = (p as usize).pow(b.len() as u32);
    let mut m = DMatrix::<C64>::zeros(rows, cols);
    for (i, z) in t.amps.iter().enumerate() {
        let digits = index_to_digits(i, p, n);
        let r = digits_to_index(&a.iter().map(|&j| digits[j]).collect::<Vec<_>>(), p);
        let c = digits_to_index(&b.iter().map(|&j| digits[j]).collect::<Vec<_>>(), p);
        m[(r, c)] = *z;
    }
    let sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    let rank = sv.iter().filter(|&&s| s > SCHMIDT_THRESHOLD).count();
    Ok(SchmidtReport { rank, singular_values: sv })
}

/// Outcome of comparing `Z_β` with a product of single-particle powers.
#[derive(Clone, Debug, PartialEq)]
pub struct ZFactorization {
    pub beta: Elem,
    /// `b_j = tr(β σ_j)`, the coordinates of β in the dual basis.
    pub exponents: Vec<u32>,
    pub exact: bool,
    pub max_deviation: f64,
}

fn single_z_phase(p: u32, a: u32, e: u32) -> UnitPhase {
    UnitPhase::new((a * e) as i64, p)
}

/// Check `Z_β = Z^{b₁}⊗…⊗Z^{b_n}` in the digit-tuple indexing of `b`.
pub fn factorize_z_beta(ord: &Arc<Ordering>, b: &Basis, beta: Elem) -> Result<ZFactorization> {
    let f = ord.field();
    validate_basis(f, b)?;
    let p = f.p();
    let n = f.n() as usize;
    let d = f.d();
    let dual = Basis::new(f, b.dual_elems().to_vec(), b.kind())?;
    let exponents = expand(f, beta, &dual);
    let z = build_z(ord, beta);
    let mut exact = true;
    let mut dev: f64 = 0.0;
    for i in 0..d {
        let digits = index_to_digits(i, p, n);
        let alpha = combine(f, &digits, b)?;
        let abstract_phase = f.character(f.mul(alpha, beta));
        let product = digits
            .iter()
            .zip(&exponents)
            .fold(UnitPhase::one(p), |acc, (&a, &e)| acc * single_z_phase(p, a, e));
        exact &= abstract_phase == product;
        let k = ord.index(alpha);
        dev = dev.max((z.matrix()[(k, k)] - product.to_complex()).norm());
    }
    Ok(ZFactorization { beta, exponents, exact, max_deviation: dev })
}

/// `Z_{σ′_i}` against the single-slot `Z` in slot `i` (0-based).
pub fn factorize_z(ord: &Arc<Ordering>, b: &Basis, i: usize) -> Result<ZFactorization> {
    let n = ord.field().n() as usize;
    if i >= n {
        return Err(Error::LengthMismatch { expected: n, got: i + 1 });
    }
    let r = factorize_z_beta(ord, b, b.dual_elems()[i])?;
    let mut unit = vec![0; n];
    unit[i] = 1;
    Ok(ZFactorization { exact: r.exact && r.exponents == unit, ..r })
}

/// `H = Σ_i E_i |α_i⟩⟨α_i|` with `α_i` the i-th element of `ord`.
pub fn free_hamiltonian(ord: &Arc<Ordering>, energies: &[f64]) -> Result<OperatorMatrix> {
    if energies.len() != ord.d() {
        return Err(Error::WrongLength { expected: ord.d(), got: energies.len() });
    }
    if energies.windows(2).any(|w| w[1] < w[0]) || energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NotSorted);
    }
    Ok(OperatorMatrix::diagonal(ord, |a| C64::new(energies[ord.index(a)], 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{catalog_bases, make_field, ordering, polynomial_basis, self_dual_basis, OrderStrategy};

    fn ord(p: u32, n: u32) -> Arc<Ordering> {
        let f = make_field(p, n, None).unwrap();
        Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap())
    }

    fn gf4_state(o: &Arc<Ordering>) -> StateVector {
        let f = o.field();
        let h = C64::new(0.5f64.sqrt(), 0.0);
        StateVector::from_terms(o, &[(Elem::ZERO, h), (f.prim_pow(3), h)]).unwrap()
    }

    #[test]
    fn digit_convention() {
        assert_eq!(digits_to_index(&[1, 0], 2), 1);
        assert_eq!(index_to_digits(6, 3, 2), vec![0, 2]);
        assert_eq!(TensorState::ket_label(&[1, 0]), "|10⟩");
    }

    #[test]
    fn gf4_example_across_bases() {
        let o = ord(2, 2);
        let f = o.field();
        let s = gf4_state(&o);
        let poly = to_physical(&s, &polynomial_basis(f)).unwrap();
        let labels: Vec<String> = poly.support().iter().map(|(d, _)| TensorState::ket_label(d)).collect();
        assert_eq!(labels, vec!["|00⟩", "|10⟩"]);
        assert_eq!(product_check(&poly, &[0]).unwrap().rank, 1);
        let sd = to_physical(&s, &self_dual_basis(f).unwrap()).unwrap();
        let labels: Vec<String> = sd.support().iter().map(|(d, _)| TensorState::ket_label(d)).collect();
        assert_eq!(labels, vec!["|00⟩", "|11⟩"]);
        assert_eq!(product_check(&sd, &[0]).unwrap().rank, 2);
    }

    #[test]
    fn round_trip_all_catalog_bases() {
        for (p, n) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
            let o = ord(p, n);
            let f = o.field();
            let mut g = crate::random::rng(2);
            let s = crate::random::random_pure(&o, &mut g);
            for b in catalog_bases(f) {
                let t = to_physical(&s, &b).unwrap();
                assert!((t.norm() - 1.0).abs() < 1e-12);
                let back = from_physical(&t, &o).unwrap();
                assert_eq!(back.vector(), s.vector());
            }
        }
    }

    #[test]
    fn vacuum_is_product() {
        let o = ord(2, 3);
        let t = to_physical(&StateVector::basis(&o, Elem::ZERO), &polynomial_basis(o.field())).unwrap();
        assert_eq!(t.support()[0].0, vec![0, 0, 0]);
        for cut in [&[0][..], &[1], &[0, 2]] {
            assert!(product_check(&t, cut).unwrap().is_product());
        }
    }

    #[test]
    fn z_factorizes_in_every_slot() {
        for (p, n) in [(2, 2), (2, 3), (3, 2), (5, 1)] {
            let o = ord(p, n);
            for b in catalog_bases(o.field()) {
                for i in 0..n as usize {
                    let r = factorize_z(&o, &b, i).unwrap();
                    assert!(r.exact && r.max_deviation < 1e-12, "p={p} n={n} slot {i}");
                }
                for beta in o.field().elements() {
                    assert!(factorize_z_beta(&o, &b, beta).unwrap().exact);
                }
            }
        }
    }

    #[test]
    fn self_dual_gf4_first_slot() {
        let o = ord(2, 2);
        let f = o.field();
        let b = self_dual_basis(f).unwrap();
        assert_eq!(b.elems()[0], f.prim_pow(1));
        let r = factorize_z_beta(&o, &b, f.prim_pow(1)).unwrap();
        assert_eq!(r.exponents, vec![1, 0]);
        assert!(r.exact);
    }

    #[test]
    fn basis_from_other_field_rejected() {
        let o = ord(2, 2);
        let other = polynomial_basis(&make_field(2, 3, None).unwrap());
        assert!(matches!(to_physical(&StateVector::basis(&o, Elem::ZERO), &other), Err(Error::BasisMismatch)));
    }

    #[test]
    fn mixed_state_rejected() {
        let o = ord(2, 1);
        assert!(matches!(pure_from_density(&DensityMatrix::maximally_mixed(&o)), Err(Error::MixedStateUnsupported)));
        let s = gf4_state(&ord(2, 2));
        let back = pure_from_density(&DensityMatrix::pure(&s)).unwrap();
        assert!((back.inner(&s).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hamiltonian() {
        let o = ord(2, 2);
        let h = free_hamiltonian(&o, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        for i in 0..4 {
            assert_eq!(h.matrix()[(i, i)], C64::new(i as f64, 0.0));
        }
        assert!(free_hamiltonian(&o, &[0.0; 4]).unwrap().max_abs() == 0.0);
        assert!(matches!(free_hamiltonian(&o, &[1.0, 0.0, 2.0, 3.0]), Err(Error::NotSorted)));
        assert!(matches!(free_hamiltonian(&o, &[0.0; 3]), Err(Error::WrongLength { .. })));
    }
}
