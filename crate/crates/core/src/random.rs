//! Seeded random states: Gaussian kets for pure states, normalized Wishart
//! products for mixed ones.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::field::Ordering;
use crate::pauli::{DensityMatrix, OperatorMatrix, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure<R: Rng>(ord: &Arc<Ordering>, rng: &mut R) -> StateVector {
    let v = DVector::from_fn(ord.d(), |_, _| gaussian(rng));
    StateVector::normalized(ord.clone(), v).expect("gaussian vector is nonzero")
}

/// `G G† / Tr(G G†)` with a d×d complex Gaussian `G` (full rank almost surely).
pub fn random_density<R: Rng>(ord: &Arc<Ordering>, rng: &mut R) -> DensityMatrix {
    let d = ord.d();
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let w = &g * g.adjoint();
    let tr = w.trace();
    let m = w / tr;
    // symmetrize away rounding so the Hermiticity check is exact
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::from_raw(OperatorMatrix::from_raw(ord.clone(), m))
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian<R: Rng>(ord: &Arc<Ordering>, rng: &mut R) -> OperatorMatrix {
    let d = ord.d();
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    OperatorMatrix::from_raw(ord.clone(), (&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Random operator with Gaussian entries.
pub fn random_operator<R: Rng>(ord: &Arc<Ordering>, rng: &mut R) -> OperatorMatrix {
    let d = ord.d();
    OperatorMatrix::from_raw(ord.clone(), DMatrix::from_fn(d, d, |_, _| gaussian(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, ordering, OrderStrategy};

    #[test]
    fn random_density_is_physical() {
        let f = make_field(2, 2, None).unwrap();
        let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
        let mut r = rng(7);
        for _ in 0..10 {
            let rho = random_density(&o, &mut r);
            assert!(DensityMatrix::new(rho.op().clone()).is_ok());
            assert!(rho.is_physical());
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let f = make_field(3, 1, None).unwrap();
        let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
        let a = random_pure(&o, &mut rng(3));
        let b = random_pure(&o, &mut rng(3));
        assert_eq!(a.vector(), b.vector());
    }
}
