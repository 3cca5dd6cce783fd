//! Discrete Wigner functions for systems of dimension `d = p^n`, built on
//! arithmetic in GF(p^n).
//!
//! Element labels, operators, kernels and grids are all indexed through an
//! [`field::Ordering`], so every matrix knows which field element each row
//! belongs to.

pub mod error;
pub mod field;
pub mod pauli;
pub mod phase;
pub mod phase_space;
pub mod random;
pub mod rotations;
pub mod tensor_map;
pub mod tomography;

pub use error::{Error, Result};
pub use field::{Elem, GaloisField};
pub use phase::UnitPhase;
