//! Exact roots of unity.
//!
//! A [`UnitPhase`] is `exp(2πi·num/den)`. Characters of GF(p^n) land on
//! p-th roots of unity and the char-2 rotation coefficients on fourth roots,
//! so every phase the library produces lives on the `4p`-th roots. Products
//! of phases with different denominators are promoted to the common multiple.

use std::fmt;
use std::ops::{Mul, MulAssign};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UnitPhase {
    num: u32,
    den: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl UnitPhase {
    pub fn new(num: i64, den: u32) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        Self { num: num.rem_euclid(den as i64) as u32, den }
    }

    pub fn one(den: u32) -> Self {
        Self::new(0, den)
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// Same angle expressed over denominator `den`; panics if impossible.
    pub fn with_den(&self, den: u32) -> Self {
        let scaled = self.num as u64 * den as u64;
        assert!(scaled.is_multiple_of(self.den as u64), "phase {self} is not representable over {den}");
        Self { num: (scaled / self.den as u64) as u32 % den, den }
    }

    pub fn conj(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new((self.num as i64 * k).rem_euclid(self.den as i64), self.den)
    }

    /// Principal square root (argument in (-π/2, π/2]).
    pub fn sqrt(&self) -> Self {
        let (k, l) = (self.num as i64, self.den as i64);
        // angle 2πk/l with k in [0, l); principal arg lies in (-π, π]
        let signed = if 2 * k <= l { k } else { k - l };
        if signed % 2 == 0 {
            Self::new(signed / 2, self.den)
        } else {
            Self::new(signed, self.den * 2)
        }
    }

    pub fn to_complex(&self) -> C64 {
        let (k, l) = (self.num as u64, self.den as u64);
        if (4 * k) % l == 0 {
            match (4 * k / l) % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            }
        } else {
            let angle = std::f64::consts::TAU * k as f64 / l as f64;
            C64::new(angle.cos(), angle.sin())
        }
    }

    fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.num as u64, self.den as u64);
        if self.num == 0 {
            (0, 1)
        } else {
            (self.num as u64 / g, self.den as u64 / g)
        }
    }
}

impl PartialEq for UnitPhase {
    fn eq(&self, other: &Self) -> bool {
        self.reduced() == other.reduced()
    }
}

impl Eq for UnitPhase {}

impl std::hash::Hash for UnitPhase {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

impl Mul for UnitPhase {
    type Output = UnitPhase;

    fn mul(self, rhs: UnitPhase) -> UnitPhase {
        if self.den == rhs.den {
            return UnitPhase::new(self.num as i64 + rhs.num as i64, self.den);
        }
        let (a, b) = (self.den as u64, rhs.den as u64);
        let l = a / gcd(a, b) * b;
        let num = self.num as u64 * (l / a) + rhs.num as u64 * (l / b);
        UnitPhase::new(num as i64, l as u32)
    }
}

impl MulAssign for UnitPhase {
    fn mul_assign(&mut self, rhs: UnitPhase) {
        *self = *self * rhs;
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.reduced();
        match (n, d) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            _ => write!(f, "exp(2πi·{n}/{d})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(UnitPhase::new(2, 8).to_complex(), C64::new(0.0, 1.0));
        assert_eq!(UnitPhase::new(4, 8).to_complex(), C64::new(-1.0, 0.0));
        assert_eq!(UnitPhase::new(6, 8).to_complex(), C64::new(0.0, -1.0));
    }

    #[test]
    fn principal_square_roots() {
        let minus_one = UnitPhase::new(4, 8);
        assert_eq!(minus_one.sqrt(), UnitPhase::new(2, 8));
        assert_eq!(UnitPhase::one(8).sqrt(), UnitPhase::one(8));
        // -i has principal root exp(-iπ/4)
        let r = UnitPhase::new(6, 8).sqrt();
        assert_eq!(r, UnitPhase::new(-1, 8));
        assert_eq!(r * r, UnitPhase::new(6, 8));
    }

    #[test]
    fn mixed_denominators_promote() {
        let a = UnitPhase::new(1, 3);
        let b = UnitPhase::new(1, 4);
        assert_eq!(a * b, UnitPhase::new(7, 12));
        assert_eq!(UnitPhase::new(3, 12), UnitPhase::new(1, 4));
    }
}
