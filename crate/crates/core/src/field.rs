//! Exact arithmetic in GF(p^n).
//!
//! Elements are coefficient vectors over Z_p with respect to the polynomial
//! basis `{1, θ, …, θ^{n-1}}` of a fixed monic irreducible polynomial. They are
//! packed into an [`Elem`] code `c_0 + c_1 p + … + c_{n-1} p^{n-1}`, and the
//! owning [`GaloisField`] keeps full addition and multiplication tables (the
//! supported orders are small enough for that to be the fastest option).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::UnitPhase;

/// Default cap on the field order.
pub const DEFAULT_MAX_ORDER: usize = 64;

/// A field element, stored as its polynomial-basis code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FieldConfig {
    pub max_order: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { max_order: DEFAULT_MAX_ORDER }
    }
}

/// GF(p^n) with its arithmetic tables.
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    n: u32,
    d: usize,
    poly: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
    primitive: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("poly", &self.poly)
            .finish()
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.poly == other.poly
    }
}

impl Eq for GaloisField {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Built-in irreducible polynomials (constant term first).
pub fn default_polynomial(p: u32, n: u32) -> Option<Vec<u32>> {
    let poly: &[u32] = match (p, n) {
        (_, 1) => &[0, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 0, 0, 0, 1],
        (3, 2) => &[2, 1, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 1, 1],
        (7, 2) => &[3, 1, 1],
        _ => return None,
    };
    Some(poly.to_vec())
}

// remainder of `a` modulo the monic polynomial `m` over Z_p
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &c) in m.iter().enumerate() {
                let idx = shift + k;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree ≤ n/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let n = poly.len() - 1;
    for deg in 1..=n / 2 {
        let count = (p as usize).pow(deg as u32);
        for lower in 0..count {
            let mut cand = Vec::with_capacity(deg + 1);
            let mut x = lower;
            for _ in 0..deg {
                cand.push((x % p as usize) as u32);
                x /= p as usize;
            }
            cand.push(1);
            if poly_rem(poly, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as usize).pow(n);
    (0..count)
        .map(|lower| {
            let mut poly = Vec::with_capacity(n as usize + 1);
            let mut x = lower;
            for _ in 0..n {
                poly.push((x % p as usize) as u32);
                x /= p as usize;
            }
            poly.push(1);
            poly
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Build GF(p^n) with the default size cap.
pub fn make_field(p: u32, n: u32, poly: Option<&[u32]>) -> Result<Arc<GaloisField>> {
    make_field_with(p, n, poly, FieldConfig::default())
}

pub fn make_field_with(p: u32, n: u32, poly: Option<&[u32]>, config: FieldConfig) -> Result<Arc<GaloisField>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::UnsupportedSize { p, n, cap: config.max_order });
    }
    let d = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
    if d > config.max_order as u64 || d > u16::MAX as u64 {
        return Err(Error::UnsupportedSize { p, n, cap: config.max_order });
    }
    let poly = match poly {
        Some(c) => c.to_vec(),
        None => default_polynomial(p, n).unwrap_or_else(|| first_irreducible(p, n)),
    };
    if poly.len() != n as usize + 1 || poly.last() != Some(&1) || poly.iter().any(|&c| c >= p) {
        return Err(Error::WrongDegree { expected: n as usize, got: poly });
    }
    if !is_irreducible(&poly, p) {
        return Err(Error::ReduciblePolynomial(poly));
    }
    Ok(Arc::new(GaloisField::build(p, n, poly)))
}

impl GaloisField {
    fn build(p: u32, n: u32, poly: Vec<u32>) -> Self {
        let d = (p as usize).pow(n);
        let nn = n as usize;
        let coeffs = |code: usize| -> Vec<u32> {
            let mut c = Vec::with_capacity(nn);
            let mut x = code;
            for _ in 0..nn {
                c.push((x % p as usize) as u32);
                x /= p as usize;
            }
            c
        };
        let encode = |c: &[u32]| -> u16 { c.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize) as u16 };

        let mut add = vec![0u16; d * d];
        let mut mul = vec![0u16; d * d];
        let mut neg = vec![0u16; d];
        for a in 0..d {
            let ca = coeffs(a);
            neg[a] = encode(&ca.iter().map(|&x| (p - x) % p).collect::<Vec<_>>());
            for b in 0..d {
                let cb = coeffs(b);
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % p).collect();
                add[a * d + b] = encode(&sum);
                let mut prod = vec![0u32; 2 * nn - 1];
                for (i, &x) in ca.iter().enumerate() {
                    for (j, &y) in cb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &poly, p);
                r.resize(nn, 0);
                mul[a * d + b] = encode(&r);
            }
        }

        let mut field = GaloisField {
            p,
            n,
            d,
            poly,
            add,
            mul,
            neg,
            inv: vec![0; d],
            trace: vec![0; d],
            primitive: Elem::ONE,
            exp: Vec::new(),
            log: vec![0; d],
        };
        for a in 1..d {
            field.inv[a] = (1..d).find(|&b| field.mul[a * d + b] == 1).expect("field element without inverse") as u16;
        }
        for a in 0..d {
            // tr(a) = a + a^p + ... + a^{p^{n-1}}, always lands in the prime field
            let mut acc = Elem::ZERO;
            let mut frob = Elem(a as u16);
            for _ in 0..n {
                acc = field.add(acc, frob);
                frob = field.pow(frob, p as u64);
            }
            debug_assert!(acc.code() < p as usize);
            field.trace[a] = acc.code() as u32;
        }
        field.primitive = (1..d)
            .map(|c| Elem(c as u16))
            .find(|&e| field.order(e) == d - 1)
            .expect("every finite field has a primitive element");
        let mut x = Elem::ONE;
        for k in 0..d - 1 {
            field.exp.push(x);
            field.log[x.code()] = k as u32;
            x = field.mul(x, field.primitive);
        }
        field
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn order(&self, a: Elem) -> usize {
        if a.is_zero() {
            return 0;
        }
        let mut x = a;
        let mut k = 1;
        while x != Elem::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Number of elements.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    pub fn is_even(&self) -> bool {
        self.p == 2
    }

    /// Denominator used for every phase in this field: 4p.
    pub fn phase_den(&self) -> u32 {
        4 * self.p
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + '_ {
        (0..self.d).map(|c| Elem(c as u16))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + Clone + '_ {
        (1..self.d).map(|c| Elem(c as u16))
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.code() < self.d
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::MixedFields)
        }
    }

    /// The prime-field element `k mod p`.
    pub fn scalar(&self, k: i64) -> Elem {
        Elem(k.rem_euclid(self.p as i64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.code() * self.d + b.code()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.code() * self.d + b.code()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.code()])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(Elem(self.inv[a.code()]))
        }
    }

    /// Inverse for callers that already excluded zero.
    #[inline]
    pub fn inv_nz(&self, a: Elem) -> Elem {
        debug_assert!(!a.is_zero());
        Elem(self.inv[a.code()])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Checked variants that reject foreign element codes.
    pub fn try_add(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn try_mul(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    pub fn try_neg(&self, a: Elem) -> Result<Elem> {
        Ok(self.neg(self.check(a)?))
    }

    pub fn try_inv(&self, a: Elem) -> Result<Elem> {
        self.inv(self.check(a)?)
    }

    /// Field trace as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Elem) -> u32 {
        self.trace[a.code()]
    }

    /// Additive character exp(2πi tr(a)/p).
    #[inline]
    pub fn character(&self, a: Elem) -> UnitPhase {
        UnitPhase::new(4 * self.trace(a) as i64, self.phase_den())
    }

    pub fn primitive_element(&self) -> Elem {
        self.primitive
    }

    /// θ^k for the designated primitive element.
    pub fn prim_pow(&self, k: i64) -> Elem {
        self.exp[k.rem_euclid(self.d as i64 - 1) as usize]
    }

    /// Discrete log base the primitive element, `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.code()])
        }
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let mut c = Vec::with_capacity(self.n as usize);
        let mut x = a.code();
        for _ in 0..self.n {
            c.push((x % self.p as usize) as u32);
            x /= self.p as usize;
        }
        c
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Elem> {
        if c.len() != self.n as usize {
            return Err(Error::LengthMismatch { expected: self.n as usize, got: c.len() });
        }
        if c.iter().any(|&x| x >= self.p) {
            return Err(Error::MixedFields);
        }
        Ok(Elem(c.iter().rev().fold(0usize, |acc, &x| acc * self.p as usize + x as usize) as u16))
    }

    /// Text form: prime fields print the residue, extensions print `0`, `1`
    /// or `t^k` with `t` the designated primitive element.
    pub fn format(&self, a: Elem) -> String {
        if self.n == 1 {
            return a.code().to_string();
        }
        match self.log(a) {
            None => "0".into(),
            Some(0) => "1".into(),
            Some(k) => format!("t^{k}"),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad field element {s:?}"));
        if s == "t" {
            return Ok(self.prim_pow(1));
        }
        if let Some(k) = s.strip_prefix("t^") {
            let k: i64 = k.trim().parse().map_err(|_| bad())?;
            return Ok(self.prim_pow(k));
        }
        let v: i64 = s.parse().map_err(|_| bad())?;
        if self.n == 1 {
            if v < 0 || v >= self.p as i64 {
                return Err(bad());
            }
            return Ok(self.scalar(v));
        }
        match v {
            0 => Ok(Elem::ZERO),
            1 => Ok(Elem::ONE),
            _ => Err(bad()),
        }
    }
}

// ---------------------------------------------------------------------------
// linear algebra over Z_p

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| (a * b) % p == 1).expect("nonzero residue has an inverse")
}

/// Invert a square matrix over Z_p (row-major `rows[i][j]`).
pub(crate) fn invert_mod(rows: &[Vec<u32>], p: u32) -> Result<Vec<Vec<u32>>> {
    let n = rows.len();
    let mut a: Vec<Vec<u32>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0).ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        let s = inv_mod(a[col][col], p);
        for x in a[col].iter_mut() {
            *x = (*x * s) % p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..2 * n {
                    a[r][c] = (a[r][c] + p * p - (f * a[col][c]) % p) % p;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Polynomial,
    Normal,
    SelfDual,
    Custom,
}

/// A basis of GF(p^n) over Z_p, with its trace-dual precomputed.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    elems: Vec<Elem>,
    dual: Vec<Elem>,
    kind: BasisKind,
}

impl Basis {
    pub fn new(field: &GaloisField, elems: Vec<Elem>, kind: BasisKind) -> Result<Self> {
        let n = field.n() as usize;
        if elems.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: elems.len() });
        }
        for &e in &elems {
            field.check(e)?;
        }
        // T[i][k] = tr(b_i θ^k); the dual is b'_j = Σ_k (T^{-1})[k][j] θ^k
        let t: Vec<Vec<u32>> = elems
            .iter()
            .map(|&b| (0..n).map(|k| field.trace(field.mul(b, field.from_coeffs(&unit(n, k)).unwrap()))).collect())
            .collect();
        let tinv = invert_mod(&t, field.p()).map_err(|_| Error::NotABasis)?;
        let dual = (0..n)
            .map(|j| {
                let c: Vec<u32> = (0..n).map(|k| tinv[k][j]).collect();
                field.from_coeffs(&c).unwrap()
            })
            .collect();
        Ok(Self { elems, dual, kind })
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn dual_elems(&self) -> &[Elem] {
        &self.dual
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_self_dual(&self) -> bool {
        self.elems == self.dual
    }
}

fn unit(n: usize, k: usize) -> Vec<u32> {
    (0..n).map(|j| u32::from(j == k)).collect()
}

/// The basis `{b'_j}` with `tr(b_i b'_j) = δ_ij`.
pub fn dual_basis(field: &GaloisField, b: &Basis) -> Result<Basis> {
    let kind = if b.is_self_dual() { BasisKind::SelfDual } else { BasisKind::Custom };
    let dual = Basis::new(field, b.dual.clone(), kind).map_err(|_| Error::SingularSystem)?;
    Ok(dual)
}

/// Coordinates of `a` in basis `b`: `a_j = tr(a b'_j)`.
pub fn expand(field: &GaloisField, a: Elem, b: &Basis) -> Vec<u32> {
    b.dual.iter().map(|&dj| field.trace(field.mul(a, dj))).collect()
}

pub fn combine(field: &GaloisField, coeffs: &[u32], b: &Basis) -> Result<Elem> {
    if coeffs.len() != b.len() {
        return Err(Error::LengthMismatch { expected: b.len(), got: coeffs.len() });
    }
    Ok(coeffs.iter().zip(&b.elems).fold(Elem::ZERO, |acc, (&c, &e)| {
        field.add(acc, field.mul(field.scalar(c as i64), e))
    }))
}

pub fn polynomial_basis(field: &GaloisField) -> Basis {
    let n = field.n() as usize;
    let elems = (0..n).map(|k| field.from_coeffs(&unit(n, k)).unwrap()).collect();
    Basis::new(field, elems, BasisKind::Polynomial).expect("polynomial basis is a basis")
}

/// First element (radix order) whose Frobenius conjugates form a basis.
pub fn normal_basis(field: &GaloisField) -> Option<Basis> {
    field.nonzero().find_map(|a| {
        let elems: Vec<Elem> = (0..field.n()).map(|k| field.pow(a, (field.p() as u64).pow(k))).collect();
        Basis::new(field, elems, BasisKind::Normal).ok()
    })
}

/// Frobenius orbit `(a, a^p, …)` of the lowest power `θ^k` whose orbit is a
/// self-dual basis.
pub fn normal_self_dual_basis(field: &GaloisField) -> Option<Basis> {
    (1..field.d() as i64).find_map(|k| {
        let a = field.prim_pow(k);
        let elems: Vec<Elem> = (0..field.n()).map(|j| field.pow(a, (field.p() as u64).pow(j))).collect();
        Basis::new(field, elems, BasisKind::SelfDual).ok().filter(Basis::is_self_dual)
    })
}

/// First self-dual basis found by depth-first search in radix order.
pub fn self_dual_basis(field: &GaloisField) -> Option<Basis> {
    fn extend(field: &GaloisField, chosen: &mut Vec<Elem>) -> bool {
        if chosen.len() == field.n() as usize {
            return true;
        }
        let start = chosen.last().map_or(1, |e| e.code() + 1);
        for c in start..field.d() {
            let e = Elem(c as u16);
            if field.trace(field.mul(e, e)) != 1 {
                continue;
            }
            if chosen.iter().any(|&s| field.trace(field.mul(s, e)) != 0) {
                continue;
            }
            chosen.push(e);
            if extend(field, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    if extend(field, &mut chosen) {
        Basis::new(field, chosen, BasisKind::SelfDual).ok()
    } else {
        None
    }
}

/// Polynomial, normal and self-dual bases (the latter two when they exist).
pub fn catalog_bases(field: &GaloisField) -> Vec<Basis> {
    let mut out = vec![polynomial_basis(field)];
    if let Some(mut b) = normal_basis(field) {
        if b.is_self_dual() {
            b.kind = BasisKind::SelfDual;
        }
        out.push(b);
    }
    if let Some(b) = self_dual_basis(field) {
        if !out.iter().any(|o| o.elems == b.elems) {
            out.push(b);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// orderings

#[derive(Clone, Debug, PartialEq)]
pub enum OrderStrategy {
    /// `0 ↦ 0`, `θ^k ↦ k` for `k = 1..d-1`.
    PrimitivePower { primitive: Option<Elem> },
    /// Index `Σ_j a_j p^{j-1}` of the basis coordinates.
    Radix { basis: Option<Basis> },
    /// Sort by trace value, then by power of the primitive element.
    TraceMajor { primitive: Option<Elem> },
}

impl OrderStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            OrderStrategy::PrimitivePower { .. } => "primitive",
            OrderStrategy::Radix { .. } => "radix",
            OrderStrategy::TraceMajor { .. } => "trace",
        }
    }
}

/// A bijection between field elements and axis indices `0..d`.
#[derive(Clone, Debug)]
pub struct Ordering {
    field: Arc<GaloisField>,
    strategy: OrderStrategy,
    elems: Vec<Elem>,
    index: Vec<usize>,
}

impl PartialEq for Ordering {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.elems == other.elems
    }
}

/// Build an ordering. Prime fields always get the natural order `0..p`.
pub fn ordering(field: &Arc<GaloisField>, strategy: OrderStrategy) -> Result<Ordering> {
    let d = field.d();
    let resolve_primitive = |given: &Option<Elem>| -> Result<Elem> {
        match given {
            None => Ok(field.primitive_element()),
            Some(g) if field.contains(*g) && field.order(*g) == d - 1 => Ok(*g),
            Some(_) => Err(Error::MissingPrimitive),
        }
    };
    let powers = |g: Elem| -> Vec<Elem> {
        let mut v = vec![Elem::ZERO];
        let mut x = g;
        for _ in 1..d {
            v.push(x);
            x = field.mul(x, g);
        }
        v
    };
    let elems: Vec<Elem> = match &strategy {
        OrderStrategy::Radix { basis: None } => return Err(Error::MissingBasis),
        _ if field.n() == 1 => field.elements().collect(),
        OrderStrategy::PrimitivePower { primitive } => powers(resolve_primitive(primitive)?),
        OrderStrategy::Radix { basis: Some(b) } => {
            let mut v = vec![Elem::ZERO; d];
            for e in field.elements() {
                let idx = expand(field, e, b).iter().rev().fold(0usize, |acc, &a| acc * field.p() as usize + a as usize);
                v[idx] = e;
            }
            v
        }
        OrderStrategy::TraceMajor { primitive } => {
            let mut v = powers(resolve_primitive(primitive)?);
            // stable sort keeps power order inside each trace class; 0 stays first
            v[1..].sort_by_key(|&e| field.trace(e));
            let zero_class_end = 1 + v[1..].iter().take_while(|&&e| field.trace(e) == 0).count();
            debug_assert!(zero_class_end >= 1);
            v
        }
    };
    let mut index = vec![usize::MAX; d];
    for (i, e) in elems.iter().enumerate() {
        index[e.code()] = i;
    }
    debug_assert!(index.iter().all(|&i| i < d));
    Ok(Ordering { field: field.clone(), strategy, elems, index })
}

impl Ordering {
    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn strategy(&self) -> &OrderStrategy {
        &self.strategy
    }

    pub fn d(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn elem(&self, i: usize) -> Elem {
        self.elems[i]
    }

    #[inline]
    pub fn index(&self, e: Elem) -> usize {
        self.index[e.code()]
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn labels(&self) -> Vec<String> {
        self.elems.iter().map(|&e| self.field.format(e)).collect()
    }
}
