//! Prime-field arithmetic.
//!
//! Residues are always kept fully reduced, so structural equality of
//! elements and vectors is equality in the field. Bulk code works on raw
//! `u32` residues through [`FieldModulus`]; [`FieldElement`] and
//! [`FieldVector`] carry their modulus and check it on every binary op.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{param, PirError, Result};

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u32 = 1 << 16;

/// A prime modulus `q < 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldModulus(u32);

impl FieldModulus {
    pub fn new(q: u32) -> Result<Self> {
        if q >= MAX_MODULUS {
            return param(alloc::format!("modulus {q} exceeds 2^16"));
        }
        if !is_prime(q) {
            return param(alloc::format!("modulus {q} is not prime"));
        }
        Ok(FieldModulus(q))
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.0
    }

    /// Canonical residue of an arbitrary integer.
    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    pub fn element(self, v: i64) -> FieldElement {
        FieldElement { value: self.reduce(v), modulus: self }
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { value: 0, modulus: self }
    }

    pub fn one(self) -> FieldElement {
        FieldElement { value: 1, modulus: self }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(PirError::DivisionByZero { modulus: self.0 });
        }
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        Ok(self.reduce(t0))
    }

    pub fn div(self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Inner product of two residue slices of equal length.
    pub fn dot(self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        let q = self.0 as u64;
        let mut acc = 0u64;
        for (x, y) in a.iter().zip(b) {
            acc += *x as u64 * *y as u64;
            // q^2 < 2^32, so at least 2^32 terms fit before overflow; fold occasionally.
            if acc >= 1 << 62 {
                acc %= q;
            }
        }
        (acc % q) as u32
    }

    /// Signed representative in `(-q/2, q/2]`.
    pub fn centered(self, a: u32) -> i64 {
        if a as u64 * 2 > self.0 as u64 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0)
    }
}

/// Trial division; moduli are desk-scale.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u32) -> u32 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// A residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: FieldModulus,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> FieldModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElement) -> Result<()> {
        if self.modulus != other.modulus {
            return param(alloc::format!(
                "modulus mismatch: {} vs {}",
                self.modulus,
                other.modulus
            ));
        }
        Ok(())
    }

    /// Applies `op`; `rhs` is ignored for [`FieldOp::Neg`] but must still share the modulus.
    pub fn apply(self, op: FieldOp, rhs: FieldElement) -> Result<FieldElement> {
        self.check(rhs)?;
        let m = self.modulus;
        let value = match op {
            FieldOp::Add => m.add(self.value, rhs.value),
            FieldOp::Sub => m.sub(self.value, rhs.value),
            FieldOp::Mul => m.mul(self.value, rhs.value),
            FieldOp::Neg => m.neg(self.value),
        };
        Ok(FieldElement { value, modulus: m })
    }

    pub fn try_add(self, rhs: FieldElement) -> Result<FieldElement> {
        self.apply(FieldOp::Add, rhs)
    }

    pub fn try_sub(self, rhs: FieldElement) -> Result<FieldElement> {
        self.apply(FieldOp::Sub, rhs)
    }

    pub fn try_mul(self, rhs: FieldElement) -> Result<FieldElement> {
        self.apply(FieldOp::Mul, rhs)
    }

    pub fn inverse(self) -> Result<FieldElement> {
        Ok(FieldElement { value: self.modulus.inv(self.value)?, modulus: self.modulus })
    }
}

// The operator impls panic on a modulus mismatch; use the `try_*` forms on untrusted input.
impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field elements from different moduli")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field elements from different moduli")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field elements from different moduli")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector over a single prime field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldVector {
    modulus: FieldModulus,
    elems: Vec<u32>,
}

impl FieldVector {
    /// Wraps residues, reducing any that are out of range.
    pub fn new(modulus: FieldModulus, mut elems: Vec<u32>) -> Self {
        for e in elems.iter_mut() {
            *e %= modulus.q();
        }
        FieldVector { modulus, elems }
    }

    pub fn from_i64(modulus: FieldModulus, values: &[i64]) -> Self {
        FieldVector { modulus, elems: values.iter().map(|&v| modulus.reduce(v)).collect() }
    }

    pub fn from_elements(modulus: FieldModulus, elems: &[FieldElement]) -> Result<Self> {
        let mut out = Vec::with_capacity(elems.len());
        for e in elems {
            if e.modulus != modulus {
                return param("vector elements must share one modulus");
            }
            out.push(e.value);
        }
        Ok(FieldVector { modulus, elems: out })
    }

    pub fn zeros(modulus: FieldModulus, len: usize) -> Self {
        FieldVector { modulus, elems: alloc::vec![0; len] }
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<FieldElement> {
        self.elems.get(i).map(|&value| FieldElement { value, modulus: self.modulus })
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.elems
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.elems
    }

    pub fn is_zero(&self) -> bool {
        self.elems.iter().all(|&e| e == 0)
    }

    fn check(&self, other: &FieldVector) -> Result<()> {
        if self.modulus != other.modulus {
            return param("vectors over different moduli");
        }
        if self.len() != other.len() {
            return param(alloc::format!("length mismatch: {} vs {}", self.len(), other.len()));
        }
        Ok(())
    }

    /// `sum_i self_i * other_i`.
    pub fn inner_product(&self, other: &FieldVector) -> Result<FieldElement> {
        self.check(other)?;
        Ok(FieldElement { value: self.modulus.dot(&self.elems, &other.elems), modulus: self.modulus })
    }

    pub fn try_add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check(other)?;
        let m = self.modulus;
        let elems = self.elems.iter().zip(&other.elems).map(|(a, b)| m.add(*a, *b)).collect();
        Ok(FieldVector { modulus: m, elems })
    }

    pub fn scaled(&self, c: u32) -> FieldVector {
        let m = self.modulus;
        FieldVector { modulus: m, elems: self.elems.iter().map(|&a| m.mul(a, c)).collect() }
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}
