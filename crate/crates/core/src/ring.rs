//! Coefficient rings `Z/m` and `Z/m[e]/(e^2)`.
//!
//! Elements carry their ring so that mixing operands from different rings is
//! caught. The arithmetic operators panic on a mismatch; the `try_*` methods
//! report it as [`Error::RingMismatch`]. Matrix-level code checks rings once
//! up front and then uses the operators.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// `Z/modulus`, or `Z/modulus[e]/(e^2)` when `has_epsilon` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingSpec {
    modulus: u64,
    has_epsilon: bool,
}

impl RingSpec {
    pub fn new(modulus: u64, has_epsilon: bool) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidRing(format!("modulus must be at least 2, got {modulus}")));
        }
        if modulus > u32::MAX as u64 {
            return Err(Error::InvalidRing(format!("modulus {modulus} is too large")));
        }
        Ok(RingSpec { modulus, has_epsilon })
    }

    /// `Z/m`. Panics if `m < 2`.
    pub fn zmod(m: u64) -> Self {
        Self::new(m, false).expect("invalid modulus")
    }

    /// `Z/m[e]/(e^2)`. Panics if `m < 2`.
    pub fn dual(m: u64) -> Self {
        Self::new(m, true).expect("invalid modulus")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn has_epsilon(&self) -> bool {
        self.has_epsilon
    }

    /// The base ring `Z/m` (identity when there is no epsilon).
    pub fn base(&self) -> RingSpec {
        RingSpec { modulus: self.modulus, has_epsilon: false }
    }

    /// `Z/m[e]` over the same modulus.
    pub fn with_epsilon(&self) -> RingSpec {
        RingSpec { modulus: self.modulus, has_epsilon: true }
    }

    pub fn cardinality(&self) -> u128 {
        let m = self.modulus as u128;
        if self.has_epsilon {
            m * m
        } else {
            m
        }
    }

    pub fn zero(&self) -> RingElem {
        RingElem { ring: *self, a: 0, b: 0 }
    }

    pub fn one(&self) -> RingElem {
        RingElem { ring: *self, a: 1, b: 0 }
    }

    /// The element `e`, when the ring has one.
    pub fn epsilon(&self) -> Option<RingElem> {
        self.has_epsilon.then_some(RingElem { ring: *self, a: 0, b: 1 })
    }

    /// Image of an integer.
    pub fn from_int(&self, n: i64) -> RingElem {
        RingElem { ring: *self, a: self.reduce(n as i128), b: 0 }
    }

    /// The element `a + b*e`, reducing both parts mod `m`. Fails when `b != 0 mod m`
    /// in a ring without epsilon.
    pub fn elem(&self, a: i64, b: i64) -> Result<RingElem> {
        let b = self.reduce(b as i128);
        if b != 0 && !self.has_epsilon {
            return Err(Error::InvalidRing(format!("{self} has no epsilon part")));
        }
        Ok(RingElem { ring: *self, a: self.reduce(a as i128), b })
    }

    pub(crate) fn from_parts(&self, a: u64, b: u64) -> RingElem {
        debug_assert!(a < self.modulus && b < self.modulus);
        debug_assert!(self.has_epsilon || b == 0);
        RingElem { ring: *self, a, b }
    }

    pub(crate) fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    /// `(-1)^k` in this ring.
    pub fn sign(&self, k: i64) -> RingElem {
        if k.rem_euclid(2) == 0 {
            self.one()
        } else {
            -self.one()
        }
    }

    /// Every element, ordered by `(b, a)`.
    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        let m = self.modulus;
        let bs = if self.has_epsilon { m } else { 1 };
        (0..bs).flat_map(move |b| (0..m).map(move |a| RingElem { ring: *self, a, b }))
    }

    pub fn units(&self) -> impl Iterator<Item = RingElem> + '_ {
        self.elements().filter(RingElem::is_unit)
    }

    /// True when the ring has no nonzero nilpotent: no epsilon and `m` squarefree.
    pub fn is_reduced(&self) -> bool {
        !self.has_epsilon && is_squarefree(self.modulus)
    }

    /// A nonzero element of square zero, if one exists.
    ///
    /// With epsilon this is `e`. For `Z/m` with `m = prod p^k` it is
    /// `prod p^ceil(k/2)`, the least positive residue whose square is divisible
    /// by `m`; it is nonzero exactly when some `k >= 2`.
    pub fn nilpotent_witness(&self) -> Option<RingElem> {
        if self.has_epsilon {
            return self.epsilon();
        }
        let x = factorize(self.modulus).into_iter().map(|(p, k)| p.pow(k.div_ceil(2))).product::<u64>();
        (x != self.modulus).then(|| self.from_parts(x, 0))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_epsilon {
            write!(f, "Z/{}[e]", self.modulus)
        } else {
            write!(f, "Z/{}", self.modulus)
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `Z/4`, `Z/3[e]`, with arbitrary whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad ring `{s}` (expected e.g. `Z/4` or `Z/3[e]`)"));
        let rest = compact.strip_prefix("Z/").or_else(|| compact.strip_prefix("z/")).ok_or_else(bad)?;
        let (digits, eps) = match rest.strip_suffix("[e]").or_else(|| rest.strip_suffix("[ε]")) {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let m: u64 = digits.parse().map_err(|_| bad())?;
        RingSpec::new(m, eps)
    }
}

/// `a + b*e` with `0 <= a, b < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    ring: RingSpec,
    a: u64,
    b: u64,
}

impl RingElem {
    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    /// The standard part `a`.
    pub fn real(&self) -> u64 {
        self.a
    }

    /// The epsilon part `b`.
    pub fn eps_part(&self) -> u64 {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_one(&self) -> bool {
        self.a == 1 % self.ring.modulus && self.b == 0
    }

    fn check(&self, other: &RingElem) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch { left: self.ring, right: other.ring });
        }
        Ok(())
    }

    pub fn try_add(self, other: RingElem) -> Result<RingElem> {
        self.check(&other)?;
        Ok(self + other)
    }

    pub fn try_sub(self, other: RingElem) -> Result<RingElem> {
        self.check(&other)?;
        Ok(self - other)
    }

    pub fn try_mul(self, other: RingElem) -> Result<RingElem> {
        self.check(&other)?;
        Ok(self * other)
    }

    /// A unit exactly when `gcd(a, m) = 1`: `e` is nilpotent, so `a + b*e` is
    /// invertible iff `a` is.
    pub fn is_unit(&self) -> bool {
        self.a.gcd(&self.ring.modulus) == 1
    }

    /// `(a + b*e)^-1 = a^-1 - b*a^-2*e`.
    pub fn inverse(&self) -> Option<RingElem> {
        let m = self.ring.modulus;
        let ai = mod_inverse(self.a, m)?;
        let b = mul_mod(m - self.b % m, mul_mod(ai, ai, m), m) % m;
        Some(self.ring.from_parts(ai, b))
    }

    pub fn pow(&self, mut k: u64) -> RingElem {
        let mut base = *self;
        let mut acc = self.ring.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Scalar multiple by an integer.
    pub fn scale(&self, n: i64) -> RingElem {
        *self * self.ring.from_int(n)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "e"),
            (a, 1) => write!(f, "{a}+e"),
            (0, b) => write!(f, "{b}*e"),
            (a, b) => write!(f, "{a}+{b}*e"),
        }
    }
}

fn mul_mod(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

fn add_mod(x: u64, y: u64, m: u64) -> u64 {
    let s = x + y;
    if s >= m {
        s - m
    } else {
        s
    }
}

/// Inverse of `x` modulo `m`, if `gcd(x, m) = 1`.
pub(crate) fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    let g = i128::extended_gcd(&(x as i128), &(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let m = self.ring.modulus;
        RingElem { ring: self.ring, a: add_mod(self.a, rhs.a, m), b: add_mod(self.b, rhs.b, m) }
    }
}

impl AddAssign for RingElem {
    fn add_assign(&mut self, rhs: RingElem) {
        *self = *self + rhs;
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        let m = self.ring.modulus;
        RingElem { ring: self.ring, a: (m - self.a) % m, b: (m - self.b) % m }
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        self + (-rhs)
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    // (a + b e)(c + d e) = ac + (ad + bc) e
    fn mul(self, rhs: RingElem) -> RingElem {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let m = self.ring.modulus;
        let a = mul_mod(self.a, rhs.a, m);
        let b = add_mod(mul_mod(self.a, rhs.b, m), mul_mod(self.b, rhs.a, m), m);
        RingElem { ring: self.ring, a, b }
    }
}

impl RingSpec {
    /// Parses `2`, `1+2*e`, `e`, `-1`, `3 - e` (whitespace-tolerant).
    pub fn parse_elem(&self, s: &str) -> Result<RingElem> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |why: &str| Error::Parse(format!("bad ring element `{s}`: {why}"));
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut a: i128 = 0;
        let mut b: i128 = 0;
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let negative = if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                true
            } else if let Some(r) = rest.strip_prefix('+') {
                if first {
                    return Err(bad("leading `+`"));
                }
                rest = r;
                false
            } else if first {
                false
            } else {
                return Err(bad("expected `+` or `-`"));
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let (coeff, is_eps) = if term == "e" || term == "ε" {
                (1i128, true)
            } else if let Some(c) = term.strip_suffix("*e").or_else(|| term.strip_suffix("*ε")) {
                (c.parse::<i128>().map_err(|_| bad("bad coefficient"))?, true)
            } else {
                (term.parse::<i128>().map_err(|_| bad("bad integer"))?, false)
            };
            let coeff = if negative { -coeff } else { coeff };
            let slot = if is_eps { &mut b } else { &mut a };
            *slot = slot.checked_add(coeff).ok_or_else(|| bad("overflow"))?;
        }
        let b = self.reduce(b);
        if b != 0 && !self.has_epsilon {
            return Err(Error::Parse(format!("element `{s}` has an e part but the ring is {self}")));
        }
        Ok(RingElem { ring: *self, a: self.reduce(a), b })
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, k)| k == 1)
}
