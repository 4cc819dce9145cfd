//! Graded determinant lines, Koszul signs and determinants of chain
//! automorphisms.
//!
//! Every term of a complex is free with its standard basis, so a line is
//! pinned down by its degree and a unit measuring the change of basis.

use std::fmt;

use crate::complex::{check_ring, ChainMap, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{RingElem, RingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GradedLine {
    degree: i64,
    scalar: RingElem,
}

impl GradedLine {
    pub fn new(degree: i64, scalar: RingElem) -> Result<Self> {
        if !scalar.is_unit() {
            return Err(Error::Dimension(format!("line scalar {scalar} is not a unit")));
        }
        Ok(GradedLine { degree, scalar })
    }

    /// The line of degree `degree` with its canonical basis.
    pub fn canonical(ring: RingSpec, degree: i64) -> Self {
        GradedLine { degree, scalar: ring.one() }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn scalar(&self) -> RingElem {
        self.scalar
    }

    pub fn ring(&self) -> RingSpec {
        self.scalar.ring()
    }

    pub fn tensor(&self, other: &GradedLine) -> Result<GradedLine> {
        Ok(GradedLine { degree: self.degree + other.degree, scalar: self.scalar.try_mul(other.scalar)? })
    }

    /// The dual line, of opposite degree.
    pub fn dual(&self) -> GradedLine {
        GradedLine { degree: -self.degree, scalar: self.scalar.inverse().expect("scalar is a unit") }
    }
}

impl fmt::Display for GradedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.degree, self.scalar)
    }
}

/// `(euler_rank(K), 1)`.
pub fn det_line_of(k: &PerfectComplex) -> GradedLine {
    GradedLine::canonical(k.ring(), k.euler_rank())
}

pub fn tensor(a: &GradedLine, b: &GradedLine) -> Result<GradedLine> {
    a.tensor(b)
}

/// The sign `(-1)^(rs)` by which `a (x) b -> b (x) a` acts.
pub fn koszul_swap(a: &GradedLine, b: &GradedLine) -> Result<RingElem> {
    check_ring(a.ring(), b.ring())?;
    Ok(a.ring().sign(a.degree * b.degree))
}

/// `prod det(u^n)^((-1)^n)`.
pub fn det_of_automorphism(u: &ChainMap) -> Result<RingElem> {
    if !u.is_endo() {
        return Err(Error::Dimension("determinant of a map that is not an endomorphism".into()));
    }
    let ring = u.ring();
    let mut acc = ring.one();
    for n in u.window() {
        let d = u.comp(n).det()?;
        let d = if n.rem_euclid(2) == 0 { Some(d) } else { d.inverse() };
        match d {
            Some(x) if x.is_unit() => acc = acc * x,
            _ => return Err(Error::NotAutomorphism { degree: n, det: u.comp(n).det()?.to_string() }),
        }
    }
    Ok(acc)
}

/// `(det(I + e u), 1 + e Tr(u))` in `Z/m[e]`, computed independently.
pub fn det_trace_bridge(u: &Matrix) -> Result<(RingElem, RingElem)> {
    let base = u.ring();
    if base.has_epsilon() {
        return Err(Error::Unsupported(format!("bridge needs a ring without e, got {base}")));
    }
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let dual = base.with_epsilon();
    let eps = dual.epsilon().expect("dual ring");
    let lifted = u.lift_to(dual)?.scale(eps);
    let det = Matrix::identity(dual, u.rows()).add(&lifted)?.det()?;
    let tr = u.trace()?;
    Ok((det, dual.one() + eps * dual.from_int(tr.real() as i64)))
}
