use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{RingElem, RingSpec};

/// Dense row-major matrix over a coefficient ring.
///
/// Maps between free modules act on column vectors by left multiplication, so
/// a map `R^n -> R^m` is an `m x n` matrix. Zero rows or zero columns are
/// allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl Matrix {
    pub fn new(ring: RingSpec, rows: usize, cols: usize, entries: Vec<RingElem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| e.ring() != ring) {
            return Err(Error::RingMismatch { left: ring, right: bad.ring() });
        }
        Ok(Matrix { ring, rows, cols, entries })
    }

    /// Builds from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(ring: RingSpec, cols: usize, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row of length {} in a matrix with {cols} columns", r.len())));
        }
        Self::new(ring, n, cols, rows.into_iter().flatten().collect())
    }

    /// Integer entries, reduced into the ring. Handy in tests and examples.
    pub fn from_ints(ring: RingSpec, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().map(|r| r.iter().map(|&x| ring.from_int(x)).collect()).collect();
        Self::from_rows(ring, cols, data).expect("ragged rows")
    }

    pub fn from_fn(ring: RingSpec, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElem) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.ring(), ring, "ring mismatch");
                entries.push(x);
            }
        }
        Matrix { ring, rows, cols, entries }
    }

    pub fn zero(ring: RingSpec, rows: usize, cols: usize) -> Self {
        Matrix { ring, rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: RingSpec, n: usize) -> Self {
        Self::from_fn(ring, n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    /// `x * I_n`.
    pub fn scalar(x: RingElem, n: usize) -> Self {
        let ring = x.ring();
        Self::from_fn(ring, n, n, |i, j| if i == j { x } else { ring.zero() })
    }

    pub fn random<R: Rng + ?Sized>(ring: RingSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        let m = ring.modulus();
        Self::from_fn(ring, rows, cols, |_, _| {
            let a = rng.gen_range(0..m);
            let b = if ring.has_epsilon() { rng.gen_range(0..m) } else { 0 };
            ring.from_parts(a, b)
        })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElem) {
        assert_eq!(x.ring(), self.ring, "ring mismatch");
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<RingElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    fn same_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch { left: self.ring, right: other.ring });
        }
        Ok(())
    }

    fn same_shape(&self, other: &Matrix, what: &str) -> Result<()> {
        self.same_ring(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "sum")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&x, &y)| x + y).collect();
        Ok(Matrix { entries, ..*self })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "difference")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&x, &y)| x - y).collect();
        Ok(Matrix { entries, ..*self })
    }

    pub fn neg(&self) -> Matrix {
        Matrix { entries: self.entries.iter().map(|&x| -x).collect(), ..*self }
    }

    pub fn scale(&self, c: RingElem) -> Matrix {
        assert_eq!(c.ring(), self.ring, "ring mismatch");
        Matrix { entries: self.entries.iter().map(|&x| c * x).collect(), ..*self }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A * x` for a column vector `x`.
    pub fn apply(&self, x: &[RingElem]) -> Result<Vec<RingElem>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(self.ring.zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok((0..self.rows).fold(self.ring.zero(), |acc, i| acc + self.get(i, i)))
    }

    pub fn det(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(super::det::determinant(self))
    }

    /// `[[a, b], [c, d]]` as one matrix. Blocks in a row share a row count and
    /// blocks in a column share a column count.
    pub fn block2x2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
        for x in [b, c, d] {
            a.same_ring(x)?;
        }
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Dimension(format!(
                "incompatible blocks {:?} {:?} / {:?} {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        let (r0, c0) = a.shape();
        Ok(Matrix::from_fn(a.ring, r0 + c.rows, c0 + b.cols, |i, j| match (i < r0, j < c0) {
            (true, true) => a.get(i, j),
            (true, false) => b.get(i, j - c0),
            (false, true) => c.get(i - r0, j),
            (false, false) => d.get(i - r0, j - c0),
        }))
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix> {
        Self::block2x2(
            self,
            &Matrix::zero(self.ring, self.rows, other.cols),
            &Matrix::zero(self.ring, other.rows, self.cols),
            other,
        )
    }

    /// The rectangular sub-block at `(r0, c0)` of the given shape.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.ring, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Reinterprets the entries in another ring of the same modulus, e.g.
    /// `Z/m -> Z/m[e]`.
    pub fn lift_to(&self, ring: RingSpec) -> Result<Matrix> {
        if ring.modulus() != self.ring.modulus() || (self.ring.has_epsilon() && !ring.has_epsilon()) {
            return Err(Error::RingMismatch { left: self.ring, right: ring });
        }
        let entries = self.entries.iter().map(|x| ring.from_parts(x.real(), x.eps_part())).collect();
        Ok(Matrix { ring, entries, ..*self })
    }
}

impl fmt::Display for Matrix {
    /// `[[a,b],[c,d]]`, empty rows as `[]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
