//! Assembly of linear systems whose unknowns are graded families of matrices.
//!
//! Unknown blocks are laid out in the order they are pushed, row-major inside
//! each block. Equation blocks are matrix equations, also row-major.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;

use crate::linalg::{LinearSystem, Matrix, SolutionSpace};
use crate::ring::{RingElem, RingSpec};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Block {
    pub degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Unknowns {
    blocks: Vec<Block>,
    total: usize,
}

impl Unknowns {
    pub fn push(&mut self, degree: i64, rows: usize, cols: usize) -> Block {
        let b = Block { degree, rows, cols, offset: self.total };
        self.total += rows * cols;
        self.blocks.push(b);
        b
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn get(&self, degree: i64) -> Option<Block> {
        self.blocks.iter().copied().find(|b| b.degree == degree)
    }

    /// Splits a solution vector back into one matrix per block.
    pub fn extract(&self, ring: RingSpec, x: &[RingElem]) -> BTreeMap<i64, Matrix> {
        self.blocks
            .iter()
            .map(|b| {
                let m = Matrix::from_fn(ring, b.rows, b.cols, |i, j| x[b.offset + i * b.cols + j]);
                (b.degree, m)
            })
            .collect()
    }
}

/// One matrix-valued equation `sum of terms = rhs`, shape `rows x cols`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EqBlock {
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Equations {
    ring: RingSpec,
    blocks: Vec<EqBlock>,
    coeffs: Vec<Vec<(usize, RingElem)>>,
    rhs: Vec<RingElem>,
}

impl Equations {
    pub fn new(ring: RingSpec) -> Self {
        Equations { ring, blocks: Vec::new(), coeffs: Vec::new(), rhs: Vec::new() }
    }

    /// Opens an equation block with right-hand side `rhs`.
    pub fn block(&mut self, rhs: &Matrix) -> EqBlock {
        let b = EqBlock { rows: rhs.rows(), cols: rhs.cols(), offset: self.rhs.len() };
        self.rhs.extend_from_slice(rhs.entries());
        self.coeffs.resize(self.rhs.len(), Vec::new());
        self.blocks.push(b);
        b
    }

    /// Adds `sign * P X` to an equation block, `X` an unknown block.
    pub fn left(&mut self, eq: EqBlock, p: &Matrix, x: Block, sign: RingElem) {
        debug_assert_eq!((p.rows(), x.cols), (eq.rows, eq.cols));
        debug_assert_eq!(p.cols(), x.rows);
        for r in 0..eq.rows {
            for k in 0..p.cols() {
                let c0 = p.get(r, k);
                if c0.is_zero() {
                    continue;
                }
                for c in 0..eq.cols {
                    self.coeffs[eq.offset + r * eq.cols + c].push((x.offset + k * x.cols + c, sign * c0));
                }
            }
        }
    }

    /// Adds `sign * X Q` to an equation block.
    pub fn right(&mut self, eq: EqBlock, x: Block, q: &Matrix, sign: RingElem) {
        debug_assert_eq!((x.rows, q.cols()), (eq.rows, eq.cols));
        debug_assert_eq!(x.cols, q.rows());
        for k in 0..q.rows() {
            for c in 0..eq.cols {
                let c0 = q.get(k, c);
                if c0.is_zero() {
                    continue;
                }
                for r in 0..eq.rows {
                    self.coeffs[eq.offset + r * eq.cols + c].push((x.offset + r * x.cols + k, sign * c0));
                }
            }
        }
    }

    pub fn rhs(&self) -> &[RingElem] {
        &self.rhs
    }

    pub fn matrix(&self, unknowns: usize) -> Matrix {
        let mut a = Matrix::zero(self.ring, self.rhs.len(), unknowns);
        for (i, row) in self.coeffs.iter().enumerate() {
            for &(j, c) in row {
                let x = a.get(i, j) + c;
                a.set(i, j, x);
            }
        }
        a
    }
}

/// Solutions of an assembled system, handed back as graded matrix families.
#[derive(Debug, Clone)]
pub(crate) struct GradedSpace {
    ring: RingSpec,
    unknowns: Unknowns,
    space: SolutionSpace,
}

impl GradedSpace {
    /// `None` when the system has no solution.
    pub fn solve(ring: RingSpec, unknowns: Unknowns, eqs: &Equations) -> Option<Self> {
        let sys = LinearSystem::new(&eqs.matrix(unknowns.total()));
        let space = sys.solution_space(eqs.rhs()).expect("rhs matches the system")?;
        Some(GradedSpace { ring, unknowns, space })
    }

    pub fn count(&self) -> BigUint {
        self.space.count()
    }

    pub fn count_u128(&self) -> Option<u128> {
        self.space.count_u128()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<i64, Matrix> {
        self.unknowns.extract(self.ring, &self.space.random(rng))
    }

    pub fn iter(&self) -> impl Iterator<Item = BTreeMap<i64, Matrix>> + '_ {
        self.space.iter().map(|x| self.unknowns.extract(self.ring, &x))
    }
}
