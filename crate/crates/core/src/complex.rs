//! Bounded complexes of finite free modules, chain maps and homotopy data.
//!
//! Indexing is cohomological: `d^n : K^n -> K^(n+1)`, stored as an
//! `r(n+1) x r(n)` matrix. Every complex carries an explicit degree window
//! `lo..=hi`; outside it all terms are zero and all maps are empty matrices.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;

use crate::equations::{Equations, GradedSpace, Unknowns};
use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Matrix, SolutionSpace};
use crate::ring::{RingElem, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerfectComplex {
    ring: RingSpec,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix>,
}

impl PerfectComplex {
    /// Builds a complex on degrees `lo..=lo+ranks.len()-1`. `diffs` maps a
    /// degree `n` to `d^n`; missing differentials are zero. Only shapes are
    /// checked here; see [`PerfectComplex::validate`] for `d^2 = 0`.
    pub fn new(ring: RingSpec, lo: i64, ranks: Vec<usize>, diffs: BTreeMap<i64, Matrix>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Dimension("a complex needs a nonempty degree window".into()));
        }
        let hi = lo + ranks.len() as i64 - 1;
        let rank = |n: i64| if n < lo || n > hi { 0 } else { ranks[(n - lo) as usize] };
        for (&n, d) in &diffs {
            if n < lo || n >= hi {
                return Err(Error::DegreeOutOfWindow { degree: n, lo, hi: hi - 1 });
            }
            if d.ring() != ring {
                return Err(Error::RingMismatch { left: ring, right: d.ring() });
            }
            if d.shape() != (rank(n + 1), rank(n)) {
                return Err(Error::Dimension(format!(
                    "d^{n} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    rank(n + 1),
                    rank(n)
                )));
            }
        }
        let diffs = (lo..hi)
            .map(|n| diffs.get(&n).cloned().unwrap_or_else(|| Matrix::zero(ring, rank(n + 1), rank(n))))
            .collect();
        Ok(PerfectComplex { ring, lo, ranks, diffs })
    }

    /// The free module `R^rank` placed in a single degree.
    pub fn single(ring: RingSpec, degree: i64, rank: usize) -> Self {
        PerfectComplex { ring, lo: degree, ranks: vec![rank], diffs: vec![] }
    }

    /// Two-term complex `R^r0 --d--> R^r1` in degrees `lo, lo+1`.
    pub fn two_term(lo: i64, d: Matrix) -> Self {
        PerfectComplex { ring: d.ring(), lo, ranks: vec![d.cols(), d.rows()], diffs: vec![d] }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.ranks[(n - self.lo) as usize]
        }
    }

    /// `d^n`, a zero matrix of the right shape outside the stored range.
    pub fn diff(&self, n: i64) -> Matrix {
        if n >= self.lo && n < self.hi() {
            self.diffs[(n - self.lo) as usize].clone()
        } else {
            Matrix::zero(self.ring, self.rank(n + 1), self.rank(n))
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Checks `d^(n+1) d^n = 0`, reporting the first failing `n`.
    pub fn validate(&self) -> Result<()> {
        for w in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[w + 1].mul(&self.diffs[w])?.is_zero() {
                return Err(Error::NotAComplex { degree: self.lo + w as i64 });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// `sum (-1)^n r(n)`.
    pub fn euler_rank(&self) -> i64 {
        self.degrees().map(|n| if n.rem_euclid(2) == 0 { 1 } else { -1 } * self.rank(n) as i64).sum()
    }

    /// `K[k]`: `K[k]^n = K^(n+k)`, differential `(-1)^k d^(n+k)`.
    pub fn shift(&self, k: i64) -> PerfectComplex {
        let s = self.ring.sign(k);
        PerfectComplex {
            ring: self.ring,
            lo: self.lo - k,
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(s)).collect(),
        }
    }

    /// The same complex on a wider window `lo..=hi` (must contain the current one).
    pub fn widen(&self, lo: i64, hi: i64) -> PerfectComplex {
        assert!(lo <= self.lo && hi >= self.hi(), "widen must not shrink the window");
        let ranks = (lo..=hi).map(|n| self.rank(n)).collect();
        let diffs = (lo..hi).map(|n| self.diff(n)).collect();
        PerfectComplex { ring: self.ring, lo, ranks, diffs }
    }

    pub fn direct_sum(&self, other: &PerfectComplex) -> Result<PerfectComplex> {
        check_ring(self.ring, other.ring)?;
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let ranks = (lo..=hi).map(|n| self.rank(n) + other.rank(n)).collect();
        let diffs = (lo..hi).map(|n| self.diff(n).direct_sum(&other.diff(n))).collect::<Result<_>>()?;
        Ok(PerfectComplex { ring: self.ring, lo, ranks, diffs })
    }

    /// `Cone(f)^n = K^(n+1) (+) L^n`, `d = [[-d_K, 0], [f, d_L]]`.
    pub fn mapping_cone(f: &ChainMap) -> Result<PerfectComplex> {
        f.validate()?;
        let (k, l) = (&f.source, &f.target);
        let lo = (k.lo - 1).min(l.lo);
        let hi = (k.hi() - 1).max(l.hi());
        let ranks = (lo..=hi).map(|n| k.rank(n + 1) + l.rank(n)).collect();
        let diffs = (lo..hi)
            .map(|n| {
                Matrix::block2x2(
                    &k.diff(n + 1).neg(),
                    &Matrix::zero(k.ring, k.rank(n + 2), l.rank(n)),
                    &f.comp(n + 1),
                    &l.diff(n),
                )
            })
            .collect::<Result<_>>()?;
        Ok(PerfectComplex { ring: k.ring, lo, ranks, diffs })
    }

    /// A random complex with the given ranks: each differential is sampled
    /// uniformly among the maps killing the previous one.
    pub fn random<R: Rng + ?Sized>(ring: RingSpec, lo: i64, ranks: Vec<usize>, rng: &mut R) -> PerfectComplex {
        let mut diffs = BTreeMap::new();
        let mut prev: Option<Matrix> = None;
        for w in 0..ranks.len().saturating_sub(1) {
            let (src, tgt) = (ranks[w], ranks[w + 1]);
            let d = match &prev {
                None => Matrix::random(ring, tgt, src, rng),
                Some(p) => annihilator_space(p, tgt).random(rng),
            };
            diffs.insert(lo + w as i64, d.clone());
            prev = Some(d);
        }
        PerfectComplex::new(ring, lo, ranks, diffs).expect("shapes are consistent")
    }

    /// Every complex with the given ranks on `lo..`, in a fixed order.
    pub fn enumerate(ring: RingSpec, lo: i64, ranks: &[usize]) -> Vec<PerfectComplex> {
        let mut partial: Vec<Vec<Matrix>> = vec![vec![]];
        for w in 0..ranks.len().saturating_sub(1) {
            let (src, tgt) = (ranks[w], ranks[w + 1]);
            let mut next = Vec::new();
            for ds in partial {
                let space = match ds.last() {
                    None => MatrixSpace::all(ring, tgt, src),
                    Some(p) => annihilator_space(p, tgt),
                };
                for d in space.iter() {
                    let mut e = ds.clone();
                    e.push(d);
                    next.push(e);
                }
            }
            partial = next;
        }
        partial.into_iter().map(|ds| PerfectComplex { ring, lo, ranks: ranks.to_vec(), diffs: ds }).collect()
    }
}

pub(crate) fn check_ring(a: RingSpec, b: RingSpec) -> Result<()> {
    if a != b {
        return Err(Error::RingMismatch { left: a, right: b });
    }
    Ok(())
}

/// A set of matrices of a fixed shape given as an affine solution space.
#[derive(Debug, Clone)]
pub struct MatrixSpace {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    space: SolutionSpace,
}

impl MatrixSpace {
    /// All `rows x cols` matrices.
    pub fn all(ring: RingSpec, rows: usize, cols: usize) -> Self {
        let sys = LinearSystem::new(&Matrix::zero(ring, 0, rows * cols));
        MatrixSpace { ring, rows, cols, space: sys.kernel_space() }
    }

    fn to_matrix(&self, x: Vec<RingElem>) -> Matrix {
        Matrix::new(self.ring, self.rows, self.cols, x).expect("shape")
    }

    pub fn count(&self) -> BigUint {
        self.space.count()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        self.to_matrix(self.space.random(rng))
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.space.iter().map(|x| self.to_matrix(x))
    }
}

/// Matrices `X` of shape `rows x p.rows()` with `X p = 0`.
fn annihilator_space(p: &Matrix, rows: usize) -> MatrixSpace {
    let ring = p.ring();
    let mut unknowns = Unknowns::default();
    let x = unknowns.push(0, rows, p.rows());
    let mut eqs = Equations::new(ring);
    let eq = eqs.block(&Matrix::zero(ring, rows, p.cols()));
    eqs.right(eq, x, p, ring.one());
    let sys = LinearSystem::new(&eqs.matrix(unknowns.total()));
    MatrixSpace { ring, rows, cols: p.rows(), space: sys.kernel_space() }
}

/// Degree-0 map of complexes: `f^n : S^n -> T^n`, stored on the union of the
/// two windows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainMap {
    source: PerfectComplex,
    target: PerfectComplex,
    lo: i64,
    comps: Vec<Matrix>,
}

fn union_window(a: &PerfectComplex, b: &PerfectComplex) -> (i64, i64) {
    (a.lo.min(b.lo), a.hi().max(b.hi()))
}

impl ChainMap {
    /// Components by degree; missing degrees are zero. Shapes are checked,
    /// the chain-map condition is not (see [`ChainMap::validate`]).
    pub fn new(source: PerfectComplex, target: PerfectComplex, comps: BTreeMap<i64, Matrix>) -> Result<Self> {
        check_ring(source.ring, target.ring)?;
        let (lo, hi) = union_window(&source, &target);
        for (&n, f) in &comps {
            check_ring(source.ring, f.ring())?;
            let shape = (target.rank(n), source.rank(n));
            if f.shape() != shape {
                return Err(Error::Dimension(format!(
                    "component in degree {n} is {}x{}, expected {}x{}",
                    f.rows(),
                    f.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        let comps = (lo..=hi)
            .map(|n| {
                comps.get(&n).cloned().unwrap_or_else(|| Matrix::zero(source.ring, target.rank(n), source.rank(n)))
            })
            .collect();
        Ok(ChainMap { source, target, lo, comps })
    }

    pub fn zero(source: &PerfectComplex, target: &PerfectComplex) -> Result<Self> {
        Self::new(source.clone(), target.clone(), BTreeMap::new())
    }

    pub fn identity(k: &PerfectComplex) -> Self {
        let comps = k.degrees().map(|n| (n, Matrix::identity(k.ring, k.rank(n)))).collect();
        Self::new(k.clone(), k.clone(), comps).expect("identity shapes")
    }

    /// Multiplication by a scalar on every term.
    pub fn scalar(k: &PerfectComplex, c: RingElem) -> Result<Self> {
        check_ring(k.ring, c.ring())?;
        let comps = k.degrees().map(|n| (n, Matrix::scalar(c, k.rank(n)))).collect();
        Self::new(k.clone(), k.clone(), comps)
    }

    pub fn source(&self) -> &PerfectComplex {
        &self.source
    }

    pub fn target(&self) -> &PerfectComplex {
        &self.target
    }

    pub fn ring(&self) -> RingSpec {
        self.source.ring
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn window(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.lo + self.comps.len() as i64 - 1
    }

    /// `f^n`, zero outside the stored window.
    pub fn comp(&self, n: i64) -> Matrix {
        let w = self.window();
        if w.contains(&n) {
            self.comps[(n - self.lo) as usize].clone()
        } else {
            Matrix::zero(self.ring(), self.target.rank(n), self.source.rank(n))
        }
    }

    /// The nonzero-shaped components by degree.
    pub fn components(&self) -> BTreeMap<i64, Matrix> {
        self.window().map(|n| (n, self.comp(n))).filter(|(_, m)| m.rows() > 0 && m.cols() > 0).collect()
    }

    /// Checks `d_T^n f^n = f^(n+1) d_S^n` in every degree.
    pub fn validate(&self) -> Result<()> {
        for n in self.lo - 1..=*self.window().end() {
            let lhs = self.target.diff(n).mul(&self.comp(n))?;
            let rhs = self.comp(n + 1).mul(&self.source.diff(n))?;
            if lhs != rhs {
                return Err(Error::NotAChainMap { degree: n });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    fn same_ends(&self, other: &ChainMap) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Dimension("chain maps have different source or target".into()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &ChainMap, op: impl Fn(&Matrix, &Matrix) -> Result<Matrix>) -> Result<ChainMap> {
        self.same_ends(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| op(a, b)).collect::<Result<_>>()?;
        Ok(ChainMap { comps, ..self.clone() })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip_with(other, Matrix::add)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip_with(other, Matrix::sub)
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(Matrix::neg).collect(), ..self.clone() }
    }

    /// `self o first` (apply `first`, then `self`), degreewise `self^n first^n`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::Dimension("composition of non-composable chain maps".into()));
        }
        let (lo, hi) = union_window(&first.source, &self.target);
        let comps = (lo..=hi).map(|n| Ok((n, self.comp(n).mul(&first.comp(n))?))).collect::<Result<_>>()?;
        ChainMap::new(first.source.clone(), self.target.clone(), comps)
    }

    /// `f[k] : S[k] -> T[k]`, components `f[k]^n = f^(n+k)`.
    pub fn shift(&self, k: i64) -> ChainMap {
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            lo: self.lo - k,
            comps: self.comps.clone(),
        }
    }

    /// The chain maps `source -> target` as the solution set of the
    /// commutation equations.
    pub fn space(source: &PerfectComplex, target: &PerfectComplex) -> Result<ChainMapSpace> {
        ChainMapSpace::new(source, target)
    }
}

/// All chain maps between two complexes, for enumeration and sampling.
#[derive(Debug, Clone)]
pub struct ChainMapSpace {
    source: PerfectComplex,
    target: PerfectComplex,
    space: GradedSpace,
}

impl ChainMapSpace {
    fn new(source: &PerfectComplex, target: &PerfectComplex) -> Result<Self> {
        check_ring(source.ring, target.ring)?;
        let ring = source.ring;
        let (lo, hi) = union_window(source, target);
        let mut unknowns = Unknowns::default();
        for n in lo..=hi {
            unknowns.push(n, target.rank(n), source.rank(n));
        }
        let mut eqs = Equations::new(ring);
        for n in lo..hi {
            // d_T^n f^n - f^(n+1) d_S^n = 0
            let eq = eqs.block(&Matrix::zero(ring, target.rank(n + 1), source.rank(n)));
            eqs.left(eq, &target.diff(n), unknowns.get(n).unwrap(), ring.one());
            eqs.right(eq, unknowns.get(n + 1).unwrap(), &source.diff(n), -ring.one());
        }
        let space = GradedSpace::solve(ring, unknowns, &eqs).expect("homogeneous systems are solvable");
        Ok(ChainMapSpace { source: source.clone(), target: target.clone(), space })
    }

    fn build(&self, comps: BTreeMap<i64, Matrix>) -> ChainMap {
        ChainMap::new(self.source.clone(), self.target.clone(), comps).expect("shapes")
    }

    pub fn count(&self) -> BigUint {
        self.space.count()
    }

    pub fn count_u128(&self) -> Option<u128> {
        self.space.count_u128()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ChainMap {
        self.build(self.space.random(rng))
    }

    pub fn iter(&self) -> impl Iterator<Item = ChainMap> + '_ {
        self.space.iter().map(|c| self.build(c))
    }
}

/// Degree `-1` data `h^n : S^n -> T^(n-1)`, stored over the source window.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Homotopy {
    source: PerfectComplex,
    target: PerfectComplex,
    comps: Vec<Matrix>,
}

impl Homotopy {
    pub fn new(source: PerfectComplex, target: PerfectComplex, comps: BTreeMap<i64, Matrix>) -> Result<Self> {
        check_ring(source.ring, target.ring)?;
        for (&n, h) in &comps {
            check_ring(source.ring, h.ring())?;
            let shape = (target.rank(n - 1), source.rank(n));
            if h.shape() != shape {
                return Err(Error::Dimension(format!(
                    "homotopy component in degree {n} is {}x{}, expected {}x{}",
                    h.rows(),
                    h.cols(),
                    shape.0,
                    shape.1
                )));
            }
            if !source.degrees().contains(&n) && !h.is_zero() {
                return Err(Error::DegreeOutOfWindow { degree: n, lo: source.lo, hi: source.hi() });
            }
        }
        let comps = source
            .degrees()
            .map(|n| {
                comps.get(&n).cloned().unwrap_or_else(|| Matrix::zero(source.ring, target.rank(n - 1), source.rank(n)))
            })
            .collect();
        Ok(Homotopy { source, target, comps })
    }

    pub fn zero(source: &PerfectComplex, target: &PerfectComplex) -> Result<Self> {
        Self::new(source.clone(), target.clone(), BTreeMap::new())
    }

    pub fn random<R: Rng + ?Sized>(source: &PerfectComplex, target: &PerfectComplex, rng: &mut R) -> Result<Self> {
        let comps = source
            .degrees()
            .map(|n| (n, Matrix::random(source.ring, target.rank(n - 1), source.rank(n), rng)))
            .collect();
        Self::new(source.clone(), target.clone(), comps)
    }

    pub fn source(&self) -> &PerfectComplex {
        &self.source
    }

    pub fn target(&self) -> &PerfectComplex {
        &self.target
    }

    /// `h^n`, zero outside the source window.
    pub fn comp(&self, n: i64) -> Matrix {
        if self.source.degrees().contains(&n) {
            self.comps[(n - self.source.lo) as usize].clone()
        } else {
            Matrix::zero(self.source.ring, self.target.rank(n - 1), self.source.rank(n))
        }
    }

    pub fn components(&self) -> BTreeMap<i64, Matrix> {
        self.source.degrees().map(|n| (n, self.comp(n))).filter(|(_, m)| m.rows() > 0 && m.cols() > 0).collect()
    }

    /// The chain map `d h + h d`: degree `n` is `d_T^(n-1) h^n + h^(n+1) d_S^n`.
    pub fn boundary(&self) -> Result<ChainMap> {
        let (lo, hi) = union_window(&self.source, &self.target);
        let comps = (lo..=hi)
            .map(|n| {
                let a = self.target.diff(n - 1).mul(&self.comp(n))?;
                let b = self.comp(n + 1).mul(&self.source.diff(n))?;
                Ok((n, a.add(&b)?))
            })
            .collect::<Result<_>>()?;
        ChainMap::new(self.source.clone(), self.target.clone(), comps)
    }
}
