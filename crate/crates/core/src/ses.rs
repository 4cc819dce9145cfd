//! Short exact sequences of complexes, endomorphism triples and the trace
//! additivity ledger.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::complex::{check_ring, ChainMap, Homotopy, PerfectComplex};
use crate::equations::{Equations, GradedSpace, Unknowns};
use crate::error::{Error, Result};
use crate::homotopy::{graded_trace, NullHomotopySolver};
use crate::linalg::{LinearSystem, Matrix};
use crate::ring::RingElem;

/// `0 -> K --j--> L --q--> M -> 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortExactSequence {
    pub k: PerfectComplex,
    pub l: PerfectComplex,
    pub m: PerfectComplex,
    pub j: ChainMap,
    pub q: ChainMap,
}

fn not_exact(degree: i64, reason: impl Into<String>) -> Error {
    Error::NotExact { degree, reason: reason.into() }
}

impl ShortExactSequence {
    pub fn new(j: ChainMap, q: ChainMap) -> Result<Self> {
        if j.target() != q.source() {
            return Err(Error::Dimension("j and q are not composable".into()));
        }
        Ok(ShortExactSequence { k: j.source().clone(), l: j.target().clone(), m: q.target().clone(), j, q })
    }

    /// Smallest window containing all three complexes.
    pub fn window(&self) -> (i64, i64) {
        let lo = self.k.lo().min(self.l.lo()).min(self.m.lo());
        let hi = self.k.hi().max(self.l.hi()).max(self.m.hi());
        (lo, hi)
    }

    /// Degreewise exactness, checked by counting: `j^n` injective, `q^n`
    /// surjective, `q j = 0` and `|im j^n| = |ker q^n|`.
    pub fn validate(&self) -> Result<()> {
        for c in [&self.k, &self.l, &self.m] {
            c.validate()?;
        }
        self.j.validate()?;
        self.q.validate()?;
        let ring = self.k.ring();
        let (lo, hi) = self.window();
        for n in lo..=hi {
            if self.k.rank(n) + self.m.rank(n) != self.l.rank(n) {
                return Err(not_exact(
                    n,
                    format!("ranks {} + {} != {}", self.k.rank(n), self.m.rank(n), self.l.rank(n)),
                ));
            }
            let (jn, qn) = (self.j.comp(n), self.q.comp(n));
            if !qn.mul(&jn)?.is_zero() {
                return Err(not_exact(n, "q j != 0"));
            }
            let sj = LinearSystem::new(&jn);
            if sj.kernel_count() != BigUint::from(1u32) {
                return Err(not_exact(n, "j is not injective"));
            }
            let sq = LinearSystem::new(&qn);
            let full = BigUint::from(ring.cardinality()).pow(self.m.rank(n) as u32);
            if sq.image_count() != full {
                return Err(not_exact(n, "q is not surjective"));
            }
            if sj.image_count() != sq.kernel_count() {
                return Err(not_exact(n, "image of j differs from kernel of q"));
            }
        }
        Ok(())
    }

    /// A right inverse `s^n` of `q^n` (`q^n s^n = 1`), solved column by column.
    pub fn find_section(&self, n: i64) -> Result<Option<Matrix>> {
        let (lo, hi) = self.window();
        if n < lo || n > hi {
            return Err(Error::DegreeOutOfWindow { degree: n, lo, hi });
        }
        let ring = self.k.ring();
        let qn = self.q.comp(n);
        let sys = LinearSystem::new(&qn);
        let r = self.m.rank(n);
        let mut cols = Vec::with_capacity(r);
        for c in 0..r {
            let e: Vec<RingElem> = (0..r).map(|i| if i == c { ring.one() } else { ring.zero() }).collect();
            match sys.particular(&e)? {
                Some(x) => cols.push(x),
                None => return Ok(None),
            }
        }
        let rows = self.l.rank(n);
        Ok(Some(Matrix::from_fn(ring, rows, r, |i, j| cols[j][i])))
    }

    /// The connecting map `M -> K[1]` of the sequence, computed from
    /// degreewise sections `s` as the unique `phi` with
    /// `j phi = d_L s - s d_M`.
    pub fn connecting_map(&self) -> Result<ChainMap> {
        let ring = self.k.ring();
        let (lo, hi) = self.window();
        let sections = (lo - 1..=hi + 1)
            .map(|n| {
                let s = if n < lo || n > hi {
                    Matrix::zero(ring, self.l.rank(n), self.m.rank(n))
                } else {
                    self.find_section(n)?.ok_or_else(|| not_exact(n, "q has no section"))?
                };
                Ok((n, s))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut comps = BTreeMap::new();
        for n in lo..=hi {
            let rhs = self.l.diff(n).mul(&sections[&n])?.sub(&sections[&(n + 1)].mul(&self.m.diff(n))?)?;
            let jn = self.j.comp(n + 1);
            let sys = LinearSystem::new(&jn);
            let mut cols = Vec::with_capacity(rhs.cols());
            for c in 0..rhs.cols() {
                let x = sys
                    .particular(&rhs.column(c))?
                    .ok_or_else(|| not_exact(n + 1, "image of j differs from kernel of q"))?;
                cols.push(x);
            }
            comps.insert(n, Matrix::from_fn(ring, self.k.rank(n + 1), rhs.cols(), |i, j| cols[j][i]));
        }
        ChainMap::new(self.m.clone(), self.k.shift(1), comps)
    }
}

/// Endomorphisms `u` of `K`, `v` of `L`, `w` of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoTriple {
    pub u: ChainMap,
    pub v: ChainMap,
    pub w: ChainMap,
}

impl EndoTriple {
    pub fn zero(s: &ShortExactSequence) -> Self {
        EndoTriple {
            u: ChainMap::zero(&s.k, &s.k).expect("same ring"),
            v: ChainMap::zero(&s.l, &s.l).expect("same ring"),
            w: ChainMap::zero(&s.m, &s.m).expect("same ring"),
        }
    }
}

/// How a square of chain maps commutes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareStatus {
    Strict,
    Homotopy(Homotopy),
    Fails,
}

impl SquareStatus {
    /// Strict or up to homotopy.
    pub fn commutes(&self) -> bool {
        !matches!(self, SquareStatus::Fails)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SquareStatus::Strict => "strict",
            SquareStatus::Homotopy(_) => "homotopy",
            SquareStatus::Fails => "fails",
        }
    }

    pub fn witness(&self) -> Option<&Homotopy> {
        match self {
            SquareStatus::Homotopy(h) => Some(h),
            _ => None,
        }
    }
}

/// Which squares must commute (up to homotopy) for a triple to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// The two squares of the sequence: `v j ~ j u` and `w q ~ q v`.
    Squares,
    /// Additionally the connecting square `u[1] delta ~ delta w`, i.e. the
    /// triple is a morphism of distinguished triangles.
    Triangle,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Squares => "squares",
            Criterion::Triangle => "triangle",
        }
    }
}

/// Trace ledger and square classification for an endomorphism triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityReport {
    pub tr_u: RingElem,
    pub tr_v: RingElem,
    pub tr_w: RingElem,
    /// `Tr(v) - Tr(u) - Tr(w)`.
    pub defect: RingElem,
    /// `v j` against `j u`.
    pub left_square: SquareStatus,
    /// `w q` against `q v`.
    pub right_square: SquareStatus,
    /// `u[1] delta` against `delta w`, `delta : M -> K[1]` the connecting map.
    pub connecting_square: SquareStatus,
}

impl AdditivityReport {
    pub fn qualifies(&self, criterion: Criterion) -> bool {
        let squares = self.left_square.commutes() && self.right_square.commutes();
        match criterion {
            Criterion::Squares => squares,
            Criterion::Triangle => squares && self.connecting_square.commutes(),
        }
    }

    /// Squares commute in the sense of `criterion`, yet traces are not additive.
    pub fn is_violation(&self, criterion: Criterion) -> bool {
        self.qualifies(criterion) && !self.defect.is_zero()
    }

    pub fn both_strict(&self) -> bool {
        self.left_square == SquareStatus::Strict && self.right_square == SquareStatus::Strict
    }
}

fn fmt_square(f: &mut fmt::Formatter<'_>, name: &str, s: &SquareStatus) -> fmt::Result {
    write!(f, "{name}: {}", s.label())?;
    if let Some(h) = s.witness() {
        let parts: Vec<String> = h.components().iter().map(|(n, m)| format!("h^{n} = {m}")).collect();
        write!(f, " ({})", parts.join(", "))?;
    }
    writeln!(f)
}

impl fmt::Display for AdditivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tr(u) = {}", self.tr_u)?;
        writeln!(f, "Tr(v) = {}", self.tr_v)?;
        writeln!(f, "Tr(w) = {}", self.tr_w)?;
        writeln!(f, "defect = {}", self.defect)?;
        fmt_square(f, "left square", &self.left_square)?;
        fmt_square(f, "right square", &self.right_square)?;
        fmt_square(f, "connecting square", &self.connecting_square)
    }
}

fn classify(defect: &ChainMap, solver: impl FnOnce() -> Result<NullHomotopySolver>) -> Result<SquareStatus> {
    if defect.components().values().all(Matrix::is_zero) {
        return Ok(SquareStatus::Strict);
    }
    Ok(match solver()?.solve(defect)? {
        Some(h) => SquareStatus::Homotopy(h),
        None => SquareStatus::Fails,
    })
}

/// Classifies the squares of a triple and computes the trace defect.
pub fn check_triple(s: &ShortExactSequence, t: &EndoTriple) -> Result<AdditivityReport> {
    for (f, c, name) in [(&t.u, &s.k, "u"), (&t.v, &s.l, "v"), (&t.w, &s.m, "w")] {
        if f.source() != c || f.target() != c {
            return Err(Error::Dimension(format!("{name} is not an endomorphism of the matching complex")));
        }
        f.validate()?;
    }
    let left = t.v.compose(&s.j)?.sub(&s.j.compose(&t.u)?)?;
    let right = t.w.compose(&s.q)?.sub(&s.q.compose(&t.v)?)?;
    let left_square = classify(&left, || NullHomotopySolver::new(&s.k, &s.l))?;
    let right_square = classify(&right, || NullHomotopySolver::new(&s.l, &s.m))?;
    let delta = s.connecting_map()?;
    let third = t.u.shift(1).compose(&delta)?.sub(&delta.compose(&t.w)?)?;
    let connecting_square = classify(&third, || NullHomotopySolver::new(&s.m, &s.k.shift(1)))?;
    let tr_u = graded_trace(&t.u)?;
    let tr_v = graded_trace(&t.v)?;
    let tr_w = graded_trace(&t.w)?;
    Ok(AdditivityReport { tr_u, tr_v, tr_w, defect: tr_v - tr_u - tr_w, left_square, right_square, connecting_square })
}

/// An extension of `M` by `K` along a cocycle `phi^n : M^n -> K^(n+1)`:
/// `L^n = K^n (+) M^n`, `d_L = [[d_K, phi], [0, d_M]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub ses: ShortExactSequence,
    pub cocycle: BTreeMap<i64, Matrix>,
}

/// Cocycle shapes `r_K(n+1) x r_M(n)` on the degrees where they can be nonzero.
fn cocycle_degrees(k: &PerfectComplex, m: &PerfectComplex) -> Vec<i64> {
    m.degrees().filter(|&n| k.rank(n + 1) > 0 && m.rank(n) > 0).collect()
}

impl Extension {
    /// `None` when `d_K phi + phi d_M != 0`.
    pub fn new(k: &PerfectComplex, m: &PerfectComplex, cocycle: BTreeMap<i64, Matrix>) -> Result<Option<Self>> {
        check_ring(k.ring(), m.ring())?;
        let ring = k.ring();
        let phi = |n: i64| cocycle.get(&n).cloned().unwrap_or_else(|| Matrix::zero(ring, k.rank(n + 1), m.rank(n)));
        for (&n, p) in &cocycle {
            check_ring(ring, p.ring())?;
            if p.shape() != (k.rank(n + 1), m.rank(n)) {
                return Err(Error::Dimension(format!(
                    "cocycle component in degree {n} is {}x{}, expected {}x{}",
                    p.rows(),
                    p.cols(),
                    k.rank(n + 1),
                    m.rank(n)
                )));
            }
        }
        let lo = k.lo().min(m.lo());
        let hi = k.hi().max(m.hi());
        for n in lo - 1..=hi {
            let c = k.diff(n + 1).mul(&phi(n))?.add(&phi(n + 1).mul(&m.diff(n))?)?;
            if !c.is_zero() {
                return Ok(None);
            }
        }
        let ranks: Vec<usize> = (lo..=hi).map(|n| k.rank(n) + m.rank(n)).collect();
        let diffs = (lo..hi)
            .map(|n| {
                let z = Matrix::zero(ring, m.rank(n + 1), k.rank(n));
                Ok((n, Matrix::block2x2(&k.diff(n), &phi(n), &z, &m.diff(n))?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let l = PerfectComplex::new(ring, lo, ranks, diffs)?;
        let j = (lo..=hi)
            .map(|n| {
                let (a, b) = (k.rank(n), m.rank(n));
                (n, Matrix::from_fn(ring, a + b, a, |i, c| if i == c { ring.one() } else { ring.zero() }))
            })
            .collect();
        let q = (lo..=hi)
            .map(|n| {
                let (a, b) = (k.rank(n), m.rank(n));
                (n, Matrix::from_fn(ring, b, a + b, |i, c| if c == a + i { ring.one() } else { ring.zero() }))
            })
            .collect();
        let j = ChainMap::new(k.clone(), l.clone(), j)?;
        let q = ChainMap::new(l, m.clone(), q)?;
        let cocycle = cocycle.into_iter().filter(|(_, p)| p.rows() > 0 && p.cols() > 0).collect();
        Ok(Some(Extension { ses: ShortExactSequence::new(j, q)?, cocycle }))
    }

    /// All cocycles `M -> K[1]`.
    pub fn cocycles(k: &PerfectComplex, m: &PerfectComplex) -> Result<CocycleSpace> {
        check_ring(k.ring(), m.ring())?;
        let ring = k.ring();
        let mut unknowns = Unknowns::default();
        for n in cocycle_degrees(k, m) {
            unknowns.push(n, k.rank(n + 1), m.rank(n));
        }
        let mut eqs = Equations::new(ring);
        let lo = k.lo().min(m.lo());
        for n in lo - 1..=k.hi().max(m.hi()) {
            // d_K^(n+1) phi^n + phi^(n+1) d_M^n = 0
            let eq = eqs.block(&Matrix::zero(ring, k.rank(n + 2), m.rank(n)));
            if let Some(x) = unknowns.get(n) {
                eqs.left(eq, &k.diff(n + 1), x, ring.one());
            }
            if let Some(x) = unknowns.get(n + 1) {
                eqs.right(eq, x, &m.diff(n), ring.one());
            }
        }
        let space = GradedSpace::solve(ring, unknowns, &eqs).expect("homogeneous");
        Ok(CocycleSpace { space })
    }

    pub fn k(&self) -> &PerfectComplex {
        &self.ses.k
    }

    pub fn m(&self) -> &PerfectComplex {
        &self.ses.m
    }

    fn phi(&self, n: i64) -> Matrix {
        self.cocycle
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.k().ring(), self.k().rank(n + 1), self.m().rank(n)))
    }

    /// The cocycle as a chain map `M -> K[1]`.
    pub fn cocycle_map(&self) -> Result<ChainMap> {
        ChainMap::new(self.m().clone(), self.k().shift(1), self.cocycle.clone())
    }

    /// Endomorphisms `v = [[u, tau], [0, w]]` of `L` lifting `u` and `w`:
    /// the `tau^n : M^n -> K^n` solving
    /// `d_K tau^n - tau^(n+1) d_M = u^(n+1) phi^n - phi^n w^n`.
    /// `None` when no lift exists.
    pub fn strict_lifts(&self, u: &ChainMap, w: &ChainMap) -> Result<Option<StrictLifts>> {
        let (k, m) = (self.k(), self.m());
        let ring = k.ring();
        let mut unknowns = Unknowns::default();
        for n in m.degrees() {
            if k.rank(n) > 0 && m.rank(n) > 0 {
                unknowns.push(n, k.rank(n), m.rank(n));
            }
        }
        let (lo, hi) = self.ses.window();
        let mut eqs = Equations::new(ring);
        for n in lo..=hi {
            let rhs = u.comp(n + 1).mul(&self.phi(n))?.sub(&self.phi(n).mul(&w.comp(n))?)?;
            let eq = eqs.block(&rhs);
            if let Some(x) = unknowns.get(n) {
                eqs.left(eq, &k.diff(n), x, ring.one());
            }
            if let Some(x) = unknowns.get(n + 1) {
                eqs.right(eq, x, &m.diff(n), -ring.one());
            }
        }
        Ok(GradedSpace::solve(ring, unknowns, &eqs).map(|space| StrictLifts {
            ext: self.clone(),
            u: u.clone(),
            w: w.clone(),
            space,
        }))
    }
}

/// Cocycles `phi : M -> K[1]` as a solution space.
#[derive(Debug, Clone)]
pub struct CocycleSpace {
    space: GradedSpace,
}

impl CocycleSpace {
    pub fn count(&self) -> BigUint {
        self.space.count()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<i64, Matrix> {
        self.space.random(rng)
    }

    pub fn iter(&self) -> impl Iterator<Item = BTreeMap<i64, Matrix>> + '_ {
        self.space.iter()
    }
}

/// Block upper-triangular endomorphisms of an extension over fixed `u`, `w`.
#[derive(Debug, Clone)]
pub struct StrictLifts {
    ext: Extension,
    u: ChainMap,
    w: ChainMap,
    space: GradedSpace,
}

impl StrictLifts {
    fn build(&self, tau: &BTreeMap<i64, Matrix>) -> EndoTriple {
        let (k, l, m) = (self.ext.k(), &self.ext.ses.l, self.ext.m());
        let ring = k.ring();
        let comps = l
            .degrees()
            .map(|n| {
                let t = tau.get(&n).cloned().unwrap_or_else(|| Matrix::zero(ring, k.rank(n), m.rank(n)));
                let z = Matrix::zero(ring, m.rank(n), k.rank(n));
                (n, Matrix::block2x2(&self.u.comp(n), &t, &z, &self.w.comp(n)).expect("block shapes"))
            })
            .collect();
        let v = ChainMap::new(l.clone(), l.clone(), comps).expect("shapes");
        EndoTriple { u: self.u.clone(), v, w: self.w.clone() }
    }

    pub fn count(&self) -> BigUint {
        self.space.count()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> EndoTriple {
        self.build(&self.space.random(rng))
    }

    pub fn iter(&self) -> impl Iterator<Item = EndoTriple> + '_ {
        self.space.iter().map(|t| self.build(&t))
    }
}

/// `L = K (+) M` twisted by `phi`, with the canonical `j` and `q`; `None`
/// when `phi` is not a cocycle.
pub fn make_extension(
    k: &PerfectComplex,
    m: &PerfectComplex,
    cocycle: BTreeMap<i64, Matrix>,
) -> Result<Option<ShortExactSequence>> {
    Ok(Extension::new(k, m, cocycle)?.map(|e| e.ses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eps_ext(ring: RingSpec) -> Extension {
        let eps = ring.nilpotent_witness().unwrap();
        let k = PerfectComplex::single(ring, 1, 1);
        let m = PerfectComplex::single(ring, 0, 1);
        Extension::new(&k, &m, BTreeMap::from([(0, Matrix::scalar(eps, 1))])).unwrap().unwrap()
    }

    #[test]
    fn eps_sequence_is_exact() {
        let r = RingSpec::dual(3);
        let e = eps_ext(r);
        e.ses.validate().unwrap();
        assert_eq!(e.ses.l, PerfectComplex::two_term(0, Matrix::scalar(r.epsilon().unwrap(), 1)));
        assert_eq!(e.ses.j.comp(1), Matrix::identity(r, 1));
        assert_eq!(e.ses.q.comp(0), Matrix::identity(r, 1));
        assert_eq!(e.ses.find_section(0).unwrap(), Some(Matrix::identity(r, 1)));
        assert_eq!(e.ses.find_section(1).unwrap(), Some(Matrix::zero(r, 1, 0)));
        assert!(matches!(e.ses.find_section(5), Err(Error::DegreeOutOfWindow { .. })));
    }

    #[test]
    fn trivial_sequence() {
        let r = RingSpec::zmod(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = PerfectComplex::random(r, 0, vec![2, 1], &mut rng);
        let zero = PerfectComplex::single(r, 0, 0);
        let s = ShortExactSequence::new(ChainMap::zero(&zero, &l).unwrap(), ChainMap::identity(&l)).unwrap();
        s.validate().unwrap();
    }

    #[test]
    fn non_injective_j() {
        let r = RingSpec::zmod(4);
        let a = PerfectComplex::single(r, 0, 1);
        let j = ChainMap::new(a.clone(), a.clone(), BTreeMap::from([(0, Matrix::from_ints(r, &[&[2]]))])).unwrap();
        let zero = PerfectComplex::single(r, 0, 0);
        let q = ChainMap::zero(&a, &zero).unwrap();
        let err = ShortExactSequence::new(j, q).unwrap().validate().unwrap_err();
        // ranks 1 + 0 = 1 pass; injectivity fails first
        assert_eq!(err, Error::NotExact { degree: 0, reason: "j is not injective".into() });
    }

    #[test]
    fn rank_mismatch_detected() {
        let r = RingSpec::zmod(5);
        let a = PerfectComplex::single(r, 0, 1);
        let s = ShortExactSequence::new(ChainMap::identity(&a), ChainMap::identity(&a)).unwrap();
        assert!(matches!(s.validate(), Err(Error::NotExact { degree: 0, .. })));
    }

    #[test]
    fn eps_triple_report() {
        let r = RingSpec::dual(3);
        let e = eps_ext(r);
        let s = &e.ses;
        let eps = r.epsilon().unwrap();
        let v = ChainMap::new(s.l.clone(), s.l.clone(), BTreeMap::from([(1, Matrix::scalar(eps, 1))])).unwrap();
        let t = EndoTriple { v, ..EndoTriple::zero(s) };
        let rep = check_triple(s, &t).unwrap();
        assert!(rep.tr_u.is_zero() && rep.tr_w.is_zero());
        assert_eq!(rep.tr_v, -eps);
        assert_eq!(rep.defect, r.elem(0, 2).unwrap());
        assert_eq!(rep.right_square, SquareStatus::Strict);
        let h = rep.left_square.witness().expect("left square commutes up to homotopy");
        assert_eq!(h.comp(1), Matrix::identity(r, 1));
        assert_eq!(rep.connecting_square, SquareStatus::Strict);
        assert!(rep.is_violation(Criterion::Squares));
        assert!(rep.is_violation(Criterion::Triangle));
    }

    #[test]
    fn zero_triple_is_strict() {
        let r = RingSpec::dual(3);
        let e = eps_ext(r);
        let rep = check_triple(&e.ses, &EndoTriple::zero(&e.ses)).unwrap();
        assert!(rep.both_strict());
        assert!(rep.defect.is_zero());
    }

    #[test]
    fn connecting_map_of_extension_is_the_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ring in [RingSpec::zmod(4), RingSpec::dual(3), RingSpec::zmod(6)] {
            for _ in 0..20 {
                let k = PerfectComplex::random(ring, 0, vec![1, 2, 1], &mut rng);
                let m = PerfectComplex::random(ring, 0, vec![2, 1, 1], &mut rng);
                let phi = Extension::cocycles(&k, &m).unwrap().random(&mut rng);
                let e = Extension::new(&k, &m, phi).unwrap().expect("sampled cocycle");
                e.ses.validate().unwrap();
                let delta = e.ses.connecting_map().unwrap();
                assert!(delta.is_valid());
                // canonical sections recover phi up to a null-homotopic difference
                let diff = delta.sub(&e.cocycle_map().unwrap()).unwrap();
                assert!(crate::homotopy::find_null_homotopy(&diff).unwrap().is_some());
            }
        }
    }

    #[test]
    fn non_cocycle_rejected() {
        let r = RingSpec::zmod(4);
        let one = Matrix::identity(r, 1);
        let k = PerfectComplex::two_term(1, one.clone());
        let m = PerfectComplex::single(r, 0, 1);
        // d_K^1 phi^0 = 1 != 0
        assert!(make_extension(&k, &m, BTreeMap::from([(0, one)])).unwrap().is_none());
        assert!(make_extension(&k, &m, BTreeMap::new()).unwrap().is_some());
    }

    #[test]
    fn split_extension_is_direct_sum() {
        let r = RingSpec::zmod(6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = PerfectComplex::random(r, 0, vec![1, 2], &mut rng);
        let m = PerfectComplex::random(r, 0, vec![2, 1], &mut rng);
        let s = make_extension(&k, &m, BTreeMap::new()).unwrap().unwrap();
        assert_eq!(s.l, k.direct_sum(&m).unwrap());
    }

    #[test]
    fn strict_lifts_give_strict_squares_and_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ring in [RingSpec::zmod(4), RingSpec::dual(2), RingSpec::zmod(6)] {
            let mut seen = 0;
            while seen < 15 {
                let k = PerfectComplex::random(ring, 0, vec![1, 1, 2], &mut rng);
                let m = PerfectComplex::random(ring, 0, vec![2, 1, 1], &mut rng);
                let e = Extension::new(&k, &m, Extension::cocycles(&k, &m).unwrap().random(&mut rng)).unwrap().unwrap();
                let u = ChainMap::space(&k, &k).unwrap().random(&mut rng);
                let w = ChainMap::space(&m, &m).unwrap().random(&mut rng);
                let Some(lifts) = e.strict_lifts(&u, &w).unwrap() else { continue };
                let t = lifts.random(&mut rng);
                let rep = check_triple(&e.ses, &t).unwrap();
                assert!(rep.both_strict());
                assert!(rep.defect.is_zero());
                assert!(rep.connecting_square.commutes());
                seen += 1;
            }
        }
    }

    /// Over the field Z/2, an acyclic middle term lets both squares commute up
    /// to homotopy while the traces disagree; only the connecting square sees it.
    #[test]
    fn two_squares_do_not_suffice_over_a_field() {
        let r = RingSpec::zmod(2);
        let k = PerfectComplex::single(r, 1, 1);
        let m = PerfectComplex::single(r, 0, 1);
        let e = Extension::new(&k, &m, BTreeMap::from([(0, Matrix::identity(r, 1))])).unwrap().unwrap();
        let s = &e.ses;
        s.validate().unwrap();
        let t = EndoTriple { u: ChainMap::identity(&s.k), ..EndoTriple::zero(s) };
        let rep = check_triple(s, &t).unwrap();
        assert!(rep.left_square.commutes());
        assert_eq!(rep.right_square, SquareStatus::Strict);
        assert!(!rep.defect.is_zero());
        assert_eq!(rep.connecting_square, SquareStatus::Fails);
        assert!(rep.is_violation(Criterion::Squares));
        assert!(!rep.is_violation(Criterion::Triangle));
    }
}
