//! Graded traces, homotopy perturbation and the null-homotopy solver.

use crate::complex::{ChainMap, Homotopy, PerfectComplex};
use crate::equations::{Equations, Unknowns};
use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Matrix};
use crate::ring::RingElem;

/// `Tr(f) = sum (-1)^n Tr(f^n)` for an endomorphism.
pub fn graded_trace(f: &ChainMap) -> Result<RingElem> {
    if !f.is_endo() {
        return Err(Error::Dimension("graded trace of a map that is not an endomorphism".into()));
    }
    let ring = f.ring();
    f.window().try_fold(ring.zero(), |acc, n| Ok(acc + ring.sign(n) * f.comp(n).trace()?))
}

/// `f + d h + h d`.
pub fn perturb(f: &ChainMap, h: &Homotopy) -> Result<ChainMap> {
    if h.source() != f.source() || h.target() != f.target() {
        return Err(Error::Dimension("homotopy and map have different source or target".into()));
    }
    f.add(&h.boundary()?)
}

/// The equations `f^n = d_T^(n-1) h^n + h^(n+1) d_S^n` for a fixed pair of
/// complexes, factored once and reusable for many right-hand sides `f`.
///
/// Unknowns are the entries of `h^n`, ordered by degree and row-major within
/// each component.
#[derive(Debug, Clone)]
pub struct NullHomotopySolver {
    source: PerfectComplex,
    target: PerfectComplex,
    unknowns: Unknowns,
    equations: Equations,
    system: LinearSystem,
    lo: i64,
    hi: i64,
}

impl NullHomotopySolver {
    pub fn new(source: &PerfectComplex, target: &PerfectComplex) -> Result<Self> {
        crate::complex::check_ring(source.ring(), target.ring())?;
        let ring = source.ring();
        let mut unknowns = Unknowns::default();
        for n in source.degrees() {
            unknowns.push(n, target.rank(n - 1), source.rank(n));
        }
        let lo = source.lo().min(target.lo());
        let hi = source.hi().max(target.hi());
        let mut equations = Equations::new(ring);
        for n in lo..=hi {
            let eq = equations.block(&Matrix::zero(ring, target.rank(n), source.rank(n)));
            if let Some(h) = unknowns.get(n) {
                equations.left(eq, &target.diff(n - 1), h, ring.one());
            }
            if let Some(h) = unknowns.get(n + 1) {
                equations.right(eq, h, &source.diff(n), ring.one());
            }
        }
        let system = LinearSystem::new(&equations.matrix(unknowns.total()));
        Ok(NullHomotopySolver { source: source.clone(), target: target.clone(), unknowns, equations, system, lo, hi })
    }

    /// Number of scalar unknowns.
    pub fn unknowns(&self) -> usize {
        self.unknowns.total()
    }

    fn rhs(&self, f: &ChainMap) -> Result<Vec<RingElem>> {
        if f.source() != &self.source || f.target() != &self.target {
            return Err(Error::Dimension("map does not match the solver's complexes".into()));
        }
        Ok((self.lo..=self.hi).flat_map(|n| f.comp(n).entries().to_vec()).collect())
    }

    /// A homotopy `h` with `f = d h + h d`, if one exists.
    pub fn solve(&self, f: &ChainMap) -> Result<Option<Homotopy>> {
        let b = self.rhs(f)?;
        debug_assert_eq!(b.len(), self.equations.rhs().len());
        let Some(x) = self.system.particular(&b)? else { return Ok(None) };
        let comps = self.unknowns.extract(self.source.ring(), &x);
        Ok(Some(Homotopy::new(self.source.clone(), self.target.clone(), comps)?))
    }

    /// Whether `f` is null-homotopic.
    pub fn is_null(&self, f: &ChainMap) -> Result<bool> {
        Ok(self.system.particular(&self.rhs(f)?)?.is_some())
    }
}

/// A null-homotopy of the chain map `f`, if one exists.
pub fn find_null_homotopy(f: &ChainMap) -> Result<Option<Homotopy>> {
    f.validate()?;
    NullHomotopySolver::new(f.source(), f.target())?.solve(f)
}

/// A homotopy `h` with `f - g = d h + h d`, if one exists.
pub fn are_homotopic(f: &ChainMap, g: &ChainMap) -> Result<Option<Homotopy>> {
    find_null_homotopy(&f.sub(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    struct Eps {
        k: PerfectComplex,
        l: PerfectComplex,
        v: ChainMap,
        j: ChainMap,
    }

    fn eps_data(ring: RingSpec) -> Eps {
        let eps = ring.nilpotent_witness().unwrap();
        let k = PerfectComplex::single(ring, 1, 1);
        let l = PerfectComplex::two_term(0, Matrix::scalar(eps, 1));
        let v = ChainMap::new(l.clone(), l.clone(), BTreeMap::from([(1, Matrix::scalar(eps, 1))])).unwrap();
        let j = ChainMap::new(k.clone(), l.clone(), BTreeMap::from([(1, Matrix::identity(ring, 1))])).unwrap();
        Eps { k, l, v, j }
    }

    #[test]
    fn trace_of_eps_v() {
        let r = RingSpec::dual(3);
        let p = eps_data(r);
        assert_eq!(graded_trace(&p.v).unwrap(), r.elem(0, 2).unwrap());
        assert!(graded_trace(&ChainMap::zero(&p.l, &p.l).unwrap()).unwrap().is_zero());
        assert!(graded_trace(&p.j).is_err());
    }

    #[test]
    fn trace_of_identity_is_euler_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for ring in [RingSpec::zmod(4), RingSpec::zmod(7), RingSpec::dual(3)] {
            for _ in 0..20 {
                let ranks = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..4)).collect();
                let k = PerfectComplex::random(ring, rng.gen_range(-3..3), ranks, &mut rng);
                let tr = graded_trace(&ChainMap::identity(&k)).unwrap();
                assert_eq!(tr, ring.from_int(k.euler_rank()));
            }
        }
    }

    #[test]
    fn perturb_by_unit_homotopy() {
        let r = RingSpec::dual(3);
        let p = eps_data(r);
        let zero = ChainMap::zero(&p.k, &p.l).unwrap();
        assert_eq!(perturb(&zero, &Homotopy::zero(&p.k, &p.l).unwrap()).unwrap(), zero);
        let h = Homotopy::new(p.k.clone(), p.l.clone(), BTreeMap::from([(1, Matrix::identity(r, 1))])).unwrap();
        let g = perturb(&zero, &h).unwrap();
        assert_eq!(g.comp(1), Matrix::scalar(r.epsilon().unwrap(), 1));
        assert_eq!(g, p.v.compose(&p.j).unwrap());
    }

    #[test]
    fn null_homotopy_of_left_defect() {
        let r = RingSpec::dual(3);
        let p = eps_data(r);
        let u = ChainMap::zero(&p.k, &p.k).unwrap();
        let defect = p.v.compose(&p.j).unwrap().sub(&p.j.compose(&u).unwrap()).unwrap();
        let h = find_null_homotopy(&defect).unwrap().expect("left square commutes up to homotopy");
        assert_eq!(h.comp(1), Matrix::identity(r, 1));
        assert_eq!(h.boundary().unwrap(), defect);
    }

    #[test]
    fn null_homotopy_edge_cases() {
        let r = RingSpec::zmod(4);
        let m = PerfectComplex::single(r, 0, 1);
        let zero = ChainMap::zero(&m, &m).unwrap();
        let h = find_null_homotopy(&zero).unwrap().unwrap();
        assert_eq!(h, Homotopy::zero(&m, &m).unwrap());
        assert!(find_null_homotopy(&ChainMap::identity(&m)).unwrap().is_none());
        let empty = PerfectComplex::single(r, 0, 0);
        assert!(find_null_homotopy(&ChainMap::zero(&empty, &empty).unwrap()).unwrap().is_some());
    }

    #[test]
    fn eps_v_not_null_homotopic() {
        let r = RingSpec::dual(3);
        let p = eps_data(r);
        assert!(are_homotopic(&p.v, &ChainMap::zero(&p.l, &p.l).unwrap()).unwrap().is_none());
        assert!(are_homotopic(&p.v, &p.v).unwrap().is_some());
    }

    #[test]
    fn perturbations_are_homotopic_with_equal_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ring in [RingSpec::zmod(4), RingSpec::zmod(6), RingSpec::dual(2)] {
            for _ in 0..30 {
                let ranks = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..3)).collect();
                let k = PerfectComplex::random(ring, 0, ranks, &mut rng);
                let f = ChainMap::space(&k, &k).unwrap().random(&mut rng);
                let h = Homotopy::random(&k, &k, &mut rng).unwrap();
                let g = perturb(&f, &h).unwrap();
                assert!(g.is_valid());
                assert_eq!(graded_trace(&g).unwrap(), graded_trace(&f).unwrap());
                let w = are_homotopic(&g, &f).unwrap().expect("h is a witness");
                assert_eq!(w.boundary().unwrap(), g.sub(&f).unwrap());
            }
        }
    }
}
