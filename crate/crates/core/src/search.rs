//! The nilpotent counterexample and searches for trace additivity violations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::homotopy::{graded_trace, NullHomotopySolver};
use crate::linalg::Matrix;
use crate::ring::{RingElem, RingSpec};
use crate::ses::{check_triple, AdditivityReport, Criterion, EndoTriple, Extension, ShortExactSequence};

pub const DEFAULT_CEILING: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exhaustive,
    Randomized,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "randomized" | "random" => Ok(Mode::Randomized),
            _ => Err(Error::Parse(format!("unknown search mode {s:?}"))),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squares" => Ok(Criterion::Squares),
            "triangle" => Ok(Criterion::Triangle),
            _ => Err(Error::Parse(format!("unknown criterion {s:?}"))),
        }
    }
}

/// Complexes live in degrees `0..max_window`, each term of rank at most
/// `max_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub ring: RingSpec,
    pub max_window: usize,
    pub max_rank: usize,
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    pub criterion: Criterion,
    /// Upper bound on square classifications in exhaustive mode.
    pub ceiling: u128,
    pub log: bool,
}

impl SearchConfig {
    pub fn new(ring: RingSpec, mode: Mode) -> Self {
        SearchConfig {
            ring,
            max_window: 2,
            max_rank: 1,
            trials: 10_000,
            seed: 0,
            mode,
            criterion: Criterion::Squares,
            ceiling: DEFAULT_CEILING,
            log: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_window == 0 {
            return Err(Error::Unsupported("max window must be at least 1".into()));
        }
        Ok(())
    }
}

/// One line of the instance log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    pub index: u64,
    pub classification: &'static str,
    pub defect: Option<RingElem>,
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.defect {
            Some(d) => write!(f, "{}\t{}\t{}", self.index, self.classification, d),
            None => write!(f, "{}\t{}\t-", self.index, self.classification),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Trial index, or extension index in exhaustive mode.
    pub index: u64,
    pub ses: ShortExactSequence,
    pub triple: EndoTriple,
    pub report: AdditivityReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub ring: RingSpec,
    pub criterion: Criterion,
    pub violations_found: u64,
    pub first_violation: Option<Violation>,
    pub instances_examined: u64,
    pub log: Vec<LogRecord>,
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ring: {}", self.ring)?;
        writeln!(f, "criterion: {}", self.criterion.name())?;
        writeln!(f, "instances examined: {}", self.instances_examined)?;
        writeln!(f, "violations: {}", self.violations_found)?;
        if let Some(v) = &self.first_violation {
            writeln!(f, "first violation at instance {}:", v.index)?;
            write!(f, "{}", crate::text::format_triple_file(&v.ses, &v.triple))?;
            write!(f, "{}", v.report)?;
        }
        Ok(())
    }
}

/// The short exact sequence `0 -> K -> L -> M -> 0` with `K = A[-1]`,
/// `L = (A --e--> A)` in degrees 0, 1, `M = A`, the triple `u = 0`,
/// `v = (0, e)`, `w = 0`, and the homotopy `h^1 = 1` for the left square.
pub fn build_paper_example(ring: RingSpec) -> Result<(ShortExactSequence, EndoTriple, Homotopy)> {
    let eps = ring.nilpotent_witness().ok_or(Error::NoNilpotent(ring))?;
    let k = PerfectComplex::single(ring, 1, 1);
    let m = PerfectComplex::single(ring, 0, 1);
    let ext = Extension::new(&k, &m, BTreeMap::from([(0, Matrix::scalar(eps, 1))]))?.expect("e is a cocycle");
    let ses = ext.ses;
    let v = ChainMap::new(ses.l.clone(), ses.l.clone(), BTreeMap::from([(1, Matrix::scalar(eps, 1))]))?;
    let triple = EndoTriple { v, ..EndoTriple::zero(&ses) };
    let h = Homotopy::new(ses.k.clone(), ses.l.clone(), BTreeMap::from([(1, Matrix::identity(ring, 1))]))?;
    Ok((ses, triple, h))
}

/// Re-checks the stored violation from scratch.
pub fn certify(outcome: &SearchOutcome) -> Result<AdditivityReport> {
    let v = outcome.first_violation.as_ref().ok_or_else(|| Error::Unsupported("outcome holds no violation".into()))?;
    certify_instance(&v.ses, &v.triple, outcome.criterion)
}

/// Validates the sequence and triple, reclassifies the squares, verifies any
/// homotopy witnesses and requires a nonzero defect.
pub fn certify_instance(ses: &ShortExactSequence, t: &EndoTriple, criterion: Criterion) -> Result<AdditivityReport> {
    ses.validate()?;
    for f in [&t.u, &t.v, &t.w] {
        f.validate()?;
    }
    let report = check_triple(ses, t)?;
    let left = t.v.compose(&ses.j)?.sub(&ses.j.compose(&t.u)?)?;
    let right = t.w.compose(&ses.q)?.sub(&ses.q.compose(&t.v)?)?;
    for (status, defect) in [(&report.left_square, &left), (&report.right_square, &right)] {
        if let Some(h) = status.witness() {
            if &h.boundary()? != defect {
                return Err(Error::Unsupported("homotopy witness does not satisfy its equation".into()));
            }
        }
    }
    if !report.qualifies(criterion) {
        return Err(Error::Unsupported(format!("squares do not commute under the {} criterion", criterion.name())));
    }
    let defect = graded_trace(&t.v)? - graded_trace(&t.u)? - graded_trace(&t.w)?;
    if defect.is_zero() || defect != report.defect {
        return Err(Error::Unsupported("traces are additive".into()));
    }
    Ok(report)
}

pub fn search_violation(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Exhaustive => exhaustive(cfg),
        Mode::Randomized => Ok(randomized(cfg)),
    }
}

/// Every rank vector of length `window` with entries `0..=max_rank`.
fn rank_vectors(window: usize, max_rank: usize) -> Vec<Vec<usize>> {
    (0..window).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (0..=max_rank).map(move |r| {
                    let mut v = v.clone();
                    v.push(r);
                    v
                })
            })
            .collect()
    })
}

fn too_big(cfg: &SearchConfig) -> Error {
    Error::CeilingExceeded { size: u128::MAX, ceiling: cfg.ceiling }
}

struct Instance {
    ext: Extension,
    end_k: Vec<ChainMap>,
    end_m: Vec<ChainMap>,
    end_l: crate::complex::ChainMapSpace,
}

#[derive(Default)]
struct Tally {
    examined: u64,
    violations: u64,
    first: Option<(usize, usize, usize)>,
}

fn exhaustive(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let ring = cfg.ring;
    let complexes: Vec<PerfectComplex> =
        rank_vectors(cfg.max_window, cfg.max_rank).iter().flat_map(|r| PerfectComplex::enumerate(ring, 0, r)).collect();
    let mut instances = Vec::new();
    let mut size: u128 = 0;
    for k in &complexes {
        let end_k: Vec<ChainMap> = ChainMap::space(k, k)?.iter().collect();
        for m in &complexes {
            let end_m: Vec<ChainMap> = ChainMap::space(m, m)?.iter().collect();
            for phi in Extension::cocycles(k, m)?.iter() {
                let ext = Extension::new(k, m, phi)?.expect("enumerated cocycle");
                let end_l = ChainMap::space(&ext.ses.l, &ext.ses.l)?;
                let n = end_l.count_u128().ok_or_else(|| too_big(cfg))?;
                size = n
                    .checked_mul((end_k.len() + end_m.len()) as u128)
                    .and_then(|x| size.checked_add(x))
                    .ok_or_else(|| too_big(cfg))?;
                if size > cfg.ceiling {
                    return Err(Error::CeilingExceeded { size, ceiling: cfg.ceiling });
                }
                instances.push(Instance { ext, end_k: end_k.clone(), end_m: end_m.clone(), end_l });
            }
        }
    }
    let tallies = instances.par_iter().map(|inst| tally(inst, cfg.criterion)).collect::<Result<Vec<Tally>>>()?;

    let mut outcome = SearchOutcome {
        ring,
        criterion: cfg.criterion,
        violations_found: 0,
        first_violation: None,
        instances_examined: 0,
        log: Vec::new(),
    };
    for (i, (inst, t)) in instances.iter().zip(&tallies).enumerate() {
        outcome.instances_examined += t.examined;
        outcome.violations_found += t.violations;
        let found = t.first.map(|(vi, ui, wi)| {
            let v = inst.end_l.iter().nth(vi).expect("index in range");
            let triple = EndoTriple { u: inst.end_k[ui].clone(), v, w: inst.end_m[wi].clone() };
            let report = check_triple(&inst.ext.ses, &triple).expect("classified once already");
            (triple, report)
        });
        if cfg.log {
            let classification = if t.violations > 0 { "violation" } else { "additive" };
            let defect = found.as_ref().map(|(_, r)| r.defect);
            outcome.log.push(LogRecord { index: i as u64, classification, defect });
        }
        if outcome.first_violation.is_none() {
            if let Some((triple, report)) = found {
                outcome.first_violation =
                    Some(Violation { index: i as u64, ses: inst.ext.ses.clone(), triple, report });
            }
        }
    }
    Ok(outcome)
}

fn square_commutes(solver: &NullHomotopySolver, defect: &ChainMap) -> Result<bool> {
    if defect.components().values().all(Matrix::is_zero) {
        return Ok(true);
    }
    solver.is_null(defect)
}

fn tally(inst: &Instance, criterion: Criterion) -> Result<Tally> {
    let s = &inst.ext.ses;
    let left = NullHomotopySolver::new(&s.k, &s.l)?;
    let right = NullHomotopySolver::new(&s.l, &s.m)?;
    let tr_k = inst.end_k.iter().map(graded_trace).collect::<Result<Vec<_>>>()?;
    let tr_m = inst.end_m.iter().map(graded_trace).collect::<Result<Vec<_>>>()?;
    let connecting: Option<Vec<Vec<bool>>> = match criterion {
        Criterion::Squares => None,
        Criterion::Triangle => {
            let delta = inst.ext.cocycle_map()?;
            let solver = NullHomotopySolver::new(&s.m, &s.k.shift(1))?;
            let rows = inst
                .end_k
                .iter()
                .map(|u| {
                    let ud = u.shift(1).compose(&delta)?;
                    inst.end_m
                        .iter()
                        .map(|w| square_commutes(&solver, &ud.sub(&delta.compose(w)?)?))
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Some(rows)
        }
    };
    let ju: Vec<ChainMap> = inst.end_k.iter().map(|u| s.j.compose(u)).collect::<Result<_>>()?;
    let wq: Vec<ChainMap> = inst.end_m.iter().map(|w| w.compose(&s.q)).collect::<Result<_>>()?;
    let mut t = Tally::default();
    for (vi, v) in inst.end_l.iter().enumerate() {
        let tr_v = graded_trace(&v)?;
        let vj = v.compose(&s.j)?;
        let qv = s.q.compose(&v)?;
        let us: Vec<usize> = (0..ju.len())
            .map(|i| Ok((i, square_commutes(&left, &vj.sub(&ju[i])?)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(i, ok)| ok.then_some(i))
            .collect();
        if us.is_empty() {
            continue;
        }
        let ws: Vec<usize> = (0..wq.len())
            .map(|i| Ok((i, square_commutes(&right, &wq[i].sub(&qv)?)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(i, ok)| ok.then_some(i))
            .collect();
        for &ui in &us {
            for &wi in &ws {
                if let Some(c) = &connecting {
                    if !c[ui][wi] {
                        continue;
                    }
                }
                t.examined += 1;
                if tr_v != tr_k[ui] + tr_m[wi] {
                    t.violations += 1;
                    t.first.get_or_insert((vi, ui, wi));
                }
            }
        }
    }
    Ok(t)
}

/// Per-trial generator, independent of scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A random extension within the configured bounds.
pub fn random_extension<R: Rng + ?Sized>(ring: RingSpec, max_window: usize, max_rank: usize, rng: &mut R) -> Extension {
    let window = rng.gen_range(1..=max_window);
    let mut ranks = || (0..window).map(|_| rng.gen_range(0..=max_rank)).collect::<Vec<_>>();
    let (rk, rm) = (ranks(), ranks());
    let k = PerfectComplex::random(ring, 0, rk, rng);
    let m = PerfectComplex::random(ring, 0, rm, rng);
    let phi = Extension::cocycles(&k, &m).expect("same ring").random(rng);
    Extension::new(&k, &m, phi).expect("shapes").expect("sampled cocycle")
}

fn random_trial(cfg: &SearchConfig, trial: u64) -> (Option<AdditivityReport>, Extension, EndoTriple) {
    let mut rng = trial_rng(cfg.seed, trial);
    let ext = random_extension(cfg.ring, cfg.max_window, cfg.max_rank, &mut rng);
    let s = &ext.ses;
    let endo = |c: &PerfectComplex, rng: &mut ChaCha8Rng| ChainMap::space(c, c).expect("same ring").random(rng);
    let u = endo(&s.k, &mut rng);
    let w = endo(&s.m, &mut rng);
    let v = endo(&s.l, &mut rng);
    let triple = EndoTriple { u, v, w };
    let report = check_triple(s, &triple).expect("generated data is consistent");
    let kept = report.qualifies(cfg.criterion).then_some(report);
    (kept, ext, triple)
}

fn randomized(cfg: &SearchConfig) -> SearchOutcome {
    let results: Vec<(u64, Option<RingElem>)> = (0..cfg.trials)
        .into_par_iter()
        .filter_map(|t| random_trial(cfg, t).0.map(|r| (t, Some(r.defect).filter(|d| !d.is_zero()))))
        .collect();
    let mut outcome = SearchOutcome {
        ring: cfg.ring,
        criterion: cfg.criterion,
        violations_found: 0,
        first_violation: None,
        instances_examined: results.len() as u64,
        log: Vec::new(),
    };
    for &(t, defect) in &results {
        if cfg.log {
            let classification = if defect.is_some() { "violation" } else { "additive" };
            let d = Some(defect.unwrap_or_else(|| cfg.ring.zero()));
            outcome.log.push(LogRecord { index: t, classification, defect: d });
        }
        if defect.is_some() {
            outcome.violations_found += 1;
            if outcome.first_violation.is_none() {
                let (report, ext, triple) = random_trial(cfg, t);
                let report = report.expect("trial is deterministic");
                outcome.first_violation = Some(Violation { index: t, ses: ext.ses, triple, report });
            }
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ses::SquareStatus;

    #[test]
    fn nilpotent_example_over_nonreduced_rings() {
        for ring in [RingSpec::dual(3), RingSpec::dual(2), RingSpec::zmod(4), RingSpec::zmod(12), RingSpec::dual(6)] {
            let eps = ring.nilpotent_witness().unwrap();
            let (s, t, h) = build_paper_example(ring).unwrap();
            s.validate().unwrap();
            let rep = check_triple(&s, &t).unwrap();
            assert_eq!(rep.right_square, SquareStatus::Strict);
            assert!(rep.left_square.commutes());
            let left = t.v.compose(&s.j).unwrap().sub(&s.j.compose(&t.u).unwrap()).unwrap();
            assert_eq!(h.boundary().unwrap(), left);
            assert!(rep.tr_u.is_zero() && rep.tr_w.is_zero());
            assert_eq!(rep.tr_v, -eps);
            assert_eq!(rep.defect, -eps);
        }
        assert_eq!(build_paper_example(RingSpec::zmod(4)).map(|_| ()), Ok(()));
        let (s, t, _) = build_paper_example(RingSpec::zmod(4)).unwrap();
        assert_eq!(check_triple(&s, &t).unwrap().defect, RingSpec::zmod(4).from_int(2));
        assert_eq!(build_paper_example(RingSpec::zmod(5)).unwrap_err(), Error::NoNilpotent(RingSpec::zmod(5)));
    }

    #[test]
    fn certify_genuine_and_forged() {
        let ring = RingSpec::dual(3);
        let (ses, triple, _) = build_paper_example(ring).unwrap();
        let report = check_triple(&ses, &triple).unwrap();
        let mut outcome = SearchOutcome {
            ring,
            criterion: Criterion::Squares,
            violations_found: 1,
            first_violation: Some(Violation { index: 0, ses: ses.clone(), triple, report: report.clone() }),
            instances_examined: 1,
            log: Vec::new(),
        };
        assert!(certify(&outcome).is_ok());
        let zero = EndoTriple::zero(&ses);
        outcome.first_violation = Some(Violation { index: 0, ses, triple: zero, report });
        assert!(certify(&outcome).is_err());
    }

    #[test]
    fn exhaustive_small_rings() {
        let mut cfg = SearchConfig::new(RingSpec::zmod(4), Mode::Exhaustive);
        let out = search_violation(&cfg).unwrap();
        assert!(out.violations_found >= 1);
        certify(&out).unwrap();

        cfg.ring = RingSpec::zmod(2);
        cfg.criterion = Criterion::Triangle;
        let out = search_violation(&cfg).unwrap();
        assert_eq!(out.violations_found, 0);
        assert!(out.instances_examined > 0);
    }

    #[test]
    fn ceiling_enforced() {
        let mut cfg = SearchConfig::new(RingSpec::zmod(4), Mode::Exhaustive);
        cfg.ceiling = 100;
        assert!(matches!(search_violation(&cfg), Err(Error::CeilingExceeded { ceiling: 100, .. })));
    }

    #[test]
    fn randomized_is_deterministic() {
        let mut cfg = SearchConfig::new(RingSpec::zmod(4), Mode::Randomized);
        cfg.trials = 3000;
        cfg.seed = 7;
        cfg.log = true;
        let a = search_violation(&cfg).unwrap();
        let b = search_violation(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.log.len() as u64, a.instances_examined);
        if a.violations_found > 0 {
            certify(&a).unwrap();
        }
    }

    #[test]
    fn rank_vectors_cover_all() {
        assert_eq!(rank_vectors(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(rank_vectors(3, 2).len(), 27);
    }
}
