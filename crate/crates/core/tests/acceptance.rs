//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 5 is known not to hold as stated: over any ring, an acyclic
//! middle term lets both squares commute up to homotopy while the traces
//! differ. The run still reports it; the harness only fails when a
//! criterion's verdict differs from the expected one.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use chaintrace::cli;
use chaintrace::search::random_extension;
use chaintrace::{
    are_homotopic, build_paper_example, certify, check_triple, det_of_automorphism, det_trace_bridge,
    find_null_homotopy, graded_trace, koszul_swap, perturb, search_violation, ChainMap, Criterion, GradedLine,
    Homotopy, LinearSystem, Matrix, MatrixSpace, Mode, PerfectComplex, RingElem, RingSpec, SearchConfig, SquareStatus,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal statement does not hold.
const EXPECTED_FAIL: &[&str] = &["5"];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn strict_rings() -> [RingSpec; 5] {
    [RingSpec::zmod(4), RingSpec::zmod(5), RingSpec::zmod(6), RingSpec::dual(2), RingSpec::dual(3)]
}

fn c1_counterexample() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for ring in [RingSpec::dual(3), RingSpec::dual(2), RingSpec::zmod(4)] {
        let eps = ring.nilpotent_witness().expect("non-reduced");
        let (s, t, h) = build_paper_example(ring).expect("builds");
        let r = check_triple(&s, &t).expect("valid");
        let left = t.v.compose(&s.j).unwrap().sub(&s.j.compose(&t.u).unwrap()).unwrap();
        let found = r.left_square.witness().map(|w| w.boundary().unwrap() == left).unwrap_or(false);
        let this = s.validate().is_ok()
            && r.tr_u.is_zero()
            && r.tr_w.is_zero()
            && r.tr_v == -eps
            && r.right_square == SquareStatus::Strict
            && found
            && h.boundary().unwrap() == left
            && !r.defect.is_zero()
            && (ring != RingSpec::dual(3) || h.comp(1) == Matrix::identity(ring, 1));
        let (code, out) = cli::run(["chaintrace", "paper-example", "--ring", &ring.to_string()]);
        let cli_ok = code == 0 && out.contains(&format!("defect = {}", -eps));
        ok &= this && cli_ok;
        notes.push(format!("{ring}: defect {}", r.defect));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    verdict(ok, format!("{} in {:.0?}", notes.join(", "), elapsed))
}

fn c2_strict_additivity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    let mut bad = 0;
    for ring in strict_rings() {
        let mut n = 0;
        while n < 110 {
            let ext = random_extension(ring, 4, 3, &mut rng);
            let (k, m) = (&ext.ses.k, &ext.ses.m);
            let u = ChainMap::space(k, k).unwrap().random(&mut rng);
            let w = ChainMap::space(m, m).unwrap().random(&mut rng);
            let Some(lifts) = ext.strict_lifts(&u, &w).unwrap() else { continue };
            let t = lifts.random(&mut rng);
            let r = check_triple(&ext.ses, &t).unwrap();
            if !r.both_strict() || !r.defect.is_zero() {
                bad += 1;
            }
            n += 1;
        }
        checked += n;
    }
    verdict(checked >= 500 && bad == 0, format!("{checked} strict triples, {bad} with nonzero defect"))
}

fn c3_homotopy_invariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    let total = 1000;
    for i in 0..total {
        let ring = strict_rings()[i % 5];
        let len = rng.gen_range(1..=4);
        let ranks = (0..len).map(|_| rng.gen_range(0..=3)).collect();
        let k = PerfectComplex::random(ring, rng.gen_range(-2..=2), ranks, &mut rng);
        let f = ChainMap::space(&k, &k).unwrap().random(&mut rng);
        let h = Homotopy::random(&k, &k, &mut rng).unwrap();
        let g = perturb(&f, &h).unwrap();
        if graded_trace(&g).unwrap() != graded_trace(&f).unwrap() || are_homotopic(&g, &f).unwrap().is_none() {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{total} pairs, {bad} mismatches"))
}

fn all_vectors(ring: RingSpec, n: usize) -> Vec<Vec<RingElem>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                ring.elements().map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect()
    })
}

/// Exhaustive comparison against brute-force enumeration of all `x`.
fn systems_oracle(ring: RingSpec) -> (usize, usize) {
    let mut checked = 0;
    let mut bad = 0;
    for rows in 1..=2 {
        for cols in 1..=2 {
            let xs = all_vectors(ring, cols);
            for a in MatrixSpace::all(ring, rows, cols).iter() {
                let sys = LinearSystem::new(&a);
                let mut images: BTreeMap<Vec<RingElem>, u64> = BTreeMap::new();
                for x in &xs {
                    *images.entry(a.apply(x).unwrap()).or_default() += 1;
                }
                for b in all_vectors(ring, rows) {
                    let expected = images.get(&b).copied().unwrap_or(0);
                    let rep = sys.solve(&b).unwrap();
                    let witness_ok = match &rep.witness {
                        Some(x) => a.apply(x).unwrap() == b,
                        None => true,
                    };
                    if rep.solvable != (expected > 0) || rep.solution_count != BigUint::from(expected) || !witness_ok {
                        bad += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    (checked, bad)
}

/// Every complex over `ring` in degrees `0..=2` with ranks at most 1.
fn small_complexes(ring: RingSpec) -> Vec<PerfectComplex> {
    let mut out = Vec::new();
    for r0 in 0..=1 {
        for r1 in 0..=1 {
            for r2 in 0..=1 {
                out.extend(PerfectComplex::enumerate(ring, 0, &[r0, r1, r2]));
            }
        }
    }
    out
}

/// `find_null_homotopy` against the set of all boundaries `d h + h d`.
fn homotopy_oracle(s: &PerfectComplex, t: &PerfectComplex) -> (usize, usize) {
    let unknowns: usize = s.degrees().map(|n| t.rank(n - 1) * s.rank(n)).sum();
    assert!(unknowns <= 8);
    let shapes: Vec<(i64, usize, usize)> = s.degrees().map(|n| (n, t.rank(n - 1), s.rank(n))).collect();
    let ring = s.ring();
    let mut boundaries = HashSet::new();
    for x in all_vectors(ring, unknowns) {
        let mut comps = BTreeMap::new();
        let mut off = 0;
        for &(n, r, c) in &shapes {
            comps.insert(n, Matrix::new(ring, r, c, x[off..off + r * c].to_vec()).unwrap());
            off += r * c;
        }
        let h = Homotopy::new(s.clone(), t.clone(), comps).unwrap();
        boundaries.insert(h.boundary().unwrap());
    }
    let mut checked = 0;
    let mut bad = 0;
    for f in ChainMap::space(s, t).unwrap().iter() {
        let found = find_null_homotopy(&f).unwrap();
        let ok = match &found {
            Some(h) => h.boundary().unwrap() == f && boundaries.contains(&f),
            None => !boundaries.contains(&f),
        };
        bad += usize::from(!ok);
        checked += 1;
    }
    (checked, bad)
}

fn c4_solver_oracle() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut bad = 0;
    for ring in [RingSpec::zmod(4), RingSpec::dual(2)] {
        let (c, b) = systems_oracle(ring);
        bad += b;
        notes.push(format!("{c} systems over {ring}"));
    }
    let ring = RingSpec::zmod(4);
    let complexes = small_complexes(ring);
    let mut maps = 0;
    for s in &complexes {
        for t in &complexes {
            let (c, b) = homotopy_oracle(s, t);
            maps += c;
            bad += b;
        }
    }
    // wider terms, still at most 8 homotopy unknowns
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pairs = 0;
    while pairs < 60 {
        let rs: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=2)).collect();
        let rt: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=2)).collect();
        if rt[0] * rs[1] + rt[1] * rs[2] > 8 {
            continue;
        }
        let s = PerfectComplex::random(ring, 0, rs, &mut rng);
        let t = PerfectComplex::random(ring, 0, rt, &mut rng);
        if ChainMap::space(&s, &t).unwrap().count() > BigUint::from(5000u32) {
            continue;
        }
        let (c, b) = homotopy_oracle(&s, &t);
        maps += c;
        bad += b;
        pairs += 1;
    }
    notes.push(format!("{maps} chain maps over {ring}"));
    let elapsed = start.elapsed();
    verdict(
        bad == 0 && elapsed < Duration::from_secs(300),
        format!("{}, {bad} mismatches, {:.1?}", notes.join(", "), elapsed),
    )
}

fn run_search(ring: RingSpec, mode: Mode, criterion: Criterion) -> chaintrace::SearchOutcome {
    let mut cfg = SearchConfig::new(ring, mode);
    cfg.max_rank = 1;
    cfg.max_window = 2;
    cfg.trials = 10_000;
    cfg.seed = 42;
    cfg.criterion = criterion;
    search_violation(&cfg).expect("within the ceiling")
}

fn c5_reduced_base(criterion: Criterion) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (ring, mode) in [
        (RingSpec::zmod(2), Mode::Exhaustive),
        (RingSpec::zmod(3), Mode::Exhaustive),
        (RingSpec::zmod(5), Mode::Randomized),
        (RingSpec::zmod(6), Mode::Randomized),
    ] {
        let out = run_search(ring, mode, criterion);
        ok &= out.violations_found == 0;
        if out.violations_found > 0 {
            ok &= certify(&out).is_ok();
        }
        notes.push(format!("{ring} {}/{}", out.violations_found, out.instances_examined));
    }
    let out = run_search(RingSpec::zmod(4), Mode::Randomized, criterion);
    let certified = out.violations_found >= 1 && certify(&out).is_ok();
    ok &= certified;
    notes.push(format!("Z/4 {}/{} certified={certified}", out.violations_found, out.instances_examined));
    verdict(ok, format!("violations/instances: {}", notes.join(", ")))
}

fn c6_bridge() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    let mut bad = 0;
    for m in [4, 7] {
        let ring = RingSpec::zmod(m);
        for u in MatrixSpace::all(ring, 1, 1).iter() {
            let (d, t) = det_trace_bridge(&u).unwrap();
            bad += usize::from(d != t);
            checked += 1;
        }
        for i in 0..120 {
            let n = 2 + i % 2;
            let (d, t) = det_trace_bridge(&Matrix::random(ring, n, n, &mut rng)).unwrap();
            bad += usize::from(d != t);
            checked += 1;
        }
    }
    verdict(checked >= 211 && bad == 0, format!("{checked} matrices, {bad} mismatches"))
}

fn c7_koszul() -> Verdict {
    let mut bad = 0;
    let mut checked = 0;
    for ring in [RingSpec::zmod(2), RingSpec::zmod(5), RingSpec::zmod(6), RingSpec::dual(3)] {
        for r in -3..=3 {
            for s in -3..=3 {
                let (a, b) = (GradedLine::canonical(ring, r), GradedLine::canonical(ring, s));
                let ab = koszul_swap(&a, &b).unwrap();
                let ba = koszul_swap(&b, &a).unwrap();
                let expected = if (r * s) % 2 == 0 { ring.one() } else { -ring.one() };
                bad += usize::from(ab != expected || !(ab * ba).is_one());
                checked += 1;
            }
        }
        let one = GradedLine::canonical(ring, 1);
        bad += usize::from(koszul_swap(&one, &one).unwrap() != -ring.one());
    }
    verdict(bad == 0, format!("{checked} degree pairs, {bad} mismatches"))
}

fn c8_det_multiplicativity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    let mut bad = 0;
    for ring in strict_rings() {
        let mut n = 0;
        let mut attempts = 0;
        while n < 25 && attempts < 20_000 {
            attempts += 1;
            let ext = random_extension(ring, 3, 2, &mut rng);
            let (k, m) = (&ext.ses.k, &ext.ses.m);
            let u = ChainMap::space(k, k).unwrap().random(&mut rng);
            let w = ChainMap::space(m, m).unwrap().random(&mut rng);
            let (Ok(du), Ok(dw)) = (det_of_automorphism(&u), det_of_automorphism(&w)) else { continue };
            let Some(lifts) = ext.strict_lifts(&u, &w).unwrap() else { continue };
            let t = lifts.random(&mut rng);
            let dv = det_of_automorphism(&t.v);
            bad += usize::from(dv != Ok(du * dw));
            n += 1;
        }
        checked += n;
    }
    verdict(checked >= 100 && bad == 0, format!("{checked} automorphism triples, {bad} mismatches"))
}

type Check = (&'static str, &'static str, fn() -> Verdict);

fn main() {
    let criteria: Vec<Check> = vec![
        ("1", "counterexample reproduction", c1_counterexample),
        ("2", "strict additivity", c2_strict_additivity),
        ("3", "homotopy invariance of trace", c3_homotopy_invariance),
        ("4", "solver oracle equivalence", c4_solver_oracle),
        ("5", "reduced base, two squares", || c5_reduced_base(Criterion::Squares)),
        ("5t", "reduced base, morphism of triangles", || c5_reduced_base(Criterion::Triangle)),
        ("6", "det/trace bridge", c6_bridge),
        ("7", "Koszul sign", c7_koszul),
        ("8", "strict det multiplicativity", c8_det_multiplicativity),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let v = f();
        let mark = if v.pass { "PASS" } else { "FAIL" };
        let expected_fail = EXPECTED_FAIL.contains(&id);
        let note = if expected_fail { " (expected)" } else { "" };
        println!("criterion {id:<2} {mark}{note}  {name}: {}", v.detail);
        if v.pass == expected_fail {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected verdicts: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
