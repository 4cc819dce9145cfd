use chaintrace::search::{build_paper_example, random_extension};
use chaintrace::text::{format_document, format_triple_file, parse_document, Document, MapKind, NamedMap};
use chaintrace::{ChainMap, PerfectComplex, RingSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rings() -> impl Strategy<Value = RingSpec> {
    prop_oneof![(2u64..13).prop_map(RingSpec::zmod), (2u64..7).prop_map(RingSpec::dual),]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triple_files_round_trip(ring in rings(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ext = random_extension(ring, 3, 2, &mut rng);
        let s = &ext.ses;
        let endo = |c: &PerfectComplex, rng: &mut ChaCha8Rng| ChainMap::space(c, c).unwrap().random(rng);
        let t = chaintrace::EndoTriple { u: endo(&s.k, &mut rng), v: endo(&s.l, &mut rng), w: endo(&s.m, &mut rng) };
        let text = format_triple_file(s, &t);
        let doc = parse_document(&text).unwrap();
        prop_assert_eq!(&doc.ses().unwrap(), s);
        prop_assert_eq!(&doc.triple().unwrap(), &t);
        prop_assert_eq!(format_document(&doc), text);
    }

    #[test]
    fn named_maps_round_trip(ring in rings(), lo in -3i64..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PerfectComplex::random(ring, lo, vec![1, 2, 1], &mut rng);
        let b = PerfectComplex::random(ring, lo + 1, vec![2, 1], &mut rng);
        let f = ChainMap::space(&a, &b).unwrap().random(&mut rng);
        let g = ChainMap::space(&a, &a).unwrap().random(&mut rng);
        let doc = Document {
            ring,
            complexes: vec![("A".into(), a), ("B".into(), b)],
            maps: vec![
                NamedMap { name: "f".into(), kind: MapKind::Map, map: f },
                NamedMap { name: "g".into(), kind: MapKind::Endo, map: g },
            ],
        };
        prop_assert_eq!(parse_document(&format_document(&doc)).unwrap(), doc);
    }
}

#[test]
fn eps_file_round_trip() {
    for ring in [RingSpec::dual(3), RingSpec::zmod(4), RingSpec::dual(2)] {
        let (s, t, _) = build_paper_example(ring).unwrap();
        let text = format_triple_file(&s, &t);
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.ses().unwrap(), s);
        assert_eq!(doc.triple().unwrap(), t);
    }
}
