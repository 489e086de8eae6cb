use qmzv_core::exact::parse_rational;
use qmzv_core::index::Index;
use qmzv_core::miner::{
    default_primes, dim_tilde, find_relations, gens, relation_in_span, vectorize_prime, GeneratorDescriptor,
    RelationCandidate, SpanFamily, SpanSpec, Vectorizer,
};
use qmzv_core::tables::{compute_tables, CellStatus, TableBounds};

fn zeta(k: &str) -> GeneratorDescriptor {
    GeneratorDescriptor::zeta(k.parse::<Index>().unwrap())
}

#[test]
fn cached_blocks_match_fresh_ones() {
    let dir = tempfile::tempdir().unwrap();
    let vz = Vectorizer::new(Some(dir.path().to_path_buf()));
    let descs = gens(SpanFamily::Q, 3);
    let first = vz.block(11, 1, &descs, "test").unwrap();
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let second = vz.block(11, 1, &descs, "test").unwrap();
    assert_eq!(first, second);
    assert_eq!(first, vectorize_prime(11, 1, &descs).unwrap());
}

#[test]
fn cached_and_uncached_dimensions_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cached = Vectorizer::new(Some(dir.path().to_path_buf()));
    for k in 1..=3 {
        let a = dim_tilde(SpanFamily::O2, k, None, &cached).unwrap();
        let b = dim_tilde(SpanFamily::O2, k, None, &Vectorizer::default()).unwrap();
        assert_eq!((a.dim_tilde, a.rank_full, a.rank_v), (b.dim_tilde, b.rank_full, b.rank_v));
    }
}

#[test]
fn weight_three_relations_hold_at_fresh_primes() {
    let vz = Vectorizer::default();
    let rels = find_relations(SpanFamily::O, 3, None, &vz).unwrap();
    assert!(!rels.is_empty());
    for r in &rels {
        assert!(r.holds_at(&[101, 103], 1).unwrap(), "{r}");
    }
}

#[test]
fn theorem_relation_lies_in_mined_kernel() {
    // 2ζ(2) + ζ(1,1) + (1 − q)ζ(1) = 0
    let rel = RelationCandidate {
        coeffs: vec![
            (zeta("2"), parse_rational("2").unwrap()),
            (zeta("1,1"), parse_rational("1").unwrap()),
            (zeta("1").times(0, 1), parse_rational("1").unwrap()),
        ],
    };
    assert!(rel.holds_at(&default_primes(2, 50), 1).unwrap());
    let mined = find_relations(SpanFamily::O, 2, None, &Vectorizer::default()).unwrap();
    assert!(relation_in_span(&rel, &mined));
    let broken = RelationCandidate { coeffs: vec![(zeta("2"), parse_rational("1").unwrap()), (zeta("1,1"), parse_rational("1").unwrap())] };
    assert!(!relation_in_span(&broken, &mined));
}

#[test]
fn json_round_trips() {
    let rel = RelationCandidate {
        coeffs: vec![(zeta("2"), parse_rational("-1/12").unwrap()), (GeneratorDescriptor::power(2, 2), parse_rational("3").unwrap())],
    };
    let text = serde_json::to_string(&rel).unwrap();
    assert_eq!(serde_json::from_str::<RelationCandidate>(&text).unwrap(), rel);

    let shifted: SpanSpec = serde_json::from_str(r#"{"family":"Q","shifted_weight":2}"#).unwrap();
    assert_eq!(shifted.n(), 1);
    assert!(shifted.descriptors().iter().all(|g| g.j >= 1));
    let explicit: SpanSpec = serde_json::from_str(r#"{"basis":[{"h":0,"j":1,"index":[]}],"n":2}"#).unwrap();
    assert_eq!(explicit.n(), 2);
    assert_eq!(explicit.descriptors(), vec![GeneratorDescriptor::power(0, 1)]);
}

#[test]
fn small_tables_match_reference() {
    let bounds = TableBounds { o: 4, word: 5, q: 3, o2: 3 };
    let tables = compute_tables(&bounds, &Vectorizer::default()).unwrap();
    for t in &tables {
        assert!(t.all_match(), "{}", t.to_csv());
        let computed = t.cells.iter().filter(|c| c.status == CellStatus::Match).count();
        assert!(computed > 0 || t.cells.iter().all(|c| c.status == CellStatus::Reference), "{}", t.name);
    }
}
