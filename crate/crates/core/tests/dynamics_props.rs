mod common;

use oeg_core::boundary::{boundary_census, enumerate_points, PointBounds};
use oeg_core::dsl::parse_partition;
use oeg_core::dynamics::{
    conjugate_exists, conjugate_pseudogroup, extend_cocycles, finite_census, fixed_points,
    round_trip_transport, search_oe_witness, verify_conjugacy, verify_extended, verify_oe_witness,
    verify_pseudogroup_element, OrbitWitness, PointMap, PseudogroupElement, SearchOutcome, Table,
};
use oeg_core::json::witness_from_json;
use oeg_core::moves::out_split_full;
use oeg_core::{Census, Graph};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn w1() -> OrbitWitness {
    witness_from_json(&common::load("e1.graph"), &common::load("f1.graph"), &common::data("w1.json")).unwrap()
}

/// A random graph with finite boundary, at most `max_points` boundary points
/// and at least two of positive length.
fn finite_graph(r: &mut ChaCha8Rng, max_v: usize, max_points: usize) -> Graph {
    loop {
        let g = common::random_graph(r, max_v, 0.0);
        if let Census::Finite(p) = boundary_census(&g) {
            if p.len() <= max_points && p.iter().filter(|x| x.has_len(1)).count() >= 2 {
                return g;
            }
        }
    }
}

/// The conjugacy of an out-split as a witness with `k ≡ 0` and `l ≡ 1`.
fn split_witness(r: &mut ChaCha8Rng, g: &Graph) -> OrbitWitness {
    let p = common::random_partition(r, g);
    let split = out_split_full(g, &p).unwrap();
    let f = split.graph().clone();
    let h: PointMap = finite_census(g)
        .unwrap()
        .into_iter()
        .map(|x| {
            let y = split.map_point(g, &x).unwrap();
            (x, y)
        })
        .collect();
    let ones = |t: &Graph, c: u64| -> Table {
        finite_census(t).unwrap().into_iter().filter(|x| x.has_len(1)).map(|x| (x, c)).collect()
    };
    OrbitWitness { k1: ones(g, 0), l1: ones(g, 1), k1p: ones(&f, 0), l1p: ones(&f, 1), e: g.clone(), f, h }
}

#[test]
fn published_witness_extends_to_five_steps() {
    let w = w1();
    assert!(verify_oe_witness(&w).unwrap().ok);
    for n in 0..=5 {
        let c = extend_cocycles(&w, n).unwrap();
        assert!(verify_extended(&w, &c).unwrap().ok, "n = {n}");
        let ci = extend_cocycles(&w.inverse(), n).unwrap();
        assert!(verify_extended(&w.inverse(), &ci).unwrap().ok, "inverse, n = {n}");
    }
}

#[test]
fn corrupted_witness_is_rejected() {
    let e = common::load("e1.graph");
    let f = common::load("f1.graph");
    let bad = witness_from_json(&e, &f, &common::data("bad_w1.json")).unwrap();
    let report = verify_oe_witness(&bad).unwrap();
    assert!(!report.ok);
    assert!(!report.failures.is_empty());
}

#[test]
fn search_finds_the_published_pair_at_bound_two() {
    let e = common::load("e1.graph");
    let f = common::load("f1.graph");
    match search_oe_witness(&e, &f, 2).unwrap() {
        SearchOutcome::Found(w) => assert!(verify_oe_witness(&w).unwrap().ok),
        SearchOutcome::NoneAtBound => panic!("no witness at bound 2"),
    }
    // E1 has a shift-fixed point and F1 does not.
    assert_eq!(fixed_points(&e).unwrap().len(), 1);
    assert!(fixed_points(&f).unwrap().is_empty());
    assert!(conjugate_exists(&e, &f).unwrap().is_none());
}

#[test]
fn pseudogroup_round_trip_through_published_witness() {
    let w = w1();
    let back = round_trip_transport(&w).unwrap();
    assert!(verify_oe_witness(&back).unwrap().ok);
    assert_eq!(back.h, w.h);
}

#[test]
fn split_example_intertwines_the_shift() {
    let g = common::load("e2.graph");
    let p = parse_partition(&g, &common::data("e2_split.part")).unwrap();
    let split = out_split_full(&g, &p).unwrap();
    let f = split.graph();
    let points = enumerate_points(&g, PointBounds::new(3, 2, 1));
    assert!(points.len() > 20);
    for x in &points {
        let y = split.map_point(&g, x).unwrap();
        assert_eq!(y.size(), x.size());
        assert_eq!(split.map_point(&g, &x.shift(&g, 1).unwrap()).unwrap(), y.shift(f, 1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn identity_witness_extends(seed in any::<u64>(), n in 0usize..=5) {
        let mut r = common::rng(seed);
        let g = finite_graph(&mut r, 4, 40);
        let w = OrbitWitness::identity(&g).unwrap();
        prop_assert!(verify_oe_witness(&w).unwrap().ok);
        let c = extend_cocycles(&w, n).unwrap();
        prop_assert!(verify_extended(&w, &c).unwrap().ok);
        for (x, &k) in &c.k {
            prop_assert_eq!(k, 0);
            prop_assert_eq!(c.l[x], n as u64);
        }
    }

    #[test]
    fn out_split_conjugacies_verify_and_extend(seed in any::<u64>(), n in 0usize..=5) {
        let mut r = common::rng(seed);
        let g = finite_graph(&mut r, 3, 30);
        let w = split_witness(&mut r, &g);
        prop_assert!(verify_conjugacy(&w.e, &w.f, &w.h).unwrap());
        prop_assert!(verify_oe_witness(&w).unwrap().ok);
        prop_assert!(verify_oe_witness(&w.inverse()).unwrap().ok);
        let c = extend_cocycles(&w, n).unwrap();
        prop_assert!(verify_extended(&w, &c).unwrap().ok);
        let back = round_trip_transport(&w).unwrap();
        prop_assert!(verify_oe_witness(&back).unwrap().ok);
    }

    #[test]
    fn transported_shifts_are_pseudogroup_elements(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = finite_graph(&mut r, 3, 30);
        let w = split_witness(&mut r, &g);
        let edges: std::collections::BTreeSet<_> =
            finite_census(&g).unwrap().iter().filter_map(|x| x.edge_at(0)).collect();
        for e in edges {
            let p = PseudogroupElement::shift_on_edge(&g, e).unwrap();
            prop_assert!(verify_pseudogroup_element(&p).unwrap());
            let q = conjugate_pseudogroup(&w, &p).unwrap();
            prop_assert!(verify_pseudogroup_element(&q).unwrap());
            prop_assert_eq!(q.alpha.len(), p.alpha.len());
        }
    }

    #[test]
    fn search_results_verify(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let e = finite_graph(&mut r, 3, 6);
        let f = finite_graph(&mut r, 3, 6);
        if let SearchOutcome::Found(w) = search_oe_witness(&e, &f, 2).unwrap() {
            prop_assert!(verify_oe_witness(&w).unwrap().ok);
            prop_assert!(verify_oe_witness(&w.inverse()).unwrap().ok);
            for n in 0..=3 {
                let c = extend_cocycles(&w, n).unwrap();
                prop_assert!(verify_extended(&w, &c).unwrap().ok);
            }
        }
        // A conjugacy is an orbit equivalence with k ≡ 0 and l ≡ 1, so the
        // search must not miss pairs that are conjugate.
        if conjugate_exists(&e, &f).unwrap().is_some() {
            prop_assert!(matches!(search_oe_witness(&e, &f, 1).unwrap(), SearchOutcome::Found(_)));
        }
    }
}
