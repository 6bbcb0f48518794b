mod common;

use std::collections::BTreeSet;

use oeg_core::boundary::{
    boundary_census, canonicalize, cyl_intersection, cyl_relation, disjointify, enumerate_points,
    is_isolated, simple_loops_sampled, union_subset, CylRelation, PointBounds,
};
use oeg_core::graph::{Edge, Graph, Loop, Path};
use oeg_core::{BoundaryPoint, Census, Cylinder};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// The first `n` edges of the infinite or finite edge sequence of a point.
fn edge_word(x: &BoundaryPoint, n: usize) -> Vec<Option<Edge>> {
    (0..n).map(|i| x.edge_at(i)).collect()
}

/// A random raw (not necessarily canonical) eventually periodic form:
/// a prefix ending on `η`, then `j` extra copies of `η` and a partial turn.
fn raw_periodic(r: &mut ChaCha8Rng, g: &Graph) -> Option<(Path, Vec<Edge>)> {
    let loops = simple_loops_sampled(g, 3, 2);
    if loops.is_empty() {
        return None;
    }
    let eta = loops[r.gen_range(0..loops.len())].rotate(r.gen_range(0..3));
    let mut start = common::random_path(r, g, 3, 2);
    let on_loop = eta.to_path(g).vertices(g).iter().position(|&v| v == start.range(g));
    let eta = match on_loop {
        Some(i) => eta.rotate(i),
        None => {
            start = Path::vertex(eta.base(g));
            eta
        }
    };
    let mut prefix = start;
    for _ in 0..r.gen_range(0..3) {
        for &e in eta.edges() {
            prefix.push(g, e).unwrap();
        }
    }
    let t = r.gen_range(0..eta.len());
    for &e in &eta.edges()[..t] {
        prefix.push(g, e).unwrap();
    }
    let k = r.gen_range(1..3);
    Some((prefix, eta.rotate(t).power(k).edges().to_vec()))
}

fn small_graph(seed: u64) -> (ChaCha8Rng, Graph) {
    let mut r = common::rng(seed);
    let g = common::random_graph(&mut r, 3, 0.2);
    (r, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonical_forms_decide_equality(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let Some((p1, l1)) = raw_periodic(&mut r, &g) else { return Ok(()) };
        let Some((p2, l2)) = raw_periodic(&mut r, &g) else { return Ok(()) };
        let depth = 3 * (p1.len() + l1.len()).max(p2.len() + l2.len());
        let x1 = canonicalize(&g, p1.clone(), Some(l1.clone())).unwrap();
        let x2 = canonicalize(&g, p2, Some(l2)).unwrap();
        prop_assert_eq!(x1.canonical(&g), x1.clone());
        match &x1 {
            BoundaryPoint::EvPeriodic { prefix, period } => {
                let again = canonicalize(&g, prefix.clone(), Some(period.edges().to_vec())).unwrap();
                prop_assert_eq!(&again, &x1);
            }
            BoundaryPoint::Finite(_) => prop_assert!(false, "periodic input became finite"),
        }
        // Raw and canonical forms spell the same infinite word.
        let raw_word: Vec<Option<Edge>> = (0..depth)
            .map(|i| {
                if i < p1.len() {
                    Some(p1.edges()[i])
                } else {
                    Some(l1[(i - p1.len()) % l1.len()])
                }
            })
            .collect();
        prop_assert_eq!(edge_word(&x1, depth), raw_word);
        prop_assert_eq!(x1 == x2, edge_word(&x1, depth) == edge_word(&x2, depth));
    }

    #[test]
    fn disjointify_refines_covers(seed in any::<u64>(), n in 1usize..5) {
        let (mut r, g) = small_graph(seed);
        let cover: Vec<Cylinder> = (0..n).map(|_| common::random_cylinder(&mut r, &g)).collect();
        let out = disjointify(&g, &cover);
        for (i, a) in out.iter().enumerate() {
            prop_assert!(!a.is_empty(&g));
            for b in &out[i + 1..] {
                prop_assert_eq!(cyl_relation(&g, a, b), CylRelation::Disjoint);
            }
        }
        prop_assert!(union_subset(&g, &cover, &out));
        prop_assert!(union_subset(&g, &out, &cover));
        for x in enumerate_points(&g, PointBounds::new(3, 2, 3)) {
            let before = cover.iter().any(|z| z.contains(&x));
            let after = out.iter().filter(|z| z.contains(&x)).count();
            prop_assert_eq!(after, usize::from(before));
        }
    }

    #[test]
    fn intersections_are_exact(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let a = common::random_cylinder(&mut r, &g);
        let b = common::random_cylinder(&mut r, &g);
        let meet = cyl_intersection(&g, &a, &b);
        for x in enumerate_points(&g, PointBounds::new(3, 2, 3)) {
            let both = a.contains(&x) && b.contains(&x);
            prop_assert_eq!(meet.as_ref().is_some_and(|m| m.contains(&x)), both);
        }
    }

    #[test]
    fn finite_census_is_complete_and_shift_closed(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (g, points) = loop {
            let g = common::random_graph(&mut r, 4, 0.0);
            if let Census::Finite(p) = boundary_census(&g) {
                break (g, p);
            }
        };
        let set: BTreeSet<&BoundaryPoint> = points.iter().collect();
        prop_assert_eq!(set.len(), points.len());
        for x in &points {
            if x.has_len(1) {
                let sx = x.shift(&g, 1).unwrap();
                prop_assert!(set.contains(&sx));
            }
        }
        let n = g.vertex_count();
        let wide: BTreeSet<BoundaryPoint> =
            enumerate_points(&g, PointBounds::new(2 * n, n, 1)).into_iter().collect();
        prop_assert_eq!(wide.iter().collect::<BTreeSet<_>>(), set.clone());
        for _ in 0..5 {
            let z = common::random_cylinder(&mut r, &g);
            if !z.is_empty(&g) {
                prop_assert!(points.iter().any(|x| z.contains(x)));
            }
        }
    }
}

proptest! {
    // Each case checks every sampled point against a brute-force cover search.
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn isolation_matches_cylinder_search(seed in any::<u64>()) {
        let (_, g) = small_graph(seed);
        prop_assume!(g.vertices().all(|v| g.out_edges(v, 3).len() <= 3));
        let n = g.vertex_count();
        let tails = enumerate_points(&g, PointBounds::new(n + 5, n, 3));
        for x in enumerate_points(&g, PointBounds::new(1, 2, 2)) {
            prop_assert_eq!(is_isolated(&g, &x), isolated_by_search(&g, &x, &tails), "{:?}", x);
        }
    }
}

/// Whether some `Z(μ∖F)` with `μ` a prefix of `x` of length at most
/// `|preperiod| + 2|period|` contains `x` and no other point `μ·t`, `t` a sampled tail.
/// Tails reach one step past the base, through up to `|E^0|` more edges, into
/// any loop; with periods of length at most two that is `|E^0| + 5` edges.
fn isolated_by_search(g: &Graph, x: &BoundaryPoint, tails: &[BoundaryPoint]) -> bool {
    let limit = match x {
        BoundaryPoint::Finite(p) => p.len(),
        BoundaryPoint::EvPeriodic { prefix, period } => prefix.len() + 2 * period.len(),
    };
    (0..=limit).any(|len| {
        let mu = x.prefix_path(len).unwrap();
        let r = mu.range(g);
        let next = x.edge_at(len);
        let options: Vec<Edge> = g.out_edges(r, 2).into_iter().filter(|&e| Some(e) != next).collect();
        let members: Vec<BoundaryPoint> =
            tails.iter().filter(|t| t.source() == r).map(|t| t.prepend(g, &mu).unwrap()).collect();
        (0..1u32 << options.len()).any(|mask| {
            let f = options.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let z = Cylinder::new(g, mu.clone(), f).unwrap();
            z.contains(x) && members.iter().all(|y| !z.contains(y) || y == x)
        })
    })
}

#[test]
fn loops_used_as_periods_are_accepted() {
    let g = oeg_core::fixtures::e2();
    for l in simple_loops_sampled(&g, 2, 1) {
        let x = BoundaryPoint::cycle(&g, &l);
        assert_eq!(x, canonicalize(&g, Path::vertex(l.base(&g)), Some(l.edges().to_vec())).unwrap());
        let _: &Loop = &l;
    }
}
