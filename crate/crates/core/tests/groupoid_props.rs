mod common;

use oeg_core::boundary::{enumerate_points, is_isolated, PointBounds};
use oeg_core::graph::{condition_l, Graph};
use oeg_core::groupoid::{
    compose, element_with_k, inverse, isotropy, principality_report, GroupoidElement, TrivialIsotropyPoint,
};
use oeg_core::BoundaryPoint;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn small_graph(seed: u64) -> (ChaCha8Rng, Graph) {
    let mut r = common::rng(seed);
    let g = common::random_graph(&mut r, 3, 0.15);
    (r, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_is_associative_and_adds_k(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let Some(es) = common::chain(&mut r, &g, 4) else { return Ok(()) };
        let (a, b, c) = (&es[0], &es[1], &es[2]);
        prop_assert!(a.k().abs() <= 3 && b.k().abs() <= 3 && c.k().abs() <= 3);
        let ab = compose(&g, a, b).unwrap();
        let bc = compose(&g, b, c).unwrap();
        prop_assert_eq!(ab.k(), a.k() + b.k());
        let left = compose(&g, &ab, c).unwrap();
        let right = compose(&g, a, &bc).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(compose(&g, a, c).is_err() || a.source() == c.range());
    }

    #[test]
    fn inverses_give_units(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let Some(es) = common::chain(&mut r, &g, 2) else { return Ok(()) };
        let e = &es[0];
        let inv = inverse(e);
        prop_assert_eq!(inv.k(), -e.k());
        prop_assert_eq!(compose(&g, e, &inv).unwrap(), GroupoidElement::unit(e.range().clone()));
        prop_assert_eq!(compose(&g, &inv, e).unwrap(), GroupoidElement::unit(e.source().clone()));
        prop_assert_eq!(compose(&g, &GroupoidElement::unit(e.range().clone()), e).unwrap(), e.clone());
        prop_assert_eq!(inverse(&inv), e.clone());
    }

    #[test]
    fn witnesses_are_least(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let Some(es) = common::chain(&mut r, &g, 2) else { return Ok(()) };
        let e = &es[0];
        let (m, n) = e.witness();
        prop_assert_eq!(e.range().shift(&g, m).unwrap(), e.source().shift(&g, n).unwrap());
        for mm in 0..m {
            let nn = mm as i64 - e.k();
            if nn >= 0 {
                let a = e.range().shift(&g, mm);
                let b = e.source().shift(&g, nn as usize);
                prop_assert!(a.is_err() || b.is_err() || a.unwrap() != b.unwrap());
            }
        }
        prop_assert_eq!(element_with_k(&g, e.range(), e.k(), e.source()), Some(e.clone()));
    }

    #[test]
    fn isotropy_is_generated_by_the_period(seed in any::<u64>()) {
        let (_, g) = small_graph(seed);
        for x in enumerate_points(&g, PointBounds::new(2, 3, 2)) {
            let iso = isotropy(&x);
            for k in -6i64..=6 {
                prop_assert_eq!(element_with_k(&g, &x, k, &x).is_some(), iso.contains(k), "{:?} {}", x, k);
            }
            if let BoundaryPoint::EvPeriodic { period, .. } = &x {
                prop_assert_eq!(iso.d, period.len());
                let gen = element_with_k(&g, &x, iso.d as i64, &x).unwrap();
                prop_assert_eq!(gen.k(), iso.d as i64);
            } else {
                prop_assert!(iso.is_trivial());
            }
        }
    }

    #[test]
    fn principality_matches_condition_l_and_isolated_units(seed in any::<u64>()) {
        let (mut r, g) = small_graph(seed);
        let n = g.vertex_count();
        let report = principality_report(&g, None);
        prop_assert_eq!(report.principal, condition_l(&g).holds);
        // A loop without an exit visits each vertex at most once.
        let isolated_unit = enumerate_points(&g, PointBounds::new(0, n, 2))
            .into_iter()
            .any(|x| !isotropy(&x).is_trivial() && is_isolated(&g, &x));
        prop_assert_eq!(report.principal, !isolated_unit);
        match &report.witness {
            Some(u) => {
                prop_assert!(u.is_unit() && is_isolated(&g, u.range()));
                prop_assert!(!isotropy(u.range()).is_trivial());
            }
            None => prop_assert!(report.principal),
        }
        if report.principal {
            let z = common::random_cylinder(&mut r, &g);
            let rz = principality_report(&g, Some(&z));
            match rz.in_cylinder {
                Some(TrivialIsotropyPoint::Found(x)) => {
                    prop_assert!(z.contains(&x));
                    prop_assert!(isotropy(&x).is_trivial());
                }
                Some(TrivialIsotropyPoint::NotRepresentable) => {
                    // Then no sampled finite point lies in the cylinder.
                    let finite = enumerate_points(&g, PointBounds::new(3 + n, 1, 2))
                        .into_iter()
                        .any(|x| matches!(x, BoundaryPoint::Finite(_)) && z.contains(&x));
                    prop_assert!(!finite);
                }
                None => prop_assert!(false, "principal report omits the cylinder"),
            }
        }
    }
}
