mod common;

use oeg_core::graph::{
    condition_l, condition_l_by_search, enumerate_simple_loops, path_concat, primitive_root, Loop,
    Multiplicity, Path,
};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn condition_l_agrees_on_small_graphs_exhaustively() {
    // Condition (L) only sees whether a vertex emits zero, one or several edges,
    // so multiplicities up to two cover every case on up to three vertices.
    for g in common::exhaustive_pool(3, 2) {
        assert_eq!(condition_l(&g).holds, condition_l_by_search(&g).holds, "{g:?}");
    }
}

#[test]
fn condition_l_agrees_on_four_vertex_simple_graphs() {
    for bits in 0u32..(1 << 16) {
        let m: Vec<Vec<Multiplicity>> = (0..4)
            .map(|i| (0..4).map(|j| Multiplicity::Finite(u64::from(bits >> (4 * i + j) & 1))).collect())
            .collect();
        let g = common::from_matrix(&m);
        assert_eq!(condition_l(&g).holds, condition_l_by_search(&g).holds);
    }
}

#[test]
fn condition_l_agrees_on_random_graphs() {
    let mut r = common::rng(1);
    for _ in 0..500 {
        let g = common::random_graph(&mut r, 5, 0.1);
        let fast = condition_l(&g);
        let slow = condition_l_by_search(&g);
        assert_eq!(fast.holds, slow.holds);
        if let Some(w) = fast.witness {
            assert!(!w.has_exit(&g));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn primitive_root_of_powers(seed in any::<u64>(), k in 1usize..5, rot in 0usize..8) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 4, 0.2);
        let loops = enumerate_simple_loops(&g, g.vertex_count());
        prop_assume!(!loops.is_empty());
        let base = &loops[r.gen_range(0..loops.len())];
        let l = base.power(k).rotate(rot);
        let (nu, j) = primitive_root(&l);
        prop_assert_eq!(nu.power(j), l.clone());
        prop_assert!(nu.is_simple());
        prop_assert_eq!(j, k);
        prop_assert_eq!(nu, base.rotate(rot));
    }

    #[test]
    fn primitive_root_of_closed_walks(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 3, 0.2);
        let loops = enumerate_simple_loops(&g, g.vertex_count());
        prop_assume!(!loops.is_empty());
        // Concatenate loops through a common base vertex.
        let a = &loops[r.gen_range(0..loops.len())];
        let v = a.base(&g);
        let at_v: Vec<Loop> = loops
            .iter()
            .flat_map(|l| (0..l.len()).map(move |i| l.rotate(i)))
            .filter(|l| l.base(&g) == v)
            .collect();
        let mut edges = a.edges().to_vec();
        for _ in 0..r.gen_range(1..4) {
            edges.extend_from_slice(at_v[r.gen_range(0..at_v.len())].edges());
        }
        let l = Loop::from_edges(&g, edges).unwrap();
        let (nu, j) = primitive_root(&l);
        prop_assert_eq!(nu.power(j), l);
        prop_assert!(nu.is_simple());
    }

    #[test]
    fn concatenation_is_associative(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 3, 0.2);
        let p = common::random_path(&mut r, &g, 4, 3);
        // Continue from the end of each piece so the three are composable.
        let grow = |r: &mut rand_chacha::ChaCha8Rng, from: &Path| {
            let mut q = Path::vertex(from.range(&g));
            for _ in 0..r.gen_range(0..4) {
                let out = g.out_edges(q.range(&g), 3);
                if out.is_empty() {
                    break;
                }
                q.push(&g, out[r.gen_range(0..out.len())]).unwrap();
            }
            q
        };
        let q = grow(&mut r, &p);
        let s = grow(&mut r, &q);
        let left = path_concat(&g, &path_concat(&g, &p, &q).unwrap(), &s).unwrap();
        let right = path_concat(&g, &p, &path_concat(&g, &q, &s).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.len(), p.len() + q.len() + s.len());
        let id_left = Path::vertex(p.source());
        let id_right = Path::vertex(p.range(&g));
        prop_assert_eq!(path_concat(&g, &id_left, &p).unwrap(), p.clone());
        prop_assert_eq!(path_concat(&g, &p, &id_right).unwrap(), p.clone());
    }

    #[test]
    fn incomposable_paths_are_rejected(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 3, 0.2);
        let p = common::random_path(&mut r, &g, 3, 2);
        let q = common::random_path(&mut r, &g, 3, 2);
        prop_assert_eq!(path_concat(&g, &p, &q).is_ok(), p.range(&g) == q.source());
    }

    #[test]
    fn simple_loops_are_canonical_and_distinct(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 4, 0.0);
        let loops = enumerate_simple_loops(&g, g.vertex_count());
        for (i, l) in loops.iter().enumerate() {
            // Simple means not a proper power; vertices may repeat.
            prop_assert_eq!(&l.canonical_rotation(), l);
            prop_assert!(l.is_simple());
            prop_assert!(l.len() <= g.vertex_count());
            prop_assert!(loops[..i].iter().all(|m| m != l));
        }
    }
}
