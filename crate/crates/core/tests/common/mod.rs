#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use oeg_core::boundary::{enumerate_points, PointBounds};
use oeg_core::graph::{Edge, EdgeClass, Graph, Multiplicity, Path, VertexId};
use oeg_core::groupoid::{make_element, GroupoidElement};
use oeg_core::moves::{BlockItem, OutSplitPartition};
use oeg_core::{BoundaryPoint, Cylinder};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn load(name: &str) -> Graph {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    oeg_core::dsl::parse_graph(&text).expect("data file parses").graph
}

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Graph on vertices `0..n` with one class `e{i}{j}` per nonzero entry.
pub fn from_matrix(m: &[Vec<Multiplicity>]) -> Graph {
    let names: Vec<String> = (0..m.len()).map(|i| i.to_string()).collect();
    let mut classes = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &k) in row.iter().enumerate() {
            if !k.is_zero() {
                classes.push(EdgeClass {
                    id: format!("e{i}{j}"),
                    source: VertexId(i),
                    target: VertexId(j),
                    multiplicity: k,
                });
            }
        }
    }
    Graph::new(names, classes).expect("valid matrix graph")
}

/// A random graph with `1..=max_v` vertices; each ordered pair carries no
/// edge, one or two edges, or an infinite class.
pub fn random_graph(r: &mut ChaCha8Rng, max_v: usize, p_inf: f64) -> Graph {
    let n = r.gen_range(1..=max_v);
    let m: Vec<Vec<Multiplicity>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let u: f64 = r.gen();
                    if u < p_inf {
                        Multiplicity::Infinite
                    } else if u < p_inf + 0.3 {
                        Multiplicity::Finite(1)
                    } else if u < p_inf + 0.4 {
                        Multiplicity::Finite(2)
                    } else {
                        Multiplicity::ZERO
                    }
                })
                .collect()
        })
        .collect();
    from_matrix(&m)
}

/// A random proper partition: at each vertex the infinite classes share one block.
pub fn random_partition(r: &mut ChaCha8Rng, g: &Graph) -> OutSplitPartition {
    let mut p = OutSplitPartition::trivial();
    for v in g.vertices() {
        if g.is_sink(v) || r.gen_bool(0.3) {
            continue;
        }
        let mut items = Vec::new();
        let mut infinite = Vec::new();
        for &c in g.out_classes(v) {
            match g.class(c).multiplicity.finite() {
                None => infinite.push(BlockItem::Class(c)),
                Some(k) if r.gen_bool(0.5) => items.extend((0..k).map(|i| BlockItem::Edge(Edge::new(c, i)))),
                Some(_) => items.push(BlockItem::Class(c)),
            }
        }
        let units = items.len() + usize::from(!infinite.is_empty());
        let b = r.gen_range(1..=units.min(3));
        let mut blocks = vec![Vec::new(); b];
        items.shuffle(r);
        let mut units: Vec<Vec<BlockItem>> = items.into_iter().map(|i| vec![i]).collect();
        if !infinite.is_empty() {
            units.push(infinite);
        }
        units.shuffle(r);
        for (i, u) in units.into_iter().enumerate() {
            let k = if i < b { i } else { r.gen_range(0..b) };
            blocks[k].extend(u);
        }
        p = p.split(v, blocks);
    }
    p
}

/// A random path of length at most `max_len` from a random vertex, cut short at sinks.
pub fn random_path(r: &mut ChaCha8Rng, g: &Graph, max_len: usize, sample: u64) -> Path {
    let v = VertexId(r.gen_range(0..g.vertex_count()));
    let mut p = Path::vertex(v);
    let len = r.gen_range(0..=max_len);
    for _ in 0..len {
        let out = g.out_edges(p.range(g), sample);
        if out.is_empty() {
            break;
        }
        p.push(g, *out.choose(r).unwrap()).unwrap();
    }
    p
}

pub fn random_cylinder(r: &mut ChaCha8Rng, g: &Graph) -> Cylinder {
    let base = random_path(r, g, 3, 3);
    let out = g.out_edges(base.range(g), 3);
    let excluded: BTreeSet<Edge> = out.into_iter().filter(|_| r.gen_bool(0.3)).collect();
    Cylinder::new(g, base, excluded).expect("excluded edges leave the range")
}

/// Every graph on `1..=max_v` vertices with finite multiplicities `≤ max_mult`,
/// one representative per isomorphism class.
pub fn exhaustive_pool(max_v: usize, max_mult: u64) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max_v {
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let mut seen = BTreeSet::new();
        for cells in (0..n * n).map(|_| 0..=max_mult).multi_cartesian_product() {
            let key = perms
                .iter()
                .map(|p| (0..n * n).map(|c| cells[p[c / n] * n + p[c % n]]).collect::<Vec<u64>>())
                .min()
                .unwrap();
            if seen.insert(key.clone()) {
                let m: Vec<Vec<Multiplicity>> =
                    key.chunks(n).map(|row| row.iter().map(|&k| Multiplicity::Finite(k)).collect()).collect();
                out.push(from_matrix(&m));
            }
        }
    }
    out
}

/// Points from bounded enumerations, widened until there are at least `want`.
pub fn sample_points(g: &Graph, want: usize) -> Vec<BoundaryPoint> {
    let mut pts = Vec::new();
    for step in 0..8 {
        let b = PointBounds::new(2 + step / 2, 2 + step / 3, 2 + 3 * step as u64);
        pts = enumerate_points(g, b);
        if pts.len() >= want {
            break;
        }
    }
    pts
}

/// A random path of length at most `max_len` ending at `v`, grown backwards.
pub fn path_into(r: &mut ChaCha8Rng, g: &Graph, v: VertexId, max_len: usize) -> Path {
    let mut rev: Vec<Edge> = Vec::new();
    let mut at = v;
    for _ in 0..r.gen_range(0..=max_len) {
        let into: Vec<Edge> = g
            .class_ids()
            .filter(|&c| g.class(c).target == at)
            .flat_map(|c| {
                let k = g.class(c).multiplicity.finite().unwrap_or(2).min(2);
                (0..k).map(move |i| Edge::new(c, i))
            })
            .collect();
        let Some(&e) = into.choose(r) else { break };
        rev.push(e);
        at = g.source(e);
    }
    rev.reverse();
    Path::new(g, at, rev).unwrap()
}

/// Random `(μt, |μ| − |ν|, νt)` for each consecutive pair of `count` points
/// sharing a common tail `t`.
pub fn chain(r: &mut ChaCha8Rng, g: &Graph, count: usize) -> Option<Vec<GroupoidElement>> {
    let tails = enumerate_points(g, PointBounds::new(1, 2, 2));
    let t = tails.choose(r)?.clone();
    let paths: Vec<Path> = (0..count).map(|_| path_into(r, g, t.source(), 3)).collect();
    let pts: Vec<BoundaryPoint> = paths.iter().map(|p| t.prepend(g, p).unwrap()).collect();
    Some(
        (0..count - 1)
            .map(|i| make_element(g, &pts[i], paths[i].len(), paths[i + 1].len(), &pts[i + 1]).unwrap())
            .collect(),
    )
}
