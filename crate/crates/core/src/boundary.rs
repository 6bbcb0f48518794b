//! Representable points of the boundary path space, cylinder sets and their
//! set algebra.
//!
//! Pointwise we represent finite boundary paths and eventually periodic
//! infinite paths in a canonical form. General infinite paths exist only
//! through cylinder arithmetic.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, Loop, Multiplicity, Path, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryPoint {
    /// A finite path ending at a sink or an infinite emitter.
    Finite(Path),
    /// `prefix · period · period · ...` with a simple period and minimal prefix.
    EvPeriodic { prefix: Path, period: Loop },
}

impl BoundaryPoint {
    pub fn finite(g: &Graph, path: Path) -> Result<BoundaryPoint> {
        let r = path.range(g);
        if !g.is_singular(r) {
            return input(format!("not a boundary path: range `{}` is a regular vertex", g.vertex_name(r)));
        }
        Ok(BoundaryPoint::Finite(path))
    }

    /// Canonical form of `prefix · period^∞`.
    pub fn periodic(g: &Graph, prefix: Path, period: Loop) -> Result<BoundaryPoint> {
        if prefix.range(g) != period.base(g) {
            return input("period does not start at the range of the prefix");
        }
        let (root, _) = period.primitive_root();
        let mut edges = prefix.edges().to_vec();
        let mut cycle: VecDeque<Edge> = root.edges().iter().copied().collect();
        while let (Some(&last), Some(&back)) = (edges.last(), cycle.back()) {
            if last != back {
                break;
            }
            edges.pop();
            cycle.rotate_right(1);
        }
        Ok(BoundaryPoint::EvPeriodic {
            prefix: Path::from_parts(prefix.source(), edges),
            period: Loop::from_cycle(cycle.into_iter().collect()),
        })
    }

    /// The point `@v` when `v` is singular.
    pub fn vertex(g: &Graph, v: VertexId) -> Result<BoundaryPoint> {
        BoundaryPoint::finite(g, Path::vertex(v))
    }

    /// The point `(η)*` based at the source of `η`.
    pub fn cycle(g: &Graph, l: &Loop) -> BoundaryPoint {
        BoundaryPoint::periodic(g, Path::vertex(l.base(g)), l.clone()).expect("a loop starts at its own base")
    }

    /// Length, `None` for infinite points.
    pub fn len(&self) -> Option<usize> {
        match self {
            BoundaryPoint::Finite(p) => Some(p.len()),
            BoundaryPoint::EvPeriodic { .. } => None,
        }
    }

    /// Whether the point has at least `n` edges.
    pub fn has_len(&self, n: usize) -> bool {
        self.len().map_or(true, |l| l >= n)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BoundaryPoint::Finite(_))
    }

    pub fn source(&self) -> VertexId {
        match self {
            BoundaryPoint::Finite(p) => p.source(),
            BoundaryPoint::EvPeriodic { prefix, .. } => prefix.source(),
        }
    }

    /// The `i`-th edge (0-based), if the point is that long.
    pub fn edge_at(&self, i: usize) -> Option<Edge> {
        match self {
            BoundaryPoint::Finite(p) => p.edges().get(i).copied(),
            BoundaryPoint::EvPeriodic { prefix, period } => {
                let pre = prefix.edges();
                if i < pre.len() {
                    Some(pre[i])
                } else {
                    let q = period.edges();
                    Some(q[(i - pre.len()) % q.len()])
                }
            }
        }
    }

    /// The first `n` edges as a path. Fails when the point is shorter.
    pub fn prefix_path(&self, n: usize) -> Result<Path> {
        if !self.has_len(n) {
            return Err(Error::Domain(format!("point has fewer than {n} edges")));
        }
        let edges = (0..n).map(|i| self.edge_at(i).expect("long enough")).collect();
        Ok(Path::from_parts(self.source(), edges))
    }

    pub fn starts_with(&self, p: &Path) -> bool {
        self.source() == p.source()
            && self.has_len(p.len())
            && p.edges().iter().enumerate().all(|(i, &e)| self.edge_at(i) == Some(e))
    }

    /// `σ^n`.
    pub fn shift(&self, g: &Graph, n: usize) -> Result<BoundaryPoint> {
        if !self.has_len(n) {
            return Err(Error::Domain(format!(
                "cannot shift a point of length {} by {n}",
                self.len().unwrap_or(0)
            )));
        }
        Ok(match self {
            BoundaryPoint::Finite(p) => BoundaryPoint::Finite(p.suffix(g, n)),
            BoundaryPoint::EvPeriodic { prefix, period } => {
                if n <= prefix.len() {
                    BoundaryPoint::EvPeriodic { prefix: prefix.suffix(g, n), period: period.clone() }
                } else {
                    let rotated = period.rotate(n - prefix.len());
                    BoundaryPoint::EvPeriodic { prefix: Path::vertex(rotated.base(g)), period: rotated }
                }
            }
        })
    }

    /// `μ · x` for a path `μ` with `r(μ) = s(x)`.
    pub fn prepend(&self, g: &Graph, mu: &Path) -> Result<BoundaryPoint> {
        match self {
            BoundaryPoint::Finite(p) => Ok(BoundaryPoint::Finite(mu.concat(g, p)?)),
            BoundaryPoint::EvPeriodic { prefix, period } => {
                BoundaryPoint::periodic(g, mu.concat(g, prefix)?, period.clone())
            }
        }
    }

    /// Canonical re-encoding (idempotent).
    pub fn canonical(&self, g: &Graph) -> BoundaryPoint {
        match self {
            BoundaryPoint::Finite(_) => self.clone(),
            BoundaryPoint::EvPeriodic { prefix, period } => {
                BoundaryPoint::periodic(g, prefix.clone(), period.clone()).expect("already composable")
            }
        }
    }

    /// Sum of preperiod and period lengths (edge count for finite points).
    pub fn size(&self) -> usize {
        match self {
            BoundaryPoint::Finite(p) => p.len(),
            BoundaryPoint::EvPeriodic { prefix, period } => prefix.len() + period.len(),
        }
    }

    fn sort_key(&self) -> (u8, usize, usize, VertexId, Vec<Edge>) {
        match self {
            BoundaryPoint::Finite(p) => (0, p.len(), 0, p.source(), p.edges().to_vec()),
            BoundaryPoint::EvPeriodic { prefix, period } => {
                let mut edges = prefix.edges().to_vec();
                edges.extend_from_slice(period.edges());
                (1, prefix.len(), period.len(), prefix.source(), edges)
            }
        }
    }
}

impl PartialOrd for BoundaryPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite points first, then by preperiod length, period length, source and edges.
impl Ord for BoundaryPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Build a canonical point from raw data: a finite path, or a preperiod and a period.
pub fn canonicalize(g: &Graph, prefix: Path, period: Option<Vec<Edge>>) -> Result<BoundaryPoint> {
    match period {
        None => BoundaryPoint::finite(g, prefix),
        Some(edges) => {
            let l = Loop::from_edges(g, edges)?;
            BoundaryPoint::periodic(g, prefix, l)
        }
    }
}

/// `Z(μ∖F)`: boundary paths extending `μ` whose next edge avoids `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    base: Path,
    excluded: BTreeSet<Edge>,
}

impl Cylinder {
    pub fn new(g: &Graph, base: Path, excluded: impl IntoIterator<Item = Edge>) -> Result<Cylinder> {
        let r = base.range(g);
        let excluded: BTreeSet<Edge> = excluded.into_iter().collect();
        for &e in &excluded {
            if !g.has_edge(e) || g.source(e) != r {
                return input("excluded edges must leave the range of the base path");
            }
        }
        Ok(Cylinder { base, excluded })
    }

    pub fn of(base: Path) -> Cylinder {
        Cylinder { base, excluded: BTreeSet::new() }
    }

    pub fn base(&self) -> &Path {
        &self.base
    }

    pub fn excluded(&self) -> &BTreeSet<Edge> {
        &self.excluded
    }

    pub fn is_empty(&self, g: &Graph) -> bool {
        let r = self.base.range(g);
        match g.out_multiplicity(r) {
            Multiplicity::Finite(0) | Multiplicity::Infinite => false,
            Multiplicity::Finite(k) => self.excluded.len() as u64 >= k,
        }
    }

    pub fn contains(&self, x: &BoundaryPoint) -> bool {
        x.starts_with(&self.base) && x.edge_at(self.base.len()).map_or(true, |e| !self.excluded.contains(&e))
    }

    fn sort_key(&self) -> (usize, VertexId, &[Edge], &BTreeSet<Edge>) {
        (self.base.len(), self.base.source(), self.base.edges(), &self.excluded)
    }
}

impl PartialOrd for Cylinder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cylinder {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

pub fn cyl_membership(x: &BoundaryPoint, z: &Cylinder) -> bool {
    z.contains(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylRelation {
    Equal,
    Disjoint,
    Subset,
    Superset,
    Overlap,
}

impl std::fmt::Display for CylRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CylRelation::Equal => "equal",
            CylRelation::Disjoint => "disjoint",
            CylRelation::Subset => "subset",
            CylRelation::Superset => "superset",
            CylRelation::Overlap => "overlap",
        })
    }
}

enum Alignment {
    Incomparable,
    Same,
    /// The first base is a proper prefix of the second; carries the first
    /// extra edge and the rest.
    FirstShorter(Edge, Vec<Edge>),
    SecondShorter(Edge),
}

fn align(a: &Path, b: &Path) -> Alignment {
    if a.len() <= b.len() && a.is_prefix_of(b) {
        if a.len() == b.len() {
            Alignment::Same
        } else {
            let rest = &b.edges()[a.len()..];
            Alignment::FirstShorter(rest[0], rest[1..].to_vec())
        }
    } else if b.is_prefix_of(a) {
        Alignment::SecondShorter(a.edges()[b.len()])
    } else {
        Alignment::Incomparable
    }
}

/// `Z1 ∩ Z2` as a single cylinder, or `None` when empty.
pub fn cyl_intersection(g: &Graph, z1: &Cylinder, z2: &Cylinder) -> Option<Cylinder> {
    let out = match align(&z1.base, &z2.base) {
        Alignment::Incomparable => return None,
        Alignment::Same => {
            Cylinder { base: z1.base.clone(), excluded: z1.excluded.union(&z2.excluded).copied().collect() }
        }
        Alignment::FirstShorter(e, _) => {
            if z1.excluded.contains(&e) {
                return None;
            }
            z2.clone()
        }
        Alignment::SecondShorter(e) => {
            if z2.excluded.contains(&e) {
                return None;
            }
            z1.clone()
        }
    };
    (!out.is_empty(g)).then_some(out)
}

/// `Z1 ∖ Z2` as a list of pairwise disjoint nonempty cylinders.
pub fn cyl_difference(g: &Graph, z1: &Cylinder, z2: &Cylinder) -> Vec<Cylinder> {
    if z1.is_empty(g) {
        return Vec::new();
    }
    let mut pieces = match align(&z1.base, &z2.base) {
        Alignment::Incomparable => vec![z1.clone()],
        Alignment::Same => z2
            .excluded
            .difference(&z1.excluded)
            .map(|&e| {
                let mut base = z1.base.clone();
                base.push(g, e).expect("excluded edges leave the range");
                Cylinder::of(base)
            })
            .collect(),
        Alignment::SecondShorter(e) => {
            if z2.excluded.contains(&e) {
                vec![z1.clone()]
            } else {
                Vec::new()
            }
        }
        Alignment::FirstShorter(e, tau) => {
            if z1.excluded.contains(&e) {
                vec![z1.clone()]
            } else {
                let mut pieces = Vec::with_capacity(tau.len() + 2 + z2.excluded.len());
                let mut first = z1.clone();
                first.excluded.insert(e);
                pieces.push(first);
                let mut walk = z1.base.clone();
                walk.push(g, e).expect("prefix of a path");
                for &t in &tau {
                    pieces.push(Cylinder { base: walk.clone(), excluded: BTreeSet::from([t]) });
                    walk.push(g, t).expect("prefix of a path");
                }
                for &x in &z2.excluded {
                    let mut base = walk.clone();
                    base.push(g, x).expect("excluded edges leave the range");
                    pieces.push(Cylinder::of(base));
                }
                pieces
            }
        }
    };
    pieces.retain(|z| !z.is_empty(g));
    pieces
}

/// The exact relation between the denoted sets. For an empty set the order
/// of precedence is equal, disjoint, subset, superset.
pub fn cyl_relation(g: &Graph, z1: &Cylinder, z2: &Cylinder) -> CylRelation {
    let meet = cyl_intersection(g, z1, z2).is_some();
    let left = cyl_difference(g, z1, z2).is_empty();
    let right = cyl_difference(g, z2, z1).is_empty();
    match (left, right, meet) {
        (true, true, _) => CylRelation::Equal,
        (_, _, false) => CylRelation::Disjoint,
        (true, false, true) => CylRelation::Subset,
        (false, true, true) => CylRelation::Superset,
        (false, false, true) => CylRelation::Overlap,
    }
}

/// Rewrite a cover as a pairwise disjoint list of cylinders with the same union.
///
/// Inputs are taken by increasing base length; each new set is kept whole and
/// carved out of the pieces collected so far.
pub fn disjointify(g: &Graph, cover: &[Cylinder]) -> Vec<Cylinder> {
    let mut order: Vec<&Cylinder> = cover.iter().collect();
    order.sort_by_key(|z| z.base.len());
    let mut pieces: Vec<Cylinder> = Vec::new();
    for z in order {
        if z.is_empty(g) {
            continue;
        }
        pieces = pieces.iter().flat_map(|p| cyl_difference(g, p, z)).collect();
        pieces.push(z.clone());
    }
    pieces.sort();
    pieces
}

/// Subset test for a finite union of cylinders against another.
pub fn union_subset(g: &Graph, left: &[Cylinder], right: &[Cylinder]) -> bool {
    left.iter().filter(|z| !z.is_empty(g)).all(|z| {
        let mut rest = vec![z.clone()];
        for r in right {
            rest = rest.iter().flat_map(|p| cyl_difference(g, p, r)).collect();
            if rest.is_empty() {
                break;
            }
        }
        rest.is_empty()
    })
}

pub fn is_isolated(g: &Graph, x: &BoundaryPoint) -> bool {
    match x {
        BoundaryPoint::Finite(p) => g.is_sink(p.range(g)),
        BoundaryPoint::EvPeriodic { period, .. } => !period.has_exit(g),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteWitness {
    InfiniteClass(crate::graph::ClassId),
    InfiniteEmitter(VertexId),
    /// Pumping the loop before leaving through the exit gives infinitely many points.
    LoopWithExit {
        cycle: Loop,
        exit: Edge,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Census {
    Finite(Vec<BoundaryPoint>),
    Infinite(InfiniteWitness),
}

impl Census {
    pub fn points(&self) -> Option<&[BoundaryPoint]> {
        match self {
            Census::Finite(p) => Some(p),
            Census::Infinite(_) => None,
        }
    }
}

/// The whole boundary space when it is finite, otherwise a reason it is not.
///
/// The space is finite exactly when there is no infinite class and every
/// loop is exitless: then every vertex on a cycle emits one edge, so a path
/// either ends at a sink or gets caught in an exitless cycle after visiting
/// each vertex off the cycles at most once.
pub fn boundary_census(g: &Graph) -> Census {
    if let Some(c) = g.class_ids().find(|&c| g.class(c).multiplicity.is_infinite()) {
        return Census::Infinite(InfiniteWitness::InfiniteClass(c));
    }
    if let Some(v) = g.vertices().find(|&v| g.out_multiplicity(v).is_infinite()) {
        return Census::Infinite(InfiniteWitness::InfiniteEmitter(v));
    }
    if let Some((cycle, exit)) = loop_with_exit(g) {
        return Census::Infinite(InfiniteWitness::LoopWithExit { cycle, exit });
    }
    let cycles = exitless_cycle_at(g);
    let mut points = BTreeSet::new();
    for v in g.vertices() {
        census_walk(g, &cycles, Path::vertex(v), &mut points);
    }
    Census::Finite(points.into_iter().collect())
}

fn census_walk(g: &Graph, cycles: &[Option<Loop>], path: Path, out: &mut BTreeSet<BoundaryPoint>) {
    let r = path.range(g);
    if g.is_sink(r) {
        out.insert(BoundaryPoint::Finite(path));
        return;
    }
    if let Some(cycle) = &cycles[r.0] {
        out.insert(BoundaryPoint::periodic(g, path, cycle.clone()).expect("cycle based at range"));
        return;
    }
    for e in g.out_edges(r, 0) {
        let mut next = path.clone();
        next.push(g, e).expect("out edge");
        census_walk(g, cycles, next, out);
    }
}

/// For each vertex on a cycle of the out-degree-one subgraph, the cycle read from it.
pub(crate) fn exitless_cycle_at(g: &Graph) -> Vec<Option<Loop>> {
    let n = g.vertex_count();
    let next: Vec<Option<Edge>> = g
        .vertices()
        .map(|v| (g.out_multiplicity(v) == Multiplicity::ONE).then(|| Edge::single(g.out_classes(v)[0])))
        .collect();
    let mut result = vec![None; n];
    for v in g.vertices() {
        let mut edges = Vec::new();
        let mut at = v;
        for _ in 0..n {
            let Some(e) = next[at.0] else { break };
            edges.push(e);
            at = g.target(e);
            if at == v {
                result[v.0] = Some(Loop::from_cycle(edges));
                break;
            }
        }
    }
    result
}

/// A vertex-simple cycle through a vertex with at least two outgoing edges,
/// together with an exit at that vertex.
pub(crate) fn loop_with_exit(g: &Graph) -> Option<(Loop, Edge)> {
    for w in g.vertices() {
        if g.out_multiplicity(w) == Multiplicity::ONE || g.is_sink(w) {
            continue;
        }
        if let Some(cycle) = shortest_cycle_through(g, w) {
            let first = cycle.edges()[0];
            let exit =
                g.out_edges(w, 2).into_iter().find(|&e| e != first).expect("out-multiplicity at least two");
            return Some((cycle, exit));
        }
    }
    None
}

fn shortest_cycle_through(g: &Graph, w: VertexId) -> Option<Loop> {
    let n = g.vertex_count();
    let mut pred: Vec<Option<Edge>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for e in g.out_edges(w, 1) {
        let t = g.target(e);
        if t == w {
            return Some(Loop::from_cycle(vec![e]));
        }
        if !seen[t.0] {
            seen[t.0] = true;
            pred[t.0] = Some(e);
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        for e in g.out_edges(v, 1) {
            let t = g.target(e);
            if t == w {
                let mut edges = vec![e];
                let mut at = v;
                while at != w {
                    let p = pred[at.0].expect("visited");
                    edges.push(p);
                    at = g.source(p);
                }
                edges.reverse();
                return Some(Loop::from_cycle(edges));
            }
            if !seen[t.0] {
                seen[t.0] = true;
                pred[t.0] = Some(e);
                queue.push_back(t);
            }
        }
    }
    None
}

/// Bounds for enumerating representable points when the space is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointBounds {
    /// Longest finite path, and longest preperiod.
    pub max_prefix: usize,
    pub max_period: usize,
    /// Indices `0..inf_sample` stand in for each infinite class.
    pub inf_sample: u64,
}

impl PointBounds {
    pub fn new(max_prefix: usize, max_period: usize, inf_sample: u64) -> PointBounds {
        PointBounds { max_prefix, max_period, inf_sample }
    }
}

/// Finite boundary paths of length `<= max_prefix` and eventually periodic
/// points with canonical preperiod `<= max_prefix` and period `<= max_period`,
/// sorted.
pub fn enumerate_points(g: &Graph, b: PointBounds) -> Vec<BoundaryPoint> {
    let mut loops_at: Vec<Vec<Loop>> = vec![Vec::new(); g.vertex_count()];
    for l in simple_loops_sampled(g, b.max_period, b.inf_sample) {
        for k in 0..l.len() {
            let r = l.rotate(k);
            loops_at[r.base(g).0].push(r);
        }
    }
    let mut out = BTreeSet::new();
    let mut frontier: Vec<Path> = g.vertices().map(Path::vertex).collect();
    for depth in 0..=b.max_prefix {
        let mut next = Vec::new();
        for p in &frontier {
            let r = p.range(g);
            if g.is_singular(r) {
                out.insert(BoundaryPoint::Finite(p.clone()));
            }
            for l in &loops_at[r.0] {
                let x = BoundaryPoint::periodic(g, p.clone(), l.clone()).expect("based at range");
                if let BoundaryPoint::EvPeriodic { prefix, .. } = &x {
                    if prefix.len() == p.len() {
                        out.insert(x);
                    }
                }
            }
            if depth < b.max_prefix {
                for e in g.out_edges(r, b.inf_sample) {
                    let mut q = p.clone();
                    q.push(g, e).expect("out edge");
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    out.into_iter().collect()
}

/// Primitive loops of length `<= max_len`, one per rotation class, with
/// infinite classes sampled at indices `0..sample`.
pub fn simple_loops_sampled(g: &Graph, max_len: usize, sample: u64) -> Vec<Loop> {
    let mut found = BTreeSet::new();
    let mut stack = Vec::new();
    for v in g.vertices() {
        sampled_walks(g, v, v, max_len, sample, &mut stack, &mut found);
    }
    let mut loops: Vec<Loop> = found.into_iter().collect();
    loops.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    loops
}

fn sampled_walks(
    g: &Graph,
    base: VertexId,
    at: VertexId,
    budget: usize,
    sample: u64,
    stack: &mut Vec<Edge>,
    found: &mut BTreeSet<Loop>,
) {
    if budget == 0 {
        return;
    }
    for e in g.out_edges(at, sample) {
        stack.push(e);
        if g.target(e) == base {
            let l = Loop::from_cycle(stack.clone());
            if l.is_simple() {
                found.insert(l.canonical_rotation());
            }
        }
        sampled_walks(g, base, g.target(e), budget - 1, sample, stack, found);
        stack.pop();
    }
}
