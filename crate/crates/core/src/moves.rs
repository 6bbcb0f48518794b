//! Graph moves: out-splitting, amplification, amplified transitive closure and
//! saturation, plus the decision procedure for orbit equivalence of amplified graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use crate::boundary::BoundaryPoint;
use crate::error::{input, Error, Result};
use crate::graph::{ClassId, Edge, EdgeClass, Graph, Loop, Multiplicity, Path, VertexId};
use crate::invariants::{digraph_isomorphic, reachability};

/// One member of a partition block: a whole edge class, or a single edge of a finite one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockItem {
    Class(ClassId),
    Edge(Edge),
}

/// Ordered blocks of outgoing edges per vertex. Vertices left out get one block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutSplitPartition {
    pub blocks: BTreeMap<VertexId, Vec<Vec<BlockItem>>>,
}

impl OutSplitPartition {
    pub fn trivial() -> OutSplitPartition {
        OutSplitPartition::default()
    }

    pub fn split(mut self, v: VertexId, blocks: Vec<Vec<BlockItem>>) -> OutSplitPartition {
        self.blocks.insert(v, blocks);
        self
    }
}

#[derive(Clone, Debug)]
enum Assignment {
    Whole(usize),
    PerEdge(Vec<usize>),
}

/// The split graph together with the data needed to map boundary points.
#[derive(Clone, Debug)]
pub struct OutSplit {
    graph: Graph,
    copies: Vec<usize>,
    infinite_block: Vec<Option<usize>>,
    assignment: Vec<Assignment>,
    /// `(old class, block, target copy)` to the new class.
    classes: HashMap<(ClassId, usize, usize), ClassId>,
    /// Vertex copies in the new graph; sinks have a single entry.
    vertex_copies: Vec<Vec<VertexId>>,
}

fn normalize_partition(
    g: &Graph,
    p: &OutSplitPartition,
) -> Result<(Vec<usize>, Vec<Option<usize>>, Vec<Assignment>)> {
    let mut copies = vec![0; g.vertex_count()];
    let mut infinite_block = vec![None; g.vertex_count()];
    let mut slots: Vec<Option<Vec<Option<usize>>>> =
        g.classes().iter().map(|c| c.multiplicity.finite().map(|k| vec![None; k as usize])).collect();
    let mut whole: Vec<Option<usize>> = vec![None; g.classes().len()];
    for (&v, blocks) in &p.blocks {
        if !g.has_vertex(v) {
            return input("partition names an unknown vertex");
        }
        if g.is_sink(v) {
            if blocks.iter().any(|b| !b.is_empty()) {
                return input(format!("sink `{}` has no edges to partition", g.vertex_name(v)));
            }
            continue;
        }
    }
    for v in g.vertices() {
        if g.is_sink(v) {
            continue;
        }
        let trivial;
        let blocks = match p.blocks.get(&v) {
            Some(b) => b,
            None => {
                trivial = vec![g.out_classes(v).iter().map(|&c| BlockItem::Class(c)).collect()];
                &trivial
            }
        };
        let name = g.vertex_name(v);
        copies[v.0] = blocks.len();
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return input(format!("block {} at `{name}` is empty", i + 1));
            }
            for item in block {
                let (c, idx) = match *item {
                    BlockItem::Class(c) => (c, None),
                    BlockItem::Edge(e) => (e.class, Some(e.index)),
                };
                if c.0 >= g.classes().len() || g.class(c).source != v {
                    return input(format!("block {} at `{name}` names an edge not leaving `{name}`", i + 1));
                }
                let cls = g.class(c);
                match (idx, &mut slots[c.0]) {
                    (None, None) => {
                        if whole[c.0].replace(i).is_some() {
                            return input(format!("class `{}` appears in two blocks", cls.id));
                        }
                        if infinite_block[v.0].replace(i).is_some_and(|j| j != i) {
                            return input(format!(
                                "more than one infinite block at `{name}`: the partition is not proper"
                            ));
                        }
                    }
                    (Some(_), None) => {
                        return input(format!(
                            "infinite class `{}` must be placed in a block as a whole",
                            cls.id
                        ))
                    }
                    (None, Some(s)) => {
                        for slot in s.iter_mut() {
                            if slot.replace(i).is_some() {
                                return input(format!("an edge of `{}` appears twice", cls.id));
                            }
                        }
                    }
                    (Some(k), Some(s)) => {
                        let Some(slot) = s.get_mut(k as usize) else {
                            return input(format!("edge index {k} is out of range for `{}`", cls.id));
                        };
                        if slot.replace(i).is_some() {
                            return input(format!("an edge of `{}` appears twice", cls.id));
                        }
                    }
                }
            }
        }
    }
    let mut assignment = Vec::with_capacity(g.classes().len());
    for (ci, c) in g.classes().iter().enumerate() {
        let a =
            match &slots[ci] {
                None => Assignment::Whole(whole[ci].ok_or_else(|| {
                    Error::Input(format!("class `{}` is not covered by the partition", c.id))
                })?),
                Some(s) => {
                    let blocks: Option<Vec<usize>> = s.iter().copied().collect();
                    let blocks = blocks.ok_or_else(|| {
                        Error::Input(format!("some edge of `{}` is not covered by the partition", c.id))
                    })?;
                    if blocks.windows(2).all(|w| w[0] == w[1]) {
                        Assignment::Whole(blocks[0])
                    } else {
                        Assignment::PerEdge(blocks)
                    }
                }
            };
        assignment.push(a);
    }
    Ok((copies, infinite_block, assignment))
}

/// Split each vertex along its blocks: `v^1, …, v^{m(v)}`, with sinks kept.
pub fn out_split(g: &Graph, p: &OutSplitPartition) -> Result<Graph> {
    Ok(out_split_full(g, p)?.graph)
}

pub fn out_split_full(g: &Graph, p: &OutSplitPartition) -> Result<OutSplit> {
    let (copies, infinite_block, assignment) = normalize_partition(g, p)?;
    let mut names = Vec::new();
    let mut vertex_copies = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let name = g.vertex_name(v);
        if copies[v.0] == 0 {
            vertex_copies.push(vec![VertexId(names.len())]);
            names.push(name.to_string());
        } else {
            let ids = (0..copies[v.0])
                .map(|i| {
                    names.push(format!("{name}^{}", i + 1));
                    VertexId(names.len() - 1)
                })
                .collect();
            vertex_copies.push(ids);
        }
    }
    let mut new_classes = Vec::new();
    let mut classes = HashMap::new();
    for (ci, c) in g.classes().iter().enumerate() {
        let blocks: Vec<(usize, Multiplicity)> = match &assignment[ci] {
            Assignment::Whole(b) => vec![(*b, c.multiplicity)],
            Assignment::PerEdge(per) => {
                let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
                for &b in per {
                    *counts.entry(b).or_default() += 1;
                }
                counts.into_iter().map(|(b, k)| (b, Multiplicity::Finite(k))).collect()
            }
        };
        let split = matches!(assignment[ci], Assignment::PerEdge(_));
        let targets = &vertex_copies[c.target.0];
        for &(b, mult) in &blocks {
            for (j, &t) in targets.iter().enumerate() {
                let mut id = c.id.clone();
                if split {
                    id.push_str(&format!("~{}", b + 1));
                }
                if copies[c.target.0] > 0 {
                    id.push_str(&format!("^{}", j + 1));
                }
                classes.insert((ClassId(ci), b, j), ClassId(new_classes.len()));
                new_classes.push(EdgeClass {
                    id,
                    source: vertex_copies[c.source.0][b],
                    target: t,
                    multiplicity: mult,
                });
            }
        }
    }
    let graph = Graph::new(names, new_classes)?;
    Ok(OutSplit { graph, copies, infinite_block, assignment, classes, vertex_copies })
}

impl OutSplit {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    fn block_of(&self, e: Edge) -> usize {
        match &self.assignment[e.class.0] {
            Assignment::Whole(b) => *b,
            Assignment::PerEdge(per) => per[e.index as usize],
        }
    }

    fn new_index(&self, e: Edge) -> u64 {
        match &self.assignment[e.class.0] {
            Assignment::Whole(_) => e.index,
            Assignment::PerEdge(per) => {
                let b = per[e.index as usize];
                per[..e.index as usize].iter().filter(|&&x| x == b).count() as u64
            }
        }
    }

    fn new_edge(&self, g: &Graph, e: Edge, next: Option<Edge>) -> Result<Edge> {
        let r = g.target(e);
        let j = if self.copies[r.0] == 0 {
            0
        } else if let Some(n) = next {
            self.block_of(n)
        } else {
            self.infinite_block[r.0]
                .ok_or_else(|| Error::Input("a finite point must end at a singular vertex".into()))?
        };
        let class = self.classes[&(e.class, self.block_of(e), j)];
        Ok(Edge::new(class, self.new_index(e)))
    }

    /// The conjugacy image of a boundary point.
    pub fn map_point(&self, g: &Graph, x: &BoundaryPoint) -> Result<BoundaryPoint> {
        if x.len() == Some(0) {
            let v = x.source();
            let w = if self.copies[v.0] == 0 {
                self.vertex_copies[v.0][0]
            } else {
                let b =
                    self.infinite_block[v.0].ok_or_else(|| Error::Input("not a boundary point".into()))?;
                self.vertex_copies[v.0][b]
            };
            return BoundaryPoint::vertex(&self.graph, w);
        }
        let (prefix, period) = transduce(x, (), |i, _| {
            let e = x.edge_at(i).expect("position within length");
            Ok((vec![self.new_edge(g, e, x.edge_at(i + 1))?], ()))
        })?;
        build_point(&self.graph, None, prefix, period)
    }
}

pub fn out_split_map(g: &Graph, p: &OutSplitPartition, x: &BoundaryPoint) -> Result<BoundaryPoint> {
    out_split_full(g, p)?.map_point(g, x)
}

/// Run a position-by-position rewriting over a point. For periodic inputs the
/// output becomes periodic once a (phase, state) pair repeats.
fn transduce<S: Clone + Eq + Hash>(
    x: &BoundaryPoint,
    init: S,
    mut step: impl FnMut(usize, &S) -> Result<(Vec<Edge>, S)>,
) -> Result<(Vec<Edge>, Option<Vec<Edge>>)> {
    let mut out = Vec::new();
    let mut state = init;
    match x {
        BoundaryPoint::Finite(p) => {
            for i in 0..p.len() {
                let (o, s) = step(i, &state)?;
                out.extend(o);
                state = s;
            }
            Ok((out, None))
        }
        BoundaryPoint::EvPeriodic { prefix, period } => {
            let (p, q) = (prefix.len(), period.len());
            let mut seen: HashMap<(usize, S), usize> = HashMap::new();
            for i in 0.. {
                if i >= p {
                    let key = ((i - p) % q, state.clone());
                    if let Some(&start) = seen.get(&key) {
                        let tail = out.split_off(start);
                        if tail.is_empty() {
                            return Err(Error::Domain("the rewritten period is empty".into()));
                        }
                        return Ok((out, Some(tail)));
                    }
                    seen.insert(key, out.len());
                }
                let (o, s) = step(i, &state)?;
                out.extend(o);
                state = s;
            }
            unreachable!()
        }
    }
}

fn build_point(
    g: &Graph,
    empty_at: Option<VertexId>,
    prefix: Vec<Edge>,
    period: Option<Vec<Edge>>,
) -> Result<BoundaryPoint> {
    let source = prefix
        .first()
        .or_else(|| period.as_ref().and_then(|p| p.first()))
        .map(|&e| g.source(e))
        .or(empty_at)
        .ok_or_else(|| Error::Input("empty rewrite".into()))?;
    let path = Path::new(g, source, prefix)?;
    match period {
        None => BoundaryPoint::finite(g, path),
        Some(edges) => BoundaryPoint::periodic(g, path, Loop::from_edges(g, edges)?),
    }
}

fn pair_classes(g: &Graph) -> BTreeMap<(VertexId, VertexId), ClassId> {
    let mut first = BTreeMap::new();
    for c in g.class_ids() {
        let cls = g.class(c);
        first.entry((cls.source, cls.target)).or_insert(c);
    }
    first
}

/// One infinite class per vertex pair joined by at least one edge, named
/// after the first class declared on that pair.
pub fn amplify(g: &Graph) -> Graph {
    let classes = pair_classes(g)
        .into_iter()
        .map(|((s, t), c)| EdgeClass {
            id: g.class(c).id.clone(),
            source: s,
            target: t,
            multiplicity: Multiplicity::Infinite,
        })
        .collect();
    Graph::new(g.vertex_names().to_vec(), classes).expect("names are inherited")
}

/// An infinite class `v → w` exactly when `w` is reachable from `v` by a
/// nonempty path. Existing pairs keep the amplified names; new pairs get `v~w`.
pub fn amplified_transitive_closure(g: &Graph) -> Graph {
    let reach = reachability(g);
    let existing = pair_classes(g);
    let mut taken: HashSet<String> = g.classes().iter().map(|c| c.id.clone()).collect();
    let mut classes = Vec::new();
    for v in g.vertices() {
        for w in g.vertices() {
            if !reach[v.0][w.0] {
                continue;
            }
            let id = match existing.get(&(v, w)) {
                Some(&c) => g.class(c).id.clone(),
                None => {
                    let mut id = format!("{}~{}", g.vertex_name(v), g.vertex_name(w));
                    while taken.contains(&id) {
                        id.push('\'');
                    }
                    taken.insert(id.clone());
                    id
                }
            };
            classes.push(EdgeClass { id, source: v, target: w, multiplicity: Multiplicity::Infinite });
        }
    }
    Graph::new(g.vertex_names().to_vec(), classes).expect("fresh names are unique")
}

/// The data of a saturation along a path `μ = μ₁⋯μ_m`.
///
/// `A` is the set of edges parallel to `μ₁`, listed as one sequence: finite
/// classes first, then the infinite classes interleaved. `η₁(n) = A[2n]` and
/// `η₂(A[j]) = A[2j+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewritingWitness {
    pub e: Graph,
    pub f: Graph,
    pub mu: Path,
    pub new_class: ClassId,
    a_finite: Vec<Edge>,
    a_infinite: Vec<ClassId>,
}

impl RewritingWitness {
    pub fn pattern_len(&self) -> usize {
        self.mu.len()
    }

    pub fn a_edge(&self, j: u64) -> Edge {
        let f = self.a_finite.len() as u64;
        if j < f {
            self.a_finite[j as usize]
        } else {
            let c = self.a_infinite.len() as u64;
            let r = j - f;
            Edge::new(self.a_infinite[(r % c) as usize], r / c)
        }
    }

    pub fn a_index(&self, e: Edge) -> Option<u64> {
        if let Some(i) = self.a_finite.iter().position(|&x| x == e) {
            return Some(i as u64);
        }
        let t = self.a_infinite.iter().position(|&c| c == e.class)?;
        Some(self.a_finite.len() as u64 + e.index * self.a_infinite.len() as u64 + t as u64)
    }

    pub fn eta1(&self, n: u64) -> Edge {
        self.a_edge(2 * n)
    }

    pub fn eta2(&self, a: Edge) -> Option<Edge> {
        self.a_index(a).map(|j| self.a_edge(2 * j + 1))
    }

    /// Whether no edge after the first of `μ` is parallel to `μ₁`, so that
    /// pattern occurrences can never overlap.
    pub fn overlap_free(&self) -> bool {
        self.mu.edges()[1..].iter().all(|&e| self.a_index(e).is_none())
    }

    fn tail_follows(&self, x: &BoundaryPoint, i: usize) -> bool {
        self.mu.edges()[1..].iter().enumerate().all(|(t, &e)| x.edge_at(i + 1 + t) == Some(e))
    }

    /// Whether `y` starts with `e μ₂ ⋯ μ_m` for some `e ∈ η₁(ℕ)`.
    pub fn starts_with_eta1_pattern(&self, y: &BoundaryPoint) -> bool {
        match y.edge_at(0).and_then(|e| self.a_index(e)) {
            Some(j) => j % 2 == 0 && self.tail_follows(y, 0),
            None => false,
        }
    }
}

/// Add an infinite class `M: s(μ) → r(μ)`. Requires infinitely many edges parallel to `μ₁`.
pub fn saturate(g: &Graph, mu: &Path) -> Result<(Graph, RewritingWitness)> {
    if mu.is_empty() {
        return input("saturation needs a path of length at least one");
    }
    let first = mu.edges()[0];
    let (s, t) = (g.source(first), g.target(first));
    let parallel: Vec<ClassId> =
        g.class_ids().filter(|&c| g.class(c).source == s && g.class(c).target == t).collect();
    let a_infinite: Vec<ClassId> =
        parallel.iter().copied().filter(|&c| g.class(c).multiplicity.is_infinite()).collect();
    if a_infinite.is_empty() {
        return Err(Error::Precondition(format!(
            "the edges from `{}` to `{}` form a finite set",
            g.vertex_name(s),
            g.vertex_name(t)
        )));
    }
    let a_finite: Vec<Edge> = parallel
        .iter()
        .filter_map(|&c| g.class(c).multiplicity.finite().map(|k| (c, k)))
        .flat_map(|(c, k)| (0..k).map(move |i| Edge::new(c, i)))
        .collect();
    let taken: HashSet<&str> = g.classes().iter().map(|c| c.id.as_str()).collect();
    let mut id = String::from("M");
    while taken.contains(id.as_str()) {
        id.push('\'');
    }
    let mut classes = g.classes().to_vec();
    let new_class = ClassId(classes.len());
    classes.push(EdgeClass {
        id,
        source: mu.source(),
        target: mu.range(g),
        multiplicity: Multiplicity::Infinite,
    });
    let f = Graph::new(g.vertex_names().to_vec(), classes)?;
    let w = RewritingWitness { e: g.clone(), f: f.clone(), mu: mu.clone(), new_class, a_finite, a_infinite };
    Ok((f, w))
}

/// The rewriting `∂F → ∂E`: `M[n] ↦ η₁(n)μ₂⋯μ_m` and `aμ₂⋯μ_m ↦ η₂(a)μ₂⋯μ_m`,
/// scanning left to right.
pub fn saturate_map(w: &RewritingWitness, x: &BoundaryPoint) -> Result<BoundaryPoint> {
    if x.len() == Some(0) {
        return BoundaryPoint::vertex(&w.e, x.source());
    }
    let (prefix, period) = transduce(x, (), |i, _| {
        let e = x.edge_at(i).expect("position within length");
        let out = if e.class == w.new_class {
            let mut v = vec![w.eta1(e.index)];
            v.extend_from_slice(&w.mu.edges()[1..]);
            v
        } else if w.a_index(e).is_some() && w.tail_follows(x, i) {
            vec![w.eta2(e).expect("in A")]
        } else {
            vec![e]
        };
        Ok((out, ()))
    })?;
    build_point(&w.e, None, prefix, period)
}

/// The inverse rewriting `∂E → ∂F`, decoding greedily from the left.
pub fn saturate_unmap(w: &RewritingWitness, y: &BoundaryPoint) -> Result<BoundaryPoint> {
    if y.len() == Some(0) {
        return BoundaryPoint::vertex(&w.f, y.source());
    }
    let m = w.pattern_len();
    let (prefix, period) = transduce(y, 0usize, |i, &skip| {
        if skip > 0 {
            return Ok((Vec::new(), skip - 1));
        }
        let e = y.edge_at(i).expect("position within length");
        match w.a_index(e) {
            Some(j) if w.tail_follows(y, i) => {
                if j % 2 == 0 {
                    Ok((vec![Edge::new(w.new_class, j / 2)], m - 1))
                } else {
                    Ok((vec![w.a_edge((j - 1) / 2)], 0))
                }
            }
            _ => Ok((vec![e], 0)),
        }
    })?;
    build_point(&w.f, None, prefix, period)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SaturationReport {
    pub forward_checked: usize,
    pub backward_checked: usize,
    pub failures: Vec<String>,
}

impl SaturationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the one-step orbit equivalence equations for a saturation with
/// `k₁ ≡ 0`, `l₁ = m` on `⋃ Z(M[n])` and `1` elsewhere, `k′₁ = m − 1` on
/// `⋃_{e ∈ η₁(ℕ)} Z(eμ₂⋯μ_m)` and `0` elsewhere, `l′₁ ≡ 1`, together with
/// bijectivity of the rewriting on the samples.
pub fn saturation_check(
    w: &RewritingWitness,
    on_f: &[BoundaryPoint],
    on_e: &[BoundaryPoint],
) -> SaturationReport {
    let m = w.pattern_len();
    let mut r = SaturationReport::default();
    let show = |x: &BoundaryPoint, g: &Graph| crate::text::print_point(g, x);
    for x in on_f {
        let Ok(hx) = saturate_map(w, x) else {
            r.failures.push(format!("rewriting failed at {}", show(x, &w.f)));
            continue;
        };
        match saturate_unmap(w, &hx) {
            Ok(back) if &back == x => {}
            _ => r.failures.push(format!("h is not invertible at {}", show(x, &w.f))),
        }
        if !x.has_len(1) {
            continue;
        }
        r.forward_checked += 1;
        let l1 = if x.edge_at(0).map(|e| e.class) == Some(w.new_class) { m } else { 1 };
        let lhs = x.shift(&w.f, 1).ok().and_then(|sx| saturate_map(w, &sx).ok());
        let rhs = hx.shift(&w.e, l1).ok();
        if lhs.is_none() || lhs != rhs {
            r.failures.push(format!("forward equation fails at {}", show(x, &w.f)));
        }
    }
    for y in on_e {
        let Ok(hy) = saturate_unmap(w, y) else {
            r.failures.push(format!("inverse rewriting failed at {}", show(y, &w.e)));
            continue;
        };
        match saturate_map(w, &hy) {
            Ok(back) if &back == y => {}
            _ => r.failures.push(format!("h⁻¹ is not invertible at {}", show(y, &w.e))),
        }
        if !y.has_len(1) {
            continue;
        }
        r.backward_checked += 1;
        let k1 = if w.starts_with_eta1_pattern(y) { m - 1 } else { 0 };
        let lhs = y
            .shift(&w.e, 1)
            .ok()
            .and_then(|sy| saturate_unmap(w, &sy).ok())
            .and_then(|p| p.shift(&w.f, k1).ok());
        let rhs = hy.shift(&w.f, 1).ok();
        if lhs.is_none() || lhs != rhs {
            r.failures.push(format!("backward equation fails at {}", show(y, &w.e)));
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplifiedDecision {
    pub equivalent: bool,
    /// `bijection[v]` is the vertex of `F` matched with `v`.
    pub bijection: Option<Vec<VertexId>>,
}

/// Decide orbit equivalence of the amplified graphs by comparing the
/// amplified transitive closures up to isomorphism.
pub fn decide_amplified_oe(e: &Graph, f: &Graph) -> AmplifiedDecision {
    let te = amplified_transitive_closure(e);
    let tf = amplified_transitive_closure(f);
    let bijection = digraph_isomorphic(&te, &tf);
    AmplifiedDecision { equivalent: bijection.is_some(), bijection }
}

/// Partition blocks as sets of edges, for tests and diagnostics.
pub fn block_edges(g: &Graph, block: &[BlockItem], sample: u64) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for item in block {
        match *item {
            BlockItem::Edge(e) => {
                out.insert(e);
            }
            BlockItem::Class(c) => {
                let k = g.class(c).multiplicity.finite().unwrap_or(sample);
                out.extend((0..k).map(|i| Edge::new(c, i)));
            }
        }
    }
    out
}
