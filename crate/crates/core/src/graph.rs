//! Finite directed multigraphs whose parallel-edge classes may be infinite,
//! together with paths, loops, exits and condition (L).
//!
//! Edges are grouped into *classes*: a class is a bundle of parallel edges
//! from one vertex to another with a multiplicity in `{1, 2, ...} ∪ {∞}`.
//! An individual edge is a class plus an index below the multiplicity.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Add;

use crate::error::{input, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub const ZERO: Multiplicity = Multiplicity::Finite(0);
    pub const ONE: Multiplicity = Multiplicity::Finite(1);

    pub fn is_infinite(self) -> bool {
        matches!(self, Multiplicity::Infinite)
    }

    pub fn is_zero(self) -> bool {
        self == Multiplicity::ZERO
    }

    /// Whether `index` names an edge of a class with this multiplicity.
    pub fn admits(self, index: u64) -> bool {
        match self {
            Multiplicity::Finite(k) => index < k,
            Multiplicity::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(k) => Some(k),
            Multiplicity::Infinite => None,
        }
    }
}

impl Add for Multiplicity {
    type Output = Multiplicity;

    fn add(self, rhs: Multiplicity) -> Multiplicity {
        match (self, rhs) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => Multiplicity::Finite(a + b),
            _ => Multiplicity::Infinite,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(k) => write!(f, "{k}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub id: String,
    pub source: VertexId,
    pub target: VertexId,
    pub multiplicity: Multiplicity,
}

/// A single edge: the `index`-th member of an edge class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub class: ClassId,
    pub index: u64,
}

impl Edge {
    pub fn new(class: ClassId, index: u64) -> Edge {
        Edge { class, index }
    }

    /// The only edge of a multiplicity-one class.
    pub fn single(class: ClassId) -> Edge {
        Edge { class, index: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Regular,
    Sink,
    InfiniteEmitter,
}

impl VertexKind {
    pub fn is_singular(self) -> bool {
        !matches!(self, VertexKind::Regular)
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::Regular => "regular",
            VertexKind::Sink => "sink",
            VertexKind::InfiniteEmitter => "infinite-emitter",
        })
    }
}

/// A directed graph with a finite, ordered vertex set.
///
/// Values are immutable once built. Vertex order is declaration order and is
/// used wherever output must be deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    classes: Vec<EdgeClass>,
    vertex_index: HashMap<String, VertexId>,
    class_index: HashMap<String, ClassId>,
    out: Vec<Vec<ClassId>>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, classes: Vec<EdgeClass>) -> Result<Graph> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), VertexId(i)).is_some() {
                return input(format!("duplicate vertex `{v}`"));
            }
        }
        let mut class_index = HashMap::with_capacity(classes.len());
        let mut out = vec![Vec::new(); vertices.len()];
        for (i, c) in classes.iter().enumerate() {
            if class_index.insert(c.id.clone(), ClassId(i)).is_some() {
                return input(format!("duplicate edge class `{}`", c.id));
            }
            if c.source.0 >= vertices.len() || c.target.0 >= vertices.len() {
                return input(format!("edge class `{}` has an undeclared endpoint", c.id));
            }
            if c.multiplicity.is_zero() {
                return input(format!("edge class `{}` has multiplicity 0", c.id));
            }
            out[c.source.0].push(ClassId(i));
        }
        Ok(Graph { vertices, classes, vertex_index, class_index, out })
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn classes(&self) -> &[EdgeClass] {
        &self.classes
    }

    pub fn class_ids(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.classes.len()).map(ClassId)
    }

    pub fn class(&self, c: ClassId) -> &EdgeClass {
        &self.classes[c.0]
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.class_index.get(name).copied()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        v.0 < self.vertices.len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        e.class.0 < self.classes.len() && self.classes[e.class.0].multiplicity.admits(e.index)
    }

    pub fn source(&self, e: Edge) -> VertexId {
        self.classes[e.class.0].source
    }

    pub fn target(&self, e: Edge) -> VertexId {
        self.classes[e.class.0].target
    }

    /// Classes leaving `v`, in declaration order.
    pub fn out_classes(&self, v: VertexId) -> &[ClassId] {
        &self.out[v.0]
    }

    pub fn out_multiplicity(&self, v: VertexId) -> Multiplicity {
        self.out[v.0].iter().map(|c| self.classes[c.0].multiplicity).fold(Multiplicity::ZERO, Add::add)
    }

    /// Total multiplicity of all classes from `v` to `w`.
    pub fn multiplicity_between(&self, v: VertexId, w: VertexId) -> Multiplicity {
        self.out[v.0]
            .iter()
            .map(|c| &self.classes[c.0])
            .filter(|c| c.target == w)
            .map(|c| c.multiplicity)
            .fold(Multiplicity::ZERO, Add::add)
    }

    pub fn has_infinite_class(&self) -> bool {
        self.classes.iter().any(|c| c.multiplicity.is_infinite())
    }

    /// Edges leaving `v`. Infinite classes contribute indices `0..sample`.
    pub fn out_edges(&self, v: VertexId, sample: u64) -> Vec<Edge> {
        let mut edges = Vec::new();
        for &c in &self.out[v.0] {
            let count = self.classes[c.0].multiplicity.finite().unwrap_or(sample);
            edges.extend((0..count).map(|i| Edge::new(c, i)));
        }
        edges
    }

    /// Largest finite multiplicity of any class (0 for edgeless graphs).
    pub fn max_finite_multiplicity(&self) -> u64 {
        self.classes.iter().filter_map(|c| c.multiplicity.finite()).max().unwrap_or(0)
    }

    pub fn vertex_kind(&self, v: VertexId) -> Result<VertexKind> {
        if !self.has_vertex(v) {
            return input(format!("unknown vertex #{}", v.0));
        }
        Ok(match self.out_multiplicity(v) {
            Multiplicity::Infinite => VertexKind::InfiniteEmitter,
            Multiplicity::Finite(0) => VertexKind::Sink,
            Multiplicity::Finite(_) => VertexKind::Regular,
        })
    }

    pub fn is_singular(&self, v: VertexId) -> bool {
        self.vertex_kind(v).map(VertexKind::is_singular).unwrap_or(false)
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out[v.0].is_empty()
    }

    pub fn singular_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_singular(v)).collect()
    }

    /// Default length bound for exhaustive simple-loop search.
    pub fn default_loop_bound(&self) -> usize {
        self.vertex_count() * (1 + self.max_finite_multiplicity() as usize)
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Default, Debug, Clone)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    classes: Vec<(String, String, String, Multiplicity)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, name: &str) -> Self {
        self.vertices.push(name.to_string());
        self
    }

    pub fn vertices(mut self, names: &[&str]) -> Self {
        self.vertices.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn edge(self, id: &str, source: &str, target: &str) -> Self {
        self.edges(id, Multiplicity::ONE, source, target)
    }

    pub fn edges(mut self, id: &str, mult: Multiplicity, source: &str, target: &str) -> Self {
        self.classes.push((id.to_string(), source.to_string(), target.to_string(), mult));
        self
    }

    pub fn build(self) -> Result<Graph> {
        let index: HashMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .map(|&i| VertexId(i))
                .ok_or_else(|| Error::Input(format!("undeclared vertex `{name}`")))
        };
        let mut classes = Vec::with_capacity(self.classes.len());
        for (id, s, t, m) in &self.classes {
            classes.push(EdgeClass {
                id: id.clone(),
                source: lookup(s)?,
                target: lookup(t)?,
                multiplicity: *m,
            });
        }
        Graph::new(self.vertices.clone(), classes)
    }
}

/// A finite path: a source vertex and a (possibly empty) composable edge sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    source: VertexId,
    edges: Vec<Edge>,
}

impl Path {
    /// The empty path at `v`.
    pub fn vertex(v: VertexId) -> Path {
        Path { source: v, edges: Vec::new() }
    }

    pub fn new(g: &Graph, source: VertexId, edges: Vec<Edge>) -> Result<Path> {
        if !g.has_vertex(source) {
            return input(format!("unknown vertex #{}", source.0));
        }
        let mut at = source;
        for (i, &e) in edges.iter().enumerate() {
            if !g.has_edge(e) {
                return input(format!("edge {i} of path is not an edge of the graph"));
            }
            if g.source(e) != at {
                return input(format!(
                    "edges do not compose at position {i}: expected source `{}`, found `{}`",
                    g.vertex_name(at),
                    g.vertex_name(g.source(e))
                ));
            }
            at = g.target(e);
        }
        Ok(Path { source, edges })
    }

    /// A nonempty path given by its edges alone.
    pub fn from_edges(g: &Graph, edges: Vec<Edge>) -> Result<Path> {
        let Some(&first) = edges.first() else {
            return input("a path given only by edges must be nonempty");
        };
        if !g.has_edge(first) {
            return input("path edge is not an edge of the graph");
        }
        Path::new(g, g.source(first), edges)
    }

    /// Unchecked constructor for callers that already maintain composability.
    pub(crate) fn from_parts(source: VertexId, edges: Vec<Edge>) -> Path {
        Path { source, edges }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self, g: &Graph) -> VertexId {
        self.edges.last().map_or(self.source, |&e| g.target(e))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn concat(&self, g: &Graph, other: &Path) -> Result<Path> {
        let r = self.range(g);
        if r != other.source {
            return input(format!(
                "cannot concatenate: range `{}` differs from source `{}`",
                g.vertex_name(r),
                g.vertex_name(other.source)
            ));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path { source: self.source, edges })
    }

    /// Appends one edge whose source is the current range.
    pub fn push(&mut self, g: &Graph, e: Edge) -> Result<()> {
        if g.source(e) != self.range(g) {
            return input("appended edge does not start at the path's range");
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.source == other.source && other.edges.starts_with(&self.edges)
    }

    /// The first `n` edges (clamped to the length).
    pub fn truncate(&self, n: usize) -> Path {
        Path { source: self.source, edges: self.edges[..n.min(self.edges.len())].to_vec() }
    }

    /// All edges after the first `n`; the result starts at the vertex reached after `n` steps.
    pub fn suffix(&self, g: &Graph, n: usize) -> Path {
        let n = n.min(self.edges.len());
        let source = if n == 0 { self.source } else { g.target(self.edges[n - 1]) };
        Path { source, edges: self.edges[n..].to_vec() }
    }

    /// Vertices visited: `s(μ_1), s(μ_2), ..., r(μ)`.
    pub fn vertices(&self, g: &Graph) -> Vec<VertexId> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(self.source);
        vs.extend(self.edges.iter().map(|&e| g.target(e)));
        vs
    }
}

/// A path of length at least one with `s(μ) = r(μ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loop {
    edges: Vec<Edge>,
}

impl Loop {
    pub fn new(g: &Graph, path: &Path) -> Result<Loop> {
        if path.is_empty() {
            return input("a loop has length at least 1");
        }
        if path.range(g) != path.source() {
            return input("path does not return to its source");
        }
        Ok(Loop { edges: path.edges().to_vec() })
    }

    pub fn from_edges(g: &Graph, edges: Vec<Edge>) -> Result<Loop> {
        let path = Path::from_edges(g, edges)?;
        Loop::new(g, &path)
    }

    pub(crate) fn from_cycle(edges: Vec<Edge>) -> Loop {
        debug_assert!(!edges.is_empty());
        Loop { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self, g: &Graph) -> VertexId {
        g.source(self.edges[0])
    }

    pub fn to_path(&self, g: &Graph) -> Path {
        Path::from_parts(self.base(g), self.edges.clone())
    }

    pub fn power(&self, k: usize) -> Loop {
        assert!(k >= 1, "loop powers start at 1");
        Loop { edges: self.edges.repeat(k) }
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Loop {
        let n = self.edges.len();
        let k = k % n;
        let mut edges = self.edges[k..].to_vec();
        edges.extend_from_slice(&self.edges[..k]);
        Loop { edges }
    }

    /// The lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Loop {
        (0..self.edges.len()).map(|k| self.rotate(k)).min().expect("loops are nonempty")
    }

    /// `(ν, k)` with `ν` simple and `ν^k = self`, `k` maximal.
    pub fn primitive_root(&self) -> (Loop, usize) {
        let p = smallest_period(&self.edges);
        (Loop { edges: self.edges[..p].to_vec() }, self.edges.len() / p)
    }

    pub fn is_simple(&self) -> bool {
        smallest_period(&self.edges) == self.edges.len()
    }

    /// An exit is an edge leaving some vertex of the loop other than the loop edge there.
    pub fn has_exit(&self, g: &Graph) -> bool {
        self.edges.iter().any(|&e| g.out_multiplicity(g.source(e)) != Multiplicity::ONE)
    }

    /// The first exit in loop order, if any.
    pub fn exit(&self, g: &Graph) -> Option<Edge> {
        self.edges.iter().find_map(|&e| g.out_edges(g.source(e), 2).into_iter().find(|&other| other != e))
    }
}

/// Smallest `p` dividing `seq.len()` with `seq` invariant under rotation by `p`.
pub(crate) fn smallest_period<T: PartialEq>(seq: &[T]) -> usize {
    let n = seq.len();
    (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| seq[i] == seq[i - p])).unwrap_or(n)
}

pub fn path_concat(g: &Graph, p: &Path, q: &Path) -> Result<Path> {
    p.concat(g, q)
}

pub fn loop_has_exit(g: &Graph, l: &Loop) -> bool {
    l.has_exit(g)
}

pub fn primitive_root(l: &Loop) -> (Loop, usize) {
    l.primitive_root()
}

/// Simple loops of length at most `max_len`, one per rotation class, each given
/// by its least rotation and listed by (length, edges). Infinite classes
/// contribute only their index-0 edge.
pub fn enumerate_simple_loops(g: &Graph, max_len: usize) -> Vec<Loop> {
    let mut found = BTreeSet::new();
    let mut stack = Vec::new();
    for v in g.vertices() {
        closed_walks(g, v, v, max_len, &mut stack, &mut |edges| {
            let l = Loop::from_cycle(edges.to_vec());
            if l.is_simple() {
                found.insert(l.canonical_rotation());
            }
        });
    }
    let mut loops: Vec<Loop> = found.into_iter().collect();
    loops.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    loops
}

fn closed_walks(
    g: &Graph,
    base: VertexId,
    at: VertexId,
    budget: usize,
    stack: &mut Vec<Edge>,
    visit: &mut dyn FnMut(&[Edge]),
) {
    if budget == 0 {
        return;
    }
    for e in g.out_edges(at, 1) {
        stack.push(e);
        if g.target(e) == base {
            visit(stack);
        }
        closed_walks(g, base, g.target(e), budget - 1, stack, visit);
        stack.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionL {
    pub holds: bool,
    /// An exitless simple loop when the condition fails.
    pub witness: Option<Loop>,
}

/// Condition (L): every loop has an exit.
///
/// A loop without an exit runs through vertices emitting exactly one edge, so
/// it is a cycle of the partial function `v ↦ r(unique edge out of v)`
/// restricted to those vertices.
pub fn condition_l(g: &Graph) -> ConditionL {
    let next: Vec<Option<Edge>> = g
        .vertices()
        .map(|v| (g.out_multiplicity(v) == Multiplicity::ONE).then(|| Edge::single(g.out_classes(v)[0])))
        .collect();
    // 0 = unvisited, 1 = on current trail, 2 = finished
    let mut state = vec![0u8; g.vertex_count()];
    for start in g.vertices() {
        let mut trail = Vec::new();
        let mut at = start;
        while state[at.0] == 0 {
            let Some(e) = next[at.0] else { break };
            state[at.0] = 1;
            trail.push((at, e));
            at = g.target(e);
        }
        if state[at.0] == 1 {
            let pos = trail.iter().position(|&(v, _)| v == at).expect("on trail");
            let cycle = trail[pos..].iter().map(|&(_, e)| e).collect();
            let witness = Loop::from_cycle(cycle).canonical_rotation();
            return ConditionL { holds: false, witness: Some(witness) };
        }
        for (v, _) in trail {
            state[v.0] = 2;
        }
    }
    ConditionL { holds: true, witness: None }
}

/// Condition (L) by exhaustive search over simple loops of length at most
/// `|E^0|` (an exitless loop visits each vertex at most once).
pub fn condition_l_by_search(g: &Graph) -> ConditionL {
    let witness = enumerate_simple_loops(g, g.vertex_count()).into_iter().find(|l| !l.has_exit(g));
    ConditionL { holds: witness.is_none(), witness }
}
