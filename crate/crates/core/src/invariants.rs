//! Adjacency matrices, `det(I − A)`, reachability, digraph isomorphism and
//! a consolidated invariant report.

use std::fmt;

use serde_json::{json, Value};

use crate::boundary::{boundary_census, enumerate_points, is_isolated, Census, InfiniteWitness, PointBounds};
use crate::error::{Error, Result};
use crate::graph::{condition_l, Graph, Multiplicity, VertexId};
use crate::groupoid::isotropy;
use crate::text::{print_loop, print_point};

pub type Matrix = Vec<Vec<i128>>;

/// Entry `(v, w)` is the number of edges from `v` to `w`.
pub fn adjacency_matrix(g: &Graph) -> Result<Matrix> {
    if g.has_infinite_class() {
        return Err(Error::Unsupported("amplified graphs have no adjacency matrix here".into()));
    }
    let n = g.vertex_count();
    let mut a = vec![vec![0i128; n]; n];
    for c in g.classes() {
        a[c.source.0][c.target.0] += c.multiplicity.finite().expect("finite") as i128;
    }
    Ok(a)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &Matrix) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.clone();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn det_invariant(g: &Graph) -> Result<i128> {
    let a = adjacency_matrix(g)?;
    let n = a.len();
    let m: Matrix = (0..n).map(|i| (0..n).map(|j| i128::from(i == j) - a[i][j]).collect()).collect();
    Ok(determinant(&m))
}

/// `reach[v][w]` iff there is a path of positive length from `v` to `w`.
pub fn reachability(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut r = vec![vec![false; n]; n];
    for c in g.classes() {
        r[c.source.0][c.target.0] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn mult_key(m: Multiplicity) -> (u8, u64) {
    match m {
        Multiplicity::Finite(k) => (0, k),
        Multiplicity::Infinite => (1, 0),
    }
}

type Pattern = Vec<Vec<(u8, u64)>>;

fn pattern(g: &Graph) -> Pattern {
    g.vertices().map(|v| g.vertices().map(|w| mult_key(g.multiplicity_between(v, w))).collect()).collect()
}

fn profile(p: &Pattern, v: usize) -> (Vec<(u8, u64)>, Vec<(u8, u64)>, (u8, u64)) {
    let mut out = p[v].clone();
    let mut inn: Vec<_> = p.iter().map(|row| row[v]).collect();
    out.sort_unstable();
    inn.sort_unstable();
    (out, inn, p[v][v])
}

/// A vertex bijection `π` with `mult(v, w) = mult(π v, π w)` for all pairs,
/// by backtracking over candidates with matching degree profiles.
pub fn digraph_isomorphic(g1: &Graph, g2: &Graph) -> Option<Vec<VertexId>> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() {
        return None;
    }
    let (p1, p2) = (pattern(g1), pattern(g2));
    let prof1: Vec<_> = (0..n).map(|v| profile(&p1, v)).collect();
    let prof2: Vec<_> = (0..n).map(|v| profile(&p2, v)).collect();
    let mut a = prof1.clone();
    let mut b = prof2.clone();
    a.sort();
    b.sort();
    if a != b {
        return None;
    }
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|v| (0..n).filter(|&w| prof1[v] == prof2[w]).collect()).collect();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(0, &p1, &p2, &candidates, &mut assign, &mut used) {
        Some(assign.into_iter().map(VertexId).collect())
    } else {
        None
    }
}

fn extend(
    v: usize,
    p1: &Pattern,
    p2: &Pattern,
    candidates: &[Vec<usize>],
    assign: &mut [usize],
    used: &mut [bool],
) -> bool {
    if v == assign.len() {
        return true;
    }
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        let consistent = (0..v).all(|u| p1[u][v] == p2[assign[u]][w] && p1[v][u] == p2[w][assign[u]]);
        if !consistent || p1[v][v] != p2[w][w] {
            continue;
        }
        assign[v] = w;
        used[w] = true;
        if extend(v + 1, p1, p2, candidates, assign, used) {
            return true;
        }
        used[w] = false;
    }
    assign[v] = usize::MAX;
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointCount {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyEntry {
    pub point: String,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundarySummary {
    Finite(usize),
    Infinite(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub name: Option<String>,
    pub condition_l: bool,
    pub condition_l_witness: Option<String>,
    pub singular_vertices: Vec<(String, String)>,
    pub boundary: BoundarySummary,
    pub isotropy_census: Vec<IsotropyEntry>,
    /// `false` when the census of isolated points is a bounded sample.
    pub isotropy_complete: bool,
    pub det_i_minus_a: Option<i128>,
    pub fixed_points: FixedPointCount,
}

/// Isolated points with preperiod at most this long are listed when the
/// boundary is infinite.
const ISOLATED_SAMPLE_PREFIX: usize = 2;

pub fn invariant_report(g: &Graph) -> InvariantReport {
    let l = condition_l(g);
    let singular_vertices = g
        .singular_vertices()
        .into_iter()
        .map(|v| (g.vertex_name(v).to_string(), g.vertex_kind(v).expect("known vertex").to_string()))
        .collect();
    let census = boundary_census(g);
    let (boundary, isolated, complete) = match &census {
        Census::Finite(points) => (BoundarySummary::Finite(points.len()), points.clone(), true),
        Census::Infinite(w) => {
            let bounds = PointBounds::new(ISOLATED_SAMPLE_PREFIX, g.vertex_count().max(1), 1);
            let sample = enumerate_points(g, bounds).into_iter().filter(|x| is_isolated(g, x)).collect();
            (BoundarySummary::Infinite(describe_witness(g, w)), sample, false)
        }
    };
    let isotropy_census =
        isolated.iter().map(|x| IsotropyEntry { point: print_point(g, x), d: isotropy(x).d }).collect();
    let mut loops = Multiplicity::ZERO;
    for c in g.classes().iter().filter(|c| c.source == c.target) {
        loops = loops + c.multiplicity;
    }
    let fixed_points = match loops {
        Multiplicity::Finite(k) => FixedPointCount::Finite(k),
        Multiplicity::Infinite => FixedPointCount::Infinite,
    };
    InvariantReport {
        name: None,
        condition_l: l.holds,
        condition_l_witness: l.witness.as_ref().map(|w| print_loop(g, w)),
        singular_vertices,
        boundary,
        isotropy_census,
        isotropy_complete: complete,
        det_i_minus_a: det_invariant(g).ok(),
        fixed_points,
    }
}

pub fn describe_witness(g: &Graph, w: &InfiniteWitness) -> String {
    match w {
        InfiniteWitness::InfiniteClass(c) => format!("infinite edge class {}", g.class(*c).id),
        InfiniteWitness::InfiniteEmitter(v) => format!("infinite emitter {}", g.vertex_name(*v)),
        InfiniteWitness::LoopWithExit { cycle, exit } => {
            format!("loop {} with exit {}", print_loop(g, cycle), crate::text::print_edge(g, *exit))
        }
    }
}

impl InvariantReport {
    pub fn to_json(&self) -> Value {
        let boundary = match &self.boundary {
            BoundarySummary::Finite(n) => json!({"finite": true, "count": n}),
            BoundarySummary::Infinite(w) => json!({"finite": false, "witness": w}),
        };
        let fixed = match self.fixed_points {
            FixedPointCount::Finite(k) => json!(k),
            FixedPointCount::Infinite => json!("inf"),
        };
        let det = match self.det_i_minus_a {
            // Small enough for every graph this tool is meant for.
            Some(d) => json!(d as i64),
            None => Value::Null,
        };
        let mut v = json!({
            "conditionL": self.condition_l,
            "conditionLWitness": self.condition_l_witness,
            "singularVertices": self.singular_vertices.iter().map(|(v, k)| json!({"vertex": v, "kind": k})).collect::<Vec<_>>(),
            "boundary": boundary,
            "isotropyCensus": {
                "complete": self.isotropy_complete,
                "points": self.isotropy_census.iter().map(|e| json!({"point": e.point, "isotropy": e.d})).collect::<Vec<_>>(),
            },
            "detIMinusA": det,
            "fixedPoints": fixed,
        });
        if let Some(name) = &self.name {
            v["graph"] = json!(name);
        }
        v
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "graph: {name}")?;
        }
        match &self.condition_l_witness {
            Some(w) => writeln!(f, "condition (L): no (loop {w} has no exit)")?,
            None => writeln!(f, "condition (L): yes")?,
        }
        let singular: Vec<String> =
            self.singular_vertices.iter().map(|(v, k)| format!("{v} ({k})")).collect();
        writeln!(
            f,
            "singular vertices: {}",
            if singular.is_empty() { "none".into() } else { singular.join(", ") }
        )?;
        match &self.boundary {
            BoundarySummary::Finite(n) => writeln!(f, "boundary: finite, {n} points")?,
            BoundarySummary::Infinite(w) => writeln!(f, "boundary: infinite ({w})")?,
        }
        let iso: Vec<String> = self
            .isotropy_census
            .iter()
            .map(|e| if e.d == 0 { format!("{} trivial", e.point) } else { format!("{} {}Z", e.point, e.d) })
            .collect();
        writeln!(
            f,
            "isolated points{}: {}",
            if self.isotropy_complete { "" } else { " (sample)" },
            if iso.is_empty() { "none".into() } else { iso.join(", ") }
        )?;
        match self.det_i_minus_a {
            Some(d) => writeln!(f, "det(I - A): {d}")?,
            None => writeln!(f, "det(I - A): undefined (infinite edge class)")?,
        }
        match self.fixed_points {
            FixedPointCount::Finite(k) => write!(f, "fixed points: {k}"),
            FixedPointCount::Infinite => write!(f, "fixed points: inf"),
        }
    }
}
