//! The graph groupoid on representable points.

use crate::boundary::{is_isolated, BoundaryPoint, Cylinder};
use crate::error::{Error, Result};
use crate::graph::{condition_l, Graph, Path};

/// `(x, k, y)` with the least `(m, n)` such that `m − n = k` and `σ^m x = σ^n y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupoidElement {
    x: BoundaryPoint,
    y: BoundaryPoint,
    m: usize,
    n: usize,
}

impl GroupoidElement {
    pub fn range(&self) -> &BoundaryPoint {
        &self.x
    }

    pub fn source(&self) -> &BoundaryPoint {
        &self.y
    }

    pub fn k(&self) -> i64 {
        self.m as i64 - self.n as i64
    }

    pub fn witness(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn is_unit(&self) -> bool {
        self.x == self.y && self.m == 0 && self.n == 0
    }

    pub fn unit(x: BoundaryPoint) -> GroupoidElement {
        GroupoidElement { y: x.clone(), x, m: 0, n: 0 }
    }
}

pub fn make_element(
    g: &Graph,
    x: &BoundaryPoint,
    m: usize,
    n: usize,
    y: &BoundaryPoint,
) -> Result<GroupoidElement> {
    let sx = x.shift(g, m)?;
    let sy = y.shift(g, n)?;
    if sx != sy {
        return Err(Error::Input(format!(
            "σ^{m}(x) and σ^{n}(y) differ, so (x, {}, y) is not in the groupoid",
            m as i64 - n as i64
        )));
    }
    let (mut m, mut n) = (m, n);
    while m > 0 && n > 0 && x.shift(g, m - 1)? == y.shift(g, n - 1)? {
        m -= 1;
        n -= 1;
    }
    Ok(GroupoidElement { x: x.clone(), y: y.clone(), m, n })
}

/// Search bound for the least equalizing `m` at a given `k`: beyond the two
/// preperiods plus one period, nothing new happens.
fn equalizer_search_limit(x: &BoundaryPoint, y: &BoundaryPoint, k: i64) -> usize {
    x.size() + y.size() + k.unsigned_abs() as usize + 1
}

/// The element `(x, k, y)` if it exists.
pub fn element_with_k(g: &Graph, x: &BoundaryPoint, k: i64, y: &BoundaryPoint) -> Option<GroupoidElement> {
    let start = k.max(0) as usize;
    let limit = equalizer_search_limit(x, y, k);
    (start..=start + limit).find_map(|m| {
        let n = (m as i64 - k) as usize;
        match (x.shift(g, m), y.shift(g, n)) {
            (Ok(a), Ok(b)) if a == b => make_element(g, x, m, n, y).ok(),
            _ => None,
        }
    })
}

pub fn compose(g: &Graph, e1: &GroupoidElement, e2: &GroupoidElement) -> Result<GroupoidElement> {
    if e1.y != e2.x {
        return Err(Error::Composition(
            "the source of the first element is not the range of the second".into(),
        ));
    }
    let t = e1.n.max(e2.m);
    make_element(g, &e1.x, e1.m + t - e1.n, e2.n + t - e2.m, &e2.y)
}

pub fn inverse(e: &GroupoidElement) -> GroupoidElement {
    GroupoidElement { x: e.y.clone(), y: e.x.clone(), m: e.n, n: e.m }
}

/// The isotropy group `dℤ` at a point; `d = 0` is the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsotropyGroup {
    pub d: usize,
}

impl IsotropyGroup {
    pub fn is_trivial(self) -> bool {
        self.d == 0
    }

    pub fn contains(self, k: i64) -> bool {
        if self.d == 0 {
            k == 0
        } else {
            k % self.d as i64 == 0
        }
    }
}

impl std::fmt::Display for IsotropyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.d == 0 {
            f.write_str("trivial")
        } else {
            write!(f, "{}Z", self.d)
        }
    }
}

pub fn isotropy(x: &BoundaryPoint) -> IsotropyGroup {
    match x {
        BoundaryPoint::Finite(_) => IsotropyGroup { d: 0 },
        BoundaryPoint::EvPeriodic { period, .. } => IsotropyGroup { d: period.len() },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivialIsotropyPoint {
    Found(BoundaryPoint),
    /// Every point of the cylinder with trivial isotropy is aperiodic and
    /// infinite, so it cannot be written down here.
    NotRepresentable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalityReport {
    pub principal: bool,
    /// An isolated unit with nontrivial isotropy when the groupoid is not principal.
    pub witness: Option<GroupoidElement>,
    pub in_cylinder: Option<TrivialIsotropyPoint>,
}

/// Topological principality, which holds exactly when every loop has an exit.
pub fn principality_report(g: &Graph, cylinder: Option<&Cylinder>) -> PrincipalityReport {
    let l = condition_l(g);
    let witness = l.witness.as_ref().map(|cycle| {
        let x = BoundaryPoint::cycle(g, cycle);
        debug_assert!(is_isolated(g, &x));
        GroupoidElement::unit(x)
    });
    let in_cylinder = match (l.holds, cylinder) {
        (true, Some(z)) => Some(finite_point_in(g, z)),
        _ => None,
    };
    PrincipalityReport { principal: l.holds, witness, in_cylinder }
}

/// A finite boundary point in a nonempty cylinder, found by a breadth-first
/// walk that visits each vertex once.
fn finite_point_in(g: &Graph, z: &Cylinder) -> TrivialIsotropyPoint {
    if z.is_empty(g) {
        return TrivialIsotropyPoint::NotRepresentable;
    }
    let base = z.base().clone();
    let r = base.range(g);
    if g.is_singular(r) {
        return TrivialIsotropyPoint::Found(BoundaryPoint::Finite(base));
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    for e in g.out_edges(r, 1) {
        if z.excluded().contains(&e) {
            continue;
        }
        let mut p = base.clone();
        p.push(g, e).expect("out edge");
        queue.push_back(p);
    }
    while let Some(p) = queue.pop_front() {
        let v = p.range(g);
        if seen[v.0] {
            continue;
        }
        seen[v.0] = true;
        if g.is_singular(v) {
            return TrivialIsotropyPoint::Found(BoundaryPoint::Finite(p));
        }
        for e in g.out_edges(v, 1) {
            let mut q: Path = p.clone();
            q.push(g, e).expect("out edge");
            queue.push_back(q);
        }
    }
    TrivialIsotropyPoint::NotRepresentable
}
