//! Shift maps, orbit equivalence witnesses on finite boundary spaces, cocycle
//! extension and pseudogroup elements.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::boundary::{boundary_census, BoundaryPoint, Census, Cylinder};
use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, Path};

pub type PointMap = BTreeMap<BoundaryPoint, BoundaryPoint>;
pub type Table = BTreeMap<BoundaryPoint, u64>;

pub fn shift(g: &Graph, x: &BoundaryPoint, n: usize) -> Result<BoundaryPoint> {
    x.shift(g, n)
}

/// The census of a graph whose boundary must be finite.
pub fn finite_census(g: &Graph) -> Result<Vec<BoundaryPoint>> {
    match boundary_census(g) {
        Census::Finite(points) => Ok(points),
        Census::Infinite(_) => Err(Error::Unsupported(
            "the boundary path space is infinite; finite-scale verification only".into(),
        )),
    }
}

/// `σ^k(x)`, or `None` when `x` is too short.
fn power(g: &Graph, x: &BoundaryPoint, k: u64) -> Option<BoundaryPoint> {
    x.shift(g, k as usize).ok()
}

/// Finite data for an orbit equivalence between `e` and `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitWitness {
    pub e: Graph,
    pub f: Graph,
    pub h: PointMap,
    pub k1: Table,
    pub l1: Table,
    pub k1p: Table,
    pub l1p: Table,
}

impl OrbitWitness {
    /// The same data read from `f` to `e`.
    pub fn inverse(&self) -> OrbitWitness {
        OrbitWitness {
            e: self.f.clone(),
            f: self.e.clone(),
            h: self.h.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            k1: self.k1p.clone(),
            l1: self.l1p.clone(),
            k1p: self.k1.clone(),
            l1p: self.l1.clone(),
        }
    }

    /// `h = id`, `k₁ = k′₁ ≡ 0`, `l₁ = l′₁ ≡ 1` on a finite boundary space.
    pub fn identity(g: &Graph) -> Result<OrbitWitness> {
        let points = finite_census(g)?;
        let constant =
            |c: u64| -> Table { points.iter().filter(|x| x.has_len(1)).map(|x| (x.clone(), c)).collect() };
        Ok(OrbitWitness {
            e: g.clone(),
            f: g.clone(),
            h: points.iter().map(|x| (x.clone(), x.clone())).collect(),
            k1: constant(0),
            l1: constant(1),
            k1p: constant(0),
            l1p: constant(1),
        })
    }

    fn h_inverse(&self) -> PointMap {
        self.h.iter().map(|(x, y)| (y.clone(), x.clone())).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The equation on `∂E` involving `h`.
    Forward,
    /// The equation on `∂F` involving `h⁻¹`.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquationFailure {
    Mismatch {
        lhs: BoundaryPoint,
        rhs: BoundaryPoint,
    },
    /// A shift was applied to a point shorter than the exponent.
    TooShort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OeFailure {
    pub side: Side,
    pub point: BoundaryPoint,
    pub failure: EquationFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OeReport {
    pub ok: bool,
    pub failures: Vec<OeFailure>,
}

/// Check `σ^{k(x)}(h(σ^n x)) = σ^{l(x)}(h(x))` at one point.
fn check_equation(
    e: &Graph,
    f: &Graph,
    h: &PointMap,
    x: &BoundaryPoint,
    n: usize,
    k: u64,
    l: u64,
) -> Option<EquationFailure> {
    let shifted = x.shift(e, n).expect("caller checks length");
    let lhs = power(f, &h[&shifted], k);
    let rhs = power(f, &h[x], l);
    match (lhs, rhs) {
        (Some(lhs), Some(rhs)) if lhs == rhs => None,
        (Some(lhs), Some(rhs)) => Some(EquationFailure::Mismatch { lhs, rhs }),
        _ => Some(EquationFailure::TooShort),
    }
}

fn check_bijection(h: &PointMap, from: &[BoundaryPoint], to: &[BoundaryPoint]) -> Result<()> {
    let domain: BTreeSet<_> = from.iter().collect();
    let codomain: BTreeSet<_> = to.iter().collect();
    if h.keys().collect::<BTreeSet<_>>() != domain {
        return input("h is not defined on exactly the boundary of the first graph");
    }
    let image: BTreeSet<_> = h.values().collect();
    if image != codomain || image.len() != h.len() {
        return input("h is not a bijection onto the boundary of the second graph");
    }
    Ok(())
}

fn check_table(name: &str, t: &Table, points: &[BoundaryPoint], min_len: usize) -> Result<()> {
    let want: BTreeSet<_> = points.iter().filter(|x| x.has_len(min_len)).collect();
    if t.keys().collect::<BTreeSet<_>>() != want {
        return input(format!(
            "table {name} must be defined on exactly the points of length at least {min_len}"
        ));
    }
    Ok(())
}

/// Validate a witness's shape and return both censuses.
fn validate(w: &OrbitWitness) -> Result<(Vec<BoundaryPoint>, Vec<BoundaryPoint>)> {
    let pe = finite_census(&w.e)?;
    let pf = finite_census(&w.f)?;
    check_bijection(&w.h, &pe, &pf)?;
    check_table("k1", &w.k1, &pe, 1)?;
    check_table("l1", &w.l1, &pe, 1)?;
    check_table("k1p", &w.k1p, &pf, 1)?;
    check_table("l1p", &w.l1p, &pf, 1)?;
    Ok((pe, pf))
}

/// Check both orbit equivalence equations at every point of length at least one.
pub fn verify_oe_witness(w: &OrbitWitness) -> Result<OeReport> {
    let (pe, pf) = validate(w)?;
    let hinv = w.h_inverse();
    let mut failures = Vec::new();
    for x in pe.iter().filter(|x| x.has_len(1)) {
        if let Some(failure) = check_equation(&w.e, &w.f, &w.h, x, 1, w.k1[x], w.l1[x]) {
            failures.push(OeFailure { side: Side::Forward, point: x.clone(), failure });
        }
    }
    for y in pf.iter().filter(|y| y.has_len(1)) {
        if let Some(failure) = check_equation(&w.f, &w.e, &hinv, y, 1, w.k1p[y], w.l1p[y]) {
            failures.push(OeFailure { side: Side::Backward, point: y.clone(), failure });
        }
    }
    Ok(OeReport { ok: failures.is_empty(), failures })
}

/// The tables `k_n, l_n` on `∂E^{≥n}` and `k′_n, l′_n` on `∂F^{≥n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCocycles {
    pub n: usize,
    pub k: Table,
    pub l: Table,
    pub kp: Table,
    pub lp: Table,
}

/// All levels `0..=n` of the cocycle recursion for one side.
fn cocycle_levels(
    g: &Graph,
    points: &[BoundaryPoint],
    k1: &Table,
    l1: &Table,
    n: usize,
) -> Vec<(Table, Table)> {
    let mut levels: Vec<(Table, Table)> = Vec::with_capacity(n + 1);
    let zero: Table = points.iter().map(|x| (x.clone(), 0)).collect();
    levels.push((zero.clone(), zero));
    for m in 0..n {
        let (km, lm) = &levels[m];
        let mut k = Table::new();
        let mut l = Table::new();
        for x in points.iter().filter(|x| x.has_len(m + 1)) {
            let sx = x.shift(g, m).expect("long enough");
            let (k1s, l1s) = (k1[&sx], l1[&sx]);
            let top = l1s.max(km[x]);
            k.insert(x.clone(), k1s + top - l1s);
            l.insert(x.clone(), lm[x] + top - km[x]);
        }
        levels.push((k, l));
    }
    levels
}

/// Extend the one-step cocycles to `n` steps.
///
/// The primed tables follow the same recursion with every table primed.
pub fn extend_cocycles(w: &OrbitWitness, n: usize) -> Result<ExtendedCocycles> {
    let (pe, pf) = validate(w)?;
    let mut fwd = cocycle_levels(&w.e, &pe, &w.k1, &w.l1, n);
    let mut bwd = cocycle_levels(&w.f, &pf, &w.k1p, &w.l1p, n);
    let (k, l) = fwd.swap_remove(n);
    let (kp, lp) = bwd.swap_remove(n);
    Ok(ExtendedCocycles { n, k, l, kp, lp })
}

/// Check `σ_F^{k_n(x)}(h(σ_E^n x)) = σ_F^{l_n(x)}(h x)` and its primed partner.
pub fn verify_extended(w: &OrbitWitness, c: &ExtendedCocycles) -> Result<OeReport> {
    let (pe, pf) = validate(w)?;
    let hinv = w.h_inverse();
    let mut failures = Vec::new();
    for x in pe.iter().filter(|x| x.has_len(c.n)) {
        if let Some(failure) = check_equation(&w.e, &w.f, &w.h, x, c.n, c.k[x], c.l[x]) {
            failures.push(OeFailure { side: Side::Forward, point: x.clone(), failure });
        }
    }
    for y in pf.iter().filter(|y| y.has_len(c.n)) {
        if let Some(failure) = check_equation(&w.f, &w.e, &hinv, y, c.n, c.kp[y], c.lp[y]) {
            failures.push(OeFailure { side: Side::Backward, point: y.clone(), failure });
        }
    }
    Ok(OeReport { ok: failures.is_empty(), failures })
}

/// A partial bijection `α` with shift exponents `m, n` on its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudogroupElement {
    pub graph: Graph,
    pub alpha: PointMap,
    pub m: Table,
    pub n: Table,
}

impl PseudogroupElement {
    /// `σ|_{Z(e)}` with `m ≡ 1`, `n ≡ 0`.
    pub fn shift_on_edge(g: &Graph, e: Edge) -> Result<PseudogroupElement> {
        let points = finite_census(g)?;
        let mut alpha = PointMap::new();
        let mut m = Table::new();
        let mut n = Table::new();
        for x in points.iter().filter(|x| x.edge_at(0) == Some(e)) {
            alpha.insert(x.clone(), x.shift(g, 1)?);
            m.insert(x.clone(), 1);
            n.insert(x.clone(), 0);
        }
        Ok(PseudogroupElement { graph: g.clone(), alpha, m, n })
    }

    pub fn identity(g: &Graph) -> Result<PseudogroupElement> {
        let points = finite_census(g)?;
        Ok(PseudogroupElement {
            graph: g.clone(),
            alpha: points.iter().map(|x| (x.clone(), x.clone())).collect(),
            m: points.iter().map(|x| (x.clone(), 0)).collect(),
            n: points.iter().map(|x| (x.clone(), 0)).collect(),
        })
    }
}

fn validate_element(p: &PseudogroupElement) -> Result<()> {
    let points: BTreeSet<BoundaryPoint> = finite_census(&p.graph)?.into_iter().collect();
    for (x, y) in &p.alpha {
        if !points.contains(x) || !points.contains(y) {
            return input("pseudogroup element mentions a point outside the boundary space");
        }
    }
    let dom: BTreeSet<_> = p.alpha.keys().collect();
    if p.m.keys().collect::<BTreeSet<_>>() != dom || p.n.keys().collect::<BTreeSet<_>>() != dom {
        return input("the tables m and n must be defined exactly on the domain of alpha");
    }
    Ok(())
}

/// Whether `α` is injective and `σ^{m(x)}(x) = σ^{n(x)}(α(x))` on its domain.
pub fn verify_pseudogroup_element(p: &PseudogroupElement) -> Result<bool> {
    validate_element(p)?;
    let image: BTreeSet<_> = p.alpha.values().collect();
    if image.len() != p.alpha.len() {
        return Ok(false);
    }
    Ok(p.alpha.iter().all(|(x, y)| match (power(&p.graph, x, p.m[x]), power(&p.graph, y, p.n[x])) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectionPiece {
    pub cylinder: Cylinder,
    pub points: Vec<BoundaryPoint>,
    pub m: u64,
    pub n: u64,
}

/// Cut the domain into cylinders on which `m` and `n` are constant and both
/// shift powers are injective.
pub fn bisection_decomposition(p: &PseudogroupElement) -> Result<Vec<BisectionPiece>> {
    if !verify_pseudogroup_element(p)? {
        return Err(Error::Precondition("not a pseudogroup element".into()));
    }
    let g = &p.graph;
    let points = finite_census(g)?;
    let mut pieces = Vec::new();
    let mut stack: Vec<Path> = g.vertices().rev().map(Path::vertex).collect();
    while let Some(base) = stack.pop() {
        let z = Cylinder::of(base.clone());
        let inside: Vec<&BoundaryPoint> = points.iter().filter(|x| z.contains(x)).collect();
        let in_dom: Vec<&BoundaryPoint> =
            inside.iter().copied().filter(|x| p.alpha.contains_key(*x)).collect();
        if in_dom.is_empty() {
            continue;
        }
        if in_dom.len() == inside.len() && uniform_and_injective(p, &in_dom) {
            pieces.push(BisectionPiece {
                cylinder: z,
                points: in_dom.into_iter().cloned().collect(),
                m: p.m[inside[0]],
                n: p.n[inside[0]],
            });
            continue;
        }
        // Several points share this base, so none of them ends here.
        let r = base.range(g);
        for e in g.out_edges(r, 0).into_iter().rev() {
            let mut next = base.clone();
            next.push(g, e)?;
            stack.push(next);
        }
    }
    Ok(pieces)
}

fn uniform_and_injective(p: &PseudogroupElement, xs: &[&BoundaryPoint]) -> bool {
    let (m, n) = (p.m[xs[0]], p.n[xs[0]]);
    if xs.iter().any(|x| p.m[*x] != m || p.n[*x] != n) {
        return false;
    }
    let g = &p.graph;
    let left: BTreeSet<_> = xs.iter().map(|x| power(g, x, m)).collect();
    let right: BTreeSet<_> = xs.iter().map(|x| power(g, &p.alpha[*x], n)).collect();
    left.len() == xs.len() && right.len() == xs.len()
}

/// Transport a pseudogroup element along an orbit equivalence.
pub fn conjugate_pseudogroup(w: &OrbitWitness, p: &PseudogroupElement) -> Result<PseudogroupElement> {
    if p.graph != w.e {
        return input("the pseudogroup element lives on a different graph");
    }
    if !verify_oe_witness(w)?.ok {
        return Err(Error::Precondition("the orbit equivalence witness does not verify".into()));
    }
    if !verify_pseudogroup_element(p)? {
        return Err(Error::Precondition("not a pseudogroup element".into()));
    }
    let (pe, _) = validate(w)?;
    let depth = p.m.values().chain(p.n.values()).copied().max().unwrap_or(0) as usize;
    let levels = cocycle_levels(&w.e, &pe, &w.k1, &w.l1, depth);
    let mut alpha = PointMap::new();
    let mut mp = Table::new();
    let mut np = Table::new();
    for (x, a) in &p.alpha {
        let (m, n) = (p.m[x] as usize, p.n[x] as usize);
        let (km, lm) = (levels[m].0[x], levels[m].1[x]);
        let (kn, ln) = (levels[n].0[a], levels[n].1[a]);
        let top = km.max(kn);
        let y = w.h[x].clone();
        alpha.insert(y.clone(), w.h[a].clone());
        mp.insert(y.clone(), lm + top - km);
        np.insert(y, ln + top - kn);
    }
    Ok(PseudogroupElement { graph: w.f.clone(), alpha, m: mp, n: np })
}

/// Rebuild one-step cocycles from transported shift restrictions.
///
/// `forward[e]` is `h∘σ|_{Z(e)}∘h⁻¹` over `F` for each edge `e` of `E` that
/// starts some boundary point; `backward` is the same for `F`'s edges over `E`.
pub fn cocycles_from_pseudogroup_transport(
    e: &Graph,
    f: &Graph,
    h: &PointMap,
    forward: &BTreeMap<Edge, PseudogroupElement>,
    backward: &BTreeMap<Edge, PseudogroupElement>,
) -> Result<OrbitWitness> {
    let pe = finite_census(e)?;
    let pf = finite_census(f)?;
    check_bijection(h, &pe, &pf)?;
    let hinv: PointMap = h.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
    let (k1, l1) = assemble(&pe, h, forward)?;
    let (k1p, l1p) = assemble(&pf, &hinv, backward)?;
    Ok(OrbitWitness { e: e.clone(), f: f.clone(), h: h.clone(), k1, l1, k1p, l1p })
}

fn assemble(
    points: &[BoundaryPoint],
    h: &PointMap,
    elements: &BTreeMap<Edge, PseudogroupElement>,
) -> Result<(Table, Table)> {
    let mut k = Table::new();
    let mut l = Table::new();
    for x in points.iter().filter(|x| x.has_len(1)) {
        let first = x.edge_at(0).expect("length at least one");
        let Some(p) = elements.get(&first) else {
            return input("no transported element supplied for an edge that starts a point");
        };
        let hx = &h[x];
        let (Some(&m), Some(&n)) = (p.m.get(hx), p.n.get(hx)) else {
            return input("a transported element is not defined at the image of its cylinder");
        };
        k.insert(x.clone(), n);
        l.insert(x.clone(), m);
    }
    Ok((k, l))
}

/// Transport every `σ|_{Z(e)}` through `w` in both directions and reassemble.
pub fn round_trip_transport(w: &OrbitWitness) -> Result<OrbitWitness> {
    let inv = w.inverse();
    let forward = transported_shifts(w)?;
    let backward = transported_shifts(&inv)?;
    cocycles_from_pseudogroup_transport(&w.e, &w.f, &w.h, &forward, &backward)
}

fn transported_shifts(w: &OrbitWitness) -> Result<BTreeMap<Edge, PseudogroupElement>> {
    let points = finite_census(&w.e)?;
    let edges: BTreeSet<Edge> = points.iter().filter_map(|x| x.edge_at(0)).collect();
    edges
        .into_iter()
        .map(|e| {
            let p = PseudogroupElement::shift_on_edge(&w.e, e)?;
            Ok((e, conjugate_pseudogroup(w, &p)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(OrbitWitness),
    /// No witness has cocycle values within the bound; larger bounds may succeed.
    NoneAtBound,
}

/// Default cocycle bound: twice the largest preperiod-plus-period size.
pub fn default_search_bound(e: &Graph, f: &Graph) -> Result<u64> {
    let size =
        finite_census(e)?.iter().chain(finite_census(f)?.iter()).map(BoundaryPoint::size).max().unwrap_or(0);
    Ok(2 * size.max(1) as u64)
}

/// Exhaustive search over bijections (in lexicographic order of permutations)
/// and cocycle tables with values in `0..=bound`.
///
/// Each equation only involves the table values at one point, so tables are
/// chosen pointwise: the least `(k, l)` in lexicographic order that works.
pub fn search_oe_witness(e: &Graph, f: &Graph, bound: u64) -> Result<SearchOutcome> {
    let pe = finite_census(e)?;
    let pf = finite_census(f)?;
    if pe.len() != pf.len() {
        return Ok(SearchOutcome::NoneAtBound);
    }
    for perm in (0..pf.len()).permutations(pf.len()) {
        let h: PointMap = pe.iter().cloned().zip(perm.iter().map(|&i| pf[i].clone())).collect();
        let hinv: PointMap = h.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        let Some((k1, l1)) = pointwise_tables(e, f, &h, &pe, bound) else {
            continue;
        };
        let Some((k1p, l1p)) = pointwise_tables(f, e, &hinv, &pf, bound) else {
            continue;
        };
        return Ok(SearchOutcome::Found(OrbitWitness { e: e.clone(), f: f.clone(), h, k1, l1, k1p, l1p }));
    }
    Ok(SearchOutcome::NoneAtBound)
}

fn pointwise_tables(
    e: &Graph,
    f: &Graph,
    h: &PointMap,
    points: &[BoundaryPoint],
    bound: u64,
) -> Option<(Table, Table)> {
    let mut k1 = Table::new();
    let mut l1 = Table::new();
    for x in points.iter().filter(|x| x.has_len(1)) {
        let hit = (0..=bound)
            .cartesian_product(0..=bound)
            .find(|&(k, l)| check_equation(e, f, h, x, 1, k, l).is_none())?;
        k1.insert(x.clone(), hit.0);
        l1.insert(x.clone(), hit.1);
    }
    Some((k1, l1))
}

/// Whether `h` is a bijection of censuses intertwining the shifts.
pub fn verify_conjugacy(e: &Graph, f: &Graph, h: &PointMap) -> Result<bool> {
    let pe = finite_census(e)?;
    let pf = finite_census(f)?;
    if check_bijection(h, &pe, &pf).is_err() {
        return Ok(false);
    }
    for x in &pe {
        if x.has_len(1) != h[x].has_len(1) {
            return Ok(false);
        }
        if x.has_len(1) && h[&x.shift(e, 1)?] != h[x].shift(f, 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether some bijection of the censuses is a conjugacy.
pub fn conjugate_exists(e: &Graph, f: &Graph) -> Result<Option<PointMap>> {
    let pe = finite_census(e)?;
    let pf = finite_census(f)?;
    if pe.len() != pf.len() {
        return Ok(None);
    }
    for perm in (0..pf.len()).permutations(pf.len()) {
        let h: PointMap = pe.iter().cloned().zip(perm.iter().map(|&i| pf[i].clone())).collect();
        if verify_conjugacy(e, f, &h)? {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// Shift-fixed points of a graph with finite boundary.
pub fn fixed_points(g: &Graph) -> Result<Vec<BoundaryPoint>> {
    let points = finite_census(g)?;
    Ok(points.into_iter().filter(|x| x.has_len(1) && x.shift(g, 1).as_ref() == Ok(x)).collect())
}
