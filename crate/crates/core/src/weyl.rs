//! Germs of the partial maps `νz ↦ μz` at representable points, their
//! equivalence and winding numbers, and the comparison map from the groupoid.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::boundary::{enumerate_points, is_isolated, BoundaryPoint, Census, PointBounds};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Path};
use crate::groupoid::{make_element, GroupoidElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ {
    mu: Path,
    nu: Path,
    x: BoundaryPoint,
    alpha: BoundaryPoint,
}

impl Germ {
    pub fn mu(&self) -> &Path {
        &self.mu
    }

    pub fn nu(&self) -> &Path {
        &self.nu
    }

    pub fn point(&self) -> &BoundaryPoint {
        &self.x
    }

    /// `μz` where `x = νz`.
    pub fn apply(&self) -> &BoundaryPoint {
        &self.alpha
    }

    pub fn cocycle(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }
}

pub fn germ_make(g: &Graph, mu: &Path, nu: &Path, x: &BoundaryPoint) -> Result<Germ> {
    if mu.range(g) != nu.range(g) {
        return Err(Error::Input("μ and ν must end at the same vertex".into()));
    }
    if !x.starts_with(nu) {
        return Err(Error::Input("the point does not lie in the cylinder of ν".into()));
    }
    let tail = x.shift(g, nu.len())?;
    let alpha = tail.prepend(g, mu)?;
    Ok(Germ { mu: mu.clone(), nu: nu.clone(), x: x.clone(), alpha })
}

pub fn germ_apply(g: &Germ) -> &BoundaryPoint {
    g.apply()
}

pub fn germ_cocycle(g: &Germ) -> i64 {
    g.cocycle()
}

/// `g1 ∘ g2`, anchored at the base point of `g2`.
pub fn germ_compose(g: &Graph, g1: &Germ, g2: &Germ) -> Result<Germ> {
    if g2.alpha != g1.x {
        return Err(Error::Composition(
            "the second germ does not land on the base point of the first".into(),
        ));
    }
    if g1.nu.is_prefix_of(&g2.mu) {
        let tau = g2.mu.suffix(g, g1.nu.len());
        germ_make(g, &g1.mu.concat(g, &tau)?, &g2.nu, &g2.x)
    } else if g2.mu.is_prefix_of(&g1.nu) {
        let tau = g1.nu.suffix(g, g2.mu.len());
        germ_make(g, &g1.mu, &g2.nu.concat(g, &tau)?, &g2.x)
    } else {
        Err(Error::Composition("ν₁ and μ₂ are not comparable".into()))
    }
}

pub fn germ_invert(g: &Graph, germ: &Germ) -> Germ {
    germ_make(g, &germ.nu, &germ.mu, &germ.alpha).expect("inverse of a valid germ")
}

/// `(k₁ − k₂) / p` at an isolated eventually periodic point with primitive period length `p`.
pub fn winding(g: &Graph, g1: &Germ, g2: &Germ) -> Result<i64> {
    if g1.x != g2.x {
        return Err(Error::Input("germs at different points".into()));
    }
    if g1.alpha != g2.alpha {
        return Err(Error::Input("germs with different values".into()));
    }
    let BoundaryPoint::EvPeriodic { period, .. } = &g1.x else {
        return Err(Error::Input("winding needs an eventually periodic point".into()));
    };
    if !is_isolated(g, &g1.x) {
        return Err(Error::Input("winding needs an isolated point".into()));
    }
    let p = period.len() as i64;
    let d = g1.cocycle() - g2.cocycle();
    assert_eq!(d % p, 0, "cocycle difference must be a multiple of the period");
    Ok(d / p)
}

pub fn germ_equivalent(g: &Graph, g1: &Germ, g2: &Germ) -> bool {
    if g1.x != g2.x || g1.alpha != g2.alpha {
        return false;
    }
    let x = &g1.x;
    if is_isolated(g, x) {
        return match x {
            BoundaryPoint::EvPeriodic { .. } => g1.cocycle() == g2.cocycle(),
            BoundaryPoint::Finite(_) => true,
        };
    }
    // Push both ν's out to a common length along x and compare what μ becomes.
    // Both stretched paths start at s(α), so comparing edges is enough.
    let len = g1.nu.len().max(g2.nu.len());
    fn stretch<'a>(germ: &'a Germ, len: usize) -> impl Iterator<Item = Edge> + 'a {
        let tail = (germ.nu.len()..len).map(|i| germ.x.edge_at(i).expect("x lies in Z(ν)"));
        germ.mu.edges().iter().copied().chain(tail)
    }
    g1.mu.len() + len - g1.nu.len() == g2.mu.len() + len - g2.nu.len()
        && stretch(g1, len).eq(stretch(g2, len))
}

/// The germ `(x_{≤m}, y_{≤n}, y)` of an element `(x, k, y)` with witness `(m, n)`.
pub fn phi(g: &Graph, e: &GroupoidElement) -> Germ {
    let (m, n) = e.witness();
    let mu = e.range().prefix_path(m).expect("witness within length");
    let nu = e.source().prefix_path(n).expect("witness within length");
    germ_make(g, &mu, &nu, e.source()).expect("valid element")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhiReport {
    pub points: usize,
    pub germs: usize,
    pub classes: usize,
    pub elements: usize,
    /// Germ pairs checked for the winding laws.
    pub winding_checks: usize,
    /// `false` when the point set is a bounded sample of an infinite space.
    pub complete: bool,
    pub violations: Vec<String>,
}

impl PhiReport {
    pub fn bijective(&self) -> bool {
        self.violations.is_empty() && self.classes == self.elements
    }
}

/// Sample used for graphs with infinite boundary.
pub const PHI_SAMPLE: PointBounds = PointBounds { max_prefix: 1, max_period: 2, inf_sample: 2 };

/// Enumerate germs `(μ, ν, y)` with `|μ|, |ν| ≤ bound` over a point set `X`
/// (with `α ∈ X`), group them by equivalence and check that the classes
/// correspond one-to-one with groupoid elements over `X` whose minimal
/// witness is within the bound.
pub fn phi_bijectivity_check(g: &Graph, bound: usize) -> PhiReport {
    let (points, complete) = match crate::boundary::boundary_census(g) {
        Census::Finite(p) => (p, true),
        Census::Infinite(_) => (enumerate_points(g, PHI_SAMPLE), false),
    };
    let mut report = phi_check_on(g, &points, bound);
    report.complete = complete;
    report
}

pub fn phi_check_on(g: &Graph, points: &[BoundaryPoint], bound: usize) -> PhiReport {
    let mut report = PhiReport { points: points.len(), ..PhiReport::default() };
    let index: HashMap<&BoundaryPoint, usize> = points.iter().enumerate().map(|(i, x)| (x, i)).collect();

    // Points grouped by their shifted tails: (point, depth) with σ^depth(point) = tail.
    let mut by_tail: HashMap<BoundaryPoint, Vec<(usize, usize)>> = HashMap::new();
    for (i, x) in points.iter().enumerate() {
        for d in 0..=bound {
            match x.shift(g, d) {
                Ok(t) => by_tail.entry(t).or_default().push((i, d)),
                Err(_) => break,
            }
        }
    }

    // Germs bucketed by (base point, value).
    let prefixes: Vec<Vec<Path>> =
        points.iter().map(|x| (0..=bound).map_while(|d| x.prefix_path(d).ok()).collect()).collect();
    let mut buckets: BTreeMap<(usize, usize), Vec<Germ>> = BTreeMap::new();
    for list in by_tail.values() {
        for &(yi, n) in list {
            for &(ai, m) in list {
                let (y, a) = (&points[yi], &points[ai]);
                match germ_make(g, &prefixes[ai][m], &prefixes[yi][n], y) {
                    Ok(germ) if &germ.alpha == a => buckets.entry((yi, ai)).or_default().push(germ),
                    Ok(_) => report.violations.push("germ value disagrees with its tail".into()),
                    Err(err) => report.violations.push(format!("germ construction failed: {err}")),
                }
            }
        }
    }

    // Elements are keyed by (range index, k, source index).
    let mut class_elements: HashSet<(usize, i64, usize)> = HashSet::new();
    for (&(yi, ai), germs) in &buckets {
        report.germs += germs.len();
        let classes = partition(g, germs, &mut report.violations);
        for class in &classes {
            let rep = &germs[class[0]];
            let el = element_of(g, rep);
            // Within a bucket the element of a germ is determined by its cocycle.
            for &i in class {
                if germs[i].cocycle() != el.k() {
                    report
                        .violations
                        .push(format!("equivalent germs give different elements at points #{yi}, #{ai}"));
                }
            }
            if !germ_equivalent(g, &phi(g, &el), rep) {
                report.violations.push("phi of a class element leaves the class".into());
            }
            if !class_elements.insert((ai, el.k(), yi)) {
                report.violations.push("two classes map to the same groupoid element".into());
            }
        }
        report.classes += classes.len();
        report.winding_checks += winding_laws(g, germs, &mut report.violations);
    }

    // Elements over X with minimal witness within the bound, found independently.
    let mut elements = HashMap::new();
    for list in by_tail.values() {
        for &(xi, m) in list {
            for &(yi, n) in list {
                let key = (xi, m as i64 - n as i64, yi);
                if elements.contains_key(&key) {
                    continue;
                }
                if let Ok(el) = make_element(g, &points[xi], m, n, &points[yi]) {
                    let (mm, nn) = el.witness();
                    if mm <= bound && nn <= bound {
                        elements.insert(key, el);
                    }
                }
            }
        }
    }
    report.elements = elements.len();
    for (key, el) in &elements {
        if !class_elements.contains(key) {
            report.violations.push("a groupoid element is not hit by any germ class".into());
        }
        let germ = phi(g, el);
        if !index.contains_key(germ.point()) {
            report.violations.push("phi moved the base point".into());
        }
        // Non-minimal witnesses give equivalent germs.
        let (m, n) = el.witness();
        for t in 1..=2 {
            let (Ok(mu), Ok(nu)) = (el.range().prefix_path(m + t), el.source().prefix_path(n + t)) else {
                continue;
            };
            match germ_make(g, &mu, &nu, el.source()) {
                Ok(other) if germ_equivalent(g, &germ, &other) => {}
                _ => report.violations.push("phi depends on the choice of witness".into()),
            }
        }
    }
    report
}

fn element_of(g: &Graph, germ: &Germ) -> GroupoidElement {
    make_element(g, &germ.alpha, germ.mu.len(), germ.nu.len(), &germ.x).expect("a germ determines an element")
}

/// Classes of `germ_equivalent` inside one bucket. Each germ is compared in
/// both directions with every class representative and with the latest member
/// of its class, which exposes failures of reflexivity, symmetry and transitivity.
fn partition(g: &Graph, germs: &[Germ], violations: &mut Vec<String>) -> Vec<Vec<usize>> {
    let eq = |i: usize, j: usize| germ_equivalent(g, &germs[i], &germs[j]);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..germs.len() {
        if !eq(i, i) {
            violations.push("germ equivalence is not reflexive".into());
        }
        let mut hits = Vec::new();
        for (c, class) in classes.iter().enumerate() {
            let (fwd, bwd) = (eq(class[0], i), eq(i, class[0]));
            if fwd != bwd {
                violations.push("germ equivalence is not symmetric".into());
            }
            if fwd {
                hits.push(c);
            }
        }
        match hits[..] {
            [] => classes.push(vec![i]),
            [c] => {
                let last = *classes[c].last().expect("classes are nonempty");
                if !eq(last, i) {
                    violations.push("germ equivalence is not transitive".into());
                }
                classes[c].push(i);
            }
            _ => violations.push("germ equivalence is not transitive".into()),
        }
    }
    classes
}

/// Antisymmetry and additivity of the winding number on a bucket of germs
/// at an isolated eventually periodic point. Returns the number of pairs checked.
fn winding_laws(g: &Graph, germs: &[Germ], violations: &mut Vec<String>) -> usize {
    let Some(first) = germs.first() else { return 0 };
    if first.x.is_finite() || !is_isolated(g, &first.x) {
        return 0;
    }
    let w: Vec<Vec<i64>> = germs
        .iter()
        .map(|a| germs.iter().map(|b| winding(g, a, b).expect("preconditions hold")).collect())
        .collect();
    let n = germs.len();
    for i in 0..n {
        for j in 0..n {
            if w[i][j] != -w[j][i] {
                violations.push("winding is not antisymmetric".into());
            }
            for k in 0..n {
                if w[i][j] + w[j][k] != w[i][k] {
                    violations.push("winding is not additive".into());
                }
            }
        }
    }
    n * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{Edge, Loop};

    fn e(g: &Graph, name: &str) -> Edge {
        Edge::single(g.class_by_name(name).unwrap())
    }

    fn path(g: &Graph, names: &[&str]) -> Path {
        Path::from_edges(g, names.iter().map(|n| e(g, n)).collect()).unwrap()
    }

    fn at(g: &Graph, v: &str) -> Path {
        Path::vertex(g.vertex(v).unwrap())
    }

    fn cyc(g: &Graph, names: &[&str]) -> BoundaryPoint {
        let edges = names.iter().map(|n| e(g, n)).collect();
        BoundaryPoint::cycle(g, &Loop::from_edges(g, edges).unwrap())
    }

    #[test]
    fn making_germs() {
        let g = fixtures::e1();
        let b = cyc(&g, &["b"]);
        let germ = germ_make(&g, &path(&g, &["a"]), &at(&g, "v"), &b).unwrap();
        assert_eq!(germ.apply(), &b.prepend(&g, &path(&g, &["a"])).unwrap());
        assert_eq!(germ.cocycle(), 1);
        let id = germ_make(&g, &at(&g, "v"), &at(&g, "v"), &b).unwrap();
        assert_eq!((id.apply(), id.cocycle()), (&b, 0));
        let ab = b.prepend(&g, &path(&g, &["a"])).unwrap();
        assert!(germ_make(&g, &path(&g, &["a"]), &at(&g, "v"), &ab).is_err());
    }

    #[test]
    fn composing_germs() {
        let g = fixtures::e1();
        let b = cyc(&g, &["b"]);
        let g1 = germ_make(&g, &path(&g, &["a"]), &at(&g, "v"), &b).unwrap();
        let g2 = germ_make(&g, &at(&g, "v"), &path(&g, &["b"]), &b).unwrap();
        let c = germ_compose(&g, &g1, &g2).unwrap();
        assert_eq!((c.mu(), c.nu(), c.point()), (&path(&g, &["a"]), &path(&g, &["b"]), &b));
        assert_eq!(c.cocycle(), 0);

        let inv = germ_invert(&g, &g1);
        let ab = b.prepend(&g, &path(&g, &["a"])).unwrap();
        assert_eq!((inv.mu(), inv.nu(), inv.point()), (&at(&g, "v"), &path(&g, &["a"]), &ab));

        let id = germ_make(&g, &at(&g, "u"), &at(&g, "u"), &ab).unwrap();
        assert_eq!(germ_compose(&g, &id, &g1).unwrap(), g1);
        assert!(germ_compose(&g, &g1, &g1).is_err());
    }

    #[test]
    fn windings() {
        let g = fixtures::e1();
        let b = cyc(&g, &["b"]);
        let g1 = germ_make(&g, &path(&g, &["b"]), &at(&g, "v"), &b).unwrap();
        let g2 = germ_make(&g, &at(&g, "v"), &at(&g, "v"), &b).unwrap();
        assert_eq!(winding(&g, &g1, &g2).unwrap(), 1);
        assert_eq!(winding(&g, &g1, &g1).unwrap(), 0);
        let f = fixtures::f1();
        let cd = cyc(&f, &["c", "d"]);
        let h1 = germ_make(&f, &path(&f, &["c", "d"]), &at(&f, "p"), &cd).unwrap();
        let h2 = germ_make(&f, &at(&f, "p"), &at(&f, "p"), &cd).unwrap();
        assert_eq!(winding(&f, &h1, &h2).unwrap(), 1);
        let e2 = fixtures::e2();
        let x = cyc(&e2, &["a11"]);
        let k = germ_make(&e2, &at(&e2, "1"), &at(&e2, "1"), &x).unwrap();
        assert!(winding(&e2, &k, &k).is_err());
    }

    #[test]
    fn equivalences() {
        let g = fixtures::e1();
        let b = cyc(&g, &["b"]);
        let g1 = germ_make(&g, &path(&g, &["b"]), &at(&g, "v"), &b).unwrap();
        let g2 = germ_make(&g, &at(&g, "v"), &at(&g, "v"), &b).unwrap();
        assert!(!germ_equivalent(&g, &g1, &g2));
        assert!(germ_equivalent(&g, &g1, &g1));
        let e2 = fixtures::e2();
        let x = cyc(&e2, &["a11"]);
        let h1 = germ_make(&e2, &path(&e2, &["a11"]), &at(&e2, "1"), &x).unwrap();
        let h2 = germ_make(&e2, &path(&e2, &["a11", "a11"]), &path(&e2, &["a11"]), &x).unwrap();
        assert!(germ_equivalent(&e2, &h1, &h2));
    }

    #[test]
    fn phi_examples() {
        let g = fixtures::e1();
        let b = cyc(&g, &["b"]);
        let el = make_element(&g, &b, 1, 0, &b).unwrap();
        let germ = phi(&g, &el);
        assert_eq!((germ.mu(), germ.nu()), (&path(&g, &["b"]), &at(&g, "v")));
        let ab = b.prepend(&g, &path(&g, &["a"])).unwrap();
        let germ = phi(&g, &make_element(&g, &ab, 1, 0, &b).unwrap());
        assert_eq!((germ.mu(), germ.nu()), (&path(&g, &["a"]), &at(&g, "v")));
        let g0 = fixtures::g0();
        let v = BoundaryPoint::vertex(&g0, g0.vertex("v").unwrap()).unwrap();
        let germ = phi(&g0, &make_element(&g0, &v, 0, 0, &v).unwrap());
        assert_eq!(germ.cocycle(), 0);
        assert_eq!(germ.apply(), &v);
    }

    #[test]
    fn phi_bijection_on_fixtures() {
        for g in [fixtures::e1(), fixtures::f1(), fixtures::g0(), fixtures::floop()] {
            let r = phi_bijectivity_check(&g, 3);
            assert!(r.bijective(), "{:?}", r.violations);
            assert!(r.complete);
        }
        let r = phi_bijectivity_check(&fixtures::g0(), 2);
        assert_eq!((r.classes, r.elements), (1, 1));
    }

    #[test]
    fn phi_isotropy_classes_on_the_two_cycle() {
        let f = fixtures::f1();
        let cd = cyc(&f, &["c", "d"]);
        let points = vec![cd.clone()];
        let r = phi_check_on(&f, &points, 3);
        assert!(r.bijective());
        // k ∈ {-2, 0, 2} with witnesses inside the bound.
        assert_eq!(r.elements, 3);
    }
}
