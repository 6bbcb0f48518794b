//! Textual forms of edges, paths, points, cylinders, groupoid elements and germs.
//!
//! * edges: `cls` for a class of multiplicity one, `cls[n]` otherwise
//! * paths: `@v` (empty) or `e1.e2`
//! * points: `@v`, `e1.e2`, `e1.(e2.e3)*`, `(e)*`
//! * cylinders: `Z(μ)` or `Z(μ\{e,f})`
//! * elements: `(x | k | y)`; germs: `[μ | ν | x]`

use crate::boundary::{BoundaryPoint, Cylinder};
use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, Loop, Multiplicity, Path};
use crate::groupoid::{element_with_k, GroupoidElement};
use crate::weyl::{germ_make, Germ};

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '^' | '~' | '\'')
}

pub fn print_edge(g: &Graph, e: Edge) -> String {
    let c = g.class(e.class);
    if c.multiplicity == Multiplicity::ONE {
        c.id.clone()
    } else {
        format!("{}[{}]", c.id, e.index)
    }
}

pub fn parse_edge(g: &Graph, s: &str) -> Result<Edge> {
    let s = s.trim();
    let (name, index) = match s.strip_suffix(']').and_then(|t| t.split_once('[')) {
        Some((name, idx)) => {
            let i: u64 = idx.trim().parse().map_err(|_| Error::Input(format!("bad edge index in `{s}`")))?;
            (name.trim(), Some(i))
        }
        None => (s, None),
    };
    let Some(c) = g.class_by_name(name) else {
        return input(format!("unknown edge class `{name}`"));
    };
    let m = g.class(c).multiplicity;
    let index = match index {
        Some(i) => i,
        None if m == Multiplicity::ONE => 0,
        None => return input(format!("class `{name}` has several edges; write `{name}[n]`")),
    };
    if !m.admits(index) {
        return input(format!("edge index {index} is out of range for `{name}`"));
    }
    Ok(Edge::new(c, index))
}

fn print_edges(g: &Graph, edges: &[Edge]) -> String {
    edges.iter().map(|&e| print_edge(g, e)).collect::<Vec<_>>().join(".")
}

fn parse_edges(g: &Graph, s: &str) -> Result<Vec<Edge>> {
    s.split('.').map(|t| parse_edge(g, t)).collect()
}

pub fn print_path(g: &Graph, p: &Path) -> String {
    if p.is_empty() {
        format!("@{}", g.vertex_name(p.source()))
    } else {
        print_edges(g, p.edges())
    }
}

pub fn parse_path(g: &Graph, s: &str) -> Result<Path> {
    let s = s.trim();
    if let Some(v) = s.strip_prefix('@') {
        let Some(v) = g.vertex(v.trim()) else {
            return input(format!("unknown vertex `{v}`"));
        };
        return Ok(Path::vertex(v));
    }
    if s.is_empty() {
        return input("empty path; write `@v` for the empty path at `v`");
    }
    Path::from_edges(g, parse_edges(g, s)?)
}

pub fn print_loop(g: &Graph, l: &Loop) -> String {
    print_edges(g, l.edges())
}

pub fn print_point(g: &Graph, x: &BoundaryPoint) -> String {
    match x {
        BoundaryPoint::Finite(p) => print_path(g, p),
        BoundaryPoint::EvPeriodic { prefix, period } => {
            if prefix.is_empty() {
                format!("({})*", print_loop(g, period))
            } else {
                format!("{}.({})*", print_edges(g, prefix.edges()), print_loop(g, period))
            }
        }
    }
}

/// Parse and canonicalize a point.
pub fn parse_point(g: &Graph, s: &str) -> Result<BoundaryPoint> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return BoundaryPoint::finite(g, parse_path(g, s)?);
    };
    let Some(inner) = s[open + 1..].strip_suffix(")*") else {
        return input(format!("malformed periodic point `{s}`: expected `...(period)*`"));
    };
    let period = Loop::from_edges(g, parse_edges(g, inner)?)?;
    let head = s[..open].trim();
    let prefix = if head.is_empty() {
        Path::vertex(period.base(g))
    } else {
        let Some(head) = head.strip_suffix('.') else {
            return input(format!("malformed periodic point `{s}`: missing `.` before the period"));
        };
        Path::from_edges(g, parse_edges(g, head)?)?
    };
    BoundaryPoint::periodic(g, prefix, period)
}

pub fn print_cylinder(g: &Graph, z: &Cylinder) -> String {
    if z.excluded().is_empty() {
        format!("Z({})", print_path(g, z.base()))
    } else {
        let ex: Vec<String> = z.excluded().iter().map(|&e| print_edge(g, e)).collect();
        format!("Z({}\\{{{}}})", print_path(g, z.base()), ex.join(","))
    }
}

pub fn parse_cylinder(g: &Graph, s: &str) -> Result<Cylinder> {
    let s = s.trim();
    let body = s.strip_prefix("Z(").and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    match body.split_once('\\') {
        None => Ok(Cylinder::of(parse_path(g, body)?)),
        Some((base, ex)) => {
            let ex = ex.trim();
            let Some(list) = ex.strip_prefix('{').and_then(|t| t.strip_suffix('}')) else {
                return input("excluded edges must be written as `{e1,e2}`");
            };
            let edges = list
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_edge(g, t))
                .collect::<Result<Vec<_>>>()?;
            Cylinder::new(g, parse_path(g, base)?, edges)
        }
    }
}

fn split_bar(s: &str, open: char, close: char, what: &str) -> Result<Vec<String>> {
    let s = s.trim();
    let Some(body) = s.strip_prefix(open).and_then(|t| t.strip_suffix(close)) else {
        return input(format!("malformed {what} `{s}`"));
    };
    let parts: Vec<String> = body.split('|').map(|p| p.trim().to_string()).collect();
    if parts.len() != 3 {
        return input(format!("malformed {what} `{s}`: expected three `|`-separated fields"));
    }
    Ok(parts)
}

pub fn print_element(g: &Graph, e: &GroupoidElement) -> String {
    format!("({} | {} | {})", print_point(g, e.range()), e.k(), print_point(g, e.source()))
}

pub fn parse_element(g: &Graph, s: &str) -> Result<GroupoidElement> {
    let parts = split_bar(s, '(', ')', "groupoid element")?;
    let x = parse_point(g, &parts[0])?;
    let k: i64 = parts[1].parse().map_err(|_| Error::Input(format!("bad cocycle value `{}`", parts[1])))?;
    let y = parse_point(g, &parts[2])?;
    element_with_k(g, &x, k, &y)
        .ok_or_else(|| Error::Input(format!("({} | {k} | {}) is not in the groupoid", parts[0], parts[2])))
}

pub fn print_germ(g: &Graph, germ: &Germ) -> String {
    format!(
        "[{} | {} | {}]",
        print_path(g, germ.mu()),
        print_path(g, germ.nu()),
        print_point(g, germ.point())
    )
}

pub fn parse_germ(g: &Graph, s: &str) -> Result<Germ> {
    let parts = split_bar(s, '[', ']', "germ")?;
    let mu = parse_path(g, &parts[0])?;
    let nu = parse_path(g, &parts[1])?;
    let x = parse_point(g, &parts[2])?;
    germ_make(g, &mu, &nu, &x)
}
