//! JSON files for orbit-equivalence witnesses and pseudogroup elements.
//!
//! Witness: `{"h": [[x, y], ...], "k1": [[x, k], ...], "l1": ..., "k1p": ..., "l1p": ...}`
//! with points of `e` in `h`, `k1`, `l1` and points of `f` in `k1p`, `l1p`.
//! Element: `{"alpha": [[x, y], ...], "m": [[x, m], ...], "n": [[x, n], ...]}`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{OrbitWitness, PointMap, PseudogroupElement, Table};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::text::{parse_point, print_point};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    h: Vec<(String, String)>,
    k1: Vec<(String, u64)>,
    l1: Vec<(String, u64)>,
    k1p: Vec<(String, u64)>,
    l1p: Vec<(String, u64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    alpha: Vec<(String, String)>,
    m: Vec<(String, u64)>,
    n: Vec<(String, u64)>,
}

fn map_out(a: &Graph, b: &Graph, m: &PointMap) -> Vec<(String, String)> {
    m.iter().map(|(x, y)| (print_point(a, x), print_point(b, y))).collect()
}

fn table_out(g: &Graph, t: &Table) -> Vec<(String, u64)> {
    t.iter().map(|(x, &k)| (print_point(g, x), k)).collect()
}

fn map_in(a: &Graph, b: &Graph, rows: &[(String, String)], what: &str) -> Result<PointMap> {
    let mut m = PointMap::new();
    for (x, y) in rows {
        let px = parse_point(a, x)?;
        if m.insert(px, parse_point(b, y)?).is_some() {
            return Err(Error::Input(format!("`{what}` lists `{x}` twice")));
        }
    }
    Ok(m)
}

fn table_in(g: &Graph, rows: &[(String, u64)], what: &str) -> Result<Table> {
    let mut t = Table::new();
    for (x, k) in rows {
        if t.insert(parse_point(g, x)?, *k).is_some() {
            return Err(Error::Input(format!("`{what}` lists `{x}` twice")));
        }
    }
    Ok(t)
}

fn bad_json(e: serde_json::Error) -> Error {
    Error::Input(format!("invalid JSON: {e}"))
}

pub fn witness_to_json(w: &OrbitWitness) -> serde_json::Value {
    let file = WitnessFile {
        h: map_out(&w.e, &w.f, &w.h),
        k1: table_out(&w.e, &w.k1),
        l1: table_out(&w.e, &w.l1),
        k1p: table_out(&w.f, &w.k1p),
        l1p: table_out(&w.f, &w.l1p),
    };
    serde_json::to_value(file).expect("witness serializes")
}

pub fn witness_from_json(e: &Graph, f: &Graph, text: &str) -> Result<OrbitWitness> {
    let file: WitnessFile = serde_json::from_str(text).map_err(bad_json)?;
    Ok(OrbitWitness {
        e: e.clone(),
        f: f.clone(),
        h: map_in(e, f, &file.h, "h")?,
        k1: table_in(e, &file.k1, "k1")?,
        l1: table_in(e, &file.l1, "l1")?,
        k1p: table_in(f, &file.k1p, "k1p")?,
        l1p: table_in(f, &file.l1p, "l1p")?,
    })
}

pub fn element_to_json(p: &PseudogroupElement) -> serde_json::Value {
    let g = &p.graph;
    let file = ElementFile { alpha: map_out(g, g, &p.alpha), m: table_out(g, &p.m), n: table_out(g, &p.n) };
    serde_json::to_value(file).expect("element serializes")
}

pub fn element_from_json(g: &Graph, text: &str) -> Result<PseudogroupElement> {
    let file: ElementFile = serde_json::from_str(text).map_err(bad_json)?;
    Ok(PseudogroupElement {
        graph: g.clone(),
        alpha: map_in(g, g, &file.alpha, "alpha")?,
        m: table_in(g, &file.m, "m")?,
        n: table_in(g, &file.n, "n")?,
    })
}
