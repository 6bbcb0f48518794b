//! The line-based `.graph` format and the out-split partition format.
//!
//! ```text
//! graph E1
//! vertex u, v
//! edge a: u -> v
//! edge b * inf: v -> v   # infinitely many parallel edges
//! ```

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EdgeClass, Graph, Multiplicity, VertexId};
use crate::moves::{BlockItem, OutSplitPartition};
use crate::text::{is_ident_char, parse_edge};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Line and column (1-based) of each declaration.
#[derive(Clone, Debug, Default)]
pub struct Locations {
    pub vertices: Vec<(usize, usize)>,
    pub classes: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct GraphDocument {
    pub name: String,
    pub graph: Graph,
    pub locations: Locations,
}

/// Documents compare by name and graph; positions are incidental.
impl PartialEq for GraphDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.graph == other.graph
    }
}

impl Eq for GraphDocument {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(&'static str),
}

fn lex(line: &str, lineno: usize, diags: &mut Vec<Diagnostic>) -> Vec<(Tok, usize)> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), col));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Punct("->"), col));
            i += 2;
        } else if let Some(p) = [",", ":", "*"].into_iter().find(|p| p.starts_with(c)) {
            out.push((Tok::Punct(p), col));
            i += 1;
        } else {
            diags.push(Diagnostic { line: lineno, col, message: format!("unexpected character `{c}`") });
            return Vec::new();
        }
    }
    out
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic { line: self.line, col: self.col(), message: msg.into() }
    }

    fn word(&mut self, what: &str) -> std::result::Result<(String, usize), Diagnostic> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), c)) => {
                self.pos += 1;
                Ok((w.clone(), *c))
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn punct(&mut self, p: &str) -> std::result::Result<(), Diagnostic> {
        match self.toks.get(self.pos) {
            Some((Tok::Punct(q), _)) if *q == p => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{p}`"))),
        }
    }

    fn peek_punct(&self, p: &str) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Punct(q), _)) if *q == p)
    }

    fn done(&self) -> std::result::Result<(), Diagnostic> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

struct EdgeDecl {
    id: String,
    mult: Multiplicity,
    src: (String, usize),
    tgt: (String, usize),
    line: usize,
    col: usize,
}

fn parse_edge_line(c: &mut Cursor) -> std::result::Result<EdgeDecl, Diagnostic> {
    let (id, col) = c.word("an edge identifier")?;
    let mut mult = Multiplicity::ONE;
    if c.peek_punct("*") {
        c.punct("*")?;
        let at = c.col();
        let (w, _) = c.word("a multiplicity (a positive integer or `inf`)")?;
        mult = if w == "inf" {
            Multiplicity::Infinite
        } else {
            match w.parse::<u64>() {
                Ok(0) => {
                    return Err(Diagnostic {
                        line: c.line,
                        col: at,
                        message: "multiplicity must be at least 1".into(),
                    })
                }
                Ok(k) => Multiplicity::Finite(k),
                Err(_) => {
                    return Err(Diagnostic {
                        line: c.line,
                        col: at,
                        message: format!("bad multiplicity `{w}`"),
                    })
                }
            }
        };
    }
    c.punct(":")?;
    let src = c.word("a source vertex")?;
    c.punct("->")?;
    let tgt = c.word("a target vertex")?;
    c.done()?;
    Ok(EdgeDecl { id, mult, src, tgt, line: c.line, col })
}

/// Parse a `.graph` document, collecting every diagnostic before failing.
pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    let mut diags = Vec::new();
    let mut name: Option<String> = None;
    let mut vertices: Vec<(String, usize, usize)> = Vec::new();
    let mut edges: Vec<EdgeDecl> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(raw, lineno, &mut diags);
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor { toks: &toks, pos: 1, line: lineno, end_col: raw.chars().count() + 1 };
        let (head, col) = match &toks[0] {
            (Tok::Word(w), col) => (w.as_str(), *col),
            (_, col) => {
                diags.push(Diagnostic {
                    line: lineno,
                    col: *col,
                    message: "expected `graph`, `vertex` or `edge`".into(),
                });
                continue;
            }
        };
        if name.is_none() && head != "graph" {
            diags.push(Diagnostic {
                line: lineno,
                col,
                message: "the first declaration must be `graph NAME`".into(),
            });
            name = Some(String::new());
        }
        let result = match head {
            "graph" => {
                if name.is_some() {
                    Err(Diagnostic { line: lineno, col, message: "duplicate `graph` header".into() })
                } else {
                    c.word("a graph name").and_then(|(w, _)| {
                        c.done()?;
                        name = Some(w);
                        Ok(())
                    })
                }
            }
            "vertex" => (|| loop {
                let (w, col) = c.word("a vertex name")?;
                vertices.push((w, lineno, col));
                if c.peek_punct(",") {
                    c.punct(",")?;
                } else {
                    return c.done();
                }
            })(),
            "edge" => parse_edge_line(&mut c).map(|d| edges.push(d)),
            other => Err(Diagnostic { line: lineno, col, message: format!("unknown declaration `{other}`") }),
        };
        if let Err(d) = result {
            diags.push(d);
        }
    }
    let name = match name {
        Some(n) => n,
        None => {
            diags.push(Diagnostic { line: 1, col: 1, message: "missing `graph NAME` header".into() });
            String::new()
        }
    };

    let mut index: HashMap<String, VertexId> = HashMap::new();
    let mut names = Vec::new();
    let mut locations = Locations::default();
    for (v, line, col) in vertices {
        if index.contains_key(&v) {
            diags.push(Diagnostic { line, col, message: format!("duplicate vertex `{v}`") });
            continue;
        }
        index.insert(v.clone(), VertexId(names.len()));
        names.push(v);
        locations.vertices.push((line, col));
    }
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut classes = Vec::new();
    for d in edges {
        if seen.insert(d.id.clone(), ()).is_some() {
            diags.push(Diagnostic {
                line: d.line,
                col: d.col,
                message: format!("duplicate edge identifier `{}`", d.id),
            });
            continue;
        }
        let mut endpoint = |(v, col): &(String, usize)| match index.get(v) {
            Some(&id) => Some(id),
            None => {
                diags.push(Diagnostic {
                    line: d.line,
                    col: *col,
                    message: format!("undeclared vertex `{v}`"),
                });
                None
            }
        };
        let (s, t) = (endpoint(&d.src), endpoint(&d.tgt));
        if let (Some(source), Some(target)) = (s, t) {
            classes.push(EdgeClass { id: d.id, source, target, multiplicity: d.mult });
            locations.classes.push((d.line, d.col));
        }
    }
    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line, d.col));
        return Err(Error::Parse(diags));
    }
    let graph = Graph::new(names, classes)?;
    Ok(GraphDocument { name, graph, locations })
}

pub fn print_graph(name: &str, g: &Graph) -> String {
    let mut s = format!("graph {name}\n");
    if g.vertex_count() > 0 {
        s.push_str(&format!("vertex {}\n", g.vertex_names().join(", ")));
    }
    for c in g.classes() {
        let mult = match c.multiplicity {
            Multiplicity::Finite(1) => String::new(),
            Multiplicity::Finite(k) => format!(" * {k}"),
            Multiplicity::Infinite => " * inf".into(),
        };
        s.push_str(&format!(
            "edge {}{mult}: {} -> {}\n",
            c.id,
            g.vertex_name(c.source),
            g.vertex_name(c.target)
        ));
    }
    s
}

impl fmt::Display for GraphDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_graph(&self.name, &self.graph))
    }
}

/// Parse `split v: {e1,e2} | {e3}` lines. Items are class names (the whole
/// class) or `cls[n]` (a single edge of a finite class).
pub fn parse_partition(g: &Graph, text: &str) -> Result<OutSplitPartition> {
    let mut diags = Vec::new();
    let mut p = OutSplitPartition::trivial();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut fail = |message: String| {
            diags.push(Diagnostic { line, col: 1, message });
        };
        let Some(rest) = body.strip_prefix("split") else {
            fail("expected `split v: {...} | {...}`".into());
            continue;
        };
        let Some((v, blocks)) = rest.split_once(':') else {
            fail("expected `:` after the vertex".into());
            continue;
        };
        let Some(v) = g.vertex(v.trim()) else {
            fail(format!("unknown vertex `{}`", v.trim()));
            continue;
        };
        let mut parsed = Vec::new();
        let mut ok = true;
        for block in blocks.split('|') {
            let block = block.trim();
            let Some(inner) = block.strip_prefix('{').and_then(|b| b.strip_suffix('}')) else {
                fail(format!("malformed block `{block}`"));
                ok = false;
                break;
            };
            let mut items = Vec::new();
            for item in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let parsed_item = if item.ends_with(']') {
                    parse_edge(g, item).map(BlockItem::Edge)
                } else {
                    g.class_by_name(item)
                        .map(BlockItem::Class)
                        .ok_or_else(|| Error::Input(format!("unknown edge class `{item}`")))
                };
                match parsed_item {
                    Ok(it) => items.push(it),
                    Err(e) => {
                        fail(e.to_string());
                        ok = false;
                    }
                }
            }
            parsed.push(items);
        }
        if ok {
            if p.blocks.contains_key(&v) {
                fail(format!("vertex `{}` is split twice", g.vertex_name(v)));
            } else {
                p.blocks.insert(v, parsed);
            }
        }
    }
    if diags.is_empty() {
        Ok(p)
    } else {
        Err(Error::Parse(diags))
    }
}

pub fn print_partition(g: &Graph, p: &OutSplitPartition) -> String {
    let mut s = String::new();
    for (&v, blocks) in &p.blocks {
        let parts: Vec<String> = blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b
                    .iter()
                    .map(|it| match *it {
                        BlockItem::Class(c) => g.class(c).id.clone(),
                        BlockItem::Edge(e) => format!("{}[{}]", g.class(e.class).id, e.index),
                    })
                    .collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        s.push_str(&format!("split {}: {}\n", g.vertex_name(v), parts.join(" | ")));
    }
    s
}
