//! `oeg`: command line front end.
//!
//! Exit codes: 0 success or "yes", 1 a well-formed "no", 2 bad input.

use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oeg_core::boundary::{boundary_census, is_isolated};
use oeg_core::dsl::{parse_graph, parse_partition, print_graph, GraphDocument};
use oeg_core::dynamics::{
    conjugate_pseudogroup, default_search_bound, extend_cocycles, search_oe_witness, verify_extended,
    verify_oe_witness, verify_pseudogroup_element, EquationFailure, OeReport, SearchOutcome, Side, Table,
};
use oeg_core::groupoid::{compose, isotropy, make_element, principality_report, TrivialIsotropyPoint};
use oeg_core::invariants::{describe_witness, det_invariant, invariant_report};
use oeg_core::json::{element_from_json, element_to_json, witness_from_json, witness_to_json};
use oeg_core::moves::{amplified_transitive_closure, amplify, decide_amplified_oe, out_split, saturate};
use oeg_core::text::{
    parse_cylinder, parse_element, parse_germ, parse_path, parse_point, print_element, print_germ,
    print_loop, print_point,
};
use oeg_core::weyl::{germ_equivalent, germ_make, phi_bijectivity_check, winding};
use oeg_core::{Census, Error, Graph};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "oeg", version, about = "Boundary dynamics and orbit equivalence of directed graphs")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant report: condition (L), singular vertices, boundary, isotropy, det(I - A).
    Info { graph: PathBuf },
    /// List the boundary points; exits 1 when the boundary is infinite.
    Census { graph: PathBuf },
    /// Apply the shift `n` times to a boundary point.
    Shift {
        graph: PathBuf,
        point: String,
        #[arg(short, long, default_value_t = 1)]
        n: usize,
    },
    /// Check an orbit equivalence witness.
    VerifyOe { e: PathBuf, f: PathBuf, witness: PathBuf },
    /// Search for a witness with cocycle values up to a bound.
    SearchOe {
        e: PathBuf,
        f: PathBuf,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Extend the one-step cocycles of a witness to `n` steps and check them.
    ExtendCocycles {
        e: PathBuf,
        f: PathBuf,
        witness: PathBuf,
        #[arg(short, long)]
        n: usize,
    },
    /// Check a pseudogroup element file.
    VerifyPseudo { graph: PathBuf, element: PathBuf },
    /// Transport a pseudogroup element on `e` along a witness to `f`.
    ConjugatePseudo { e: PathBuf, f: PathBuf, witness: PathBuf, element: PathBuf },
    /// Groupoid elements, composition, isotropy and principality.
    #[command(subcommand)]
    Groupoid(GroupoidCommand),
    /// Germs of normalizers, their equivalence and winding, and the map to the groupoid.
    #[command(subcommand)]
    Weyl(WeylCommand),
    /// Out-split, amplification, transitive closure and saturation.
    #[command(subcommand, name = "move")]
    Move(MoveCommand),
    /// Decide orbit equivalence of the amplified graphs; exits 1 when they differ.
    DecideAmplified { e: PathBuf, f: PathBuf },
    /// Print det(I - A).
    Det { graph: PathBuf },
}

#[derive(Subcommand)]
enum GroupoidCommand {
    /// The element `(x, m − n, y)` given `σ^m x = σ^n y`.
    Make { graph: PathBuf, x: String, m: usize, n: usize, y: String },
    /// Compose two elements written `(x | k | y)`.
    Compose { graph: PathBuf, first: String, second: String },
    /// The isotropy group at a point.
    Isotropy { graph: PathBuf, point: String },
    /// Whether the groupoid is topologically principal; exits 1 when it is not.
    Principality {
        graph: PathBuf,
        /// Also find a point with trivial isotropy in this cylinder.
        #[arg(long)]
        cylinder: Option<String>,
    },
}

#[derive(Subcommand)]
enum WeylCommand {
    /// The germ of `νz ↦ μz` at `x`.
    Germ { graph: PathBuf, mu: String, nu: String, x: String },
    /// Whether two germs `[μ | ν | x]` are equivalent; exits 1 when not.
    Equiv { graph: PathBuf, first: String, second: String },
    /// Winding number of two germs at an isolated periodic point.
    Winding { graph: PathBuf, first: String, second: String },
    /// Check that germ classes match groupoid elements; exits 1 on a mismatch.
    PhiCheck {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum MoveCommand {
    /// Out-split along a partition file.
    OutSplit { graph: PathBuf, partition: PathBuf },
    /// Replace every edge set between two vertices by infinitely many edges.
    Amplify { graph: PathBuf },
    /// Amplified transitive closure.
    Tclose { graph: PathBuf },
    /// Add an infinite class parallel to a path.
    Saturate { graph: PathBuf, path: String },
}

/// Text and JSON renderings of a result, plus its exit status.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn yes(text: impl Into<String>, json: Value) -> Output {
        Output { text: text.into(), json, ok: true }
    }

    fn answer(ok: bool, text: impl Into<String>, json: Value) -> Output {
        Output { text: text.into(), json, ok }
    }
}

enum Failure {
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

type Run<T> = Result<T, Failure>;

fn read(path: &FsPath) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &FsPath) -> Run<GraphDocument> {
    let text = read(path)?;
    parse_graph(&text).map_err(|e| match e {
        Error::Parse(d) => {
            Failure::Io(d.iter().map(|x| format!("{}:{x}", path.display())).collect::<Vec<_>>().join("\n"))
        }
        other => Failure::Core(other),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else if !out.text.is_empty() {
                println!("{}", out.text.trim_end());
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            // A failed precondition or an impossible composition answers the
            // question asked; everything else is bad input.
            match e {
                Error::Precondition(_) | Error::Composition(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cmd: &Command) -> Run<Output> {
    match cmd {
        Command::Info { graph } => {
            let doc = load(graph)?;
            let mut report = invariant_report(&doc.graph);
            report.name = Some(doc.name);
            Ok(Output::yes(report.to_string(), report.to_json()))
        }
        Command::Census { graph } => census(&load(graph)?.graph),
        Command::Shift { graph, point, n } => {
            let g = load(graph)?.graph;
            let x = parse_point(&g, point)?;
            let y = x.shift(&g, *n)?;
            let s = print_point(&g, &y);
            Ok(Output::yes(s.clone(), json!({"point": s})))
        }
        Command::VerifyOe { e, f, witness } => {
            let (e, f) = (load(e)?.graph, load(f)?.graph);
            let w = witness_from_json(&e, &f, &read(witness)?)?;
            Ok(oe_report(&e, &f, &verify_oe_witness(&w)?, "witness verifies"))
        }
        Command::SearchOe { e, f, bound } => {
            let (e, f) = (load(e)?.graph, load(f)?.graph);
            let bound = match bound {
                Some(b) => *b,
                None => default_search_bound(&e, &f)?,
            };
            match search_oe_witness(&e, &f, bound)? {
                SearchOutcome::Found(w) => {
                    let j = witness_to_json(&w);
                    Ok(Output::yes(table_file(&j), j))
                }
                SearchOutcome::NoneAtBound => Ok(Output::answer(
                    false,
                    format!("no witness with cocycle values at most {bound}"),
                    json!({"found": false, "bound": bound}),
                )),
            }
        }
        Command::ExtendCocycles { e, f, witness, n } => {
            let (e, f) = (load(e)?.graph, load(f)?.graph);
            let w = witness_from_json(&e, &f, &read(witness)?)?;
            let c = extend_cocycles(&w, *n)?;
            let report = verify_extended(&w, &c)?;
            let mut out = oe_report(&e, &f, &report, &format!("extended equations hold for n = {n}"));
            let tables = |g: &Graph, k: &Table, l: &Table| -> Vec<(String, u64, u64)> {
                k.iter().map(|(x, &kv)| (print_point(g, x), kv, l[x])).collect()
            };
            let fwd = tables(&e, &c.k, &c.l);
            let bwd = tables(&f, &c.kp, &c.lp);
            let mut text = format!("n = {n}\nk_n, l_n on the first graph:\n");
            for (x, k, l) in &fwd {
                text.push_str(&format!("  {x}  k={k} l={l}\n"));
            }
            text.push_str("k'_n, l'_n on the second graph:\n");
            for (x, k, l) in &bwd {
                text.push_str(&format!("  {x}  k={k} l={l}\n"));
            }
            out.text = text + &out.text;
            let rows = |t: &[(String, u64, u64)]| -> Vec<Value> {
                t.iter().map(|(x, k, l)| json!({"point": x, "k": k, "l": l})).collect()
            };
            out.json["n"] = json!(n);
            out.json["forward"] = json!(rows(&fwd));
            out.json["backward"] = json!(rows(&bwd));
            Ok(out)
        }
        Command::VerifyPseudo { graph, element } => {
            let g = load(graph)?.graph;
            let p = element_from_json(&g, &read(element)?)?;
            let ok = verify_pseudogroup_element(&p)?;
            let text = if ok { "pseudogroup element" } else { "not a pseudogroup element" };
            Ok(Output::answer(ok, text, json!({"valid": ok})))
        }
        Command::ConjugatePseudo { e, f, witness, element } => {
            let (e, f) = (load(e)?.graph, load(f)?.graph);
            let w = witness_from_json(&e, &f, &read(witness)?)?;
            let p = element_from_json(&e, &read(element)?)?;
            let j = element_to_json(&conjugate_pseudogroup(&w, &p)?);
            Ok(Output::yes(table_file(&j), j))
        }
        Command::Groupoid(c) => groupoid(c),
        Command::Weyl(c) => weyl(c),
        Command::Move(c) => moves(c),
        Command::DecideAmplified { e, f } => {
            let (de, df) = (load(e)?, load(f)?);
            let d = decide_amplified_oe(&de.graph, &df.graph);
            let pairs: Vec<(String, String)> = d
                .bijection
                .iter()
                .flatten()
                .enumerate()
                .map(|(v, w)| (de.graph.vertex_names()[v].clone(), df.graph.vertex_name(*w).to_string()))
                .collect();
            let text = if d.equivalent {
                let m: Vec<String> = pairs.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                format!("equivalent: {}", m.join(", "))
            } else {
                "not equivalent: the amplified transitive closures are not isomorphic".to_string()
            };
            let bij: serde_json::Map<String, Value> = pairs.into_iter().map(|(a, b)| (a, json!(b))).collect();
            Ok(Output::answer(d.equivalent, text, json!({"equivalent": d.equivalent, "bijection": bij})))
        }
        Command::Det { graph } => {
            let d = det_invariant(&load(graph)?.graph)?;
            Ok(Output::yes(d.to_string(), json!({"det": d as i64})))
        }
    }
}

/// A witness or element file with one table row per line.
fn table_file(v: &Value) -> String {
    let obj = v.as_object().expect("tables are objects");
    let fields: Vec<String> = obj
        .iter()
        .map(|(key, rows)| {
            let rows = rows.as_array().expect("tables hold arrays");
            if rows.is_empty() {
                return format!("  {}: []", Value::from(key.as_str()));
            }
            let lines: Vec<String> = rows.iter().map(|r| format!("    {r}")).collect();
            format!("  {}: [\n{}\n  ]", Value::from(key.as_str()), lines.join(",\n"))
        })
        .collect();
    format!("{{\n{}\n}}", fields.join(",\n"))
}

fn census(g: &Graph) -> Run<Output> {
    match boundary_census(g) {
        Census::Finite(points) => {
            let shown: Vec<String> = points.iter().map(|x| print_point(g, x)).collect();
            Ok(Output::yes(shown.join("\n"), json!({"finite": true, "points": shown})))
        }
        Census::Infinite(w) => {
            let why = describe_witness(g, &w);
            Ok(Output::answer(
                false,
                format!("boundary is infinite: {why}"),
                json!({"finite": false, "witness": why}),
            ))
        }
    }
}

fn oe_report(e: &Graph, f: &Graph, r: &OeReport, ok_text: &str) -> Output {
    let rows: Vec<(String, String, String)> = r
        .failures
        .iter()
        .map(|fail| {
            let (side, g, other) = match fail.side {
                Side::Forward => ("forward", e, f),
                Side::Backward => ("backward", f, e),
            };
            let detail = match &fail.failure {
                EquationFailure::Mismatch { lhs, rhs } => {
                    format!("{} != {}", print_point(other, lhs), print_point(other, rhs))
                }
                EquationFailure::TooShort => "a shift exceeds the length of a finite point".to_string(),
            };
            (side.to_string(), print_point(g, &fail.point), detail)
        })
        .collect();
    let text = if r.ok {
        ok_text.to_string()
    } else {
        let noun = if rows.len() == 1 { "failure" } else { "failures" };
        let mut t = format!("{} {noun}\n", rows.len());
        for (side, x, d) in &rows {
            t.push_str(&format!("  {side} at {x}: {d}\n"));
        }
        t
    };
    let failures: Vec<Value> =
        rows.iter().map(|(s, x, d)| json!({"side": s, "point": x, "detail": d})).collect();
    Output::answer(r.ok, text, json!({"ok": r.ok, "failures": failures}))
}

fn groupoid(c: &GroupoidCommand) -> Run<Output> {
    match c {
        GroupoidCommand::Make { graph, x, m, n, y } => {
            let g = load(graph)?.graph;
            let (px, py) = (parse_point(&g, x)?, parse_point(&g, y)?);
            if px.shift(&g, *m)? != py.shift(&g, *n)? {
                return Ok(Output::answer(
                    false,
                    format!("σ^{m}(x) and σ^{n}(y) differ"),
                    json!({"element": Value::Null}),
                ));
            }
            let el = make_element(&g, &px, *m, *n, &py)?;
            let (wm, wn) = el.witness();
            let s = print_element(&g, &el);
            Ok(Output::yes(
                format!("{s}\nwitness: m={wm} n={wn}"),
                json!({"element": s, "k": el.k(), "m": wm, "n": wn}),
            ))
        }
        GroupoidCommand::Compose { graph, first, second } => {
            let g = load(graph)?.graph;
            let a = parse_element(&g, first)?;
            let b = parse_element(&g, second)?;
            let s = print_element(&g, &compose(&g, &a, &b)?);
            Ok(Output::yes(s.clone(), json!({"element": s})))
        }
        GroupoidCommand::Isotropy { graph, point } => {
            let g = load(graph)?.graph;
            let iso = isotropy(&parse_point(&g, point)?);
            Ok(Output::yes(iso.to_string(), json!({"d": iso.d})))
        }
        GroupoidCommand::Principality { graph, cylinder } => {
            let g = load(graph)?.graph;
            let z = cylinder.as_deref().map(|s| parse_cylinder(&g, s)).transpose()?;
            let r = principality_report(&g, z.as_ref());
            let mut text = String::new();
            let mut j = json!({"principal": r.principal});
            match &r.witness {
                None => text.push_str("topologically principal\n"),
                Some(u) => {
                    let x = print_point(&g, u.range());
                    let d = isotropy(u.range()).d;
                    text.push_str(&format!(
                        "not topologically principal: the unit at {x} is isolated with isotropy {d}Z\n"
                    ));
                    j["witness"] = json!({"point": x, "isotropy": d});
                }
            }
            if let Some(found) = &r.in_cylinder {
                match found {
                    TrivialIsotropyPoint::Found(x) => {
                        let s = print_point(&g, x);
                        text.push_str(&format!("trivial isotropy at {s}\n"));
                        j["trivialIsotropyPoint"] = json!(s);
                    }
                    TrivialIsotropyPoint::NotRepresentable => {
                        text.push_str("trivial isotropy only at aperiodic points of the cylinder\n");
                        j["trivialIsotropyPoint"] = Value::Null;
                    }
                }
            }
            if let Some(w) = oeg_core::graph::condition_l(&g).witness {
                j["loopWithoutExit"] = json!(print_loop(&g, &w));
            }
            Ok(Output::answer(r.principal, text, j))
        }
    }
}

fn weyl(c: &WeylCommand) -> Run<Output> {
    match c {
        WeylCommand::Germ { graph, mu, nu, x } => {
            let g = load(graph)?.graph;
            let germ = germ_make(&g, &parse_path(&g, mu)?, &parse_path(&g, nu)?, &parse_point(&g, x)?)?;
            let s = print_germ(&g, &germ);
            let v = print_point(&g, germ.apply());
            Ok(Output::yes(
                format!("{s}\nvalue: {v}\ncocycle: {}", germ.cocycle()),
                json!({"germ": s, "value": v, "cocycle": germ.cocycle()}),
            ))
        }
        WeylCommand::Equiv { graph, first, second } => {
            let g = load(graph)?.graph;
            let (a, b) = (parse_germ(&g, first)?, parse_germ(&g, second)?);
            let eq = germ_equivalent(&g, &a, &b);
            let text = if eq { "equivalent" } else { "not equivalent" };
            Ok(Output::answer(eq, text, json!({"equivalent": eq})))
        }
        WeylCommand::Winding { graph, first, second } => {
            let g = load(graph)?.graph;
            let (a, b) = (parse_germ(&g, first)?, parse_germ(&g, second)?);
            if a.point() != b.point() || a.apply() != b.apply() {
                return Err(Error::Input("winding needs germs with the same point and value".into()).into());
            }
            if !is_isolated(&g, a.point()) {
                return Err(Error::Input("winding needs an isolated point".into()).into());
            }
            let w = winding(&g, &a, &b)?;
            Ok(Output::yes(w.to_string(), json!({"winding": w})))
        }
        WeylCommand::PhiCheck { graph, bound } => {
            let g = load(graph)?.graph;
            let r = phi_bijectivity_check(&g, *bound);
            let ok = r.bijective();
            let mut text = format!(
                "points: {}{}\ngerms: {}\nclasses: {}\nelements: {}\nwinding checks: {}\n",
                r.points,
                if r.complete { "" } else { " (sample)" },
                r.germs,
                r.classes,
                r.elements,
                r.winding_checks
            );
            text.push_str(if ok { "bijective\n" } else { "not bijective\n" });
            for v in &r.violations {
                text.push_str(&format!("  {v}\n"));
            }
            Ok(Output::answer(
                ok,
                text,
                json!({
                    "bijective": ok,
                    "complete": r.complete,
                    "points": r.points,
                    "germs": r.germs,
                    "classes": r.classes,
                    "elements": r.elements,
                    "windingChecks": r.winding_checks,
                    "violations": r.violations,
                }),
            ))
        }
    }
}

fn graph_output(name: &str, g: &Graph) -> Output {
    let text = print_graph(name, g);
    let classes: Vec<Value> = g
        .classes()
        .iter()
        .map(|c| {
            let mult = match c.multiplicity.finite() {
                Some(k) => json!(k),
                None => json!("inf"),
            };
            json!({
                "id": c.id,
                "source": g.vertex_name(c.source),
                "target": g.vertex_name(c.target),
                "multiplicity": mult,
            })
        })
        .collect();
    Output::yes(text, json!({"name": name, "vertices": g.vertex_names(), "edges": classes}))
}

fn moves(c: &MoveCommand) -> Run<Output> {
    match c {
        MoveCommand::OutSplit { graph, partition } => {
            let doc = load(graph)?;
            let p = parse_partition(&doc.graph, &read(partition)?).map_err(|e| match e {
                Error::Parse(d) => Failure::Io(
                    d.iter().map(|x| format!("{}:{x}", partition.display())).collect::<Vec<_>>().join("\n"),
                ),
                other => Failure::Core(other),
            })?;
            Ok(graph_output(&format!("{}_split", doc.name), &out_split(&doc.graph, &p)?))
        }
        MoveCommand::Amplify { graph } => {
            let doc = load(graph)?;
            Ok(graph_output(&format!("{}_amp", doc.name), &amplify(&doc.graph)))
        }
        MoveCommand::Tclose { graph } => {
            let doc = load(graph)?;
            Ok(graph_output(&format!("{}_tc", doc.name), &amplified_transitive_closure(&doc.graph)))
        }
        MoveCommand::Saturate { graph, path } => {
            let doc = load(graph)?;
            let mu = parse_path(&doc.graph, path)?;
            let (f, _) = saturate(&doc.graph, &mu)?;
            Ok(graph_output(&format!("{}_sat", doc.name), &f))
        }
    }
}
