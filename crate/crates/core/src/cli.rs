//! Command-line front end for `gkmq`.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or I/O error.
//! Errors go to stderr as a single JSON object `{"error": kind, "message": ...}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::CohomClass;
use crate::cp1::{lattice_index, verify_cp1_description, verify_cp1_presentation};
use crate::decomposition::{
    decompose, decompose_even, verify_graded_ranks, verify_surjective_decomposition,
    verify_unique_decomposition, verify_vertex_quotient,
};
use crate::error::Error;
use crate::generators::{materialize, GeneratorSpec};
use crate::graph::{Family, GkmGraph};
use crate::ordinary::{betti, betti_permuted, closed_form, verify_ordinary_presentation};
use crate::relations::{
    verify_even_relations, verify_iota_injective, verify_iota_star_correspondence,
    verify_odd_relations, CheckRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "gkmq",
    version,
    about = "GKM graphs of quadrics and CP¹: classes, relations, decompositions, Betti numbers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    Family::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// odd, even or cp1
    #[arg(long, value_parser = parse_family, requires = "n")]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Graph JSON file (instead of --family/--n)
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a graph and write it as JSON (and optionally DOT)
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write a named generator class as JSON
    Class {
        #[command(flatten)]
        graph: GraphArgs,
        /// Generator spec, e.g. '{"kind":"Delta","subset":[3,4]}' or a path to one
        #[arg(long)]
        spec: Option<String>,
        /// Shorthand for the generator kind (M, Q, Delta, Mprime, Deltaprime, X, TauP, TauQ, AlphaConst)
        #[arg(long, conflicts_with = "spec")]
        kind: Option<String>,
        #[arg(long, requires = "kind")]
        vertex: Option<usize>,
        #[arg(long, requires = "kind", value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        axioms: bool,
        #[arg(long)]
        relations: bool,
        #[arg(long)]
        decomposition: bool,
        #[arg(long)]
        betti: bool,
        #[arg(long)]
        iota: bool,
        #[arg(long)]
        presentation: bool,
        /// Largest generator family checked for the disjoint-support relation
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Also write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the JSON report instead of the text summary
        #[arg(long)]
        json: bool,
    },
    /// Decompose a class over the module basis
    Decompose {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ordinary cohomology ranks and torsion
    Betti {
        #[command(flatten)]
        graph: GraphArgs,
        /// Largest topological degree (default: real dimension)
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Check the odd-to-even pullback correspondences and injectivity
    Iota {
        #[arg(long)]
        n: usize,
        /// Largest polynomial degree for the injectivity check
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        #[arg(long)]
        json: bool,
    },
    /// Write a graph in DOT format
    ExportDot {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Input(Error),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verification(_) => EXIT_FAILED,
            _ => EXIT_USAGE,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Usage(m) => json!({"error": "usage", "message": m}),
            Failure::Io(m) => json!({"error": "io", "message": m}),
            Failure::Input(e) => json!({"error": "input", "message": e.to_string()}),
            Failure::Verification(v) => json!({"error": "verification_failed", "failed": v}),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> CliResult<()> {
    fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, body: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, body),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn load_graph(a: &GraphArgs) -> CliResult<Arc<GkmGraph>> {
    match (&a.graph, a.family, a.n) {
        (Some(p), _, _) => Ok(Arc::new(GkmGraph::from_json(&read_json(p)?)?)),
        (None, Some(f), Some(n)) => Ok(Arc::new(GkmGraph::build(f, n)?)),
        _ => Err(Failure::Usage(
            "give --graph FILE or --family F --n N".into(),
        )),
    }
}

fn generator_spec(
    spec: &Option<String>,
    kind: &Option<String>,
    vertex: Option<usize>,
    subset: &Option<Vec<usize>>,
) -> CliResult<GeneratorSpec> {
    let v: Value = match (spec, kind) {
        (Some(s), _) => {
            let text = if Path::new(s).is_file() {
                read(Path::new(s))?
            } else {
                s.clone()
            };
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("generator spec: {e}")))?
        }
        (None, Some(k)) => json!({"kind": k, "vertex": vertex, "subset": subset}),
        (None, None) => return Err(Failure::Usage("give --spec or --kind".into())),
    };
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("generator spec: {e}")))
}

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    checks: Vec<CheckRecord>,
}

fn guarded(name: &'static str, f: impl FnOnce() -> crate::Result<Vec<CheckRecord>>) -> Suite {
    let checks =
        f().unwrap_or_else(|e| vec![CheckRecord::flag(name, format!("error: {e}"), false)]);
    Suite { name, checks }
}

#[derive(Clone, Copy, Default)]
struct Selection {
    axioms: bool,
    relations: bool,
    decomposition: bool,
    betti: bool,
    iota: bool,
    presentation: bool,
}

fn run_suites(
    g: &Arc<GkmGraph>,
    sel: Selection,
    bound: usize,
    seed: u64,
    trials: usize,
) -> Vec<Suite> {
    let (family, n) = (g.family(), g.n());
    let mut suites = Vec::new();
    if sel.axioms {
        let report = g.verify_axial_axioms();
        let mut checks: Vec<CheckRecord> = report
            .violations
            .iter()
            .map(|v| {
                let edges: Vec<String> = v
                    .edges()
                    .iter()
                    .map(|e| format!("{}->{}", e.src, e.dst))
                    .collect();
                CheckRecord::flag(
                    "axial_axioms",
                    format!("{:?} at {}", v, edges.join(", ")),
                    false,
                )
            })
            .collect();
        if checks.is_empty() {
            checks.push(CheckRecord::flag(
                "axial_axioms",
                format!("{} edges", g.num_edges()),
                true,
            ));
        }
        suites.push(Suite {
            name: "axioms",
            checks,
        });
    }
    if sel.relations {
        suites.push(guarded("relations", || match family {
            Family::Odd => verify_odd_relations(g, bound),
            Family::Even => verify_even_relations(g, bound),
            Family::Cp1 => verify_cp1_presentation(n),
        }));
    }
    if sel.decomposition {
        suites.push(guarded("decomposition", || match family {
            Family::Cp1 => Ok(vec![
                CheckRecord::flag(
                    "cp1_description",
                    format!("seed={seed}"),
                    verify_cp1_description(n, trials, seed)?,
                ),
                CheckRecord::flag(
                    "lattice_index",
                    format!("n={n}"),
                    lattice_index(n)? == n.into(),
                ),
            ]),
            _ => {
                let u = verify_unique_decomposition(g, trials, seed)?;
                let s = verify_surjective_decomposition(g, trials, seed)?;
                let mut out = vec![
                    CheckRecord::flag(
                        "decompose_recompose",
                        format!("{} trials", u.trials),
                        u.is_ok(),
                    ),
                    CheckRecord::flag(
                        "recompose_decompose",
                        format!("{} trials", s.trials),
                        s.is_ok(),
                    ),
                ];
                if family == Family::Odd {
                    for v in g.vertices() {
                        out.push(CheckRecord::flag(
                            "vertex_quotient",
                            format!("v={v}"),
                            verify_vertex_quotient(g, v)?,
                        ));
                    }
                }
                out.extend(verify_graded_ranks(g, 4)?);
                Ok(out)
            }
        }));
    }
    if sel.betti {
        suites.push(guarded("betti", || {
            let top = 2 * g.complex_dim() as u32;
            let t = betti(g, top);
            Ok(vec![
                CheckRecord::flag(
                    "closed_form",
                    format!("ranks {:?}", t.ranks()),
                    t == closed_form(family, n).table(top),
                ),
                CheckRecord::flag("torsion_free", String::new(), t.is_torsion_free()),
                CheckRecord::flag(
                    "permuted_order",
                    format!("seed={seed}"),
                    betti_permuted(g, top, seed) == t,
                ),
            ])
        }));
    }
    if sel.iota && family == Family::Odd && n >= 2 && g.is_canonical() {
        suites.push(guarded("iota", || {
            let mut out = verify_iota_star_correspondence(n)?;
            for d in 0..=4 {
                out.push(verify_iota_injective(n, d)?);
            }
            Ok(out)
        }));
    }
    if sel.presentation && family == Family::Odd && g.is_canonical() {
        suites.push(guarded("ordinary_presentation", || {
            verify_ordinary_presentation(n)
        }));
    }
    suites
}

fn failed(suites: &[Suite]) -> Vec<Value> {
    suites
        .iter()
        .flat_map(|s| {
            s.checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| json!({"suite": s.name, "check": c}))
        })
        .collect()
}

fn text_report(g: &GkmGraph, suites: &[Suite]) -> String {
    let mut s = format!("{}\n", g.display_name());
    for suite in suites {
        let bad = suite.checks.iter().filter(|c| !c.passed()).count();
        let verdict = if bad == 0 { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{verdict} {} ({} checks, {bad} failed)\n",
            suite.name,
            suite.checks.len()
        ));
        for c in suite.checks.iter().filter(|c| !c.passed()) {
            s.push_str(&format!("  {} {}\n", c.relation, c.instance));
        }
    }
    s
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Build { graph, out, dot } => {
            let g = load_graph(&graph)?;
            if let Some(d) = dot {
                write(&d, &g.export_dot())?;
            }
            emit(stdout, out.as_deref(), &pretty(&g.to_json()))
        }
        Command::Class {
            graph,
            spec,
            kind,
            vertex,
            subset,
            out,
        } => {
            let g = load_graph(&graph)?;
            let spec = generator_spec(&spec, &kind, vertex, &subset)?;
            let c = materialize(&g, &spec)?;
            emit(stdout, out.as_deref(), &pretty(&c.to_json()))
        }
        Command::Verify {
            graph,
            all,
            axioms,
            relations,
            decomposition,
            betti,
            iota,
            presentation,
            bound,
            seed,
            trials,
            report,
            json,
        } => {
            let g = load_graph(&graph)?;
            let any = axioms || relations || decomposition || betti || iota || presentation;
            let every = all || !any;
            let sel = Selection {
                axioms: every || axioms,
                relations: every || relations,
                decomposition: every || decomposition,
                betti: every || betti,
                iota: every || iota,
                presentation: every || presentation,
            };
            // Downstream suites assume a well-formed graph.
            let mut suites = run_suites(
                &g,
                Selection {
                    axioms: true,
                    ..Default::default()
                },
                bound,
                seed,
                trials,
            );
            let sound = failed(&suites).is_empty();
            if !sel.axioms {
                suites.clear();
            }
            if sound {
                suites.extend(run_suites(
                    &g,
                    Selection {
                        axioms: false,
                        ..sel
                    },
                    bound,
                    seed,
                    trials,
                ));
            }
            let bad = failed(&suites);
            let doc = json!({
                "graph": g.display_name(),
                "passed": bad.is_empty(),
                "suites": suites,
            });
            if let Some(p) = report {
                write(&p, &pretty(&doc))?;
            }
            let body = if json {
                pretty(&doc)
            } else {
                text_report(&g, &suites)
            };
            emit(stdout, None, &body)?;
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verification(Value::Array(bad)))
            }
        }
        Command::Decompose { graph, class, out } => {
            let g = load_graph(&graph)?;
            let c = CohomClass::from_json(&read_json(&class)?, Some(&g))?;
            if c.graph() != &g {
                return Err(Failure::Input(Error::GraphMismatch));
            }
            let report = c.verify();
            if !report.is_ok() {
                let edges: Vec<String> = report
                    .failures
                    .iter()
                    .map(|e| format!("{}->{}", e.src, e.dst))
                    .collect();
                return Err(Failure::Verification(json!({"invalid_class": edges})));
            }
            let d = match g.family() {
                Family::Even => decompose_even(&c),
                _ => decompose(&c),
            };
            match d {
                Ok(d) => emit(stdout, out.as_deref(), &pretty(&d.to_json())),
                Err(e @ Error::InternalDivisionFailure { .. }) => {
                    Err(Failure::Verification(json!(e.to_string())))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Betti {
            graph,
            max_degree,
            json,
        } => {
            let g = load_graph(&graph)?;
            let t = betti(&g, max_degree.unwrap_or(2 * g.complex_dim() as u32));
            let body = if json {
                pretty(&t.to_json())
            } else {
                format!("{}\n{t}", g.display_name())
            };
            emit(stdout, None, &body)?;
            if t.is_torsion_free() {
                Ok(())
            } else {
                Err(Failure::Verification(t.to_json()))
            }
        }
        Command::Iota {
            n,
            max_degree,
            json,
        } => {
            let mut checks = verify_iota_star_correspondence(n)?;
            for d in 0..=max_degree {
                checks.push(verify_iota_injective(n, d)?);
            }
            let suites = vec![Suite {
                name: "iota",
                checks,
            }];
            let bad = failed(&suites);
            let body = if json {
                pretty(&json!({"n": n, "passed": bad.is_empty(), "suites": suites}))
            } else {
                text_report(&GkmGraph::odd_quadric(n)?, &suites)
            };
            emit(stdout, None, &body)?;
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verification(Value::Array(bad)))
            }
        }
        Command::ExportDot { graph, out } => {
            let g = load_graph(&graph)?;
            emit(stdout, out.as_deref(), &g.export_dot())
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let _ = writeln!(
                stderr,
                "{}",
                Failure::Usage(e.to_string().trim().to_string()).to_json()
            );
            return EXIT_USAGE;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.to_json());
            f.exit_code()
        }
    }
}

/// Sizes the global thread pool from `GKMQ_THREADS` when set.
pub fn init_threads() {
    if let Some(k) = std::env::var("GKMQ_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::GeneratorKind;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("gkmq").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn build_counts() {
        let (code, out, _) = call(&["build", "--family", "odd", "--n", "3"]);
        assert_eq!(code, 0);
        let g = GkmGraph::from_json(&serde_json::from_str(&out).unwrap()).unwrap();
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.num_edges() / 2, 15);
        let (_, out, _) = call(&["build", "--family", "cp1", "--n", "4"]);
        assert_eq!(
            GkmGraph::from_json(&serde_json::from_str(&out).unwrap())
                .unwrap()
                .num_vertices(),
            2
        );
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = call(&["build", "--family", "even", "--n", "1"]);
        assert_eq!(code, EXIT_USAGE);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "input");
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(
            serde_json::from_str::<Value>(err.trim()).unwrap()["error"],
            "usage"
        );
        let (code, _, err) = call(&[
            "build",
            "--family",
            "odd",
            "--n",
            "2",
            "--out",
            "/nonexistent/dir/x.json",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(
            serde_json::from_str::<Value>(err.trim()).unwrap()["error"],
            "io"
        );
        assert_eq!(call(&["verify"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_passes() {
        let (code, out, _) = call(&["verify", "--family", "odd", "--n", "2", "--all"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().skip(1).all(|l| l.starts_with("PASS")));
        assert_eq!(
            call(&["verify", "--family", "even", "--n", "3", "--relations"]).0,
            0
        );
        assert_eq!(call(&["verify", "--family", "cp1", "--n", "3"]).0, 0);
    }

    #[test]
    fn betti_and_iota() {
        let (code, out, _) = call(&["betti", "--family", "even", "--n", "2", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let ranks: Vec<u64> = v["groups"]
            .as_array()
            .unwrap()
            .iter()
            .map(|g| g["rank"].as_u64().unwrap())
            .collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        let (code, out, _) = call(&["iota", "--n", "3", "--max-degree", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("PASS iota"));
    }

    #[test]
    fn class_specs() {
        let (code, out, _) = call(&[
            "class", "--family", "odd", "--n", "3", "--kind", "Delta", "--subset", "4,5,6",
        ]);
        assert_eq!(code, 0);
        let g = Arc::new(GkmGraph::odd_quadric(3).unwrap());
        let c = CohomClass::from_json(&serde_json::from_str(&out).unwrap(), Some(&g)).unwrap();
        assert_eq!(
            c,
            materialize(&g, &GeneratorSpec::on(GeneratorKind::Delta, &[4, 5, 6])).unwrap()
        );
        let (code, _, _) = call(&[
            "class", "--family", "odd", "--n", "3", "--kind", "Delta", "--subset", "1,6",
        ]);
        assert_eq!(code, EXIT_USAGE);
    }
}
