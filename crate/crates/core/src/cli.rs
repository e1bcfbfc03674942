//! The `ghnclab` command line.
//!
//! Machine output goes to stdout, diagnostics to stderr. Exit status is 0 on
//! success, 1 when an inequality is violated, 2 on usage, parse or
//! validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ghnc::{batch_run, ghnc_check_graphs, oracle_agrees, BatchConfig};
use crate::gog::GraphOfGroups;
use crate::hall::hall_completion;
use crate::phi::{build_phi_factors, classify, WeightedGraph};
use crate::stallings::{intersection, StallingsGraph, SubgroupSpec};

/// Environment variable capping the number of batch worker threads.
pub const THREADS_ENV: &str = "GHNCLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ghnclab", version, about = "Stallings graphs, Hanna Neumann checks and graphs of free groups")]
struct Cli {
    /// Write a Graphviz rendering of the main graph to this path
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Print JSON instead of text where both exist
    #[arg(long, global = true)]
    json: bool,
    /// Override the seed of a batch configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on stdout; the exit status still reports the outcome
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fold a subgroup and print its core graph statistics
    Fold { subgroup: PathBuf },
    /// Intersect two subgroups of the same free group
    Intersect { u: PathBuf, v: PathBuf },
    /// Check the Geometric Hanna Neumann inequality for two subgroups
    Ghnc {
        u: PathBuf,
        v: PathBuf,
        /// Cross-check against the brute-force oracle with words up to this length
        #[arg(long, value_name = "L")]
        oracle: Option<usize>,
    },
    /// Build the weighted graph of a graph of groups
    Phi { gog: PathBuf },
    /// Balanced / solvable classification of a graph of groups
    Classify { gog: PathBuf },
    /// Presentation of the GBS group of a weighted graph
    Gbs { weighted_graph: PathBuf },
    /// Marshall Hall completion of a subgroup
    Hall { subgroup: PathBuf },
    /// Euler characteristic and predicted L²-Betti numbers
    Euler { gog: PathBuf },
    /// Run a seeded batch of random inequality checks
    Batch { config: PathBuf },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    quiet: bool,
    json: bool,
    dot: Option<PathBuf>,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> Result<()> {
        if !self.quiet {
            self.out
                .write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { self.out.write_all(b"\n") })
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        Ok(())
    }

    fn print_json<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.print(&text)
    }

    fn write_dot(&self, dot: impl FnOnce() -> String) -> Result<()> {
        if let Some(path) = &self.dot {
            std::fs::write(path, dot()).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// A failure carrying the file it came from, for diagnostics.
struct Failure {
    path: Option<PathBuf>,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { path: None, error }
    }
}

fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |error| Failure {
        path: Some(path.to_path_buf()),
        error,
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::from(Error::io(path, e)))
}

fn load_subgroup(path: &Path) -> std::result::Result<(SubgroupSpec, StallingsGraph), Failure> {
    let spec = SubgroupSpec::parse(&read(path)?).map_err(at(path))?;
    let graph = spec.graph().map_err(at(path))?;
    Ok((spec, graph))
}

fn load_gog(path: &Path) -> std::result::Result<GraphOfGroups, Failure> {
    let g = GraphOfGroups::from_json(&read(path)?).map_err(at(path))?;
    g.validate().into_result().map_err(at(path))?;
    Ok(g)
}

fn diagnostic(f: &Failure) -> String {
    let prefix = f.path.as_ref().map(|p| p.display().to_string());
    let located = |line: usize, column: usize| match &prefix {
        Some(p) => format!("{p}:{line}:{column}"),
        None => format!("{line}:{column}"),
    };
    match &f.error {
        Error::Parse {
            line,
            column,
            token,
            message,
            ..
        } => format!("error: {}: {message} near {token:?}", located(*line, *column)),
        Error::Json(e) if e.line() > 0 => format!("error: {}: {e}", located(e.line(), e.column())),
        other => match &prefix {
            Some(p) => format!("error: {p}: {other}"),
            None => format!("error: {other}"),
        },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        out: stdout,
        quiet: cli.quiet,
        json: cli.json,
        dot: cli.dot.clone(),
    };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", diagnostic(&f));
            2
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> std::result::Result<i32, Failure> {
    match &cli.command {
        Command::Fold { subgroup } => {
            let (spec, g) = load_subgroup(subgroup)?;
            let basis: Vec<String> = g.basis().iter().map(|w| spec.alphabet.format(w.letters())).collect();
            if io.json {
                io.print_json(&json!({
                    "alphabet": spec.alphabet.rank(),
                    "vertices": g.num_vertices(),
                    "edges": g.num_edges(),
                    "rank": g.rank(),
                    "reduced_rank": g.reduced_rank(),
                    "index": g.index_in_ambient(),
                    "basis": basis,
                }))?;
            } else {
                let index = match g.index_in_ambient().finite() {
                    Some(n) => n.to_string(),
                    None => "infinite".into(),
                };
                io.print(&format!(
                    "vertices {}\nedges {}\nrank {}\nreduced_rank {}\nindex {}\nbasis {}\n",
                    g.num_vertices(),
                    g.num_edges(),
                    g.rank(),
                    g.reduced_rank(),
                    index,
                    basis.join(" ")
                ))?;
            }
            io.write_dot(|| g.to_dot())?;
            Ok(0)
        }
        Command::Intersect { u, v } => {
            let (su, gu) = load_subgroup(u)?;
            let (_, gv) = load_subgroup(v)?;
            let i = intersection(&gu, &gv).map_err(at(v))?;
            let basis: Vec<String> = i.basis().iter().map(|w| su.alphabet.format(w.letters())).collect();
            if io.json {
                io.print_json(&json!({
                    "rank": i.rank(),
                    "reduced_rank": i.reduced_rank(),
                    "basis": basis,
                }))?;
            } else {
                io.print(&format!("rank {}\nbasis {}\n", i.rank(), basis.join(" ")))?;
            }
            io.write_dot(|| i.to_dot())?;
            Ok(0)
        }
        Command::Ghnc { u, v, oracle } => {
            let (_, gu) = load_subgroup(u)?;
            let (_, gv) = load_subgroup(v)?;
            let report = ghnc_check_graphs(&gu, &gv).map_err(at(v))?;
            let mut value = serde_json::to_value(&report).map_err(Error::from)?;
            if let Some(l) = oracle {
                if *l == 0 {
                    return Err(Error::Config("--oracle needs a positive length".into()).into());
                }
                let summary = oracle_agrees(&gu, &gv, *l)?;
                value["oracle"] = serde_json::to_value(summary).map_err(Error::from)?;
            }
            io.print_json(&value)?;
            Ok(if report.holds && report.classical_holds { 0 } else { 1 })
        }
        Command::Phi { gog } => {
            let g = load_gog(gog)?;
            let phi = build_phi_factors(&g).map_err(at(gog))?;
            if io.json {
                io.print_json(&json!({
                    "text": phi.to_text(),
                    "balanced": phi.is_balanced(),
                    "solvable": phi.is_solvable(),
                }))?;
            } else {
                io.print(&phi.to_text())?;
            }
            io.write_dot(|| phi.to_dot())?;
            Ok(0)
        }
        Command::Classify { gog } => {
            let g = load_gog(gog)?;
            let report = classify(&g).map_err(at(gog))?;
            io.print_json(&report)?;
            io.write_dot(|| g.to_dot())?;
            Ok(0)
        }
        Command::Gbs { weighted_graph } => {
            let w = WeightedGraph::parse(&read(weighted_graph)?).map_err(at(weighted_graph))?;
            let g = w.gbs_complex().map_err(at(weighted_graph))?;
            let p = g.presentation().map_err(at(weighted_graph))?;
            if io.json {
                io.print_json(&json!({
                    "presentation": p.to_string(),
                    "chi": g.euler_characteristic(),
                    "graph_of_groups": serde_json::from_str::<serde_json::Value>(&g.to_json()).map_err(Error::from)?,
                }))?;
            } else {
                io.print(&p.to_string())?;
            }
            io.write_dot(|| g.to_dot())?;
            Ok(0)
        }
        Command::Hall { subgroup } => {
            let (spec, g) = load_subgroup(subgroup)?;
            let c = hall_completion(&g);
            let basis: Vec<String> = c
                .complement_basis
                .iter()
                .map(|w| spec.alphabet.format(w.letters()))
                .collect();
            io.print_json(&json!({
                "index": c.index,
                "cover_rank": c.cover.rank(),
                "core_rank": g.rank(),
                "complement_basis": basis,
                "embedded_core": c.embedded_core,
            }))?;
            io.write_dot(|| c.cover.to_dot())?;
            Ok(0)
        }
        Command::Euler { gog } => {
            let g = load_gog(gog)?;
            let p = g.predicted_l2_betti();
            io.print_json(&json!({
                "chi": g.euler_characteristic(),
                "b0_predicted": p.b0,
                "b1_predicted": p.b1,
                "b2_predicted": p.b2,
                "b2_status": p.b2_status,
                "conditional": p.conditional,
            }))?;
            io.write_dot(|| g.to_dot())?;
            Ok(0)
        }
        Command::Batch { config } => {
            let mut c = BatchConfig::from_json(&read(config)?).map_err(at(config))?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            let threads = match std::env::var(THREADS_ENV) {
                Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
                    Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
                })?),
                Err(_) => None,
            };
            let outcome = batch_run(&c, threads)?;
            io.print_json(&outcome.aggregate)?;
            Ok(if outcome.aggregate.has_violation() { 1 } else { 0 })
        }
    }
}
