//! Command-line front end: `analyze`, `join`, `pst-search` and `bound-sweep`.
//!
//! Exit codes: 0 success, 2 precondition, domain or parse errors, 3 when a
//! closed form disagrees with the spectral oracle, 1 for I/O and numerical failures.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_sweep, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::graph::{
    build_expression, cocktail_party, complete, empty_graph, parse_expression, self_join, IteratedJoinSpec,
    WeightedGraph,
};
use crate::io::{analyze, read_graph, write_graph};
use crate::spectral::MatrixKind;
use crate::transfer::{double_cone_pst, iterated_join_analysis, join_pst, PSTCertificate};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "QWJOIN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qwjoin", version, about = "Quantum walks on graph joins: supports, periodicity, state transfer and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a vertex pair: supports, strong cospectrality, PST, periods.
    Analyze(AnalyzeArgs),
    /// Build a join, self-join or iterated join and write it as a graph file.
    Join(JoinArgs),
    /// Search a parameterised family for PST and print one JSON line per hit.
    PstSearch(SearchArgs),
    /// Sample F(t) = |U(X v Y,t)_uv| - |U(X,t)_uv| and write it as CSV.
    BoundSweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    A,
    L,
}

impl From<Kind> for MatrixKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::A => MatrixKind::A,
            Kind::L => MatrixKind::L,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Graph file (JSON).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Family name and parameters, e.g. `CP 6`, or an expression such as `C4 u O2`.
    #[arg(long, num_args = 1..)]
    family: Option<Vec<String>>,
}

impl GraphSource {
    fn load(&self) -> Result<(WeightedGraph, String)> {
        load(self.graph.as_ref(), self.family.as_ref())?.ok_or_else(|| Error::Parse("no graph given".into()))
    }
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct RightSource {
    /// Right operand of the join (JSON file).
    #[arg(long)]
    right: Option<PathBuf>,
    /// Right operand as a family or expression.
    #[arg(long, num_args = 1..)]
    right_family: Option<Vec<String>>,
}

fn load(file: Option<&PathBuf>, family: Option<&Vec<String>>) -> Result<Option<(WeightedGraph, String)>> {
    match (file, family) {
        (Some(p), _) => Ok(Some((read_graph(p)?, format!("file {}", p.display())))),
        (None, Some(words)) => {
            let text = words.join(" ");
            Ok(Some((build_expression(&text)?, text)))
        }
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    right: RightSource,
    /// Hamiltonian: adjacency (A) or Laplacian (L).
    #[arg(long, value_enum, ignore_case = true)]
    matrix: Kind,
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pair: Vec<usize>,
    /// Output file; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct JoinArgs {
    #[arg(long)]
    left: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    left_family: Option<Vec<String>>,
    #[command(flatten)]
    right: RightSource,
    /// Self-join `X^R` of the left graph.
    #[arg(long = "self", value_name = "R")]
    self_join: Option<usize>,
    /// Iterated join expression with alternating connectives, e.g. `O2 v K2 u O1 v K3`.
    #[arg(long)]
    iterated: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SearchFamily {
    /// `O_2 v O_n` (and `O_2 v K_n` for A), apexes 0 and 1.
    DoubleCone,
    /// `K_d` minus an edge, the non-adjacent pair.
    KMinusE,
    /// `CP(m) v O_n`, the antipodal pair 0 and 1.
    CpJoin,
    /// Connected threshold graphs, pairs within a part (Laplacian only).
    Threshold,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    family: SearchFamily,
    /// Hamiltonian: adjacency (A) or Laplacian (L).
    #[arg(long, value_enum, ignore_case = true)]
    matrix: Kind,
    /// Largest size parameter scanned.
    #[arg(long, default_value_t = 20)]
    max: usize,
    /// Largest number of parts (threshold family).
    #[arg(long, default_value_t = 3)]
    parts: usize,
    /// Write the JSON lines here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    right: RightSource,
    /// Hamiltonian: adjacency (A) or Laplacian (L).
    #[arg(long, value_enum, ignore_case = true)]
    matrix: Kind,
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pair: Vec<usize>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long)]
    csv: PathBuf,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qwjoin: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Join(a) => cmd_join(a),
        Command::PstSearch(a) => cmd_search(a),
        Command::BoundSweep(a) => cmd_sweep(a),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let (x, name) = a.source.load()?;
    let right = load(a.right.right.as_ref(), a.right.right_family.as_ref())?;
    let report = analyze(&x, &name, a.matrix.into(), a.pair[0], a.pair[1], right.as_ref().map(|(g, n)| (g, n.as_str())))?;
    emit(a.out.as_ref(), &(report.to_json()? + "\n"))
}

fn cmd_join(a: JoinArgs) -> Result<()> {
    let g = if let Some(text) = &a.iterated {
        let (parts, connectives) = parse_expression(text)?;
        IteratedJoinSpec::with_connectives(parts, &connectives)?.build()
    } else {
        let (left, _) = load(a.left.as_ref(), a.left_family.as_ref())?
            .ok_or_else(|| Error::Parse("join needs --left, --left-family or --iterated".into()))?;
        match (a.self_join, load(a.right.right.as_ref(), a.right.right_family.as_ref())?) {
            (Some(r), None) => self_join(&left, r)?,
            (None, Some((right, _))) => crate::graph::join(&left, &right),
            (Some(_), Some(_)) => return Err(Error::Parse("--self and a right operand are exclusive".into())),
            (None, None) => return Err(Error::Parse("join needs a right operand or --self".into())),
        }
    };
    write_graph(&a.out, &g)
}

#[derive(Debug, Serialize)]
struct Hit {
    family: &'static str,
    matrix: MatrixKind,
    params: Vec<(String, usize)>,
    pair: (usize, usize),
    tau: Option<f64>,
    tau_text: Option<String>,
    certificate: PSTCertificate,
}

impl Hit {
    fn new(family: &'static str, kind: MatrixKind, params: Vec<(&str, usize)>, cert: PSTCertificate) -> Self {
        Hit {
            family,
            matrix: kind,
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            pair: (cert.u, cert.v),
            tau: cert.tau,
            tau_text: cert.tau_exact.map(|t| t.to_string()),
            certificate: cert,
        }
    }
}

/// One search job: its parameters and the evaluation producing an optional hit.
type Job = Box<dyn Fn() -> Result<Option<Hit>> + Send + Sync>;

fn search_jobs(family: SearchFamily, kind: MatrixKind, max: usize, max_parts: usize) -> Result<Vec<Job>> {
    let mut jobs: Vec<Job> = Vec::new();
    match family {
        SearchFamily::DoubleCone => {
            for n in 1..=max {
                let partners: Vec<(&'static str, fn(usize) -> Result<WeightedGraph>)> = match kind {
                    MatrixKind::L => vec![("O", empty_graph)],
                    MatrixKind::A => vec![("O", empty_graph), ("K", complete)],
                };
                for (name, build) in partners {
                    jobs.push(Box::new(move || {
                        let r = double_cone_pst(&build(n)?, kind, None)?;
                        let label = if name == "O" { "n_empty" } else { "n_complete" };
                        Ok(r.pst.then(|| Hit::new("double-cone", kind, vec![(label, n)], r.certificate)))
                    }));
                }
            }
        }
        SearchFamily::KMinusE => {
            for d in 3..=max {
                jobs.push(Box::new(move || {
                    let cert = join_pst(&empty_graph(2)?, &complete(d - 2)?, 0, 1, kind)?;
                    Ok(cert.pst.then(|| Hit::new("k-minus-e", kind, vec![("d", d)], cert)))
                }));
            }
        }
        SearchFamily::CpJoin => {
            for m in (2..=max).step_by(2) {
                for n in 1..=max {
                    jobs.push(Box::new(move || {
                        let cert = join_pst(&cocktail_party(m)?, &empty_graph(n)?, 0, 1, kind)?;
                        Ok(cert.pst.then(|| Hit::new("cp-join", kind, vec![("m", m), ("n", n)], cert)))
                    }));
                }
            }
        }
        SearchFamily::Threshold => {
            if kind != MatrixKind::L {
                return Err(Error::Precondition("the threshold search uses the Laplacian".into()));
            }
            for parts in 2..=max_parts.max(2) {
                for sizes in size_tuples(parts, max) {
                    for j in 1..=parts {
                        if sizes[j - 1] < 2 {
                            continue;
                        }
                        let sizes = sizes.clone();
                        jobs.push(Box::new(move || {
                            let spec = IteratedJoinSpec::threshold(&sizes)?;
                            let off = spec.offset(j);
                            let r = iterated_join_analysis(&spec, j, off, off + 1)?;
                            let mut params: Vec<(&str, usize)> = vec![("part", j)];
                            let names = ["m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8"];
                            params.extend(sizes.iter().enumerate().map(|(i, &s)| (names[i.min(7)], s)));
                            Ok(r.pst.pst.then(|| Hit::new("threshold", kind, params, r.pst)))
                        }));
                    }
                }
            }
        }
    }
    Ok(jobs)
}

/// All tuples in `1..=max` of length `len`, lexicographically.
pub fn size_tuples(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (1..=max).map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out
}

/// Runs a search and renders its hits as JSON lines, in parameter order.
pub fn search_lines(family: &str, kind: MatrixKind, max: usize, max_parts: usize) -> Result<String> {
    let family = SearchFamily::from_str(family, true).map_err(|_| Error::Parse(format!("unknown search family '{family}'")))?;
    if max_parts > 8 {
        return Err(Error::Domain("at most 8 parts".into()));
    }
    let jobs = search_jobs(family, kind, max, max_parts)?;
    let hits: Vec<Option<Hit>> = jobs.par_iter().map(|job| job()).collect::<Result<_>>()?;
    let mut text = String::new();
    for hit in hits.into_iter().flatten() {
        let _ = writeln!(text, "{}", serde_json::to_string(&hit)?);
    }
    Ok(text)
}

fn cmd_search(a: SearchArgs) -> Result<()> {
    let name = a.family.to_possible_value().expect("named variant").get_name().to_string();
    let text = search_lines(&name, a.matrix.into(), a.max, a.parts)?;
    emit(a.out.as_ref(), &text)
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let (x, _) = a.source.load()?;
    let (y, _) = load(a.right.right.as_ref(), a.right.right_family.as_ref())?
        .ok_or_else(|| Error::Parse("bound-sweep needs --right or --right-family".into()))?;
    let report = bound_sweep(&x, &y, a.pair[0], a.pair[1], a.matrix.into(), a.tmax, a.samples)?;
    let mut csv = String::from("t,mag_join,mag_base,F,envelope\n");
    for s in &report.samples {
        let _ = writeln!(csv, "{:?},{:?},{:?},{:?},{:?}", s.t, s.mag_join, s.mag_base, s.f, report.envelope);
    }
    fs::write(&a.csv, csv)?;
    let summary = serde_json::json!({
        "max_abs_F": report.max_abs_f,
        "envelope": report.envelope,
        "tight": report.tight,
        "witness_t": report.witness_t,
        "samples": report.samples.len(),
        "zero_crossings": report.zero_crossings(),
        "equality": report.equality_diagnosis,
    });
    emit(None, &(summary.to_string() + "\n"))
}
