//! `necklace` command line. Tables go to CSV (15 significant digits, header
//! row, `# key value` summary lines at the end) or JSON.
//!
//! Exit codes: 0 success, 1 bad configuration, 2 I/O failure, 3 failed oracle check.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{gap_scan, log_spaced, mixing_bound_curve};
use crate::bloch::{full_spectrum, FullSpectrum};
use crate::comb1::{comb1_limiting_distribution, cycle_limiting, VertexType};
use crate::dynamics::{
    limiting_distribution, probability_at_time, Distribution, Eigenbasis, InitialState, MixingScan, ProjectedState,
    TimeGrid,
};
use crate::error::Error;
use crate::graph::{assemble_hamiltonian, NecklaceSpec, PearlSpec};
use crate::numeric::{compensated_sum, format_significant};
use crate::oracle::{brute_spectrum, evolve_matrix_exponential, quadrature_time_average, MAX_EVOLUTION_DIM};

const DIGITS: usize = 15;

#[derive(Debug, Parser)]
#[command(name = "necklace", version, about = "Continuous-time quantum walks on necklace graphs")]
pub struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "NECKLACE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of every momentum sector.
    Spectrum {
        #[command(flatten)]
        pearl: PearlArgs,
        #[arg(long = "K")]
        k: usize,
        /// Also write sector eigenvectors as JSON to this path.
        #[arg(long, value_name = "PATH")]
        eigenvectors: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Limiting distribution of the walk from one vertex.
    Limiting {
        #[command(flatten)]
        pearl: PearlArgs,
        #[arg(long = "K")]
        k: usize,
        /// `j`, `j,m`, `j,base` or `j,tooth` (0-based pearl index `j`).
        #[arg(long)]
        start: String,
        /// Compare with the closed form (cycle and d = 1 comb only).
        #[arg(long)]
        closed_form: bool,
        #[arg(long)]
        tau: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distance of the time average from the limit on a geometric time grid.
    Mix {
        #[command(flatten)]
        pearl: PearlArgs,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T-lo", default_value_t = 1.0)]
        t_lo: f64,
        #[arg(long = "T-hi", default_value_t = 1e5)]
        t_hi: f64,
        #[arg(long, default_value_t = 1.05)]
        ratio: f64,
        /// Gap constant for the closed-form bound column.
        #[arg(long)]
        c: Option<f64>,
        /// Number of branch pairs the closed-form bound is summed over.
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long)]
        tau: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Smallest nonzero eigenvalue gap over comb spacings and ring sizes.
    GapScan {
        /// Comb spacings; 0 is the plain cycle. Items `a` or `a..b` (linear).
        #[arg(long = "d", value_delimiter = ',', required = true)]
        d: Vec<String>,
        /// Ring sizes. Items `a` or `a..b` (log-spaced unless --linear).
        #[arg(long = "K", value_delimiter = ',', required = true)]
        k: Vec<String>,
        #[arg(long, conflicts_with = "log")]
        linear: bool,
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare against brute-force reference computations; JSON report.
    OracleCheck {
        #[command(flatten)]
        pearl: PearlArgs,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
struct PearlArgs {
    #[arg(long)]
    cycle: bool,
    #[arg(long = "comb-d", value_name = "D")]
    comb_d: Option<usize>,
    #[arg(long = "pearl-file", value_name = "PATH")]
    pearl_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; standard output if absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Io(String),
    OracleFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::OracleFailed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::OracleFailed(m) => write!(f, "oracle check failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return config("--threads must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Spectrum { pearl, k, eigenvectors, out } => cmd_spectrum(&pearl, k, eigenvectors.as_deref(), &out),
        Command::Limiting { pearl, k, start, closed_form, tau, out } => {
            cmd_limiting(&pearl, k, &start, closed_form, tau, &out)
        }
        Command::Mix { pearl, k, start, eps, t_lo, t_hi, ratio, c, pairs, tau, out } => {
            let grid = TimeGrid::new(t_lo, t_hi, ratio)?;
            cmd_mix(&pearl, k, &start, eps, &grid, c.map(|c| (c, pairs)), tau, &out)
        }
        Command::GapScan { d, k, linear, log: _, out } => cmd_gap_scan(&d, &k, !linear, &out),
        Command::OracleCheck { pearl, k, start, tau, output } => cmd_oracle_check(&pearl, k, &start, tau, output.as_deref()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PearlKind {
    Cycle,
    Comb(usize),
    Custom,
}

impl PearlArgs {
    fn resolve(&self) -> CliResult<(PearlSpec, PearlKind)> {
        if self.cycle {
            return Ok((PearlSpec::cycle(), PearlKind::Cycle));
        }
        if let Some(d) = self.comb_d {
            return Ok((PearlSpec::comb(d)?, PearlKind::Comb(d)));
        }
        let path = self.pearl_file.as_ref().expect("clap enforces one pearl source");
        let pearl = PearlSpec::load(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))??;
        Ok((pearl, PearlKind::Custom))
    }

    fn describe(&self) -> String {
        match (self.cycle, self.comb_d, &self.pearl_file) {
            (true, _, _) => "cycle".into(),
            (_, Some(d), _) => format!("comb-d {d}"),
            (_, _, Some(p)) => format!("pearl-file {}", p.display()),
            _ => unreachable!("clap enforces one pearl source"),
        }
    }
}

fn vertex_label(kind: PearlKind, pearl: &PearlSpec, m: usize) -> &'static str {
    match kind {
        PearlKind::Cycle => "base",
        PearlKind::Comb(d) if m == d => "tooth",
        PearlKind::Comb(_) if m == 0 => "base",
        PearlKind::Comb(_) => "ring",
        PearlKind::Custom if m == pearl.root_in() || m == pearl.root_out() => "root",
        PearlKind::Custom => "inner",
    }
}

/// `(j, m)` from `j`, `j,m`, `j,base` or `j,tooth`.
fn parse_start(s: &str, kind: PearlKind, neck: &NecklaceSpec) -> CliResult<(usize, usize)> {
    let pearl = neck.pearl();
    let (j, rest) = match s.split_once(',') {
        Some((j, rest)) => (j.trim(), Some(rest.trim())),
        None => (s.trim(), None),
    };
    let j: usize = j.parse().map_err(|_| CliError::Config(format!("bad start pearl index {j:?}")))?;
    let m = match rest {
        None => 0,
        Some(r) => match r.parse::<usize>() {
            Ok(m) => m,
            Err(_) => match (r.parse::<VertexType>()?, kind) {
                (VertexType::Base, PearlKind::Custom) => pearl.root_in(),
                (VertexType::Base, _) => 0,
                (VertexType::Tooth, PearlKind::Comb(d)) => d,
                (VertexType::Tooth, _) => return config("only comb pearls have a tooth"),
            },
        },
    };
    if j >= neck.pearls() || m >= pearl.m() {
        return config(format!("start ({j}, {m}) is outside the necklace (K = {}, M = {})", neck.pearls(), pearl.m()));
    }
    Ok((j, m))
}

#[derive(Debug, Clone)]
enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_significant(*x, DIGITS),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<(String, Cell)>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), summary: Vec::new() }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                for (key, value) in &self.summary {
                    s.push_str(&format!("# {key} {}\n", value.csv()));
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> =
                    self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let summary: serde_json::Map<String, Value> =
                    self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
                let doc = json!({ "columns": self.columns, "rows": rows, "summary": summary });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(contents.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => Ok(()),
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Io(format!("stdout: {e}"))),
            }
        }
    }
}

fn emit(table: &Table, out: &OutputArgs) -> CliResult<()> {
    write_output(out.output.as_deref(), &table.render(out.format))
}

#[derive(Serialize)]
struct SectorDump {
    k: usize,
    p: f64,
    values: Vec<f64>,
    /// One vector per branch, each component as `[re, im]`.
    vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct SpectrumDump {
    pearls: usize,
    m: usize,
    sectors: Vec<SectorDump>,
}

fn spectrum_dump(spec: &FullSpectrum) -> SpectrumDump {
    let sectors = spec
        .sectors()
        .iter()
        .map(|s| SectorDump {
            k: s.sector.k,
            p: s.sector.momentum(),
            values: s.values.clone(),
            vectors: s.vectors.columns().into_iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect(),
        })
        .collect();
    SpectrumDump { pearls: spec.necklace().pearls(), m: spec.necklace().pearl().m(), sectors }
}

fn cmd_spectrum(pearl: &PearlArgs, k: usize, eigenvectors: Option<&Path>, out: &OutputArgs) -> CliResult<()> {
    let (p, _) = pearl.resolve()?;
    let spec = full_spectrum(&NecklaceSpec::new(p, k)?)?;
    let mut table = Table::new(vec!["k", "n", "lambda"]);
    for e in spec.entries() {
        table.rows.push(vec![Cell::Int(e.k), Cell::Int(e.n), Cell::Float(e.value)]);
    }
    if let Some(path) = eigenvectors {
        let mut s = serde_json::to_string_pretty(&spectrum_dump(&spec)).expect("spectrum serializes");
        s.push('\n');
        write_output(Some(path), &s)?;
    }
    emit(&table, out)
}

struct Prepared {
    neck: NecklaceSpec,
    kind: PearlKind,
    spec: FullSpectrum,
    basis: Eigenbasis,
    start: (usize, usize),
    phi: InitialState,
    tau: f64,
}

fn prepare(pearl: &PearlArgs, k: usize, start: &str, tau: Option<f64>) -> CliResult<Prepared> {
    let (p, kind) = pearl.resolve()?;
    let neck = NecklaceSpec::new(p, k)?;
    let start = parse_start(start, kind, &neck)?;
    let spec = full_spectrum(&neck)?;
    let basis = Eigenbasis::from(&spec);
    let phi = InitialState::vertex(neck.vertex_count(), neck.index(start.0, start.1))?;
    let tau = match tau {
        Some(t) if t > 0.0 => t,
        Some(t) => return config(format!("--tau must be positive, got {t}")),
        None => basis.default_tau(),
    };
    Ok(Prepared { neck, kind, spec, basis, start, phi, tau })
}

fn closed_form_limit(p: &Prepared) -> CliResult<Distribution> {
    let k = p.neck.pearls();
    let (z, m) = p.start;
    match p.kind {
        PearlKind::Cycle => Ok(Distribution::new((0..k).map(|x| cycle_limiting(k, x, z)).collect::<Result<_, _>>()?)?),
        PearlKind::Comb(1) => {
            let start = if m == 0 { VertexType::Base } else { VertexType::Tooth };
            Ok(comb1_limiting_distribution(k, start, z)?)
        }
        _ => config("closed-form limiting distribution is only available for the cycle and the d = 1 comb"),
    }
}

fn cmd_limiting(pearl: &PearlArgs, k: usize, start: &str, closed: bool, tau: Option<f64>, out: &OutputArgs) -> CliResult<()> {
    let p = prepare(pearl, k, start, tau)?;
    let closed = if closed { Some(closed_form_limit(&p)?) } else { None };
    let pi = limiting_distribution(&p.basis, &p.phi, p.tau)?.distribution;
    let mut columns = vec!["j", "m", "vertex_type", "pi"];
    if closed.is_some() {
        columns.extend(["pi_closed_form", "abs_deviation"]);
    }
    let mut table = Table::new(columns);
    let mut max_dev = 0.0f64;
    for v in 0..p.neck.vertex_count() {
        let (j, m) = p.neck.site(v);
        let mut row = vec![
            Cell::Int(j),
            Cell::Int(m),
            Cell::Text(vertex_label(p.kind, p.neck.pearl(), m).into()),
            Cell::Float(pi[v]),
        ];
        if let Some(c) = &closed {
            let dev = (pi[v] - c[v]).abs();
            max_dev = max_dev.max(dev);
            row.extend([Cell::Float(c[v]), Cell::Float(dev)]);
        }
        table.rows.push(row);
    }
    table.summary.push(("total".into(), Cell::Float(pi.total())));
    if closed.is_some() {
        table.summary.push(("max_abs_deviation".into(), Cell::Float(max_dev)));
    }
    emit(&table, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mix(
    pearl: &PearlArgs,
    k: usize,
    start: &str,
    eps: f64,
    grid: &TimeGrid,
    curve: Option<(f64, usize)>,
    tau: Option<f64>,
    out: &OutputArgs,
) -> CliResult<()> {
    let p = prepare(pearl, k, start, tau)?;
    let state = ProjectedState::new(&p.basis, &p.phi, p.tau)?;
    let limit = state.limiting()?;
    let times = grid.points();
    let rows = times
        .par_iter()
        .map(|&t| {
            let tv = crate::dynamics::tv_distance(&state.time_averaged(t)?, &limit)?;
            Ok((tv, state.convergence_bound(t)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let curve_values = match curve {
        Some((c, pairs)) => Some(
            times.iter().map(|&t| mixing_bound_curve(c, k as f64, t).map(|v| v * pairs as f64)).collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let scan = MixingScan::from_samples(times.clone(), rows.iter().map(|r| r.0).collect(), eps)?;

    let mut columns = vec!["T", "tv_distance", "lemma43_bound"];
    if curve_values.is_some() {
        columns.push("mixing_bound_curve");
    }
    let mut table = Table::new(columns);
    for (i, (&t, &(tv, bound))) in times.iter().zip(&rows).enumerate() {
        let mut row = vec![Cell::Float(t), Cell::Float(tv), Cell::Float(bound)];
        if let Some(cv) = &curve_values {
            row.push(Cell::Float(cv[i]));
        }
        table.rows.push(row);
    }
    table.summary.push(("eps".into(), Cell::Float(eps)));
    table.summary.push((
        "t_mix".into(),
        match scan.t_mix {
            Some(t) => Cell::Float(t),
            None => Cell::Text("not-found".into()),
        },
    ));
    emit(&table, out)
}

/// Expand `a` / `a..b` items; ranges are log-spaced or linear.
fn expand_list(items: &[String], log: bool, what: &str) -> CliResult<Vec<usize>> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::Config(format!("bad {what} value {s:?}")));
    let mut out = Vec::new();
    for item in items {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if b < a {
                    return config(format!("empty {what} range {item:?}"));
                }
                if log && a > 0 {
                    out.extend(log_spaced(a, b));
                } else {
                    out.extend(a..=b);
                }
            }
            None => out.push(parse(item)?),
        }
    }
    Ok(out)
}

fn cmd_gap_scan(d: &[String], k: &[String], log: bool, out: &OutputArgs) -> CliResult<()> {
    let ds = expand_list(d, false, "d")?;
    let ks = expand_list(k, log, "K")?;
    let scan = gap_scan(&ds, &ks)?;
    let mut table = Table::new(vec!["d", "K", "min_gap"]);
    for r in &scan.records {
        table.rows.push(vec![Cell::Int(r.d), Cell::Int(r.k), Cell::Float(r.min_gap)]);
    }
    for (d, slope) in &scan.slopes {
        let cell = match slope {
            Some(s) => Cell::Float(*s),
            None => Cell::Text("n/a".into()),
        };
        table.summary.push((format!("slope_d{d}"), cell));
    }
    emit(&table, out)
}

#[derive(Debug, Serialize)]
struct CheckResult {
    name: &'static str,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    pearl: String,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    start: [usize; 2],
    tau: f64,
    checks: Vec<CheckResult>,
    pass: bool,
}

const ORACLE_TIMES: [f64; 3] = [0.5, 3.7, 20.0];
const ORACLE_AVERAGE_T: f64 = 10.0;
const ORACLE_AVERAGE_STEPS: usize = 4000;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_oracle_checks(p: &Prepared) -> CliResult<Vec<CheckResult>> {
    let h = assemble_hamiltonian(&p.neck);
    let mut checks = Vec::new();
    let mut push = |name, dev: f64, tol| checks.push(CheckResult { name, max_deviation: dev, tolerance: tol, pass: dev <= tol });

    let brute = brute_spectrum(&h)?;
    push("spectrum", max_abs_diff(&p.spec.sorted_values(), &brute.values), 1e-9);

    let v = p.basis.vectors();
    let hc: Array2<Complex64> = h.as_array().mapv(|x| Complex64::new(x, 0.0));
    let hv = hc.dot(v);
    let residual = (0..v.ncols())
        .into_par_iter()
        .map(|c| {
            let lambda = p.basis.values()[c];
            compensated_sum(hv.column(c).iter().zip(v.column(c)).map(|(a, b)| (a - b * lambda).norm_sqr())).sqrt()
        })
        .reduce(|| 0.0, f64::max);
    push("eigenvector_residual", residual, 1e-9);

    let gram = v.t().mapv(|z| z.conj()).dot(v);
    let gram_dev = gram.indexed_iter().map(|((a, b), z)| (z - if a == b { 1.0 } else { 0.0 }).norm()).fold(0.0, f64::max);
    push("gram", gram_dev, 1e-9);

    let mut evo = 0.0f64;
    for t in ORACLE_TIMES {
        let a = probability_at_time(&p.basis, &p.phi, t)?;
        let b = evolve_matrix_exponential(&h, &p.phi, t)?;
        evo = evo.max(max_abs_diff(a.probabilities(), b.probabilities()));
    }
    push("evolution", evo, 1e-9);

    let state = ProjectedState::new(&p.basis, &p.phi, p.tau)?;
    let avg = state.time_averaged(ORACLE_AVERAGE_T)?;
    let quad = quadrature_time_average(&h, &p.phi, ORACLE_AVERAGE_T, ORACLE_AVERAGE_STEPS)?;
    push("time_average", max_abs_diff(avg.probabilities(), quad.probabilities()), 1e-6);

    let limit = state.limiting()?;
    push("limit_normalization", (limit.total() - 1.0).abs(), 1e-9);
    if matches!(p.kind, PearlKind::Cycle | PearlKind::Comb(1)) {
        let closed = closed_form_limit(p)?;
        push("closed_form_limit", max_abs_diff(limit.probabilities(), closed.probabilities()), 1e-9);
    }
    Ok(checks)
}

fn cmd_oracle_check(pearl: &PearlArgs, k: usize, start: &str, tau: Option<f64>, output: Option<&Path>) -> CliResult<()> {
    let (probe, _) = pearl.resolve()?;
    if k.saturating_mul(probe.m()) > MAX_EVOLUTION_DIM {
        return config(format!("oracle check needs K * M <= {MAX_EVOLUTION_DIM}, got {}", k * probe.m()));
    }
    let p = prepare(pearl, k, start, tau)?;
    let checks = run_oracle_checks(&p)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let report = OracleReport {
        pearl: pearl.describe(),
        k,
        n: p.neck.vertex_count(),
        start: [p.start.0, p.start.1],
        tau: p.tau,
        pass: failed.is_empty(),
        checks,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    write_output(output, &s)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::OracleFailed(failed.join(", ")))
    }
}
