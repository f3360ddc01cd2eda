//! Command-line front end: `spectrum`, `truncate`, `compare` and `sweep`.
//!
//! Settings resolve as flag > `--config` file (`key = value` lines) >
//! built-in default. Exit status is 0 on success, 1 on usage errors and 2
//! when a solver fails.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ColorChoice, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Value};

use crate::error::Error;
use crate::frobenius::{truncation_solve, TruncationFamily};
use crate::model::{energy_from_w, reduce, PhysicalParameters, ReducedRadialProblem};
use crate::oracle::{fd_spectrum, FdGrid};
use crate::precision::{ExtendedProblem, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
use crate::rayleigh_ritz::{converge_spectrum, ConvergenceOptions};
use crate::rpm::{rpm_spectrum, search_interval, RpmOptions};
use crate::spectrum::{Method, Spectrum};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

/// Highest truncation order searched when looking for families through a point.
const FAMILY_MAX_ORDER: usize = 8;
/// Relative distance in `delta` treated as "on" a truncation family.
const FAMILY_DELTA_TOL: f64 = 1e-9;

const DEFAULT_COUNT: usize = 3;
const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_MAX_BASIS: usize = 55;
const DEFAULT_MAX_DIMENSION: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "kgo", version, about = "Radial spectrum of the Klein-Gordon oscillator with a Coulomb-type term")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest eigenvalues W by the selected method(s).
    Spectrum(CommonArgs),
    /// Closed-form family from the truncated series and its place in the full spectrum.
    Truncate(TruncateArgs),
    /// Side-by-side table of every method.
    Compare(CommonArgs),
    /// Rayleigh-Ritz eigenvalues across a range of delta.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
struct CommonArgs {
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l: Option<i64>,
    /// Comma-separated: rr, rpm, oracle, truncation.
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Largest Rayleigh-Ritz basis.
    #[arg(long)]
    max_basis: Option<usize>,
    /// Largest Hankel dimension for the Riccati-Padé method.
    #[arg(long)]
    max_dimension: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct TruncateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    delta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Solver(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::GridTooCoarse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = if std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) {
        ColorChoice::Never
    } else {
        ColorChoice::Auto
    };
    let matches = match Cli::command().color(color).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            EXIT_SOLVER
        }
    }
}

// ---------------------------------------------------------------- settings

/// Values from a `key = value` file; `#` starts a comment.
#[derive(Debug, Default)]
struct ConfigFile(HashMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "gamma", "delta", "m", "omega", "f", "l", "method", "count", "tol", "precision-bits", "max-basis",
    "max-dimension", "out", "format", "n", "delta-min", "delta-max", "step",
];

impl ConfigFile {
    fn load(path: Option<&PathBuf>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> CliResult<Self> {
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| usage(format!("config: bad value '{v}' for {key}"))))
            .transpose()
    }

    /// Flag if given, else config entry.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

#[derive(Debug, Clone)]
enum ProblemInput {
    Reduced(ReducedRadialProblem),
    Physical(PhysicalParameters, ReducedRadialProblem),
}

impl ProblemInput {
    fn reduced(&self) -> &ReducedRadialProblem {
        match self {
            ProblemInput::Reduced(r) | ProblemInput::Physical(_, r) => r,
        }
    }

    fn physical(&self) -> Option<&PhysicalParameters> {
        match self {
            ProblemInput::Physical(p, _) => Some(p),
            ProblemInput::Reduced(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Settings {
    methods: Vec<Method>,
    count: usize,
    tol: f64,
    precision_bits: u32,
    max_basis: usize,
    max_dimension: usize,
    out: Option<PathBuf>,
    format: Format,
}

struct Resolved {
    raw: CommonArgs,
    config: ConfigFile,
    settings: Settings,
}

fn resolve(args: CommonArgs) -> CliResult<Resolved> {
    let config = ConfigFile::load(args.config.as_ref())?;
    let methods = match config.pick(args.method.clone().map(|v| v.join(",")), "method")? {
        Some(list) => list
            .split(',')
            .map(|s| s.parse::<Method>().map_err(|e| usage(e.to_string())))
            .collect::<CliResult<Vec<_>>>()?,
        None => vec![Method::RayleighRitz],
    };
    let count = config.pick(args.count, "count")?.unwrap_or(DEFAULT_COUNT);
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let tol = config.pick(args.tol, "tol")?.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let precision_bits = config.pick(args.precision_bits, "precision-bits")?.unwrap_or(DEFAULT_PRECISION_BITS);
    if precision_bits < MIN_PRECISION_BITS {
        return Err(usage(format!("--precision-bits must be at least {MIN_PRECISION_BITS}")));
    }
    let max_basis = config.pick(args.max_basis, "max-basis")?.unwrap_or(DEFAULT_MAX_BASIS);
    let max_dimension = config.pick(args.max_dimension, "max-dimension")?.unwrap_or(DEFAULT_MAX_DIMENSION);
    let out = config.pick(args.out.clone(), "out")?;
    let format = config.pick(args.format, "format")?.unwrap_or(Format::Csv);
    Ok(Resolved {
        settings: Settings { methods, count, tol, precision_bits, max_basis, max_dimension, out, format },
        raw: args,
        config,
    })
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

impl Resolved {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        self.config.pick(flag, key)
    }

    /// Exactly one of `(gamma, delta)` or `(m, omega, f, l)`.
    fn problem(&self) -> CliResult<ProblemInput> {
        let a = &self.raw;
        let gamma = self.get(a.gamma, "gamma")?;
        let delta = self.get(a.delta, "delta")?;
        let m = self.get(a.m, "m")?;
        let omega = self.get(a.omega, "omega")?;
        let f = self.get(a.f, "f")?;
        let l = self.get(a.l, "l")?;
        let reduced_given = gamma.is_some() || delta.is_some();
        let physical_given = m.is_some() || omega.is_some() || f.is_some() || l.is_some();
        match (reduced_given, physical_given) {
            (true, false) => {
                let (Some(g), Some(d)) = (gamma, delta) else {
                    return Err(usage("--gamma and --delta must be given together"));
                };
                Ok(ProblemInput::Reduced(ReducedRadialProblem::new(g, d)?))
            }
            (false, true) => {
                let (Some(m), Some(omega), Some(f), Some(l)) = (m, omega, f, l) else {
                    return Err(usage("--m, --omega, --f and --l must be given together"));
                };
                let params = PhysicalParameters::new(m, omega, f, l)?;
                let reduced = reduce(&params)?;
                Ok(ProblemInput::Physical(params, reduced))
            }
            (true, true) => Err(usage("give either (--gamma, --delta) or (--m, --omega, --f, --l), not both")),
            (false, false) => Err(usage("missing problem: give --gamma and --delta, or --m, --omega, --f and --l")),
        }
    }
}

// ------------------------------------------------------------------ output

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_g(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

/// `%.12g`: twelve significant digits, trailing zeros trimmed.
pub fn format_g(x: f64) -> String {
    const DIGITS: usize = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct Table {
    command: &'static str,
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    notes: Vec<String>,
}

impl Table {
    fn new(command: &'static str, headers: &[&'static str]) -> Self {
        Self { command, headers: headers.to_vec(), rows: Vec::new(), notes: Vec::new() }
    }

    fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).map_err(|e| CliError::Solver(e.to_string()))?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(|e| CliError::Solver(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::Solver(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect())
                    })
                    .collect();
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "columns": self.headers,
                    "rows": rows,
                    "notes": self.notes,
                });
                let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Solver(e.to_string()))?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }

    fn emit(&self, settings: &Settings) -> CliResult<()> {
        let bytes = self.render(settings.format)?;
        match &settings.out {
            Some(path) => fs::write(path, bytes)
                .map_err(|e| CliError::Solver(format!("cannot write {}: {e}", path.display())))?,
            None => io::stdout().write_all(&bytes).map_err(|e| CliError::Solver(e.to_string()))?,
        }
        for note in &self.notes {
            eprintln!("note: {note}");
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- solvers

fn extended(problem: &ReducedRadialProblem, settings: &Settings) -> CliResult<ExtendedProblem> {
    Ok(ExtendedProblem::from_f64(problem.gamma(), problem.delta(), settings.precision_bits)?)
}

fn rr_spectrum(problem: &ReducedRadialProblem, count: usize, settings: &Settings) -> CliResult<Spectrum> {
    let opts = ConvergenceOptions { max_basis: settings.max_basis, ..ConvergenceOptions::default() };
    Ok(converge_spectrum(&extended(problem, settings)?, count, settings.tol, opts)?.truncated(count))
}

fn rpm_levels(problem: &ReducedRadialProblem, settings: &Settings, notes: &mut Vec<String>) -> CliResult<Spectrum> {
    let interval = search_interval(problem.gamma(), problem.delta(), settings.count)?;
    let opts = RpmOptions { max_dimension: settings.max_dimension, ..RpmOptions::default() };
    let out = rpm_spectrum(&extended(problem, settings)?, interval, &opts)?;
    notes.extend(out.diagnostics.into_iter().map(|d| format!("rpm: {d}")));
    Ok(out.spectrum.truncated(settings.count))
}

fn oracle_levels(problem: &ReducedRadialProblem, count: usize) -> CliResult<Spectrum> {
    Ok(fd_spectrum(problem, &FdGrid::default(), count)?)
}

/// Families of order `1..=FAMILY_MAX_ORDER`.
fn families(gamma: f64, prec: u32) -> CliResult<Vec<TruncationFamily>> {
    (1..=FAMILY_MAX_ORDER).map(|n| truncation_solve(gamma, n, prec).map_err(CliError::from)).collect()
}

/// `W` of every family with a nontrivial root at `delta`.
fn family_levels_at(families: &[TruncationFamily], delta: f64) -> Vec<(usize, Float)> {
    families
        .iter()
        .filter(|f| {
            f.nontrivial_roots()
                .any(|r| (r.delta_f64() - delta).abs() <= FAMILY_DELTA_TOL * (1.0 + delta.abs()))
        })
        .map(|f| (f.n, f.w.clone()))
        .collect()
}

/// Tolerance for matching an exact family value against a Ritz level.
fn capture_tol(settings: &Settings) -> f64 {
    10.0 * settings.tol
}

// ---------------------------------------------------------------- commands

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Spectrum(args) => cmd_spectrum(resolve(args)?),
        Command::Truncate(args) => cmd_truncate(args),
        Command::Compare(args) => cmd_compare(resolve(args)?),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_spectrum(resolved: Resolved) -> CliResult<()> {
    let input = resolved.problem()?;
    let settings = &resolved.settings;
    let problem = input.reduced();
    let mut table = Table::new("spectrum", &["method", "nu", "W", "convergence_estimate", "E_squared"]);
    let e_squared = |w: f64| -> CliResult<Cell> {
        Ok(match input.physical() {
            Some(p) => Cell::Num(energy_from_w(p, w)?.e_squared),
            None => Cell::Empty,
        })
    };
    for &method in &settings.methods {
        let spectrum = match method {
            Method::RayleighRitz => rr_spectrum(problem, settings.count, settings)?,
            Method::Rpm => rpm_levels(problem, settings, &mut table.notes)?,
            Method::Oracle => oracle_levels(problem, settings.count)?,
            Method::Truncation => {
                let fams = families(problem.gamma(), settings.precision_bits)?;
                let hits = family_levels_at(&fams, problem.delta());
                if hits.is_empty() {
                    table.notes.push(format!("delta = {} lies on no truncation family", problem.delta()));
                    continue;
                }
                let top = hits.iter().map(|(n, _)| *n).max().unwrap_or(1);
                let rr = rr_spectrum(problem, top + 2, settings)?;
                for (n, w) in hits {
                    match rr.index_of(&w, capture_tol(settings)) {
                        Some(nu) => table.rows.push(vec![
                            Cell::Text(method.label().into()),
                            Cell::Int(nu as i64),
                            Cell::Num(w.to_f64()),
                            Cell::Num(0.0),
                            e_squared(w.to_f64())?,
                        ]),
                        None => table.notes.push(format!("truncation n = {n}: W = {} not found in the spectrum", w.to_f64())),
                    }
                }
                continue;
            }
        };
        if spectrum.len() < settings.count {
            table.notes.push(format!("{method}: {} of {} levels found", spectrum.len(), settings.count));
        }
        for (nu, level) in spectrum.levels.iter().enumerate() {
            if !level.converged {
                table.notes.push(format!("{method}: level {nu} not converged (estimate {:e})", level.estimate));
            }
            table.rows.push(vec![
                Cell::Text(method.label().into()),
                Cell::Int(nu as i64),
                Cell::Num(level.w()),
                Cell::Num(level.estimate),
                e_squared(level.w())?,
            ]);
        }
    }
    table.emit(settings)
}

fn cmd_truncate(args: TruncateArgs) -> CliResult<()> {
    let resolved = resolve(args.common)?;
    let settings = &resolved.settings;
    let n = resolved.get(args.n, "n")?.ok_or_else(|| usage("--n is required"))?;
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let gamma = resolved.get(resolved.raw.gamma, "gamma")?.ok_or_else(|| usage("--gamma is required"))?;
    let m = resolved.get(resolved.raw.m, "m")?;
    let f = resolved.get(resolved.raw.f, "f")?;
    if m.is_some() != f.is_some() {
        return Err(usage("--m and --f must be given together"));
    }
    let family = truncation_solve(gamma, n, settings.precision_bits)?;
    let mut table = Table::new("truncate", &["n", "gamma", "theta", "W", "delta", "trivial", "nu", "omega"]);
    if family.discarded_complex > 0 {
        table.notes.push(format!("{} complex delta roots discarded", family.discarded_complex));
    }
    let rows: Vec<CliResult<Vec<Cell>>> = family
        .delta_roots
        .par_iter()
        .map(|root| {
            let problem = ReducedRadialProblem::new(gamma, root.delta_f64())?;
            let rr = rr_spectrum(&problem, n + 2, settings)?;
            let nu = rr.index_of(&family.w, capture_tol(settings));
            let omega = match (m, f) {
                (Some(m), Some(f)) if !root.trivial => Some(crate::model::frequency_from_delta(m, f, root.delta_f64())?),
                _ => None,
            };
            Ok(vec![
                Cell::Int(n as i64),
                Cell::Num(gamma),
                Cell::Num(family.theta),
                Cell::Num(family.w_f64()),
                Cell::Num(root.delta_f64()),
                Cell::Bool(root.trivial),
                nu.map_or(Cell::Empty, |i| Cell::Int(i as i64)),
                Cell::opt(omega),
            ])
        })
        .collect();
    for row in rows {
        table.rows.push(row?);
    }
    table.emit(settings)
}

struct MethodColumn {
    values: Vec<Option<(f64, bool)>>,
    tol: Vec<f64>,
}

/// For each reference value, the nearest level of `spectrum` within `gate`.
fn align(reference: &[f64], spectrum: &Spectrum, gate: f64) -> Vec<Option<(f64, f64, bool)>> {
    reference
        .iter()
        .map(|&r| {
            spectrum
                .levels
                .iter()
                .map(|l| (l.w(), l.estimate, l.converged))
                .filter(|(w, _, _)| (w - r).abs() <= gate)
                .min_by(|a, b| (a.0 - r).abs().total_cmp(&(b.0 - r).abs()))
        })
        .collect()
}

fn cmd_compare(resolved: Resolved) -> CliResult<()> {
    const ALIGN_GATE: f64 = 1e-3;
    const ORACLE_FLOOR: f64 = 1e-5;
    let input = resolved.problem()?;
    let settings = &resolved.settings;
    let problem = input.reduced();
    let mut table = Table::new(
        "compare",
        &[
            "nu", "truncation", "rr", "rpm", "oracle", "rr_converged", "rpm_converged", "dev_rpm", "dev_oracle",
            "dev_truncation", "flagged",
        ],
    );
    let rr = rr_spectrum(problem, settings.count, settings)?;
    let reference = rr.values();
    let rpm = rpm_levels(problem, settings, &mut table.notes)?;
    let oracle = oracle_levels(problem, settings.count)?;

    let columns = [
        ("rpm", align(&reference, &rpm, ALIGN_GATE)),
        ("oracle", align(&reference, &oracle, ALIGN_GATE)),
    ];
    let column = |name: &str| -> MethodColumn {
        let (_, aligned) = columns.iter().find(|(n, _)| *n == name).expect("known column");
        MethodColumn {
            values: aligned.iter().map(|a| a.map(|(w, _, c)| (w, c))).collect(),
            tol: aligned
                .iter()
                .map(|a| match (name, a) {
                    ("oracle", Some((_, est, _))) => ORACLE_FLOOR.max(10.0 * est),
                    _ => 10.0 * settings.tol.max(RpmOptions::default().tol),
                })
                .collect(),
        }
    };
    let (rpm_col, oracle_col) = (column("rpm"), column("oracle"));

    // exact family values, reported only where the Ritz spectrum contains them
    let mut truncation: Vec<Option<f64>> = vec![None; reference.len()];
    let fams = families(problem.gamma(), settings.precision_bits)?;
    for (n, w) in family_levels_at(&fams, problem.delta()) {
        match rr.index_of(&w, capture_tol(settings)) {
            Some(nu) => truncation[nu] = Some(w.to_f64()),
            None => table.notes.push(format!(
                "truncation n = {n}: W = {} is not among the {} computed levels",
                w.to_f64(),
                reference.len()
            )),
        }
    }

    for (nu, level) in rr.levels.iter().enumerate() {
        let w = level.w();
        let mut flagged = Vec::new();
        let mut deviation = |name: &'static str, value: Option<f64>, tol: f64| -> Cell {
            match value {
                Some(v) => {
                    let dev = (v - w).abs();
                    if dev > tol {
                        flagged.push(name);
                    }
                    Cell::Num(dev)
                }
                None => Cell::Empty,
            }
        };
        let dev_rpm = deviation("rpm", rpm_col.values[nu].map(|v| v.0), rpm_col.tol[nu]);
        let dev_oracle = deviation("oracle", oracle_col.values[nu].map(|v| v.0), oracle_col.tol[nu]);
        let dev_trunc = deviation("truncation", truncation[nu], capture_tol(settings));
        for (name, col) in [("rpm", &rpm_col), ("oracle", &oracle_col)] {
            if col.values[nu].is_none() {
                table.notes.push(format!("{name}: no level near rr level {nu}"));
            }
        }
        table.rows.push(vec![
            Cell::Int(nu as i64),
            Cell::opt(truncation[nu]),
            Cell::Num(w),
            Cell::opt(rpm_col.values[nu].map(|v| v.0)),
            Cell::opt(oracle_col.values[nu].map(|v| v.0)),
            Cell::Bool(level.converged),
            rpm_col.values[nu].map_or(Cell::Empty, |v| Cell::Bool(v.1)),
            dev_rpm,
            dev_oracle,
            dev_trunc,
            Cell::Text(flagged.join(";")),
        ]);
    }
    table.emit(settings)
}

/// `lo, lo + step, …` up to `hi` (inclusive within a small rounding margin).
pub fn sweep_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi < lo {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let resolved = resolve(args.common)?;
    let settings = &resolved.settings;
    let gamma = resolved.get(resolved.raw.gamma, "gamma")?.ok_or_else(|| usage("--gamma is required"))?;
    if resolved.raw.delta.is_some() {
        return Err(usage("sweep takes --delta-min/--delta-max, not --delta"));
    }
    let lo = resolved.get(args.delta_min, "delta-min")?.ok_or_else(|| usage("--delta-min is required"))?;
    let hi = resolved.get(args.delta_max, "delta-max")?.ok_or_else(|| usage("--delta-max is required"))?;
    let step = resolved.get(args.step, "step")?.ok_or_else(|| usage("--step is required"))?;
    if !(step.is_finite() && step > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(usage("sweep needs finite bounds and a positive --step"));
    }
    ReducedRadialProblem::new(gamma, 0.0)?;

    let mut table = Table::new("sweep", &["delta", "nu", "W", "converged", "on_truncation_family"]);
    let points = sweep_points(lo, hi, step);
    let fams = if points.is_empty() { Vec::new() } else { families(gamma, settings.precision_bits)? };
    let results: Vec<CliResult<Spectrum>> = points
        .par_iter()
        .map(|&delta| rr_spectrum(&ReducedRadialProblem::new(gamma, delta)?, settings.count, settings))
        .collect();
    for (&delta, result) in points.iter().zip(results) {
        let spectrum = result?;
        let exact = family_levels_at(&fams, delta);
        for (nu, level) in spectrum.levels.iter().enumerate() {
            let on_family = exact.iter().any(|(_, w)| spectrum.index_of(w, capture_tol(settings)) == Some(nu));
            if !level.converged {
                table.notes.push(format!("delta = {}: level {nu} not converged", format_g(delta)));
            }
            table.rows.push(vec![
                Cell::Num(delta),
                Cell::Int(nu as i64),
                Cell::Num(level.w()),
                Cell::Bool(level.converged),
                Cell::Bool(on_family),
            ]);
        }
    }
    table.emit(settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(format_g(6.0), "6");
        assert_eq!(format_g(9.805784089692501), "9.80578408969");
        assert_eq!(format_g(-2.449489742783178), "-2.44948974278");
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(1.5e-9), "1.5e-09");
        assert_eq!(format_g(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g(0.0001234), "0.0001234");
        assert_eq!(format_g(999999999999.7), "1e+12");
        assert_eq!(format_g(f64::INFINITY), "inf");
    }

    #[test]
    fn sweep_grid() {
        assert_eq!(sweep_points(-3.0, 3.0, 0.5).len(), 13);
        assert_eq!(sweep_points(2.4, 2.5, 0.01).len(), 11);
        assert!(sweep_points(1.0, 0.0, 0.1).is_empty());
        assert_eq!(sweep_points(-3.0, 3.0, 0.5)[6], 0.0);
    }

    #[test]
    fn config_parsing() {
        let c = ConfigFile::parse("# comment\ngamma = 1\ndelta=-2.5  # trailing\nprecision_bits = 128\n").unwrap();
        assert_eq!(c.get::<f64>("gamma").unwrap(), Some(1.0));
        assert_eq!(c.get::<f64>("delta").unwrap(), Some(-2.5));
        assert_eq!(c.get::<u32>("precision-bits").unwrap(), Some(128));
        assert_eq!(c.pick(Some(3.0), "gamma").unwrap(), Some(3.0));
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("gamma").is_err());
        assert!(c.get::<usize>("delta").is_err());
    }

    #[test]
    fn cells_render_both_ways() {
        assert_eq!(Cell::Num(f64::INFINITY).json(), Value::Null);
        assert_eq!(Cell::Empty.csv(), "");
        assert_eq!(Cell::Bool(true).csv(), "true");
    }
}
