//! Command-line front end: fidelity and concurrence curves as CSV, oracle
//! comparisons, and the `hbar / K` timescale.

mod csv;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use spinchain::entanglement::{concurrence_b1, concurrence_b2, concurrence_unentangled};
use spinchain::fidelity::*;
use spinchain::magnon::{code_amplitudes, InitialState, StateKind, Time, UMode};
use spinchain::oracle::{ChainConfig, ChainOracle};
use spinchain::validation::{compare_family, exact_columns};

pub use csv::{sci, Table};

/// Exit status for invalid arguments or inconsistent flags.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when `oracle-compare` finds a deviation above tolerance.
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spinchain", version, about = "Entanglement transport on the XY spin chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-site fidelity at distance r, Bloch-averaged unless --alpha2 is given.
    Fidelity(FidelityArgs),
    /// Two-site fidelity of a Bell pair translated by r.
    PairFidelity(PairArgs),
    /// Concurrence of site pairs against time.
    Concurrence(ConcurrenceArgs),
    /// Maximum deviation of the closed forms from exact evolution on a ring.
    OracleCompare(CompareArgs),
    /// hbar / K in seconds.
    Timescale(TimescaleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Unentangled,
    B1,
    B2,
}

impl Family {
    fn kind(self) -> StateKind {
        match self {
            Family::Unentangled => StateKind::Unentangled,
            Family::B1 => StateKind::BellB1,
            Family::B2 => StateKind::BellB2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UModeArg {
    Paper,
    Exact,
}

impl From<UModeArg> for UMode {
    fn from(u: UModeArg) -> Self {
        match u {
            UModeArg::Paper => UMode::PaperApprox,
            UModeArg::Exact => UMode::Exact,
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 120.0)]
    t_max: f64,
    #[arg(long, default_value_t = 600)]
    steps: usize,
}

#[derive(Debug, Args)]
struct CodeArgs {
    /// |alpha|^2 of the code; omit to average over the Bloch sphere where supported.
    #[arg(long)]
    alpha2: Option<f64>,
    /// Phase of beta in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the CSV here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FidelityArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    r: i64,
    /// Separation l - m of the entangled pair.
    #[arg(long)]
    s: Option<i64>,
    /// Drop coherences between magnon sectors (unentangled family only).
    #[arg(long)]
    dephased: bool,
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    r: i64,
    #[arg(long)]
    s: i64,
    #[arg(long, value_enum, default_value = "paper")]
    u_mode: UModeArg,
    /// Overlap with the code itself rather than with its conjugate (B1 only).
    #[arg(long)]
    code_overlap: bool,
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ConcurrenceArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Site of the flipped spin (the l of the pair).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    l: i64,
    /// Separation l - m of the entangled pair.
    #[arg(long)]
    s: Option<i64>,
    /// Site pair `i:j`; repeatable. Defaults to l+1:l, l+2:l and l:m.
    #[arg(long = "pair", value_parser = parse_pair, allow_hyphen_values = true)]
    pairs: Vec<(i64, i64)>,
    #[arg(long, value_enum, default_value = "paper")]
    u_mode: UModeArg,
    #[arg(long, default_value_t = 0.5)]
    alpha2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Ring length.
    #[arg(long, default_value_t = 41)]
    n: usize,
    /// Separation l - m of the entangled pair; 2 when omitted.
    #[arg(long)]
    s: Option<i64>,
    #[arg(long, default_value_t = 0.5)]
    alpha2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,
    #[arg(long, default_value_t = 8.0)]
    t_max: f64,
    #[arg(long, default_value_t = 16)]
    steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct TimescaleArgs {
    /// Exchange coupling K in eV.
    #[arg(long, allow_hyphen_values = true)]
    coupling_ev: f64,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_pair(text: &str) -> Result<(i64, i64), String> {
    let (i, j) = text.split_once(':').ok_or_else(|| format!("expected i:j, got {text:?}"))?;
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(i)?, parse(j)?))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Tolerance(String),
    Other(anyhow::Error),
}

impl From<spinchain::Error> for Failure {
    fn from(e: spinchain::Error) -> Self {
        match e {
            spinchain::Error::Domain(m) | spinchain::Error::Usage(m) => Failure::Usage(m),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn usage<T>(message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(message.into()))
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| dispatch(cli.command)));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Tolerance(m)) => {
            eprintln!("tolerance exceeded: {m}");
            EXIT_TOLERANCE
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

/// Worker pool, capped by `SPINCHAIN_THREADS` when set.
fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("SPINCHAIN_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return usage(format!("SPINCHAIN_THREADS must be a positive integer, got {value:?}")),
        }
    }
    builder.build().context("starting worker threads").map_err(Failure::Other)
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fidelity(a) => {
            let table = fidelity(&a)?;
            emit(&table.render(), &a.out)
        }
        Command::PairFidelity(a) => {
            let table = pair_fidelity(&a)?;
            emit(&table.render(), &a.out)
        }
        Command::Concurrence(a) => {
            let table = concurrence(&a)?;
            emit(&table.render(), &a.out)
        }
        Command::OracleCompare(a) => oracle_compare(&a),
        Command::Timescale(a) => {
            let tau = timescale_seconds(a.coupling_ev)?;
            let text = format!("coupling_ev,tau_s\n{},{}\n", sci(a.coupling_ev), sci(tau));
            emit(&text, &a.out)
        }
    }
}

fn emit(text: &str, out: &OutputArgs) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing standard output")?;
            stdout.flush().context("writing standard output")?;
        }
    }
    Ok(())
}

/// The separation for entangled families, rejected for the unentangled one.
fn separation(family: Family, s: Option<i64>) -> Result<i64, Failure> {
    match (family, s) {
        (Family::Unentangled, None) => Ok(0),
        (Family::Unentangled, Some(_)) => usage("--s applies to the b1 and b2 families only"),
        (_, Some(s)) if s >= 1 => Ok(s),
        (_, Some(s)) => usage(format!("--s must be at least 1, got {s}")),
        (_, None) => usage("--s is required for the b1 and b2 families"),
    }
}

fn state_at(family: Family, alpha2: f64, phase: f64, l: i64, m: i64) -> Result<InitialState, Failure> {
    let (alpha, beta) = code_amplitudes(alpha2, phase)?;
    Ok(InitialState::new(family.kind(), alpha, beta, l, m)?)
}

fn sample(grid: &TimeGrid, columns: Vec<String>, f: impl Fn(Time) -> Result<Vec<f64>, Failure> + Sync) -> Result<Table, Failure> {
    let rows: Vec<(f64, Vec<f64>)> = grid
        .times()
        .into_par_iter()
        .map(|t| Ok((t.get(), f(t)?)))
        .collect::<Result<_, Failure>>()?;
    let mut table = Table::new(columns);
    for (t, values) in rows {
        table.push(t, values);
    }
    Ok(table)
}

fn fidelity(a: &FidelityArgs) -> Result<Table, Failure> {
    let s = separation(a.family, a.s)?;
    if a.dephased && a.family != Family::Unentangled {
        return usage("--dephased applies to the unentangled family only");
    }
    let coherence = if a.dephased { Coherence::Dephased } else { Coherence::Full };
    let grid = TimeGrid::new(a.grid.t_max, a.grid.steps)?;
    let columns = vec!["F".to_string()];
    let r = a.r;
    let Some(alpha2) = a.code.alpha2 else {
        let kind = match a.family {
            Family::Unentangled => Average::SiteUnentangled(coherence),
            Family::B1 => Average::SiteB1,
            Family::B2 => Average::SiteB2,
        };
        // The averages take no state, but the pair must still be a valid one.
        state_at(a.family, 0.5, 0.0, s, 0)?;
        return sample(&grid, columns, |t| Ok(vec![kind.evaluate(r, s, t)]));
    };
    let state = state_at(a.family, alpha2, a.code.phase, s, 0)?;
    sample(&grid, columns, |t| {
        let f = match a.family {
            Family::Unentangled => fid_site_unentangled(r, t, alpha2, coherence)?,
            Family::B1 => fid_site_b1(r, &state, t)?,
            Family::B2 => fid_site_b2(r, &state, t)?,
        };
        Ok(vec![f])
    })
}

fn pair_fidelity(a: &PairArgs) -> Result<Table, Failure> {
    let s = separation(a.family, Some(a.s))?;
    match a.family {
        Family::Unentangled => return usage("pair fidelity is defined for the b1 and b2 families"),
        Family::B1 if a.u_mode != UModeArg::Paper => return usage("--u-mode applies to the b2 family only"),
        Family::B2 if a.code_overlap => return usage("--code-overlap applies to the b1 family only"),
        _ => {}
    }
    let grid = TimeGrid::new(a.grid.t_max, a.grid.steps)?;
    let columns = vec!["G".to_string()];
    let (r, u_mode) = (a.r, UMode::from(a.u_mode));
    let Some(alpha2) = a.code.alpha2 else {
        let kind = match (a.family, a.code_overlap) {
            (Family::B1, false) => Average::PairB1,
            (Family::B1, true) => Average::PairB1Code,
            _ => Average::PairB2(u_mode),
        };
        return sample(&grid, columns, |t| Ok(vec![kind.evaluate(r, s, t)]));
    };
    let state = state_at(a.family, alpha2, a.code.phase, s, 0)?;
    let (alpha, beta) = (state.alpha(), state.beta());
    sample(&grid, columns, |t| {
        let g = match (a.family, a.code_overlap) {
            (Family::B1, false) => pairfid_b1(r, s, t, alpha, beta),
            (Family::B1, true) => pairfid_b1_code(r, s, t, alpha, beta),
            _ => pairfid_b2(r, s, t, alpha, beta, u_mode),
        };
        Ok(vec![g])
    })
}

fn concurrence(a: &ConcurrenceArgs) -> Result<Table, Failure> {
    let s = separation(a.family, a.s)?;
    if a.family != Family::B2 && a.u_mode != UModeArg::Paper {
        return usage("--u-mode applies to the b2 family only");
    }
    let (l, m) = (a.l, a.l - s);
    let state = state_at(a.family, a.alpha2, a.phase, l, m)?;
    let pairs = if a.pairs.is_empty() {
        let mut default = vec![(l + 1, l), (l + 2, l)];
        if a.family != Family::Unentangled {
            default.push((l, m));
        }
        default
    } else {
        a.pairs.clone()
    };
    if let Some((i, _)) = pairs.iter().find(|(i, j)| i == j) {
        return usage(format!("pair {i}:{i} names one site twice"));
    }
    let grid = TimeGrid::new(a.grid.t_max, a.grid.steps)?;
    let columns = pairs.iter().map(|(i, j)| format!("C[{i}:{j}]")).collect();
    let (beta2, u_mode) = (state.beta().norm_sqr(), UMode::from(a.u_mode));
    sample(&grid, columns, |t| {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (i, j) = (i.max(j), i.min(j));
                Ok(match a.family {
                    Family::Unentangled => concurrence_unentangled(i, j, l, t, beta2)?,
                    Family::B1 => concurrence_b1(i, j, &state, t)?,
                    Family::B2 => concurrence_b2(i, j, &state, t, u_mode)?,
                })
            })
            .collect()
    })
}

fn oracle_compare(a: &CompareArgs) -> Result<(), Failure> {
    let s = match (a.family, a.s) {
        (Family::B1 | Family::B2, None) => 2,
        (family, s) => separation(family, s)?,
    };
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return usage(format!("--tol must be positive, got {}", a.tol));
    }
    if s as usize >= a.n {
        return usage(format!("--s = {s} does not fit on a ring of {} sites", a.n));
    }
    let grid = TimeGrid::new(a.t_max, a.steps)?;
    let oracle = ChainOracle::new(ChainConfig::xy(a.n)?);
    let m = (a.n as i64 - s) / 2;
    let state = state_at(a.family, a.alpha2, a.phase, m + s, m)?;
    let comparison = compare_family(&oracle, &state, &grid.times())?;
    let mut table = Table::new(comparison.columns.iter().map(|c| c.to_string()));
    for row in &comparison.rows {
        table.push(row.t, row.deviations.clone());
    }
    emit(&table.render(), &a.out)?;
    let checked = exact_columns(state.kind());
    let worst = comparison.max_over(checked);
    if comparison.interior.is_empty() {
        return usage(format!("no site of the {}-site ring is free of wrap-around up to T = {}", a.n, a.t_max));
    }
    if worst > a.tol {
        return Err(Failure::Tolerance(format!("max deviation {worst:e} over {checked:?} exceeds {:e}", a.tol)));
    }
    eprintln!("max deviation {worst:e} over {} interior sites", comparison.interior.len());
    Ok(())
}
