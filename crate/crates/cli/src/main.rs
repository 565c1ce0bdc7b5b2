//! `sitnikov` — command-line front end for the periodic-orbit toolkit.
//!
//! Subcommands: `table1` (resonant-family scan with reference deviations),
//! `slope` (trace-slope report at e = 0), `continue` (eccentricity sweep),
//! `period` (period-function rows). Output is CSV (RFC 4180, 17 significant
//! digits) or JSON (one object per row), deterministic for a fixed
//! invocation. `SITNIKOV_THREADS` caps the worker count for sweeps.

mod output;
mod rows;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sitnikov_core::circular::{self, CircularOrbit, FrequencyPair};
use sitnikov_core::continuation;
use sitnikov_core::ode::IntegratorConfig;
use sitnikov_core::slope::{self, reference, Parity};
use sitnikov_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "sitnikov",
    version,
    about = "Symmetric periodic orbits of the circular and elliptic Sitnikov problems: reference-table scans, trace-slope stability criteria, and continuation in eccentricity",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute integrator tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,

    /// Relative integrator tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    rel_tol: f64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan the odd (2n,1) family for n = 1..n_max: (eta_n, h_n, A_n) with
    /// self-convergence certificates and, for n <= 10, absolute deviations
    /// from the bundled reference table.
    Table1 {
        #[arg(long = "n-max")]
        n_max: u32,
    },
    /// Trace-slope report tau'(0) for the (m, p) family of either parity.
    Slope {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Continue the (m, p) family over a list of eccentricities
    /// (ascending, starting at 0) and classify each monodromy.
    Continue {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum)]
        parity: ParityArg,
        /// Comma-separated eccentricities, e.g. --e 0,0.005,0.01
        #[arg(long = "e", value_delimiter = ',')]
        e_values: Vec<f64>,
    },
    /// Period-function rows (h, T, T') for energies or for target periods.
    Period {
        /// Comma-separated energies in (-2, 0).
        #[arg(long = "h", value_delimiter = ',', allow_negative_numbers = true)]
        h_list: Vec<f64>,
        /// Comma-separated target periods (> 2*pi/sqrt(8)); each is
        /// inverted for its energy first.
        #[arg(long = "t-target", value_delimiter = ',')]
        t_targets: Vec<f64>,
    },
}

enum CliError {
    Usage(String),
    Numerical(CoreError),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Errors raised by invalid argument values map to exit code 2; failures of
/// the numerics themselves map to 3.
fn numerical(e: CoreError) -> CliError {
    match e {
        CoreError::InadmissibleFrequency { .. }
        | CoreError::EccentricityOutOfRange { .. }
        | CoreError::EnergyOutOfRange { .. }
        | CoreError::PeriodNotAttainable { .. }
        | CoreError::PreconditionViolated(_)
        | CoreError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        other => CliError::Numerical(other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn init_thread_pool() -> Result<(), String> {
    match std::env::var("SITNIKOV_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| format!("SITNIKOV_THREADS must be a positive integer, got `{raw}`"))?;
            if n == 0 {
                return Err("SITNIKOV_THREADS must be >= 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = IntegratorConfig::with_tolerances(cli.abs_tol, cli.rel_tol);
    cfg.validate().map_err(numerical)?;
    let sink = output::Sink::open(cli.out.as_deref())?;
    match cli.command {
        Command::Table1 { n_max } => cmd_table1(n_max, &cfg, cli.format, sink),
        Command::Slope { m, p, parity } => cmd_slope(m, p, parity.into(), &cfg, cli.format, sink),
        Command::Continue {
            m,
            p,
            parity,
            e_values,
        } => cmd_continue(m, p, parity.into(), &e_values, &cfg, cli.format, sink),
        Command::Period { h_list, t_targets } => {
            cmd_period(&h_list, &t_targets, &cfg, cli.format, sink)
        }
    }
}

fn cmd_table1(
    n_max: u32,
    cfg: &IntegratorConfig,
    format: Format,
    sink: output::Sink,
) -> Result<(), CliError> {
    if n_max == 0 {
        return Err(usage("--n-max must be >= 1"));
    }
    let scan = slope::conjecture_scan(n_max, cfg).map_err(numerical)?;
    let refs = reference::table1();
    let rows: Vec<rows::Table1Row> = scan
        .iter()
        .map(|s| {
            let re = refs.iter().find(|r| r.n == s.n);
            rows::Table1Row {
                n: s.n,
                eta: s.eta,
                h: s.h,
                a_n: s.a_n,
                positive: s.positive,
                convergence_delta: s.convergence_delta,
                ref_eta: re.map(|r| r.eta),
                ref_h: re.map(|r| r.h),
                ref_a_n: re.map(|r| r.a_n),
                dev_eta: re.map(|r| (s.eta - r.eta).abs()),
                dev_h: re.map(|r| (s.h - r.h).abs()),
                dev_a_n: re.map(|r| (s.a_n - r.a_n).abs()),
                abs_tol: cfg.abs_tol,
                rel_tol: cfg.rel_tol,
            }
        })
        .collect();
    emit(&rows, format, sink)
}

fn cmd_slope(
    m: u32,
    p: u32,
    parity: Parity,
    cfg: &IntegratorConfig,
    format: Format,
    sink: output::Sink,
) -> Result<(), CliError> {
    let mp = FrequencyPair::new(m, p).map_err(numerical)?;
    let report = match parity {
        Parity::Odd => slope::slope_odd(mp, cfg),
        Parity::Even => slope::slope_even(mp, cfg),
    }
    .map_err(|e| match e {
        e @ CoreError::IdentityViolation { .. } => CliError::Numerical(e),
        other => numerical(other),
    })?;
    let rows = vec![rows::SlopeRow::new(&report, cfg)];
    emit(&rows, format, sink)
}

fn cmd_continue(
    m: u32,
    p: u32,
    parity: Parity,
    e_values: &[f64],
    cfg: &IntegratorConfig,
    format: Format,
    sink: output::Sink,
) -> Result<(), CliError> {
    let mp = FrequencyPair::new(m, p).map_err(numerical)?;
    if e_values.is_empty() {
        return Err(usage("--e requires at least one value"));
    }
    if e_values[0] != 0.0 {
        return Err(usage("--e list must start at 0"));
    }
    for w in e_values.windows(2) {
        // Negated on purpose: also catches NaN entries.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(w[1] > w[0]) {
            return Err(usage("--e list must be strictly ascending"));
        }
    }
    if let Some(&bad) = e_values.iter().find(|&&e| !(0.0..1.0).contains(&e)) {
        return Err(usage(format!("eccentricity {bad} outside [0, 1)")));
    }
    let trace = continuation::trace_along_family(mp, parity, e_values, cfg).map_err(numerical)?;
    let rows: Vec<rows::ContinueRow> = trace
        .points
        .iter()
        .map(|pt| rows::ContinueRow::new(pt, cfg))
        .collect();
    emit(&rows, format, sink)?;
    if let Some(failure) = trace.failure {
        eprintln!(
            "error: continuation stopped at e = {}: {}",
            failure.e, failure.error
        );
        return Err(CliError::Numerical(failure.error));
    }
    Ok(())
}

fn cmd_period(
    h_list: &[f64],
    t_targets: &[f64],
    cfg: &IntegratorConfig,
    format: Format,
    sink: output::Sink,
) -> Result<(), CliError> {
    match (h_list.is_empty(), t_targets.is_empty()) {
        (true, true) => return Err(usage("provide --h or --t-target")),
        (false, false) => return Err(usage("provide only one of --h and --t-target")),
        _ => {}
    }
    if let Some(&bad) = h_list.iter().find(|&&h| !(-2.0 < h && h < 0.0)) {
        return Err(usage(format!("energy {bad} outside (-2, 0)")));
    }
    if let Some(&bad) = t_targets
        .iter()
        .find(|&&t| !(t > circular::MIN_PERIOD && t.is_finite()))
    {
        return Err(usage(format!(
            "target period {bad} not above the infimum 2*pi/sqrt(8)"
        )));
    }
    let mut rows = Vec::new();
    for &h in h_list {
        let orbit = CircularOrbit::from_energy(h, cfg).map_err(numerical)?;
        rows.push(rows::PeriodRow::new(&orbit, None, cfg));
    }
    for &t in t_targets {
        let h = circular::solve_energy_for_period(t, cfg).map_err(numerical)?;
        let orbit = CircularOrbit::from_energy(h, cfg).map_err(numerical)?;
        rows.push(rows::PeriodRow::new(&orbit, Some(t), cfg));
    }
    emit(&rows, format, sink)
}

fn emit<R: rows::Row + serde::Serialize>(
    rows: &[R],
    format: Format,
    sink: output::Sink,
) -> Result<(), CliError> {
    match format {
        Format::Csv => output::write_csv(rows, sink).map_err(CliError::from),
        Format::Json => output::write_json(rows, sink).map_err(CliError::from),
    }
}
