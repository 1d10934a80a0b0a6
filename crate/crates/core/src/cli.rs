//! Command-line front end.
//!
//! ```text
//! simpson-nd integrate --expr E --bounds a1,b1 [a2,b2 ...] [--cells m1[,m2...]]
//! simpson-nd verify    --dim n [--trials t] [--seed s] [--tol r]
//! simpson-nd converge  --expr E --bounds ... --reference v [--levels L] [--base-cells m]
//! simpson-nd stencil   --dim n
//! ```
//!
//! Every subcommand accepts `--output text|json|csv`. Reports go to stdout,
//! diagnostics to stderr. Exit status: 0 success, 1 usage error, 2
//! computation error, 3 failed verification.

use std::ffi::OsString;
use std::io::Write;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{convergence_study, AnalysisError};
use crate::expr::{free_variables, parse, Ast};
use crate::oracle::{verify_conjecture_with, OracleError, VerificationReport};
use crate::quadrature::{
    composite_integrate, cuboid_from_bounds, stencil_with_limits, Cuboid, GridSpec, Limits,
    QuadError, StencilNode,
};

/// Environment variable overriding the grid point budget.
pub const BUDGET_ENV: &str = "SIMPSON_ND_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "simpson-nd",
    version,
    about = "Multidimensional Simpson quadrature"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate an expression over a box with the composite rule.
    Integrate(IntegrateArgs),
    /// Compare the lattice rule with exact integrals of random polynomials.
    Verify(VerifyArgs),
    /// Refine the grid repeatedly and estimate the convergence order.
    Converge(ConvergeArgs),
    /// Print the lattice offsets and integer weights.
    Stencil(StencilArgs),
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Integrand over x1..xn, e.g. "x1^2*sin(x2)".
    #[arg(long = "expr")]
    pub expression: String,

    /// One "lower,upper" pair per axis.
    #[arg(long, required = true, num_args = 1, action = ArgAction::Append, allow_hyphen_values = true)]
    pub bounds: Vec<String>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub domain: DomainArgs,

    /// Cells per axis; a single value applies to every axis.
    #[arg(long, default_value = "1")]
    pub cells: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "tol", default_value_t = 1e-12)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub domain: DomainArgs,

    /// Exact value of the integral.
    #[arg(long, allow_hyphen_values = true)]
    pub reference: f64,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 1)]
    pub base_cells: usize,
}

#[derive(Debug, Args)]
pub struct StencilArgs {
    #[arg(long)]
    pub dim: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Quad(e) | CliError::Oracle(OracleError::Quad(e)) => quad_exit_code(e),
            CliError::Analysis(AnalysisError::Quad(e)) => quad_exit_code(e),
            CliError::Oracle(_) => EXIT_USAGE,
            CliError::Analysis(
                AnalysisError::TooFewLevels(_)
                | AnalysisError::ZeroBaseCells
                | AnalysisError::NonFiniteReference(_),
            ) => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        }
    }
}

fn quad_exit_code(e: &QuadError) -> i32 {
    match e {
        QuadError::BudgetExceeded { .. } | QuadError::Integrand(_) => EXIT_COMPUTE,
        _ => EXIT_USAGE,
    }
}

/// Parses one `"lower,upper"` axis specification.
pub fn parse_bounds(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "malformed bounds {spec:?}: expected \"lower,upper\""
        ))
    };
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    let lower: f64 = a.trim().parse().map_err(|_| bad())?;
    let upper: f64 = b.trim().parse().map_err(|_| bad())?;
    if !lower.is_finite() || !upper.is_finite() {
        return Err(CliError::Usage(format!("bounds {spec:?} must be finite")));
    }
    Ok((lower, upper))
}

/// Parses `"m"` or `"m1,m2,..."` into positive cell counts.
pub fn parse_cells(spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(m) if m >= 1 => Ok(m),
            _ => Err(CliError::Usage(format!(
                "malformed cell count {s:?} in {spec:?}: expected positive integers"
            ))),
        })
        .collect()
}

/// Reads the evaluation budget from the environment, if set.
pub fn limits_from_env() -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var(BUDGET_ENV) {
        limits.max_points = raw
            .trim()
            .parse()
            .ok()
            .filter(|&b: &u64| b > 0)
            .ok_or_else(|| {
                CliError::Usage(format!("{BUDGET_ENV}={raw:?} is not a positive integer"))
            })?;
    }
    Ok(limits)
}

/// Runs the tool with budget overrides taken from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match limits_from_env() {
        Ok(limits) => run_with_limits(args, &limits, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run_with_limits<I, T>(
    args: I,
    limits: &Limits,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let config = match RunConfig::try_parse_from(expand_bounds(args)) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&config, limits, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Rewrites `--bounds a b c` as `--bounds=a --bounds=b --bounds=c` so that
/// negative lower bounds such as `-1,1` are not mistaken for flags.
fn expand_bounds<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut out = Vec::new();
    let mut in_bounds = false;
    let mut pending_flag = false;
    for arg in args.into_iter().map(Into::into) {
        let text = arg.to_string_lossy();
        if text == "--bounds" {
            in_bounds = true;
            pending_flag = true;
            continue;
        }
        if in_bounds && !text.starts_with("--") && text != "-h" {
            let mut joined = OsString::from("--bounds=");
            joined.push(&arg);
            out.push(joined);
            pending_flag = false;
            continue;
        }
        if pending_flag {
            // `--bounds` with no values: let clap report it
            out.push(OsString::from("--bounds"));
            pending_flag = false;
        }
        in_bounds = false;
        out.push(arg);
    }
    if pending_flag {
        out.push(OsString::from("--bounds"));
    }
    out
}

fn execute(config: &RunConfig, limits: &Limits, out: &mut dyn Write) -> Result<i32, CliError> {
    let format = config.output;
    match &config.command {
        Command::Integrate(args) => integrate(args, format, limits, out).map(|()| EXIT_OK),
        Command::Verify(args) => verify(args, format, limits, out),
        Command::Converge(args) => converge(args, format, limits, out).map(|()| EXIT_OK),
        Command::Stencil(args) => print_stencil(args, format, limits, out).map(|()| EXIT_OK),
    }
}

/// Parses the expression and bounds, checking that every `xk` has an axis.
fn resolve_domain(args: &DomainArgs) -> Result<(Ast, Cuboid), CliError> {
    let ast = parse(&args.expression)
        .map_err(|e| CliError::Usage(format!("in expression {:?}: {e}", args.expression)))?;
    let (lower, upper): (Vec<f64>, Vec<f64>) = args
        .bounds
        .iter()
        .map(|s| parse_bounds(s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    let domain = cuboid_from_bounds(&lower, &upper)?;
    if let Some(&k) = free_variables(&ast).iter().next_back() {
        if k > domain.dim() {
            return Err(CliError::Usage(format!(
                "expression uses x{k} but only {} axes are bounded",
                domain.dim()
            )));
        }
    }
    Ok((ast, domain))
}

#[derive(Serialize)]
struct IntegrateReport {
    value: f64,
    evaluations: u64,
    cells: Vec<usize>,
}

fn integrate(
    args: &IntegrateArgs,
    format: OutputFormat,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (ast, domain) = resolve_domain(&args.domain)?;
    let mut cells = parse_cells(&args.cells)?;
    if cells.len() == 1 {
        cells = vec![cells[0]; domain.dim()];
    } else if cells.len() != domain.dim() {
        return Err(CliError::Usage(format!(
            "--cells has {} entries but there are {} axes",
            cells.len(),
            domain.dim()
        )));
    }
    limits
        .check_dim(domain.dim())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = GridSpec::new(cells, limits)?;
    let r = composite_integrate(&ast, &domain, &grid)?;
    let report = IntegrateReport {
        value: r.value,
        evaluations: r.evaluations,
        cells: grid.cells().to_vec(),
    };
    match format {
        OutputFormat::Text => {
            writeln!(out, "value: {}", report.value)?;
            writeln!(out, "evaluations: {}", report.evaluations)?;
        }
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Csv => {
            writeln!(out, "value,evaluations")?;
            writeln!(out, "{},{}", report.value, report.evaluations)?;
        }
    }
    Ok(())
}

fn verify(
    args: &VerifyArgs,
    format: OutputFormat,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let report = verify_conjecture_with(args.dim, args.trials, args.seed, args.rel_tol, limits)?;
    match format {
        OutputFormat::Text => write_verify_text(out, &report)?,
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Csv => {
            writeln!(out, "n,trials,seed,rel_tol,max_rel_err,failures,pass")?;
            writeln!(
                out,
                "{},{},{},{:e},{:e},{},{}",
                report.n,
                report.trials,
                report.seed,
                report.rel_tol,
                report.max_rel_err,
                report.failures.len(),
                report.pass
            )?;
        }
    }
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn write_verify_text(out: &mut dyn Write, r: &VerificationReport) -> std::io::Result<()> {
    writeln!(
        out,
        "dim {}: {} trials (seed {}), max relative error {:e}, tolerance {:e}: {}",
        r.n,
        r.trials,
        r.seed,
        r.max_rel_err,
        r.rel_tol,
        if r.pass { "pass" } else { "FAIL" }
    )?;
    for f in &r.failures {
        writeln!(out, "  trial {}: relative error {:e}", f.trial, f.rel_err)?;
    }
    Ok(())
}

fn converge(
    args: &ConvergeArgs,
    format: OutputFormat,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (ast, domain) = resolve_domain(&args.domain)?;
    limits
        .check_dim(domain.dim())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let study = convergence_study(
        &ast,
        &domain,
        args.reference,
        args.levels,
        args.base_cells,
        limits,
    )?;
    match format {
        OutputFormat::Text => {
            writeln!(
                out,
                "{:>8} {:>24} {:>12} {:>12}",
                "cells", "value", "abs_error", "evaluations"
            )?;
            for row in &study.rows {
                writeln!(
                    out,
                    "{:>8} {:>24} {:>12.4e} {:>12}",
                    row.cells_per_axis, row.value, row.abs_error, row.evaluations
                )?;
            }
            if study.estimated_orders.is_empty() {
                writeln!(out, "orders: none (errors at round-off level)")?;
            } else {
                let orders: Vec<String> = study
                    .estimated_orders
                    .iter()
                    .map(|o| format!("{o:.3}"))
                    .collect();
                writeln!(out, "orders: {}", orders.join(" "))?;
            }
        }
        OutputFormat::Json => write_json(out, &study)?,
        OutputFormat::Csv => write!(out, "{}", study.to_csv()?)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct StencilReport<'a> {
    dim: usize,
    divisor: u64,
    coefficient_sum: u64,
    nodes: &'a [StencilNode],
}

fn print_stencil(
    args: &StencilArgs,
    format: OutputFormat,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let nodes =
        stencil_with_limits(args.dim, limits).map_err(|e| CliError::Usage(e.to_string()))?;
    let join = |offset: &[i8]| {
        offset
            .iter()
            .map(|j| j.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    match format {
        OutputFormat::Text => {
            for node in &nodes {
                writeln!(out, "{} → {}", join(&node.offset), node.coefficient)?;
            }
        }
        OutputFormat::Json => write_json(
            out,
            &StencilReport {
                dim: args.dim,
                divisor: 3u64.pow(args.dim as u32),
                coefficient_sum: nodes.iter().map(|n| n.coefficient).sum(),
                nodes: &nodes,
            },
        )?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = (1..=args.dim).map(|k| format!("j{k}")).collect();
            header.push("coefficient".into());
            w.write_record(&header)?;
            for node in &nodes {
                let mut record: Vec<String> = node.offset.iter().map(|j| j.to_string()).collect();
                record.push(node.coefficient.to_string());
                w.write_record(&record)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.write_all(&bytes)?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
