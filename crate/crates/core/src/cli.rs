//! Command-line front end. Every subcommand writes one JSON document or
//! one CSV table to stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numerical consistency
//! failure, 4 resource cap reached (partial output is still written).

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::ensemble::{jacobi_recurrence, load_recurrence, RecurrenceTable};
use crate::equilibrium::{omega_density, omega_mass};
use crate::error::{Error, Result};
use crate::intensity::{rho1, scaled_defect};
use crate::kacrice::{expected_zeros, variance, VarianceQuadratureConfig};
use crate::montecarlo::{simulate, GridConfig, ResourceCap};
use crate::universal::{universal_constant, xi, SERIES_THRESHOLD};

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "ZEROVAR_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "zerovar", version, about = "Zero counts of random orthogonal polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (default: $ZEROVAR_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The universal variance constant c.
    Constant(ConstantArgs),
    /// One-point zero intensity rho1.
    Intensity(IntensityArgs),
    /// Scaled pair correlation against the universal limit Xi.
    Correlation(CorrelationArgs),
    /// Expected number of zeros in an interval.
    Expect(ExpectArgs),
    /// Kac-Rice variance of the zero count in an interval.
    Variance(VarianceArgs),
    /// Monte Carlo law of the zero count.
    Simulate(SimulateArgs),
    /// Monte Carlo variance slopes against Kac-Rice and the asymptote.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ConstantArgs {
    #[command(flatten)]
    common: Common,
    /// Truncation window U.
    #[arg(long, default_value_t = 1000.0)]
    window: f64,
    /// Series branch threshold u0.
    #[arg(long, default_value_t = SERIES_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Also tabulate Xi on lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    xi_grid: Option<String>,
}

#[derive(Debug, Args)]
struct EnsembleArg {
    /// `jacobi:ALPHA:BETA`, `legendre`, `chebyshev`, or a recurrence file.
    #[arg(long, allow_hyphen_values = true)]
    ensemble: String,
}

#[derive(Debug, Args)]
struct IntensityArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ensemble: EnsembleArg,
    #[arg(long)]
    n: usize,
    /// Comma-separated points.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    x: Option<String>,
    /// Evenly spaced points lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct CorrelationArgs {
    #[command(flatten)]
    common: Common,
    /// Ensemble for the finite-n column; omit for Xi alone.
    #[arg(long, allow_hyphen_values = true, requires = "n")]
    ensemble: Option<String>,
    #[arg(long, requires = "ensemble")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x: f64,
    /// Comma-separated scaled separations.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "u_grid")]
    u: Option<String>,
    /// Evenly spaced separations lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    u_grid: Option<String>,
}

#[derive(Debug, Args)]
struct ExpectArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ensemble: EnsembleArg,
    #[arg(long)]
    n: usize,
    /// a:b
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args)]
struct QuadArgs {
    #[arg(long, default_value_t = 30.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value_t = 1e-3)]
    panel_target: f64,
    #[arg(long, default_value_t = 200_000_000)]
    max_evals: usize,
}

impl QuadArgs {
    fn config(&self) -> VarianceQuadratureConfig {
        VarianceQuadratureConfig {
            lambda: self.lambda,
            eta: self.eta,
            panel_target: self.panel_target,
            max_evals: self.max_evals,
        }
    }
}

#[derive(Debug, Args)]
struct VarianceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ensemble: EnsembleArg,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    grid_per_wavelength: usize,
    /// Cap on multiply-adds spent on grid evaluation.
    #[arg(long, default_value_t = 1e13)]
    max_flops: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ensemble: EnsembleArg,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ensemble: EnsembleArg,
    /// Comma-separated degrees.
    #[arg(long)]
    n: String,
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[command(flatten)]
    mc: McArgs,
    /// Largest degree for which the Kac-Rice variance is computed.
    #[arg(long, default_value_t = 200)]
    kacrice_max_n: usize,
    #[command(flatten)]
    quad: QuadArgs,
}

/// A finished computation, ready to be rendered.
struct Output {
    command: &'static str,
    config: Map<String, Value>,
    result: Value,
    /// Scalar facts repeated as `# key=value` lines in CSV output.
    summary: Map<String, Value>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    partial: bool,
}

impl Output {
    fn new(command: &'static str, config: Value, result: Value) -> Self {
        Output {
            command,
            config: into_map(config),
            result,
            summary: Map::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            partial: false,
        }
    }

    fn render(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
            }
            Format::Csv => {
                writeln!(out, "# command={}", self.command)?;
                for (k, v) in self.config.iter().chain(self.summary.iter()) {
                    writeln!(out, "# {k}={}", csv_cell(v))?;
                }
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
                Ok(())
            }
        }
    }
}

fn into_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Degenerate { .. } | Error::Consistency(_) => EXIT_CONSISTENCY,
        Error::Budget(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Resolves an ensemble spec to a recurrence table with room for degree `n`.
pub fn parse_ensemble(spec: &str, n: usize) -> Result<RecurrenceTable> {
    let capacity = n.max(1) + 1;
    match spec {
        "legendre" => return jacobi_recurrence(0.0, 0.0, capacity),
        "chebyshev" => return jacobi_recurrence(-0.5, -0.5, capacity),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("jacobi:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [alpha, beta] = parts[..] else {
            return Err(Error::Domain(format!("expected jacobi:ALPHA:BETA, got {spec}")));
        };
        return jacobi_recurrence(parse_f64(alpha, "alpha")?, parse_f64(beta, "beta")?, capacity);
    }
    let path = Path::new(spec);
    if path.exists() {
        load_recurrence(path)
    } else {
        Err(Error::Domain(format!(
            "ensemble {spec:?} is neither jacobi:ALPHA:BETA, a named family, nor a file"
        )))
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Domain(format!("cannot parse {what} from {s:?}")))
}

/// Parses `a:b`.
pub fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b] = parts[..] else {
        return Err(Error::Domain(format!("expected an interval a:b, got {s:?}")));
    };
    Ok((parse_f64(a, "interval start")?, parse_f64(b, "interval end")?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| parse_f64(p, what)).collect()
}

/// Parses `lo:hi:count` into `count` evenly spaced points.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(Error::Domain(format!("expected lo:hi:count, got {s:?}")));
    };
    let (lo, hi) = (parse_f64(lo, "grid start")?, parse_f64(hi, "grid end")?);
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("cannot parse grid count from {count:?}")))?;
    match count {
        0 => Err(Error::domain("grid count must be positive")),
        1 => Ok(vec![lo]),
        _ => Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

fn points(list: &Option<String>, grid: &Option<String>, what: &str) -> Result<Vec<f64>> {
    match (list, grid) {
        (Some(l), _) => parse_list(l, what),
        (None, Some(g)) => parse_grid(g),
        (None, None) => Err(Error::Domain(format!("no {what} values given"))),
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return if t == 0 {
            Err(Error::domain("--threads must be positive"))
        } else {
            Ok(Some(t))
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| Error::Domain(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_constant(args: &ConstantArgs) -> Result<Output> {
    let r = universal_constant(args.window, args.threshold, args.tol)?;
    if !r.converged {
        log::warn!(
            "error bound {:.3e} exceeds tolerance {:.3e}; widen the window",
            r.error_bound,
            args.tol
        );
    }
    let table = match &args.xi_grid {
        Some(g) => parse_grid(g)?
            .into_iter()
            .map(|u| Ok(vec![json!(u), json!(xi(u)?)]))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mut result = json!({
        "c": r.c,
        "quadrature_value": r.quadrature_value,
        "tail_estimate": r.tail_estimate,
        "tail_amplitude": r.tail_amplitude,
        "quadrature_error": r.quadrature_error,
        "error_bound": r.error_bound,
        "converged": r.converged,
        "evals": r.evals,
    });
    let mut out = Output::new(
        "constant",
        json!({
            "window": r.window,
            "threshold": args.threshold,
            "tol": args.tol,
            "xi_grid": args.xi_grid,
        }),
        Value::Null,
    );
    if table.is_empty() {
        out.columns = vec!["c", "quadrature_value", "tail_estimate", "error_bound", "converged"];
        out.rows = vec![["c", "quadrature_value", "tail_estimate", "error_bound", "converged"]
            .iter()
            .map(|k| result[*k].clone())
            .collect()];
    } else {
        out.summary = into_map(result.clone());
        out.columns = vec!["u", "xi"];
        out.rows = table.clone();
        result["xi_table"] = json!(table);
    }
    out.result = result;
    Ok(out)
}

fn cmd_intensity(args: &IntensityArgs) -> Result<Output> {
    let table = parse_ensemble(&args.ensemble.ensemble, args.n)?;
    let xs = points(&args.x, &args.grid, "x")?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let r = rho1(&table, args.n, x)?;
        let scaled = match omega_density(x) {
            Ok(w) if args.n > 0 => json!(r / (args.n as f64 * w)),
            _ => Value::Null,
        };
        rows.push(vec![json!(x), json!(r), scaled]);
    }
    let mut out = Output::new(
        "intensity",
        json!({ "ensemble": table.label(), "n": args.n, "x": xs }),
        json!(rows
            .iter()
            .map(|r| json!({ "x": r[0], "rho1": r[1], "rho1_scaled": r[2] }))
            .collect::<Vec<_>>()),
    );
    out.columns = vec!["x", "rho1", "rho1_scaled"];
    out.rows = rows;
    Ok(out)
}

fn cmd_correlation(args: &CorrelationArgs) -> Result<Output> {
    let us = points(&args.u, &args.u_grid, "u")?;
    let finite = match (&args.ensemble, args.n) {
        (Some(spec), Some(n)) => Some((parse_ensemble(spec, n)?, n)),
        _ => None,
    };
    let mut rows = Vec::with_capacity(us.len());
    for &u in &us {
        let limit = xi(u)?;
        let at_n = match &finite {
            Some((table, n)) if u != 0.0 => json!(scaled_defect(table, *n, args.x, u)?),
            _ => Value::Null,
        };
        rows.push(vec![json!(u), json!(limit), at_n]);
    }
    let mut out = Output::new(
        "correlation",
        json!({
            "ensemble": finite.as_ref().map(|(t, _)| t.label()),
            "n": args.n,
            "x": args.x,
            "u": us,
        }),
        json!(rows
            .iter()
            .map(|r| json!({ "u": r[0], "xi": r[1], "scaled_defect": r[2] }))
            .collect::<Vec<_>>()),
    );
    out.columns = vec!["u", "xi", "scaled_defect"];
    out.rows = rows;
    Ok(out)
}

fn cmd_expect(args: &ExpectArgs) -> Result<Output> {
    let table = parse_ensemble(&args.ensemble.ensemble, args.n)?;
    let (a, b) = parse_interval(&args.interval)?;
    let e = expected_zeros(&table, args.n, a, b, args.tol)?;
    let asymptote = args.n as f64 / 3f64.sqrt() * omega_mass(a, b)?;
    let mut out = Output::new(
        "expect",
        json!({ "ensemble": table.label(), "n": args.n, "a": a, "b": b, "tol": args.tol }),
        json!({ "expectation": e, "asymptote": asymptote }),
    );
    out.columns = vec!["n", "expectation", "asymptote"];
    out.rows = vec![vec![json!(args.n), json!(e), json!(asymptote)]];
    Ok(out)
}

/// c at the default quadrature settings, used for asymptotic columns.
fn default_constant() -> Result<f64> {
    Ok(universal_constant(1000.0, SERIES_THRESHOLD, 1e-6)?.c)
}

fn cmd_variance(args: &VarianceArgs) -> Result<Output> {
    let table = parse_ensemble(&args.ensemble.ensemble, args.n)?;
    let (a, b) = parse_interval(&args.interval)?;
    let cfg = args.quad.config();
    let r = variance(&table, args.n, a, b, &cfg)?;
    let c = default_constant()?;
    let asymptote = args.n as f64 * c * omega_mass(a, b)?;
    let mut result = serde_json::to_value(&r).expect("plain data");
    result["asymptote"] = json!(asymptote);
    let mut out = Output::new(
        "variance",
        json!({
            "ensemble": table.label(),
            "n": args.n,
            "a": a,
            "b": b,
            "lambda": cfg.lambda,
            "eta": cfg.eta,
            "panel_target": cfg.panel_target,
            "max_evals": cfg.max_evals,
        }),
        result,
    );
    out.columns = vec!["n", "variance", "expectation", "central_part", "tail_part", "error", "asymptote", "partial"];
    out.rows = vec![vec![
        json!(args.n),
        json!(r.variance),
        json!(r.expectation),
        json!(r.central_part),
        json!(r.tail_part),
        json!(r.error),
        json!(asymptote),
        json!(r.partial),
    ]];
    out.partial = r.partial;
    Ok(out)
}

fn mc_config(mc: &McArgs) -> (GridConfig, ResourceCap) {
    (
        GridConfig {
            grid_per_wavelength: mc.grid_per_wavelength,
        },
        ResourceCap {
            max_flops: mc.max_flops,
        },
    )
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Output> {
    let table = parse_ensemble(&args.ensemble.ensemble, args.n)?;
    let (a, b) = parse_interval(&args.interval)?;
    let (grid, cap) = mc_config(&args.mc);
    let r = simulate(&table, args.n, a, b, args.mc.samples, args.mc.seed, grid, cap)?;
    let mut out = Output::new(
        "simulate",
        json!({
            "ensemble": table.label(),
            "n": args.n,
            "a": a,
            "b": b,
            "samples": args.mc.samples,
            "seed": args.mc.seed,
            "grid_per_wavelength": grid.grid_per_wavelength,
            "max_flops": cap.max_flops,
        }),
        serde_json::to_value(&r).expect("plain data"),
    );
    for key in ["completed", "mean", "mean_stderr", "variance", "variance_stderr", "grid_points", "partial"] {
        out.summary.insert(key.into(), out.result[key].clone());
    }
    out.columns = vec!["count", "frequency"];
    out.rows = r
        .histogram
        .iter()
        .map(|(k, v)| vec![json!(k), json!(v)])
        .collect();
    out.partial = r.partial;
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Output> {
    let ns: Vec<usize> = args
        .n
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Domain(format!("cannot parse degree from {s:?}")))
        })
        .collect::<Result<_>>()?;
    let max_n = ns.iter().copied().max().unwrap_or(0);
    let table = parse_ensemble(&args.ensemble.ensemble, max_n)?;
    let (a, b) = parse_interval(&args.interval)?;
    let (grid, cap) = mc_config(&args.mc);
    let c = default_constant()?;
    let slope = c * omega_mass(a, b)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut partial = false;
    for &n in &ns {
        let mc = simulate(&table, n, a, b, args.mc.samples, args.mc.seed, grid, cap)?;
        let kr = if n <= args.kacrice_max_n {
            let r = variance(&table, n, a, b, &args.quad.config())?;
            partial |= r.partial;
            Some(r.variance)
        } else {
            None
        };
        partial |= mc.partial;
        let ratio = mc.variance / n as f64 / slope;
        rows.push(vec![
            json!(n),
            json!(mc.mean),
            json!(mc.variance),
            json!(mc.variance_stderr),
            json!(kr),
            json!(slope),
            json!(ratio),
        ]);
        records.push(json!({
            "n": n,
            "mc_mean": mc.mean,
            "mc_variance": mc.variance,
            "mc_stderr": mc.variance_stderr,
            "kacrice_variance": kr,
            "asymptote": slope,
            "ratio": ratio,
            "partial": mc.partial,
        }));
    }
    let mut out = Output::new(
        "verify",
        json!({
            "ensemble": table.label(),
            "n": ns,
            "a": a,
            "b": b,
            "samples": args.mc.samples,
            "seed": args.mc.seed,
            "grid_per_wavelength": grid.grid_per_wavelength,
            "max_flops": cap.max_flops,
            "kacrice_max_n": args.kacrice_max_n,
            "c": c,
        }),
        json!(records),
    );
    out.columns = vec!["n", "mc_mean", "mc_variance", "mc_stderr", "kacrice_variance", "asymptote", "ratio"];
    out.rows = rows;
    out.partial = partial;
    Ok(out)
}

fn dispatch(cli: &Cli) -> (Format, Result<Output>) {
    let (common, run): (&Common, Box<dyn Fn() -> Result<Output> + Send + Sync + '_>) = match &cli.command {
        Command::Constant(a) => (&a.common, Box::new(move || cmd_constant(a))),
        Command::Intensity(a) => (&a.common, Box::new(move || cmd_intensity(a))),
        Command::Correlation(a) => (&a.common, Box::new(move || cmd_correlation(a))),
        Command::Expect(a) => (&a.common, Box::new(move || cmd_expect(a))),
        Command::Variance(a) => (&a.common, Box::new(move || cmd_variance(a))),
        Command::Simulate(a) => (&a.common, Box::new(move || cmd_simulate(a))),
        Command::Verify(a) => (&a.common, Box::new(move || cmd_verify(a))),
    };
    let threads = match thread_count(common.threads) {
        Ok(t) => t,
        Err(e) => return (common.format, Err(e)),
    };
    let result = match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::Domain(format!("cannot start {t} worker threads: {e}"))),
        },
        None => run(),
    };
    (common.format, result)
}

/// Runs the command line `argv` (program name first) against the given
/// streams and returns the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let (format, result) = dispatch(&cli);
    match result {
        Ok(output) => {
            if let Err(e) = output.render(format, out) {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            if output.partial {
                let _ = writeln!(err, "warning: resource cap reached, output is partial");
                EXIT_BUDGET
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs against the process stdout and stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    // stderr stays unlocked: log records are written from worker threads
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_and_grid_parsing() {
        assert_eq!(parse_interval("-0.5:0.5").unwrap(), (-0.5, 0.5));
        assert!(parse_interval("0.5").is_err());
        assert!(parse_interval("a:b").is_err());
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn ensemble_specs() {
        assert_eq!(parse_ensemble("jacobi:-0.5:-0.5", 10).unwrap().label(), "jacobi:-0.5:-0.5");
        assert_eq!(parse_ensemble("legendre", 3).unwrap().capacity(), 4);
        assert!(parse_ensemble("jacobi:1", 3).is_err());
        assert!(parse_ensemble("/no/such/file", 3).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::domain("x")), EXIT_USAGE);
        assert_eq!(exit_code(&Error::consistency("x")), EXIT_CONSISTENCY);
        assert_eq!(exit_code(&Error::Degenerate { relative_delta: 0.0 }), EXIT_CONSISTENCY);
        assert_eq!(exit_code(&Error::Budget("x".into())), EXIT_BUDGET);
    }
}
