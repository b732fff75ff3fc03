//! `hemodyn` — delay-differential analysis of blood-cell production models.
//!
//! Every subcommand resolves its flags into a canonical [`RunConfig`],
//! stamps that config into the output (`# config:` line for CSV, `"config"`
//! field for JSON), and renders numbers at 12 significant digits. The
//! `replay` subcommand parses the stamp back out of a previous output file
//! and reproduces it byte for byte.

mod config;
mod error;
mod format;
mod presets;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hemodyn_core::models::{largest_equilibrium, linearize, ModelKind, ModelParameters};
use hemodyn_core::simulator::default_step;
use hemodyn_core::stability::tau_critical;
use hemodyn_core::LinearCoefficients;

use config::{OutputFormat, RunConfig, SweepAxis, VaryBound};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "hemodyn",
    version,
    about = "Stability, convergence and bifurcation analysis of delayed blood-cell production models",
    after_help = "Set HEMODYN_WORKERS to bound the number of worker threads for sweeps."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positive equilibria of a model, with solver residuals
    Equilibrium(ValueArgs),
    /// Delay thresholds: non-oscillation, sufficient, critical, Hopf period
    Thresholds(ValueArgs),
    /// Stability-boundary curves over a parameter sweep
    Chart(ChartArgs),
    /// Decay rate of the stable system as a function of the delay
    Roc(RocArgs),
    /// Delay bounds that survive interval parameter uncertainty
    Robust(RobustArgs),
    /// Hopf normal-form report at the critical delay (JSON)
    Hopf(HopfArgs),
    /// Integrate the full nonlinear model and emit the trajectory
    Simulate(SeriesArgs),
    /// Delay-embedding pairs (x(t), x(t-tau)) of a trajectory
    Phase(PhaseArgs),
    /// Settled state band versus the time-scale factor eta
    Bifurcate(BifurcateArgs),
    /// Run the built-in self-checks and print one PASS/FAIL line each
    Verify(VerifyArgs),
    /// Re-run the config embedded in a previous output file
    Replay(ReplayArgs),
}

#[derive(Args)]
struct ModelFlags {
    /// Model family: mackey-glass or lasota
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Production coefficient beta
    #[arg(long)]
    beta: Option<f64>,
    /// Destruction coefficient gamma
    #[arg(long)]
    gamma: Option<f64>,
    /// Nonlinearity exponent n
    #[arg(long)]
    n: Option<f64>,
}

#[derive(Args)]
struct OutputFlags {
    /// Output format: csv or json
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Write the output to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Use a named figure preset instead of value flags
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct ValueArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Delay tau
    #[arg(long)]
    tau: Option<f64>,
    /// Time-scale factor eta
    #[arg(long)]
    eta: Option<f64>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct HopfArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Delay tau (the analysis classifies the Hopf point of this delay)
    #[arg(long)]
    tau: Option<f64>,
    /// Time-scale factor eta at which to evaluate the normal form
    #[arg(long)]
    eta: Option<f64>,
    /// Write the output to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ChartArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Delay tau held fixed along the sweep
    #[arg(long)]
    tau: Option<f64>,
    /// Time-scale factor eta
    #[arg(long)]
    eta: Option<f64>,
    /// Sweep axis: beta, gamma or n (model charts) or b (generic chart)
    #[arg(long, value_parser = parse_axis)]
    sweep: Option<SweepAxis>,
    /// Lower end of the sweep
    #[arg(long)]
    lo: Option<f64>,
    /// Upper end of the sweep
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Time-scale factor eta
    #[arg(long)]
    eta: Option<f64>,
    /// Smallest delay (default 0)
    #[arg(long)]
    lo: Option<f64>,
    /// Largest delay (default: 95% of the critical delay, or 4 tau* when
    /// the point is stable for every delay)
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct RobustArgs {
    /// Model family: mackey-glass or lasota
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Interval for beta
    #[arg(long, value_parser = parse_pair, value_name = "LO,HI")]
    beta: Option<[f64; 2]>,
    /// Interval for gamma
    #[arg(long, value_parser = parse_pair, value_name = "LO,HI")]
    gamma: Option<[f64; 2]>,
    /// Interval for n
    #[arg(long, value_parser = parse_pair, value_name = "LO,HI")]
    n: Option<[f64; 2]>,
    /// Which end of the n interval to sweep: n-hi or n-lo
    #[arg(long, value_parser = parse_vary)]
    vary: Option<VaryBound>,
    /// Smallest swept bound value
    #[arg(long)]
    lo: Option<f64>,
    /// Largest swept bound value
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Delay tau
    #[arg(long)]
    tau: Option<f64>,
    /// Time-scale factor eta
    #[arg(long)]
    eta: Option<f64>,
    /// Constant history value on [-tau, 0]
    #[arg(long)]
    x0: Option<f64>,
    /// Integration horizon
    #[arg(long)]
    t_end: Option<f64>,
    /// Step size (default min(tau/40, 0.01))
    #[arg(long)]
    h: Option<f64>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct PhaseArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Fraction of the run discarded as transient (default 0.5)
    #[arg(long)]
    transient: Option<f64>,
}

#[derive(Args)]
struct BifurcateArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Delay tau (default: the critical delay at eta = 1)
    #[arg(long)]
    tau: Option<f64>,
    /// Smallest eta
    #[arg(long)]
    lo: Option<f64>,
    /// Largest eta
    #[arg(long)]
    hi: Option<f64>,
    /// Number of eta grid points
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args)]
struct VerifyArgs {
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Output file from a previous run whose embedded config to re-execute
    #[arg(long)]
    from_file: PathBuf,
    /// Write the output to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    match s {
        "mackey-glass" | "mg" => Ok(ModelKind::MackeyGlass),
        "lasota" | "ls" => Ok(ModelKind::Lasota),
        _ => Err(format!("unknown model '{s}' (expected mackey-glass or lasota)")),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(format!("unknown format '{s}' (expected csv or json)")),
    }
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    match s {
        "beta" => Ok(SweepAxis::Beta),
        "gamma" => Ok(SweepAxis::Gamma),
        "n" => Ok(SweepAxis::N),
        "b" => Ok(SweepAxis::B),
        _ => Err(format!("unknown sweep axis '{s}' (expected beta, gamma, n or b)")),
    }
}

fn parse_vary(s: &str) -> Result<VaryBound, String> {
    match s {
        "n-hi" => Ok(VaryBound::NHi),
        "n-lo" => Ok(VaryBound::NLo),
        _ => Err(format!("unknown bound '{s}' (expected n-hi or n-lo)")),
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected LO,HI, got '{s}'"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| format!("bad number '{}'", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| format!("bad number '{}'", parts[1]))?;
    Ok([lo, hi])
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

/// Resolve a named preset, checking it belongs to the invoking subcommand.
fn preset_config(name: &str, command: &str) -> Result<RunConfig, CliError> {
    let config = presets::lookup(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown preset '{name}' (available: {})",
            presets::NAMES.join(", ")
        ))
    })?;
    if config.command_name() != command {
        return Err(CliError::Usage(format!(
            "preset '{name}' belongs to the '{}' subcommand",
            config.command_name()
        )));
    }
    Ok(config)
}

fn forbid_with_preset(any_given: bool) -> Result<(), CliError> {
    if any_given {
        Err(CliError::Usage(
            "--preset fixes all values; drop the other value flags".to_string(),
        ))
    } else {
        Ok(())
    }
}

impl ModelFlags {
    fn any(&self) -> bool {
        self.model.is_some() || self.beta.is_some() || self.gamma.is_some() || self.n.is_some()
    }

    fn unpack(self) -> Result<(ModelKind, f64, f64, f64), CliError> {
        Ok((
            require(self.model, "model")?,
            require(self.beta, "beta")?,
            require(self.gamma, "gamma")?,
            require(self.n, "n")?,
        ))
    }
}

/// The critical delay of a model point at `η = 1`; used for defaults.
fn critical_delay_default(
    kind: ModelKind,
    beta: f64,
    gamma: f64,
    n: f64,
) -> Result<f64, CliError> {
    let p = ModelParameters::new(beta, gamma, n, 1.0);
    p.validate()?;
    let eq = largest_equilibrium(kind, &p)?;
    let lin = linearize(kind, &p, &eq);
    Ok(tau_critical(&lin, 1.0)?.tau_c)
}

fn build_value_command(
    args: ValueArgs,
    command: &'static str,
    make: fn(ModelKind, f64, f64, f64, f64, f64, OutputFormat) -> RunConfig,
) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let output = args.out.output.clone();
    if let Some(name) = &args.out.preset {
        forbid_with_preset(
            args.model.any() || args.tau.is_some() || args.eta.is_some() || args.out.format.is_some(),
        )?;
        return Ok((preset_config(name, command)?, output));
    }
    let (model, beta, gamma, n) = args.model.unpack()?;
    Ok((
        make(
            model,
            beta,
            gamma,
            n,
            args.tau.unwrap_or(1.0),
            args.eta.unwrap_or(1.0),
            args.out.format.unwrap_or(OutputFormat::Csv),
        ),
        output,
    ))
}

fn resolve(command: Command) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    match command {
        Command::Equilibrium(args) => build_value_command(args, "equilibrium", |model, beta, gamma, n, tau, eta, format| {
            RunConfig::Equilibrium { model, beta, gamma, n, tau, eta, format }
        }),
        Command::Thresholds(args) => build_value_command(args, "thresholds", |model, beta, gamma, n, tau, eta, format| {
            RunConfig::Thresholds { model, beta, gamma, n, tau, eta, format }
        }),

        Command::Hopf(args) => {
            let output = args.output;
            let (model, beta, gamma, n) = args.model.unpack()?;
            Ok((
                RunConfig::Hopf {
                    model,
                    beta,
                    gamma,
                    n,
                    tau: require(args.tau, "tau")?,
                    eta: args.eta.unwrap_or(1.0),
                },
                output,
            ))
        }

        Command::Chart(args) => {
            let output = args.out.output.clone();
            if let Some(name) = &args.out.preset {
                forbid_with_preset(
                    args.model.any()
                        || args.tau.is_some()
                        || args.eta.is_some()
                        || args.sweep.is_some()
                        || args.lo.is_some()
                        || args.hi.is_some()
                        || args.resolution.is_some()
                        || args.out.format.is_some(),
                )?;
                return Ok((preset_config(name, "chart")?, output));
            }
            let sweep = require(args.sweep, "sweep")?;
            let (model, beta, gamma, n) = if sweep.model_parameter().is_some() {
                let (kind, beta, gamma, n) = args.model.unpack()?;
                (Some(kind), Some(beta), Some(gamma), Some(n))
            } else {
                (args.model.model, args.model.beta, args.model.gamma, args.model.n)
            };
            Ok((
                RunConfig::Chart {
                    model,
                    beta,
                    gamma,
                    n,
                    tau: args.tau.unwrap_or(1.0),
                    eta: args.eta.unwrap_or(1.0),
                    sweep,
                    lo: require(args.lo, "lo")?,
                    hi: require(args.hi, "hi")?,
                    resolution: args.resolution.unwrap_or(50),
                    format: args.out.format.unwrap_or(OutputFormat::Csv),
                },
                output,
            ))
        }

        Command::Roc(args) => {
            let output = args.out.output.clone();
            if let Some(name) = &args.out.preset {
                forbid_with_preset(
                    args.model.any()
                        || args.eta.is_some()
                        || args.lo.is_some()
                        || args.hi.is_some()
                        || args.resolution.is_some()
                        || args.out.format.is_some(),
                )?;
                return Ok((preset_config(name, "roc")?, output));
            }
            let (model, beta, gamma, n) = args.model.unpack()?;
            let eta = args.eta.unwrap_or(1.0);
            let hi = match args.hi {
                Some(hi) => hi,
                None => {
                    // Default window: up to just below the critical delay,
                    // or past the rate peak when no critical delay exists.
                    let p = ModelParameters::new(beta, gamma, n, 1.0).with_eta(eta);
                    p.validate()?;
                    let eq = largest_equilibrium(model, &p)?;
                    let lin = linearize(model, &p, &eq);
                    match tau_critical(&lin, eta) {
                        Ok(cd) => 0.95 * cd.tau_c,
                        Err(_) if lin.b > 0.0 => {
                            let eff = LinearCoefficients::new(eta * lin.a, eta * lin.b);
                            4.0 * hemodyn_core::convergence::tau_star(&eff)
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            };
            Ok((
                RunConfig::Roc {
                    model,
                    beta,
                    gamma,
                    n,
                    eta,
                    lo: args.lo.unwrap_or(0.0),
                    hi,
                    resolution: args.resolution.unwrap_or(200),
                    format: args.out.format.unwrap_or(OutputFormat::Csv),
                },
                output,
            ))
        }

        Command::Robust(args) => {
            let output = args.out.output.clone();
            if let Some(name) = &args.out.preset {
                forbid_with_preset(
                    args.model.is_some()
                        || args.beta.is_some()
                        || args.gamma.is_some()
                        || args.n.is_some()
                        || args.vary.is_some()
                        || args.lo.is_some()
                        || args.hi.is_some()
                        || args.resolution.is_some()
                        || args.out.format.is_some(),
                )?;
                return Ok((preset_config(name, "robust")?, output));
            }
            let n = require(args.n, "n")?;
            let vary = require(args.vary, "vary")?;
            let (lo, hi, resolution) = match (args.lo, args.hi) {
                (Some(lo), Some(hi)) => (lo, hi, args.resolution.unwrap_or(25)),
                (None, None) => {
                    // No sweep requested: evaluate once at the given interval.
                    let fixed = match vary {
                        VaryBound::NHi => n[1],
                        VaryBound::NLo => n[0],
                    };
                    (fixed, fixed, 1)
                }
                _ => {
                    return Err(CliError::Usage(
                        "give both --lo and --hi, or neither".to_string(),
                    ))
                }
            };
            Ok((
                RunConfig::Robust {
                    model: require(args.model, "model")?,
                    beta: require(args.beta, "beta")?,
                    gamma: require(args.gamma, "gamma")?,
                    n,
                    vary,
                    lo,
                    hi,
                    resolution,
                    format: args.out.format.unwrap_or(OutputFormat::Csv),
                },
                output,
            ))
        }

        Command::Simulate(args) => build_series(args, "simulate", None),
        Command::Phase(args) => build_series(args.series, "phase", Some(args.transient)),

        Command::Bifurcate(args) => {
            let output = args.out.output.clone();
            if let Some(name) = &args.out.preset {
                forbid_with_preset(
                    args.model.any()
                        || args.tau.is_some()
                        || args.lo.is_some()
                        || args.hi.is_some()
                        || args.resolution.is_some()
                        || args.out.format.is_some(),
                )?;
                return Ok((preset_config(name, "bifurcate")?, output));
            }
            let (model, beta, gamma, n) = args.model.unpack()?;
            let tau = match args.tau {
                Some(tau) => tau,
                None => critical_delay_default(model, beta, gamma, n)?,
            };
            Ok((
                RunConfig::Bifurcate {
                    model,
                    beta,
                    gamma,
                    n,
                    tau,
                    lo: args.lo.unwrap_or(0.9),
                    hi: args.hi.unwrap_or(1.2),
                    resolution: args.resolution.unwrap_or(31),
                    format: args.out.format.unwrap_or(OutputFormat::Csv),
                },
                output,
            ))
        }

        Command::Verify(args) => Ok((RunConfig::Verify {}, args.output)),

        Command::Replay(args) => {
            let text = std::fs::read_to_string(&args.from_file)?;
            Ok((embedded_config(&text)?, args.output))
        }
    }
}

fn build_series(
    args: SeriesArgs,
    command: &'static str,
    transient: Option<Option<f64>>,
) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let output = args.out.output.clone();
    if let Some(name) = &args.out.preset {
        forbid_with_preset(
            args.model.any()
                || args.tau.is_some()
                || args.eta.is_some()
                || args.x0.is_some()
                || args.t_end.is_some()
                || args.h.is_some()
                || args.out.format.is_some()
                || transient.map_or(false, |t| t.is_some()),
        )?;
        return Ok((preset_config(name, command)?, output));
    }
    let (model, beta, gamma, n) = args.model.unpack()?;
    let tau = args.tau.unwrap_or(1.0);
    let eta = args.eta.unwrap_or(1.0);
    let x0 = require(args.x0, "x0")?;
    let t_end = require(args.t_end, "t-end")?;
    let h = args.h.unwrap_or_else(|| default_step(tau));
    let format = args.out.format.unwrap_or(OutputFormat::Csv);
    let config = match transient {
        None => RunConfig::Simulate { model, beta, gamma, n, tau, eta, x0, t_end, h, format },
        Some(t) => RunConfig::Phase {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            x0,
            t_end,
            h,
            transient: t.unwrap_or(0.5),
            format,
        },
    };
    Ok((config, output))
}

/// Extract the canonical config stamped into a previous output: the
/// `# config:` first line of CSV and verify reports, or the `"config"` field
/// of a JSON document.
fn embedded_config(text: &str) -> Result<RunConfig, CliError> {
    if let Some(rest) = text.lines().next().and_then(|l| l.strip_prefix("# config: ")) {
        return serde_json::from_str(rest)
            .map_err(|e| CliError::Usage(format!("malformed embedded config: {e}")));
    }
    if text.trim_start().starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("malformed JSON document: {e}")))?;
        let config = doc
            .get("config")
            .ok_or_else(|| CliError::Usage("JSON document has no \"config\" field".to_string()))?;
        return serde_json::from_value(config.clone())
            .map_err(|e| CliError::Usage(format!("malformed embedded config: {e}")));
    }
    Err(CliError::Usage(
        "file carries no embedded config (expected a '# config:' line or a JSON \"config\" field)"
            .to_string(),
    ))
}

fn init_workers() {
    if let Ok(raw) = std::env::var("HEMODYN_WORKERS") {
        match raw.parse::<usize>() {
            Ok(count) if count >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(count)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid HEMODYN_WORKERS value '{raw}'"),
        }
    }
}

fn run_command(command: Command) -> Result<i32, CliError> {
    let (config, output) = resolve(command)?;
    let result = run::execute(&config)?;
    match output {
        Some(path) => std::fs::write(&path, result.text.as_bytes())?,
        None => print!("{}", result.text),
    }
    Ok(result.exit)
}

fn main() -> ExitCode {
    init_workers();
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
