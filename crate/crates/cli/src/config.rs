//! The serializable description of one run.
//!
//! Every output embeds its fully resolved configuration — the `# config:`
//! header line of CSV files, the `config` field of JSON documents — so that
//! `replay --from-file` can re-execute any output it produced and arrive at
//! identical bytes.

use hemodyn_core::models::ModelKind;
use hemodyn_core::stability::SweepParameter;
use serde::{Deserialize, Serialize};

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// What a `chart` run sweeps: one model parameter, or the abstract
/// coefficient `a` of the generic boundary chart (axis `b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Beta,
    Gamma,
    N,
    /// Generic mode: sweep `a` and emit the boundary values of `b`.
    B,
}

impl SweepAxis {
    pub fn model_parameter(self) -> Option<SweepParameter> {
        match self {
            SweepAxis::Beta => Some(SweepParameter::Beta),
            SweepAxis::Gamma => Some(SweepParameter::Gamma),
            SweepAxis::N => Some(SweepParameter::N),
            SweepAxis::B => None,
        }
    }
}

/// Which end of the exponent interval a `robust` sweep moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VaryBound {
    NHi,
    NLo,
}

impl VaryBound {
    pub fn column(self) -> &'static str {
        match self {
            VaryBound::NHi => "n_hi",
            VaryBound::NLo => "n_lo",
        }
    }
}

/// Fully resolved run configuration, one variant per subcommand.
///
/// All numeric fields are concrete values (defaults already applied), so
/// re-running a deserialized config touches no environment state and
/// reproduces the original output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Equilibrium {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        tau: f64,
        eta: f64,
        format: OutputFormat,
    },
    Thresholds {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        tau: f64,
        eta: f64,
        format: OutputFormat,
    },
    Chart {
        /// `None` in generic boundary mode (`sweep = b`).
        model: Option<ModelKind>,
        beta: Option<f64>,
        gamma: Option<f64>,
        n: Option<f64>,
        tau: f64,
        eta: f64,
        sweep: SweepAxis,
        lo: f64,
        hi: f64,
        resolution: usize,
        format: OutputFormat,
    },
    Roc {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        eta: f64,
        lo: f64,
        hi: f64,
        resolution: usize,
        format: OutputFormat,
    },
    Robust {
        model: ModelKind,
        beta: [f64; 2],
        gamma: [f64; 2],
        n: [f64; 2],
        vary: VaryBound,
        lo: f64,
        hi: f64,
        resolution: usize,
        format: OutputFormat,
    },
    Hopf {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        tau: f64,
        eta: f64,
    },
    Simulate {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        tau: f64,
        eta: f64,
        x0: f64,
        t_end: f64,
        h: f64,
        format: OutputFormat,
    },
    Phase {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        tau: f64,
        eta: f64,
        x0: f64,
        t_end: f64,
        h: f64,
        transient: f64,
        format: OutputFormat,
    },
    Bifurcate {
        model: ModelKind,
        beta: f64,
        gamma: f64,
        n: f64,
        /// Fixed delay of the sweep; defaults to the critical delay at the
        /// reference time scale.
        tau: f64,
        lo: f64,
        hi: f64,
        resolution: usize,
        format: OutputFormat,
    },
    Verify {},
}

impl RunConfig {
    /// Subcommand name as typed on the command line.
    pub fn command_name(&self) -> &'static str {
        match self {
            RunConfig::Equilibrium { .. } => "equilibrium",
            RunConfig::Thresholds { .. } => "thresholds",
            RunConfig::Chart { .. } => "chart",
            RunConfig::Roc { .. } => "roc",
            RunConfig::Robust { .. } => "robust",
            RunConfig::Hopf { .. } => "hopf",
            RunConfig::Simulate { .. } => "simulate",
            RunConfig::Phase { .. } => "phase",
            RunConfig::Bifurcate { .. } => "bifurcate",
            RunConfig::Verify {} => "verify",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let config = RunConfig::Thresholds {
            model: ModelKind::MackeyGlass,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            tau: 1.14,
            eta: 1.0,
            format: OutputFormat::Csv,
        };
        let line = serde_json::to_string(&config).unwrap();
        assert!(line.contains("\"command\":\"thresholds\""));
        assert!(line.contains("\"model\":\"mackey-glass\""));
        let back: RunConfig = serde_json::from_str(&line).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn verify_config_is_just_a_tag() {
        let line = serde_json::to_string(&RunConfig::Verify {}).unwrap();
        assert_eq!(line, "{\"command\":\"verify\"}");
    }
}
