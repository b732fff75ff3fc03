//! CLI error channel with stable exit codes: 1 for I/O and failed
//! verification, 2 for usage and domain errors, 3 when an iterative solver
//! does not converge, 4 when no Hopf bifurcation exists for the inputs.

use std::fmt;

use hemodyn_core::convergence::ConvergenceError;
use hemodyn_core::hopf::HopfError;
use hemodyn_core::models::ModelError;
use hemodyn_core::robust::RobustError;
use hemodyn_core::simulator::SimError;
use hemodyn_core::spectral::SpectralError;
use hemodyn_core::stability::StabilityError;

#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation: missing flags, bad values, preset conflicts.
    Usage(String),
    /// Valid invocation outside the mathematical domain of the command.
    Domain(String),
    /// An iterative search gave up without meeting its residual target.
    NoConvergence(String),
    /// The inputs admit no delay-induced oscillation.
    NoHopf(String),
    /// Reading or writing an output file failed.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::NoHopf(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Domain(m)
            | CliError::NoConvergence(m)
            | CliError::NoHopf(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::NoHopf { .. } => CliError::NoHopf(e.to_string()),
            StabilityError::Model(m) => m.into(),
            StabilityError::InvalidInput(_) => CliError::Domain(e.to_string()),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NoConvergence => CliError::NoConvergence(e.to_string()),
            SpectralError::NoHopf { .. } => CliError::NoHopf(e.to_string()),
            SpectralError::InvalidInput(_) => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HopfError> for CliError {
    fn from(e: HopfError) -> Self {
        match e {
            HopfError::NoHopf { .. } => CliError::NoHopf(e.to_string()),
            HopfError::Model(m) => m.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Model(m) => m.into(),
            SimError::Spectral(s) => s.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<RobustError> for CliError {
    fn from(e: RobustError) -> Self {
        match e {
            RobustError::Model(m) => m.into(),
            RobustError::InvalidInterval(_) => CliError::Domain(e.to_string()),
        }
    }
}
