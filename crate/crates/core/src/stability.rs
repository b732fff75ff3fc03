//! Delay thresholds of the linearized equation `ẋ = −ηa x − ηb x(t−τ)`.
//!
//! For `b > a ≥ 0` three delays split the behaviour of the stable equilibrium:
//!
//! * `tau_noc` — below it every solution of the linearization is eventually
//!   monotone (non-oscillatory); solves `ηbτ e^{ηaτ} = 1/e`;
//! * `tau_suff = π/(2ηb)` — a sufficient bound for asymptotic stability that
//!   needs no knowledge of `a`;
//! * `tau_c = arccos(−a/b) / (η√(b² − a²))` — the exact stability boundary.
//!   At `τ = tau_c` a conjugate root pair crosses the imaginary axis at
//!   `±iω₀`, `ω₀ = η√(b² − a²)`, and a Hopf bifurcation produces oscillations
//!   of period `2π/ω₀`.
//!
//! These always order as `tau_noc < 1/(ηbe) < 1/(ηb) < tau_suff < tau_c`
//! (with equalities only at `a = 0`), which property tests in this crate
//! exercise over random coefficient sets. The module also grids the two kinds
//! of stability chart: thresholds swept along a model parameter, and the
//! `(a, b)` stability boundary of the generic linear equation at fixed delay.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{
    grid, largest_equilibrium, linearize, Equilibrium, LinearCoefficients, ModelError, ModelKind,
    ModelParameters,
};
use crate::solve::bisect;

/// The three delay thresholds plus the Hopf crossing data at `tau_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityThresholds {
    /// Largest delay below which solutions are eventually monotone.
    pub tau_noc: f64,
    /// Delay-robust sufficient stability bound `π/(2ηb)`.
    pub tau_suff: f64,
    /// Exact stability boundary (Hopf point).
    pub tau_c: f64,
    /// Crossing frequency `η√(b² − a²)` at the boundary.
    pub omega0: f64,
    /// Period `2π/ω₀` of the oscillation born at the boundary.
    pub hopf_period: f64,
}

/// Critical delay with its crossing frequency and emergent period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalDelay {
    pub tau_c: f64,
    pub omega0: f64,
    pub period: f64,
}

/// Errors from threshold computation and chart gridding.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error(
        "no delay-induced instability: b = {b} ≤ a = {a}, the equilibrium is stable for every delay"
    )]
    NoHopf { a: f64, b: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check_coefficients(lin: &LinearCoefficients, eta: f64) -> Result<(), StabilityError> {
    if !(lin.a.is_finite() && lin.b.is_finite() && lin.a >= 0.0) {
        return Err(StabilityError::InvalidInput("need finite a ≥ 0 and finite b"));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(StabilityError::InvalidInput("eta must be positive"));
    }
    Ok(())
}

/// Sufficient stability bound `π/(2ηb)`.
///
/// Requires `b > 0`; callers reach this through [`thresholds`] or the chart
/// builders, which check that first.
pub fn tau_sufficient(lin: &LinearCoefficients, eta: f64) -> f64 {
    assert!(lin.b > 0.0, "tau_sufficient needs b > 0");
    PI / (2.0 * eta * lin.b)
}

/// Non-oscillation bound: the unique `τ` with `ηbτ e^{ηaτ} = 1/e`.
///
/// The left side rises strictly from 0, and equals `e^{a/b} ≥ 1` at
/// `τ = 1/(ηb)`, so bisection on `[0, 1/(ηb)]` always brackets the root.
/// For `a = 0` the bound reduces to `1/(ηbe)` exactly. Requires `b > 0`.
pub fn tau_non_oscillatory(lin: &LinearCoefficients, eta: f64) -> f64 {
    assert!(lin.b > 0.0, "tau_non_oscillatory needs b > 0");
    let (ea, eb) = (eta * lin.a, eta * lin.b);
    let target = (-1.0_f64).exp();
    bisect(0.0, 1.0 / eb, |tau| eb * tau * (ea * tau).exp() - target)
}

/// Exact stability boundary `tau_c = arccos(−a/b) / ω₀` with
/// `ω₀ = η√(b² − a²)`, plus the period `2π/ω₀` of the bifurcating
/// oscillation. Fails with [`StabilityError::NoHopf`] when `b ≤ a`, where no
/// boundary exists.
pub fn tau_critical(
    lin: &LinearCoefficients,
    eta: f64,
) -> Result<CriticalDelay, StabilityError> {
    check_coefficients(lin, eta)?;
    if !lin.hopf_possible() {
        return Err(StabilityError::NoHopf { a: lin.a, b: lin.b });
    }
    let omega0 = eta * (lin.b * lin.b - lin.a * lin.a).sqrt();
    let tau_c = (-lin.a / lin.b).acos() / omega0;
    Ok(CriticalDelay {
        tau_c,
        omega0,
        period: 2.0 * PI / omega0,
    })
}

/// All three thresholds at once; requires the oscillatory regime `b > a ≥ 0`.
pub fn thresholds(
    lin: &LinearCoefficients,
    eta: f64,
) -> Result<StabilityThresholds, StabilityError> {
    check_coefficients(lin, eta)?;
    if !lin.hopf_possible() {
        return Err(StabilityError::NoHopf { a: lin.a, b: lin.b });
    }
    let critical = tau_critical(lin, eta)?;
    Ok(StabilityThresholds {
        tau_noc: tau_non_oscillatory(lin, eta),
        tau_suff: tau_sufficient(lin, eta),
        tau_c: critical.tau_c,
        omega0: critical.omega0,
        hopf_period: critical.period,
    })
}

/// Period of the bifurcating oscillation from the model-specific closed
/// forms, in absolute value:
///
/// * Mackey-Glass: `T = 2πβ / (γn(γ−β)√(1 + 2β/(n(γ−β))))`;
/// * Lasota: `T = 2π / (γ√((n−x*)² − 1))`;
///
/// each divided by the time-scale factor `η`. Both reduce algebraically to
/// `2π/ω₀` (tests pin this), but evaluating the published shapes directly
/// keeps them regression-checked.
pub fn model_period(
    kind: ModelKind,
    params: &ModelParameters,
    eq: &Equilibrium,
) -> Result<f64, StabilityError> {
    let lin = linearize(kind, params, eq);
    if !lin.hopf_possible() {
        return Err(StabilityError::NoHopf { a: lin.a, b: lin.b });
    }
    let ModelParameters {
        beta, gamma, n, eta, ..
    } = *params;
    let raw = match kind {
        ModelKind::MackeyGlass => {
            let q = 1.0 + 2.0 * beta / (n * (gamma - beta));
            2.0 * PI * beta / (gamma * n * (gamma - beta) * q.sqrt())
        }
        ModelKind::Lasota => {
            let m = n - eq.x_star;
            2.0 * PI / (gamma * (m * m - 1.0).sqrt())
        }
    };
    Ok(raw.abs() / eta)
}

/// Which model parameter a stability chart sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Beta,
    Gamma,
    N,
}

impl SweepParameter {
    fn apply(self, base: &ModelParameters, value: f64) -> ModelParameters {
        let mut p = *base;
        match self {
            SweepParameter::Beta => p.beta = value,
            SweepParameter::Gamma => p.gamma = value,
            SweepParameter::N => p.n = value,
        }
        p
    }

    /// Column name used in chart CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Beta => "beta",
            SweepParameter::Gamma => "gamma",
            SweepParameter::N => "n",
        }
    }
}

/// One grid point of a model-parameter stability chart.
///
/// Cells are `None` where the corresponding threshold does not exist:
/// `tau_c`/`period` whenever `b ≤ a` (stable for every delay, "unbounded"),
/// and all four when `b ≤ 0` or the swept parameters admit no positive
/// equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartRow {
    pub value: f64,
    pub tau_noc: Option<f64>,
    pub tau_suff: Option<f64>,
    pub tau_c: Option<f64>,
    pub period: Option<f64>,
}

/// Sweep one parameter of a model and tabulate the delay thresholds at each
/// grid point (the trade-off curves between parameter choice and tolerable
/// delay). Uses the largest equilibrium at each point.
pub fn model_chart(
    kind: ModelKind,
    base: &ModelParameters,
    sweep: SweepParameter,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Result<Vec<ChartRow>, StabilityError> {
    if resolution < 2 {
        return Err(StabilityError::InvalidInput("resolution must be at least 2"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo > 0.0) {
        return Err(StabilityError::InvalidInput(
            "sweep range must be positive and increasing",
        ));
    }
    grid(lo, hi, resolution)
        .into_iter()
        .map(|value| {
            let p = sweep.apply(base, value);
            p.validate()?;
            let empty = ChartRow {
                value,
                tau_noc: None,
                tau_suff: None,
                tau_c: None,
                period: None,
            };
            let eq = match largest_equilibrium(kind, &p) {
                Ok(eq) => eq,
                Err(ModelError::NoEquilibrium) => return Ok(empty),
                Err(e) => return Err(e.into()),
            };
            let lin = linearize(kind, &p, &eq);
            if lin.b <= 0.0 {
                return Ok(empty);
            }
            let tau_noc = Some(tau_non_oscillatory(&lin, p.eta));
            let tau_suff = Some(tau_sufficient(&lin, p.eta));
            let (tau_c, period) = match tau_critical(&lin, p.eta) {
                Ok(cd) => (Some(cd.tau_c), Some(cd.period)),
                Err(StabilityError::NoHopf { .. }) => (None, None),
                Err(e) => return Err(e),
            };
            Ok(ChartRow {
                value,
                tau_noc,
                tau_suff,
                tau_c,
                period,
            })
        })
        .collect()
}

/// One grid point of the generic `(a, b)` stability chart at fixed `τ`, `η`:
/// the feedback strengths at which each criterion's boundary sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub a: f64,
    /// Non-oscillation boundary `b = e^{−ηaτ−1}/(ητ)`.
    pub b_noc: f64,
    /// Sufficient-condition boundary `b = π/(2ητ)`.
    pub b_suff: f64,
    /// Exact boundary: the `b` with `arccos(−a/b) = ητ√(b² − a²)`.
    pub b_crit: f64,
}

/// Grid the stability boundaries of `ẋ = −ηa x − ηb x(t−τ)` over a range of
/// `a` at fixed delay. The exact boundary always lies on or above the
/// sufficient one, both meeting `π/(2ητ)` at `a = 0`; the region below each
/// curve is stable by the corresponding criterion.
pub fn generic_chart(
    tau: f64,
    eta: f64,
    a_lo: f64,
    a_hi: f64,
    resolution: usize,
) -> Result<Vec<BoundaryRow>, StabilityError> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(StabilityError::InvalidInput("tau must be positive"));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(StabilityError::InvalidInput("eta must be positive"));
    }
    if resolution < 2 {
        return Err(StabilityError::InvalidInput("resolution must be at least 2"));
    }
    if !(a_lo.is_finite() && a_hi.is_finite() && a_lo >= 0.0 && a_lo < a_hi) {
        return Err(StabilityError::InvalidInput(
            "a range must be non-negative and increasing",
        ));
    }
    Ok(grid(a_lo, a_hi, resolution)
        .into_iter()
        .map(|a| BoundaryRow {
            a,
            b_noc: (-(eta * a * tau) - 1.0).exp() / (eta * tau),
            b_suff: PI / (2.0 * eta * tau),
            b_crit: critical_feedback(a, tau, eta),
        })
        .collect())
}

/// The feedback strength on the exact stability boundary for given `a`:
/// root in `b` of `arccos(−a/b) − ητ√(b² − a²)`, which falls strictly from
/// `π` at `b → a⁺` (or `π/2` at `a = 0`) to `−∞`.
fn critical_feedback(a: f64, tau: f64, eta: f64) -> f64 {
    let f = |b: f64| (-a / b).acos() - eta * tau * ((b * b - a * a).max(0.0)).sqrt();
    let lo = a + 1e-12 * (1.0 + a);
    let mut hi = a + PI / (eta * tau) + 1.0;
    let mut guard = 0;
    while f(hi) > 0.0 && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    bisect(lo, hi, f)
}
