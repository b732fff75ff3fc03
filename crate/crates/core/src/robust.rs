//! Delay bounds that survive interval parameter uncertainty.
//!
//! Physiological parameters are never known exactly; here each of `β`, `γ`,
//! `n` lives in an interval and a delay bound must hold for **every**
//! realization in the box. Because the characteristic quasi-polynomial has a
//! one-dimensional delayed term, a Kharitonov-style vertex argument applies:
//! checking the worst-case feedback strength `b` over the box corners is
//! enough, and the robust bound is `τ < 1/b_worst` (the scalar sufficient
//! condition `bτ < 1` applied at the worst vertex).
//!
//! * Mackey-Glass: `b = (γ/β)(n(β−γ) − β)` is monotone in each parameter, so
//!   the worst case has a closed form and the bound is
//!   `τ_rob = β̲ / (γ̄(n̄(β̄−γ̲) − β̲))`.
//! * Lasota: `b = γ(x* − n)` involves the equilibrium, so the worst case is
//!   taken over the eight parameter-box corners (largest corner equilibrium,
//!   smallest `n`), each corner solved exactly.
//!
//! When the worst-case feedback is non-positive the equilibrium is stable for
//! every delay and the bound is reported as unbounded. Degenerate (point)
//! intervals collapse both bounds to exactly `1/b`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{
    largest_equilibrium, LinearCoefficients, ModelError, ModelKind, ModelParameters,
};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Interval with distinct endpoints; fails when `lo > hi` or not finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self, RobustError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(RobustError::InvalidInterval("need finite lo ≤ hi"));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval holding a single value.
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Interval-valued model parameters (the uncertainty box).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalParameters {
    pub beta: Interval,
    pub gamma: Interval,
    pub n: Interval,
}

impl IntervalParameters {
    pub fn validate(&self) -> Result<(), RobustError> {
        for (iv, name) in [
            (self.beta, "beta"),
            (self.gamma, "gamma"),
            (self.n, "n"),
        ] {
            if !(iv.lo.is_finite() && iv.hi.is_finite() && iv.lo <= iv.hi) {
                let _ = name;
                return Err(RobustError::InvalidInterval("need finite lo ≤ hi"));
            }
            if iv.lo <= 0.0 {
                return Err(RobustError::InvalidInterval(
                    "interval bounds must be positive",
                ));
            }
        }
        Ok(())
    }

    /// Midpoint realization of the box (zero-width companion parameters).
    pub fn nominal(&self) -> ModelParameters {
        ModelParameters::new(
            self.beta.midpoint(),
            self.gamma.midpoint(),
            self.n.midpoint(),
            0.0,
        )
    }
}

/// Result of a robust-delay computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustBound {
    /// Stability is guaranteed for every delay below this value.
    Delay(f64),
    /// Worst-case feedback is non-positive: stable for every delay.
    Unbounded,
}

impl RobustBound {
    pub fn delay(&self) -> Option<f64> {
        match self {
            RobustBound::Delay(t) => Some(*t),
            RobustBound::Unbounded => None,
        }
    }
}

/// Errors from robust analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustError {
    #[error("invalid interval: {0}")]
    InvalidInterval(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Scalar delay-sufficient condition `bτ < 1` for fixed coefficients.
///
/// Weaker feedback can only help, so `b ≤ 0` passes for every delay.
pub fn kharitonov_sufficient(lin: &LinearCoefficients, tau: f64) -> bool {
    lin.b.max(0.0) * tau < 1.0
}

/// Worst-case (largest) feedback strength `b` over the parameter box.
///
/// Mackey-Glass maximizes the closed form at the known corner; Lasota
/// evaluates all eight corners exactly, each of which must admit a positive
/// equilibrium.
pub fn worst_case_feedback(
    kind: ModelKind,
    iv: &IntervalParameters,
) -> Result<f64, RobustError> {
    iv.validate()?;
    match kind {
        ModelKind::MackeyGlass => {
            // b = (γ/β)(n(β−γ) − β) grows with γ and n and with wider β−γ
            // spread, so the maximizing corner is explicit.
            Ok((iv.gamma.hi / iv.beta.lo) * (iv.n.hi * (iv.beta.hi - iv.gamma.lo) - iv.beta.lo))
        }
        ModelKind::Lasota => {
            // b = γ(x* − n): the corner with the largest equilibrium,
            // largest γ and smallest n dominates; x* itself is monotone in
            // each parameter only corner-wise, so scan all eight.  Corners
            // whose root falls below the solver's search floor cannot hold
            // the maximum, so they are skipped rather than fatal.
            let mut x_worst = f64::NEG_INFINITY;
            for &beta in &[iv.beta.lo, iv.beta.hi] {
                for &gamma in &[iv.gamma.lo, iv.gamma.hi] {
                    for &n in &[iv.n.lo, iv.n.hi] {
                        let p = ModelParameters::new(beta, gamma, n, 0.0);
                        match largest_equilibrium(ModelKind::Lasota, &p) {
                            Ok(eq) => x_worst = x_worst.max(eq.x_star),
                            Err(ModelError::NoEquilibrium) => continue,
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
            }
            if x_worst == f64::NEG_INFINITY {
                return Err(ModelError::NoEquilibrium.into());
            }
            Ok(iv.gamma.hi * (x_worst - iv.n.lo))
        }
    }
}

/// Largest delay guaranteed stable across the whole parameter box:
/// `τ_rob = 1 / b_worst`, or [`RobustBound::Unbounded`] when `b_worst ≤ 0`.
pub fn robust_delay_bound(
    kind: ModelKind,
    iv: &IntervalParameters,
) -> Result<RobustBound, RobustError> {
    let b_worst = worst_case_feedback(kind, iv)?;
    if b_worst <= 0.0 {
        Ok(RobustBound::Unbounded)
    } else {
        Ok(RobustBound::Delay(1.0 / b_worst))
    }
}

/// Non-robust companion bound evaluated at the box midpoint only
/// (`τ = 1/b(nominal)`): what one would certify ignoring the uncertainty.
/// Always at least as large as the robust bound.
pub fn nominal_delay_bound(
    kind: ModelKind,
    iv: &IntervalParameters,
) -> Result<RobustBound, RobustError> {
    iv.validate()?;
    let p = iv.nominal();
    let eq = largest_equilibrium(kind, &p)?;
    let lin = crate::models::linearize(kind, &p, &eq);
    if lin.b <= 0.0 {
        Ok(RobustBound::Unbounded)
    } else {
        Ok(RobustBound::Delay(1.0 / lin.b))
    }
}

/// Alternative reading of the Lasota bound with the box-midpoint equilibrium
/// substituted for the worst-case one: `τ = 1/(γ̄(x*_nominal − n̲))`.
///
/// The Lasota worst-case feedback `γ̄(x* − n̲)` leaves open which
/// realization defines `x*`; [`robust_delay_bound`] takes the conservative
/// corner maximum, while this companion plugs in the midpoint equilibrium.
/// Reporting both brackets how much of the margin the equilibrium
/// uncertainty alone costs. Unbounded when the midpoint equilibrium sits at
/// or below `n̲`.
pub fn lasota_nominal_x_bound(iv: &IntervalParameters) -> Result<RobustBound, RobustError> {
    iv.validate()?;
    let eq = largest_equilibrium(ModelKind::Lasota, &iv.nominal())?;
    let b = iv.gamma.hi * (eq.x_star - iv.n.lo);
    if b <= 0.0 {
        Ok(RobustBound::Unbounded)
    } else {
        Ok(RobustBound::Delay(1.0 / b))
    }
}
