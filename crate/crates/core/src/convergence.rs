//! Exact exponential decay rate of the stable linearized equation.
//!
//! For `ẋ = −a x − b x(t−τ)` with `b > 0` the distance of the rightmost
//! characteristic root from the imaginary axis, `σ(τ) = −max Re λ`, has a
//! closed description through three candidate rates:
//!
//! * `σ₁ = a + 1/τ` — where a real root would collide with the branch cut;
//! * `σ₂ = a + s/τ` with `s ∈ (0, 1)` solving `s e^{−s} = bτ e^{aτ}` — the
//!   dominant real root, which exists while `bτ e^{aτ} < 1/e`, i.e. for
//!   `τ < τ*`;
//! * `σ₃ = a + u₂cos(u₂)/(τ sin u₂)` with `u₂ ∈ (0, π)` solving
//!   `g(u) = bτ e^{aτ}`, `g(u) = (u/sin u) e^{−u/tan u}` — the dominant
//!   complex pair, which exists for `τ > τ*`.
//!
//! The realized rate is the minimum of the candidates that exist. It rises
//! with `τ` up to a single peak at `τ* ` (the delay that solves
//! `bτ e^{aτ} = 1/e` — the same equation as the non-oscillation threshold at
//! `η = 1`, and computed through the same code path) and then falls, hitting
//! zero at the critical delay when one exists. Counter-intuitively, a
//! moderate delay therefore *speeds up* convergence relative to `τ → 0`.
//!
//! Everything here is expressed at time-scale `η = 1`; for scaled systems
//! fold `η` into the coefficients (`a ↦ ηa`, `b ↦ ηb`) before calling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::LinearCoefficients;
use crate::solve::{bisect, linspace};
use crate::stability::{tau_critical, tau_non_oscillatory};

/// Which candidate produced the realized rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Branch-cut bound `a + 1/τ` (attained exactly at `τ = τ*`).
    Sigma1,
    /// Dominant real root (`τ < τ*`, including the `τ = 0` limit `a + b`).
    Sigma2,
    /// Dominant complex pair (`τ > τ*`).
    Sigma3,
}

/// Decay rate at one delay, with the branch that realized it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    /// Exponential decay rate `σ = −max Re λ` (positive in the stable range).
    pub sigma: f64,
    pub branch: Branch,
    /// The rate-maximizing delay `τ*` for these coefficients.
    pub tau_star: f64,
    /// Angle `u₂ ∈ (0, π)` of the dominant complex pair, when on `Sigma3`.
    pub u2: Option<f64>,
}

/// One grid point of a rate-versus-delay curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub tau: f64,
    pub sigma: f64,
    pub branch: Branch,
}

/// Errors from the rate analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvergenceError {
    #[error("rate analysis needs positive delayed feedback, got b = {0}")]
    NonPositiveFeedback(f64),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("no decay at tau = {tau}: the equilibrium loses stability at tau_c = {tau_c}")]
    Unstable { tau: f64, tau_c: f64 },
    #[error("g(u) is defined for 0 < u < π, got u = {0}")]
    OutOfDomain(f64),
}

/// The transcendental `g(u) = (u / sin u) e^{−u/tan u}` on `0 < u < π`.
///
/// Strictly increasing, with `g(0⁺) = 1/e` and `g(π/2) = π/2`; it diverges at
/// `u → π`. Evaluated in log space internally by the solver so that the
/// divergence never overflows; this public form may return `inf` extremely
/// close to `π`.
pub fn g_function(u: f64) -> Result<f64, ConvergenceError> {
    if !(u > 0.0 && u < std::f64::consts::PI) {
        return Err(ConvergenceError::OutOfDomain(u));
    }
    Ok(ln_g(u).exp())
}

/// `ln g(u) = ln(u / sin u) − u cos u / sin u`, finite on all of `(0, π)`.
fn ln_g(u: f64) -> f64 {
    let s = u.sin();
    (u / s).ln() - u * u.cos() / s
}

/// The rate-maximizing delay `τ*`: the root of `bτ e^{aτ} = 1/e`.
///
/// This is the non-oscillation threshold at `η = 1` and reuses its solver, so
/// the two agree bitwise. Requires `b > 0`.
pub fn tau_star(lin: &LinearCoefficients) -> f64 {
    tau_non_oscillatory(lin, 1.0)
}

/// Exact decay rate of `ẋ = −a x − b x(t−τ)` at delay `τ`.
///
/// Fails with [`ConvergenceError::Unstable`] at or beyond the critical delay.
/// Coefficients with `b ≤ a` have no critical delay and a positive rate for
/// every `τ`; `τ = 0` returns the undelayed rate `a + b`.
pub fn rate_of_convergence(
    lin: &LinearCoefficients,
    tau: f64,
) -> Result<ConvergenceResult, ConvergenceError> {
    let LinearCoefficients { a, b } = *lin;
    if !(a.is_finite() && b.is_finite() && a >= 0.0) {
        return Err(ConvergenceError::InvalidInput("need finite a ≥ 0 and finite b"));
    }
    if b <= 0.0 {
        return Err(ConvergenceError::NonPositiveFeedback(b));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(ConvergenceError::InvalidInput("tau must be non-negative"));
    }
    if let Ok(cd) = tau_critical(lin, 1.0) {
        if tau >= cd.tau_c {
            return Err(ConvergenceError::Unstable {
                tau,
                tau_c: cd.tau_c,
            });
        }
    }

    let ts = tau_star(lin);
    if tau == 0.0 {
        return Ok(ConvergenceResult {
            sigma: a + b,
            branch: Branch::Sigma2,
            tau_star: ts,
            u2: None,
        });
    }
    let sigma1 = a + 1.0 / tau;
    if tau == ts {
        return Ok(ConvergenceResult {
            sigma: sigma1,
            branch: Branch::Sigma1,
            tau_star: ts,
            u2: None,
        });
    }

    // Both remaining branches compare bτe^{aτ} against thresholds; work with
    // its logarithm so large a·τ cannot overflow.
    let ln_rhs = (b * tau).ln() + a * tau;
    if tau < ts || ln_rhs <= -1.0 {
        // Dominant real root: s e^{−s} = bτe^{aτ} on s ∈ (0, 1), i.e.
        // ln s − s = ln_rhs with a strictly increasing left side.
        let s = bisect(1e-300, 1.0, |s| s.ln() - s - ln_rhs);
        Ok(ConvergenceResult {
            sigma: a + s / tau,
            branch: Branch::Sigma2,
            tau_star: ts,
            u2: None,
        })
    } else {
        // Dominant complex pair: ln g(u) = ln_rhs on u ∈ (0, π); ln g rises
        // strictly from −1, and ln_rhs > −1 here, so the bracket is valid.
        let u2 = bisect(1e-12, std::f64::consts::PI - 1e-12, |u| ln_g(u) - ln_rhs);
        let sigma3 = a + u2 * u2.cos() / (tau * u2.sin());
        Ok(ConvergenceResult {
            sigma: sigma3,
            branch: Branch::Sigma3,
            tau_star: ts,
            u2: Some(u2),
        })
    }
}

/// Tabulate `σ(τ)` on an inclusive grid. The range must stay strictly below
/// the critical delay (when one exists); any unstable point aborts the sweep
/// with the underlying error.
pub fn rate_curve(
    lin: &LinearCoefficients,
    tau_lo: f64,
    tau_hi: f64,
    resolution: usize,
) -> Result<Vec<RateRow>, ConvergenceError> {
    if resolution < 2 {
        return Err(ConvergenceError::InvalidInput("resolution must be at least 2"));
    }
    if !(tau_lo.is_finite() && tau_hi.is_finite() && tau_lo >= 0.0 && tau_lo < tau_hi) {
        return Err(ConvergenceError::InvalidInput(
            "tau range must be non-negative and increasing",
        ));
    }
    linspace(tau_lo, tau_hi, resolution)
        .map(|tau| {
            rate_of_convergence(lin, tau).map(|r| RateRow {
                tau,
                sigma: r.sigma,
                branch: r.branch,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{largest_equilibrium, linearize, ModelKind, ModelParameters};

    fn mg_lin() -> LinearCoefficients {
        let p = ModelParameters::new(0.8, 0.3, 10.0, 1.14);
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &p).unwrap();
        linearize(ModelKind::MackeyGlass, &p, &eq)
    }

    fn ls_flat_lin() -> LinearCoefficients {
        // Lasota at β=0.4, γ=0.3, n=0.1: b < a, stable for every delay.
        let p = ModelParameters::new(0.4, 0.3, 0.1, 1.0);
        let eq = largest_equilibrium(ModelKind::Lasota, &p).unwrap();
        linearize(ModelKind::Lasota, &p, &eq)
    }

    #[test]
    fn g_known_values_and_monotonicity() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((g_function(half_pi).unwrap() - half_pi).abs() < 1e-14);
        assert!((g_function(1e-6).unwrap() - (-1.0_f64).exp()).abs() < 1e-6);
        let mut prev = 0.0;
        for i in 1..100 {
            let u = 3.14 * i as f64 / 100.0;
            let g = g_function(u).unwrap();
            assert!(g > prev, "g must increase at u = {u}");
            prev = g;
        }
    }

    #[test]
    fn g_rejects_out_of_domain_arguments() {
        for u in [0.0, -1.0, std::f64::consts::PI, 4.0] {
            assert!(matches!(g_function(u), Err(ConvergenceError::OutOfDomain(_))));
        }
    }

    #[test]
    fn tau_star_reference_values() {
        assert!((tau_star(&mg_lin()) - 0.21873880878090002).abs() < 1e-14);
        assert!((tau_star(&ls_flat_lin()) - 1.4258750109462481).abs() < 1e-10);
        // Identical code path as the non-oscillation threshold at η = 1.
        let lin = mg_lin();
        assert_eq!(
            tau_star(&lin).to_bits(),
            tau_non_oscillatory(&lin, 1.0).to_bits()
        );
    }

    #[test]
    fn zero_delay_gives_undelayed_rate() {
        let lin = mg_lin();
        let r = rate_of_convergence(&lin, 0.0).unwrap();
        assert_eq!(r.sigma, lin.a + lin.b);
        assert_eq!(r.branch, Branch::Sigma2);
    }

    #[test]
    fn branches_meet_continuously_at_tau_star() {
        for lin in [mg_lin(), ls_flat_lin(), LinearCoefficients::new(0.0, 1.0)] {
            let ts = tau_star(&lin);
            let at = rate_of_convergence(&lin, ts).unwrap();
            assert_eq!(at.branch, Branch::Sigma1);
            assert!((at.sigma - (lin.a + 1.0 / ts)).abs() < 1e-14);
            let left = rate_of_convergence(&lin, ts * (1.0 - 1e-9)).unwrap();
            let right = rate_of_convergence(&lin, ts * (1.0 + 1e-9)).unwrap();
            assert_eq!(left.branch, Branch::Sigma2);
            assert_eq!(right.branch, Branch::Sigma3);
            // The peak is a square-root fold: a relative delay offset of 1e-9
            // moves sigma by O(sqrt(1e-9)), so the meeting test uses a matching
            // tolerance rather than machine precision.
            assert!((left.sigma - at.sigma).abs() < 1e-3 * at.sigma);
            assert!((right.sigma - at.sigma).abs() < 1e-3 * at.sigma);
        }
    }

    #[test]
    fn rate_vanishes_at_the_critical_delay() {
        let lin = mg_lin();
        let tau_c = tau_critical(&lin, 1.0).unwrap().tau_c;
        let near = rate_of_convergence(&lin, 0.999 * tau_c).unwrap();
        assert!(near.sigma > 0.0);
        assert!(near.sigma < 0.05);
        assert!(matches!(
            rate_of_convergence(&lin, tau_c),
            Err(ConvergenceError::Unstable { .. })
        ));
        assert!(matches!(
            rate_of_convergence(&lin, 2.0 * tau_c),
            Err(ConvergenceError::Unstable { .. })
        ));
    }

    #[test]
    fn weak_feedback_is_stable_for_any_delay() {
        let lin = ls_flat_lin();
        assert!(!lin.hopf_possible());
        let r50 = rate_of_convergence(&lin, 50.0).unwrap();
        let r500 = rate_of_convergence(&lin, 500.0).unwrap();
        assert!(r50.sigma > 0.0 && r500.sigma > 0.0);
        assert!(r500.sigma < r50.sigma);
        // Long-delay asymptote for b < a: σ ≈ ln(a/b)/τ.
        let asymptote = (lin.a / lin.b).ln() / 500.0;
        assert!((r500.sigma - asymptote).abs() < 0.1 * asymptote);
    }

    #[test]
    fn curve_rises_to_single_peak_then_falls() {
        let lin = mg_lin();
        let tau_c = tau_critical(&lin, 1.0).unwrap().tau_c;
        let rows = rate_curve(&lin, 0.01, 0.99 * tau_c, 60).unwrap();
        let mut direction_changes = 0;
        let mut rising = true;
        for w in rows.windows(2) {
            let now_rising = w[1].sigma > w[0].sigma;
            if now_rising != rising {
                direction_changes += 1;
                rising = now_rising;
            }
        }
        assert_eq!(direction_changes, 1, "σ(τ) must be unimodal");
        let peak = rows
            .iter()
            .max_by(|p, q| p.sigma.partial_cmp(&q.sigma).unwrap())
            .unwrap();
        let ts = tau_star(&lin);
        let step = rows[1].tau - rows[0].tau;
        assert!((peak.tau - ts).abs() <= step, "peak must sit at τ*");
        // Delayed feedback beats the undelayed rate at the peak.
        assert!(peak.sigma > lin.a + lin.b);
    }

    #[test]
    fn curve_rejects_unstable_ranges() {
        let lin = mg_lin();
        let tau_c = tau_critical(&lin, 1.0).unwrap().tau_c;
        assert!(matches!(
            rate_curve(&lin, 0.0, 1.1 * tau_c, 10),
            Err(ConvergenceError::Unstable { .. })
        ));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let lin = mg_lin();
        assert!(matches!(
            rate_of_convergence(&lin, -0.1),
            Err(ConvergenceError::InvalidInput(_))
        ));
        assert!(matches!(
            rate_of_convergence(&LinearCoefficients::new(0.3, -1.0), 0.5),
            Err(ConvergenceError::NonPositiveFeedback(_))
        ));
        assert!(matches!(
            rate_of_convergence(&LinearCoefficients::new(-0.3, 1.0), 0.5),
            Err(ConvergenceError::InvalidInput(_))
        ));
    }

    #[test]
    fn large_argument_solves_do_not_overflow() {
        // bτe^{aτ} overflows f64 here; the log-space solver must not care.
        let lin = LinearCoefficients::new(2.0, 1.0);
        let r = rate_of_convergence(&lin, 500.0).unwrap();
        assert_eq!(r.branch, Branch::Sigma3);
        assert!(r.sigma > 0.0 && r.sigma.is_finite());
    }
}
