//! Model definitions: nonlinearities, equilibria, and the coefficients that
//! feed every downstream analysis.
//!
//! Both production laws fit the template `ẋ = η(βF(x(t−τ)) − γx)`:
//!
//! * Mackey-Glass: `F(y) = y / (1 + yⁿ)` — humped for `n > 1`, models
//!   white-cell production;
//! * Lasota: `F(y) = yⁿ e^{−y}` — humped for `n > 0`, models red-cell
//!   production.
//!
//! About a positive equilibrium `x*` the dynamics linearize to
//! `ẋ = −ηa x − ηb x(t−τ)` with `a = γ` and `b = −βF′(x*)`; the cubic-order
//! Taylor coefficients `ξ_x, ξ_y, ξ_yy, ξ_yyy` of `f(x, y) = βF(y) − γx`
//! drive the Hopf normal form. Closed forms for both models are implemented
//! here and cross-checked in tests against finite differences and the
//! derivative identities `ξ_yy = βF″(x*)/2`, `ξ_yyy = βF‴(x*)/6`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solve::{bisect, linspace};

/// Which production nonlinearity the model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// `F(y) = y / (1 + yⁿ)`.
    MackeyGlass,
    /// `F(y) = yⁿ e^{−y}`.
    Lasota,
}

impl ModelKind {
    /// Stable lower-case name, matching the CLI's `--model` values.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MackeyGlass => "mackey-glass",
            ModelKind::Lasota => "lasota",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full parameter set for one model instance.
///
/// `beta` (production strength), `gamma` (decay rate) and `n` (nonlinearity
/// exponent) must be positive; the delay `tau` must be non-negative. `eta` is
/// a global time-scale factor multiplying the whole right-hand side; `1.0`
/// recovers the standard equations, and it doubles as the bifurcation
/// parameter in Hopf sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
    pub tau: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_eta() -> f64 {
    1.0
}

impl ModelParameters {
    /// Convenience constructor with `eta = 1`.
    pub fn new(beta: f64, gamma: f64, n: f64, tau: f64) -> Self {
        Self {
            beta,
            gamma,
            n,
            tau,
            eta: 1.0,
        }
    }

    /// Same parameters with a different time-scale factor.
    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    /// Same parameters with a different delay.
    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    /// Check positivity/finiteness constraints shared by both models.
    pub fn validate(&self) -> Result<(), ModelError> {
        let all_finite = self.beta.is_finite()
            && self.gamma.is_finite()
            && self.n.is_finite()
            && self.tau.is_finite()
            && self.eta.is_finite();
        if !all_finite {
            return Err(ModelError::InvalidParameters("parameters must be finite"));
        }
        if self.beta <= 0.0 {
            return Err(ModelError::InvalidParameters("beta must be positive"));
        }
        if self.gamma <= 0.0 {
            return Err(ModelError::InvalidParameters("gamma must be positive"));
        }
        if self.n <= 0.0 {
            return Err(ModelError::InvalidParameters("n must be positive"));
        }
        if self.tau < 0.0 {
            return Err(ModelError::InvalidParameters("tau must be non-negative"));
        }
        if self.eta <= 0.0 {
            return Err(ModelError::InvalidParameters("eta must be positive"));
        }
        Ok(())
    }
}

/// A positive equilibrium `x*` together with the residual `|βF(x*) − γx*|`
/// actually achieved by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x_star: f64,
    pub residual: f64,
}

/// Coefficients of the linearized delay equation `ẋ = −ηa x − ηb x(t−τ)`.
///
/// `a = γ` is always positive here; `b = −βF′(x*)` is positive exactly when
/// the equilibrium sits on the falling flank of the production hump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCoefficients {
    pub a: f64,
    pub b: f64,
}

impl LinearCoefficients {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Whether delay-induced instability is possible at all.
    ///
    /// For `b ≤ a` the equilibrium is asymptotically stable for every delay,
    /// so no critical delay (and no Hopf bifurcation) exists.
    pub fn hopf_possible(&self) -> bool {
        self.b > self.a
    }
}

/// Taylor coefficients of `f(x, y) = βF(y) − γx` at `(x*, x*)`, where `y` is
/// the delayed argument: `ξ_x = ∂f/∂x`, `ξ_y = ∂f/∂y`, `ξ_yy = ½∂²f/∂y²`,
/// `ξ_yyy = ⅙∂³f/∂y³`. These are the only nonzero terms (f is linear in x)
/// and are exactly what the Hopf normal form consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    pub xi_x: f64,
    pub xi_y: f64,
    pub xi_yy: f64,
    pub xi_yyy: f64,
}

/// Errors from model evaluation and equilibrium solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("nonlinearity requires a positive argument, got {0}")]
    NonPositiveInput(f64),
    #[error("no positive equilibrium exists for these parameters")]
    NoEquilibrium,
    #[error("derivative order {0} not supported (expected 1, 2 or 3)")]
    UnsupportedOrder(u32),
}

/// Evaluate the production nonlinearity `F(y)` for `y > 0`.
///
/// Fractional exponents make `yⁿ` undefined for `y ≤ 0`, so non-positive
/// arguments are rejected uniformly for both models.
pub fn nonlinear_f(kind: ModelKind, n: f64, y: f64) -> Result<f64, ModelError> {
    if !(y > 0.0) {
        return Err(ModelError::NonPositiveInput(y));
    }
    let s = y.powf(n);
    Ok(match kind {
        ModelKind::MackeyGlass => y / (1.0 + s),
        ModelKind::Lasota => s * (-y).exp(),
    })
}

/// Evaluate `F′`, `F″` or `F‴` at `y > 0` via closed forms.
///
/// Mackey-Glass, with `s = yⁿ`:
///
/// ```text
/// F′  = (1 + (1−n)s) / (1+s)²
/// F″  = −(n s / y) ((1+n) + (1−n)s) / (1+s)³
/// F‴  = (n s / y²) ((1−n²) + (4n²+2)s + (1−n²)s²) / (1+s)⁴
/// ```
///
/// Lasota:
///
/// ```text
/// F′  = y^{n−1} e^{−y} (n − y)
/// F″  = y^{n−2} e^{−y} (y² − 2ny + n(n−1))
/// F‴  = y^{n−3} e^{−y} (−y³ + 3ny² − 3n(n−1)y + n(n−1)(n−2))
/// ```
pub fn f_derivative(kind: ModelKind, n: f64, y: f64, order: u32) -> Result<f64, ModelError> {
    if !(y > 0.0) {
        return Err(ModelError::NonPositiveInput(y));
    }
    match kind {
        ModelKind::MackeyGlass => {
            let s = y.powf(n);
            let d = 1.0 + s;
            match order {
                1 => Ok((1.0 + (1.0 - n) * s) / (d * d)),
                2 => Ok(-(n * s / y) * ((1.0 + n) + (1.0 - n) * s) / (d * d * d)),
                3 => {
                    let poly =
                        (1.0 - n * n) + (4.0 * n * n + 2.0) * s + (1.0 - n * n) * s * s;
                    Ok((n * s / (y * y)) * poly / (d * d * d * d))
                }
                other => Err(ModelError::UnsupportedOrder(other)),
            }
        }
        ModelKind::Lasota => {
            let e = (-y).exp();
            match order {
                1 => Ok(y.powf(n - 1.0) * e * (n - y)),
                2 => Ok(y.powf(n - 2.0) * e * (y * y - 2.0 * n * y + n * (n - 1.0))),
                3 => {
                    let poly = -y * y * y + 3.0 * n * y * y - 3.0 * n * (n - 1.0) * y
                        + n * (n - 1.0) * (n - 2.0);
                    Ok(y.powf(n - 3.0) * e * poly)
                }
                other => Err(ModelError::UnsupportedOrder(other)),
            }
        }
    }
}

/// All positive equilibria of `βF(x) = γx`, sorted ascending.
///
/// Mackey-Glass has exactly one, `x* = (β/γ − 1)^{1/n}`, and requires
/// `β > γ`. Lasota equilibria solve `βxⁿe^{−x} = γx`; depending on where the
/// line `γx` cuts the hump there may be one or two (for `n > 1` the solver
/// also resolves the pair that straddles the hump maximum). A log-spaced
/// bracket scan over `[10⁻⁶, 50]` followed by bisection finds them; every
/// returned root has residual below `10⁻¹⁰`.
pub fn solve_equilibrium(
    kind: ModelKind,
    params: &ModelParameters,
) -> Result<Vec<Equilibrium>, ModelError> {
    params.validate()?;
    let ModelParameters {
        beta, gamma, n, ..
    } = *params;
    let residual_at = |x: f64| (beta * nonlinear_f(kind, n, x).unwrap() - gamma * x).abs();

    match kind {
        ModelKind::MackeyGlass => {
            if beta <= gamma {
                return Err(ModelError::NoEquilibrium);
            }
            let x_star = (beta / gamma - 1.0).powf(1.0 / n);
            Ok(vec![Equilibrium {
                x_star,
                residual: residual_at(x_star),
            }])
        }
        ModelKind::Lasota => {
            // Roots of g(x) = βx^{n−1}e^{−x} − γ; dividing out the trivial
            // x = 0 root keeps g sign-definite between true equilibria.
            let g = |x: f64| beta * x.powf(n - 1.0) * (-x).exp() - gamma;
            let (lo, hi) = (1e-6_f64, 50.0_f64);
            let count = 600;
            let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
            let mut roots: Vec<f64> = Vec::new();
            let mut x_prev = lo;
            let mut g_prev = g(x_prev);
            for i in 1..count {
                let x = lo * ratio.powi(i);
                let gx = g(x);
                if g_prev == 0.0 {
                    roots.push(x_prev);
                } else if g_prev * gx < 0.0 {
                    roots.push(bisect(x_prev, x, g));
                }
                x_prev = x;
                g_prev = gx;
            }
            if g_prev == 0.0 {
                roots.push(x_prev);
            }
            roots.sort_by(|p, q| p.partial_cmp(q).unwrap());
            roots.dedup_by(|p, q| (*p - *q).abs() < 1e-9);
            if roots.is_empty() {
                return Err(ModelError::NoEquilibrium);
            }
            Ok(roots
                .into_iter()
                .map(|x_star| Equilibrium {
                    x_star,
                    residual: residual_at(x_star),
                })
                .collect())
        }
    }
}

/// The largest positive equilibrium — the conventional operating point when a
/// model has more than one.
pub fn largest_equilibrium(
    kind: ModelKind,
    params: &ModelParameters,
) -> Result<Equilibrium, ModelError> {
    let roots = solve_equilibrium(kind, params)?;
    Ok(*roots.last().expect("solve_equilibrium returns at least one root"))
}

/// Linearize about an equilibrium: `a = γ`, `b = −βF′(x*)`.
///
/// Closed forms (used instead of the generic `F′` call so that downstream
/// thresholds inherit no interpolation error):
///
/// * Mackey-Glass: `b = (γ/β)(n(β−γ) − β)`;
/// * Lasota: `b = γ(x* − n)`.
pub fn linearize(
    kind: ModelKind,
    params: &ModelParameters,
    eq: &Equilibrium,
) -> LinearCoefficients {
    let ModelParameters {
        beta, gamma, n, ..
    } = *params;
    let b = match kind {
        ModelKind::MackeyGlass => (gamma / beta) * (n * (beta - gamma) - beta),
        ModelKind::Lasota => gamma * (eq.x_star - n),
    };
    LinearCoefficients { a: gamma, b }
}

/// Taylor coefficients of `f(x, y) = βF(y) − γx` at the equilibrium.
///
/// Closed forms per model (`x*` the equilibrium):
///
/// Mackey-Glass:
///
/// ```text
/// ξ_y   = (γ²/β)((1−n)(β/γ) + n)
/// ξ_yy  = γn(β−γ)((β−γ)(n−1) − γ(n+1)) / (2β²x*)
/// ξ_yyy = γn(β−γ)((β−γ)²(1−n²) + γ(β−γ)(4n²+2) + γ²(1−n²)) / (6β³x*²)
/// ```
///
/// Lasota:
///
/// ```text
/// ξ_y   = γ(n − x*)
/// ξ_yy  = γ(x*² − 2x*n + n(n−1)) / (2x*)
/// ξ_yyy = γ((n−x*)³ + n(2 − 3(n−x*))) / (6x*²)
/// ```
///
/// In both cases `ξ_x = −γ`, and the identities `ξ_y = βF′(x*)`,
/// `ξ_yy = βF″(x*)/2`, `ξ_yyy = βF‴(x*)/6` hold (checked in tests).
pub fn taylor_coefficients(
    kind: ModelKind,
    params: &ModelParameters,
    eq: &Equilibrium,
) -> TaylorCoefficients {
    let ModelParameters {
        beta, gamma, n, ..
    } = *params;
    let x = eq.x_star;
    match kind {
        ModelKind::MackeyGlass => {
            let d = beta - gamma;
            TaylorCoefficients {
                xi_x: -gamma,
                xi_y: (gamma * gamma / beta) * ((1.0 - n) * (beta / gamma) + n),
                xi_yy: gamma * n * d * (d * (n - 1.0) - gamma * (n + 1.0))
                    / (2.0 * beta * beta * x),
                xi_yyy: gamma
                    * n
                    * d
                    * (d * d * (1.0 - n * n)
                        + gamma * d * (4.0 * n * n + 2.0)
                        + gamma * gamma * (1.0 - n * n))
                    / (6.0 * beta * beta * beta * x * x),
            }
        }
        ModelKind::Lasota => {
            let m = n - x;
            TaylorCoefficients {
                xi_x: -gamma,
                xi_y: gamma * m,
                xi_yy: gamma * (x * x - 2.0 * x * n + n * (n - 1.0)) / (2.0 * x),
                xi_yyy: gamma * (m * m * m + n * (2.0 - 3.0 * m)) / (6.0 * x * x),
            }
        }
    }
}

/// Inclusive linear grid helper re-exported for sweep builders.
pub(crate) fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo, hi, count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MG: ModelParameters = ModelParameters {
        beta: 0.8,
        gamma: 0.3,
        n: 10.0,
        tau: 1.14,
        eta: 1.0,
    };
    const LS: ModelParameters = ModelParameters {
        beta: 0.9,
        gamma: 0.1,
        n: 0.1,
        tau: 17.69,
        eta: 1.0,
    };

    #[test]
    fn mackey_glass_nonlinearity_matches_hand_values() {
        // F(1) = 1/2 regardless of n; F(2) with n = 2 is 2/5.
        assert!((nonlinear_f(ModelKind::MackeyGlass, 10.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((nonlinear_f(ModelKind::MackeyGlass, 2.0, 2.0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn lasota_nonlinearity_matches_hand_values() {
        // F(1) = e^{−1}; F(2) with n = 3 is 8e^{−2}.
        assert!((nonlinear_f(ModelKind::Lasota, 5.0, 1.0).unwrap() - (-1.0_f64).exp()).abs() < 1e-15);
        assert!(
            (nonlinear_f(ModelKind::Lasota, 3.0, 2.0).unwrap() - 8.0 * (-2.0_f64).exp()).abs()
                < 1e-14
        );
    }

    #[test]
    fn non_positive_arguments_are_rejected() {
        assert!(matches!(
            nonlinear_f(ModelKind::MackeyGlass, 10.0, 0.0),
            Err(ModelError::NonPositiveInput(_))
        ));
        assert!(matches!(
            f_derivative(ModelKind::Lasota, 0.1, -1.0, 1),
            Err(ModelError::NonPositiveInput(_))
        ));
    }

    #[test]
    fn derivative_order_is_bounded() {
        assert!(matches!(
            f_derivative(ModelKind::MackeyGlass, 10.0, 1.0, 4),
            Err(ModelError::UnsupportedOrder(4))
        ));
        assert!(matches!(
            f_derivative(ModelKind::Lasota, 0.1, 1.0, 0),
            Err(ModelError::UnsupportedOrder(0))
        ));
    }

    /// Central finite differences of F reproduce the closed-form derivatives.
    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let cases: [(ModelKind, f64, f64); 6] = [
            (ModelKind::MackeyGlass, 10.0, 1.0524097791489255),
            (ModelKind::MackeyGlass, 2.0, 0.7),
            (ModelKind::MackeyGlass, 6.5, 1.3),
            (ModelKind::Lasota, 0.1, 1.7128708415613911),
            (ModelKind::Lasota, 3.0, 2.2),
            (ModelKind::Lasota, 0.7, 0.4),
        ];
        for (kind, n, y) in cases {
            let f = |y: f64| nonlinear_f(kind, n, y).unwrap();
            // Each difference order gets its own step: the optimal h grows with
            // the order because roundoff in the numerator scales like eps/h^k.
            let h1 = 1e-6 * y.max(1.0);
            let h2 = 1e-5 * y.max(1.0);
            let h3 = 1e-3 * y.max(1.0);
            let fd1 = (f(y + h1) - f(y - h1)) / (2.0 * h1);
            let fd2 = (f(y + h2) - 2.0 * f(y) + f(y - h2)) / (h2 * h2);
            let fd3 = (f(y + 2.0 * h3) - 2.0 * f(y + h3) + 2.0 * f(y - h3) - f(y - 2.0 * h3))
                / (2.0 * h3 * h3 * h3);
            let d1 = f_derivative(kind, n, y, 1).unwrap();
            let d2 = f_derivative(kind, n, y, 2).unwrap();
            let d3 = f_derivative(kind, n, y, 3).unwrap();
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "{kind} F' at {y}");
            assert!((d2 - fd2).abs() < 1e-4 * (1.0 + d2.abs()), "{kind} F'' at {y}");
            assert!((d3 - fd3).abs() < 5e-3 * (1.0 + d3.abs()), "{kind} F''' at {y}");
        }
    }

    #[test]
    fn mackey_glass_equilibrium_closed_form() {
        let eq = solve_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        assert_eq!(eq.len(), 1);
        assert!((eq[0].x_star - 1.0524097791489255).abs() < 1e-12);
        assert!(eq[0].residual < 1e-10);
    }

    #[test]
    fn mackey_glass_requires_beta_above_gamma() {
        let p = ModelParameters::new(0.3, 0.3, 10.0, 1.0);
        assert_eq!(
            solve_equilibrium(ModelKind::MackeyGlass, &p),
            Err(ModelError::NoEquilibrium)
        );
    }

    #[test]
    fn lasota_equilibrium_single_root() {
        let eq = solve_equilibrium(ModelKind::Lasota, &LS).unwrap();
        assert_eq!(eq.len(), 1);
        assert!((eq[0].x_star - 1.7128708415613911).abs() < 1e-10);
        assert!(eq[0].residual < 1e-10);
    }

    #[test]
    fn lasota_equilibrium_two_roots_for_steep_exponent() {
        // βxⁿe^{−x} = γx with n = 2 has roots on both flanks of the hump:
        // xe^{−x} = 0.1 gives x ≈ 0.1118 and x ≈ 3.5772.
        let p = ModelParameters::new(2.0, 0.2, 2.0, 1.0);
        let eq = solve_equilibrium(ModelKind::Lasota, &p).unwrap();
        assert_eq!(eq.len(), 2);
        assert!((eq[0].x_star - 0.111832559158963).abs() < 1e-9);
        assert!((eq[1].x_star - 3.577152063957297).abs() < 1e-9);
        for e in eq {
            assert!(e.residual < 1e-10);
        }
        let top = largest_equilibrium(ModelKind::Lasota, &p).unwrap();
        assert!((top.x_star - 3.577152063957297).abs() < 1e-9);
    }

    #[test]
    fn lasota_without_equilibrium_reports_error() {
        // Hump maximum of βxⁿe^{−x} stays below γx everywhere.
        let p = ModelParameters::new(0.05, 2.0, 2.0, 1.0);
        assert_eq!(
            solve_equilibrium(ModelKind::Lasota, &p),
            Err(ModelError::NoEquilibrium)
        );
    }

    #[test]
    fn linearization_matches_derivative_definition() {
        for (kind, p) in [(ModelKind::MackeyGlass, MG), (ModelKind::Lasota, LS)] {
            let eq = largest_equilibrium(kind, &p).unwrap();
            let lin = linearize(kind, &p, &eq);
            let b_def = -p.beta * f_derivative(kind, p.n, eq.x_star, 1).unwrap();
            assert_eq!(lin.a, p.gamma);
            assert!((lin.b - b_def).abs() < 1e-12 * (1.0 + b_def.abs()));
        }
    }

    #[test]
    fn linearization_reference_values() {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        let lin = linearize(ModelKind::MackeyGlass, &MG, &eq);
        assert!((lin.b - 1.575).abs() < 1e-12);
        assert!(lin.hopf_possible());

        let eq = largest_equilibrium(ModelKind::Lasota, &LS).unwrap();
        let lin = linearize(ModelKind::Lasota, &LS, &eq);
        assert!((lin.b - 0.16128708415613913).abs() < 1e-12);
        assert!(lin.hopf_possible());

        // Same Lasota law, flatter hump: delay-independent stability.
        let p = ModelParameters::new(0.4, 0.3, 0.1, 1.0);
        let eq = largest_equilibrium(ModelKind::Lasota, &p).unwrap();
        let lin = linearize(ModelKind::Lasota, &p, &eq);
        assert!((lin.b - 0.1682089754110789).abs() < 1e-10);
        assert!(!lin.hopf_possible());
    }

    #[test]
    fn taylor_coefficients_match_derivative_identities() {
        let cases = [
            (ModelKind::MackeyGlass, MG),
            (ModelKind::MackeyGlass, ModelParameters::new(0.65, 0.3, 8.0, 1.0)),
            (ModelKind::Lasota, LS),
            (ModelKind::Lasota, ModelParameters::new(2.0, 0.2, 2.0, 1.0)),
        ];
        for (kind, p) in cases {
            let eq = largest_equilibrium(kind, &p).unwrap();
            let xi = taylor_coefficients(kind, &p, &eq);
            let x = eq.x_star;
            let want_y = p.beta * f_derivative(kind, p.n, x, 1).unwrap();
            let want_yy = p.beta * f_derivative(kind, p.n, x, 2).unwrap() / 2.0;
            let want_yyy = p.beta * f_derivative(kind, p.n, x, 3).unwrap() / 6.0;
            assert_eq!(xi.xi_x, -p.gamma);
            assert!((xi.xi_y - want_y).abs() < 1e-8 * (1.0 + want_y.abs()), "{kind} xi_y");
            assert!(
                (xi.xi_yy - want_yy).abs() < 1e-8 * (1.0 + want_yy.abs()),
                "{kind} xi_yy"
            );
            assert!(
                (xi.xi_yyy - want_yyy).abs() < 1e-8 * (1.0 + want_yyy.abs()),
                "{kind} xi_yyy"
            );
        }
    }

    #[test]
    fn taylor_reference_values() {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        let xi = taylor_coefficients(ModelKind::MackeyGlass, &MG, &eq);
        assert!((xi.xi_x - -0.3).abs() < 1e-15);
        assert!((xi.xi_y - -1.575).abs() < 1e-12);
        assert!((xi.xi_yy - 1.3362190544611072).abs() < 1e-12);
        assert!((xi.xi_yyy - 11.74449962234357).abs() < 1e-10);

        let eq = largest_equilibrium(ModelKind::Lasota, &LS).unwrap();
        let xi = taylor_coefficients(ModelKind::Lasota, &LS, &eq);
        assert!((xi.xi_y - -0.16128708415613913).abs() < 1e-12);
        assert!((xi.xi_yy - 0.07301637376460936).abs() < 1e-10);
        assert!((xi.xi_yyy - -0.01994928457480196).abs() < 1e-10);
    }

    #[test]
    fn parameter_validation_rejects_bad_values() {
        for bad in [
            ModelParameters::new(0.0, 0.3, 10.0, 1.0),
            ModelParameters::new(0.8, -0.1, 10.0, 1.0),
            ModelParameters::new(0.8, 0.3, 0.0, 1.0),
            ModelParameters::new(0.8, 0.3, 10.0, -1.0),
            ModelParameters::new(0.8, 0.3, 10.0, 1.0).with_eta(0.0),
            ModelParameters::new(f64::NAN, 0.3, 10.0, 1.0),
        ] {
            assert!(bad.validate().is_err(), "{bad:?} should fail validation");
        }
        assert!(MG.validate().is_ok());
    }
}
