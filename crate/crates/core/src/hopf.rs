//! Hopf bifurcation analysis via the center-manifold normal form.
//!
//! With the delay `τ` fixed at (or near) the critical value, the time-scale
//! factor `η` serves as bifurcation parameter: a conjugate root pair crosses
//! the imaginary axis at `η_c = arccos(−a/b)/(τ√(b² − a²))` with frequency
//! `ω₀ = η_c√(b² − a²)`. Projecting the cubic Taylor expansion
//! `ẋ = η(ξ_x x + ξ_y y + ξ_yy y² + ξ_yyy y³)` (with `y` the delayed state)
//! onto the center manifold yields the standard coefficients
//! `g20, g11, g02, g21`, the first Lyapunov coefficient
//!
//! ```text
//! c₁(0) = (i/2ω₀)(g20·g11 − 2|g11|² − |g02|²/3) + g21/2,
//! ```
//!
//! and from it the two classification numbers:
//!
//! * `μ₂ = −Re c₁(0) / α′(0)` — sign decides the bifurcation direction
//!   (`μ₂ > 0`: supercritical, the cycle exists for `η > η_c`);
//! * `β₂ = 2 Re c₁(0)` — sign decides orbital stability of the cycle
//!   (`β₂ < 0`: stable).
//!
//! `α′(0) = Re(dλ/dη)` is the crossing speed at `η_c`. The quadratic/cubic
//! coefficients are evaluated at the requested `η`, while the frequency and
//! crossing speed come from the critical point; the report carries both this
//! mixed evaluation and the values with everything at `η = η_c`
//! (`*_critical` fields) so either convention can be read off.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{
    largest_equilibrium, linearize, taylor_coefficients, Equilibrium, LinearCoefficients,
    ModelError, ModelKind, ModelParameters, TaylorCoefficients,
};

/// Critical time-scale factor and crossing frequency at fixed delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub eta_c: f64,
    pub omega0: f64,
}

/// Direction of the bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationType {
    /// Cycle exists on the unstable side (`η > η_c`) — `μ₂ > 0`.
    Supercritical,
    /// Cycle exists on the stable side (`η < η_c`) — `μ₂ < 0`.
    Subcritical,
}

/// Full normal-form report: every intermediate of the projection plus the
/// classification numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    /// `η` the nonlinear coefficients were evaluated at.
    pub eta: f64,
    pub eta_c: f64,
    pub omega0: f64,
    /// Crossing speed `Re(dλ/dη)` at `η_c`.
    pub alpha_prime: f64,
    /// Normalization constant of the adjoint eigenfunction (`⟨q*, q⟩ = 1`).
    pub d: Complex64,
    pub g20: Complex64,
    pub g11: Complex64,
    pub g02: Complex64,
    pub g21: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub w20_at_0: Complex64,
    pub w20_at_minus_tau: Complex64,
    pub w11_at_0: Complex64,
    pub w11_at_minus_tau: Complex64,
    pub c1_0: Complex64,
    pub mu2: f64,
    pub beta2: f64,
    pub bifurcation_type: BifurcationType,
    pub orbit_stable: bool,
    /// Period `2π/ω₀` of the bifurcating cycle at onset.
    pub period: f64,
    /// Lyapunov coefficient with the nonlinear terms also taken at `η_c`.
    pub c1_0_critical: Complex64,
    pub mu2_critical: f64,
    pub beta2_critical: f64,
}

/// Errors from Hopf analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopfError {
    #[error("no Hopf bifurcation: b = {b} ≤ a = {a}")]
    NoHopf { a: f64, b: f64 },
    #[error("degenerate crossing: dλ/dη denominator vanishes at the critical point")]
    DegenerateCrossing,
    #[error("resonant denominator in {0}: second-harmonic term cannot be solved")]
    ResonantDenominator(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Critical `η_c` and `ω₀` for fixed delay; errors when `b ≤ a`.
pub fn hopf_point(lin: &LinearCoefficients, tau: f64) -> Result<HopfPoint, HopfError> {
    let LinearCoefficients { a, b } = *lin;
    if !(a.is_finite() && b.is_finite() && a >= 0.0) {
        return Err(HopfError::InvalidInput("need finite a ≥ 0 and finite b"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(HopfError::InvalidInput("tau must be positive"));
    }
    if !lin.hopf_possible() {
        return Err(HopfError::NoHopf { a, b });
    }
    let root = (b * b - a * a).sqrt();
    let eta_c = (-a / b).acos() / (tau * root);
    Ok(HopfPoint {
        eta_c,
        omega0: eta_c * root,
    })
}

/// Crossing speed `α′(0) = Re[(iω₀/η_c) / (1 − η_c b τ e^{−iω₀τ})]`.
///
/// Positive in every non-degenerate case (the root pair moves rightward as
/// `η` grows through `η_c`).
pub fn alpha_prime(
    lin: &LinearCoefficients,
    tau: f64,
    eta_c: f64,
    omega0: f64,
) -> Result<f64, HopfError> {
    let den = Complex64::new(1.0, 0.0)
        - eta_c * lin.b * tau * Complex64::from_polar(1.0, -omega0 * tau);
    if den.norm() < 1e-12 {
        return Err(HopfError::DegenerateCrossing);
    }
    Ok((Complex64::new(0.0, omega0 / eta_c) / den).re)
}

/// All intermediates of the projection at one `(η, ω₀)` evaluation point.
struct Projection {
    d: Complex64,
    g20: Complex64,
    g11: Complex64,
    g02: Complex64,
    g21: Complex64,
    e1: Complex64,
    e2: Complex64,
    w20_0: Complex64,
    w20_m: Complex64,
    w11_0: Complex64,
    w11_m: Complex64,
    c1: Complex64,
}

fn project(
    taylor: &TaylorCoefficients,
    tau: f64,
    eta: f64,
    om: f64,
) -> Result<Projection, HopfError> {
    let TaylorCoefficients {
        xi_x,
        xi_y,
        xi_yy,
        xi_yyy,
    } = *taylor;
    let em = Complex64::from_polar(1.0, -om * tau); // e^{−iω₀τ}
    let em2 = Complex64::from_polar(1.0, -2.0 * om * tau); // e^{−2iω₀τ}
    let iom = Complex64::new(0.0, om);

    // Adjoint normalization ⟨q*, q⟩ = 1 fixes  q̄*(0) = 1/(1 + τηξ_y e^{−iω₀τ}).
    let norm = Complex64::new(1.0, 0.0) + tau * eta * xi_y * em;
    if norm.norm() < 1e-12 {
        return Err(HopfError::DegenerateCrossing);
    }
    let dbar = norm.inv();
    let d = dbar.conj();

    let g20 = 2.0 * dbar * eta * xi_yy * em2;
    let g11 = 2.0 * dbar * eta * xi_yy;
    let g02 = 2.0 * dbar * eta * xi_yy * em2.conj();

    // Second-harmonic part of the center-manifold correction w20.
    let theta1 = (eta * xi_x - 2.0 * iom) * (g20 / iom + g02.conj() / (3.0 * iom))
        + eta * xi_y * ((g20 / iom) * em + (g02.conj() / (3.0 * iom)) * em.conj())
        + g20
        + g02.conj()
        - 2.0 * eta * xi_yy * em2;
    let den1 = eta * xi_x + eta * xi_y * em2 - 2.0 * iom;
    if den1.norm() < 1e-12 {
        return Err(HopfError::ResonantDenominator("w20"));
    }
    let e1 = theta1 / den1;

    // Zero-harmonic part of w11.
    let theta2 = -eta * xi_x * (g11 / iom - g11.conj() / iom)
        - eta * xi_y * ((g11 / iom) * em - (g11.conj() / iom) * em.conj())
        + g11
        + g11.conj()
        - 2.0 * eta * xi_yy;
    let den2 = Complex64::new(eta * (xi_x + xi_y), 0.0);
    if den2.norm() < 1e-12 {
        return Err(HopfError::ResonantDenominator("w11"));
    }
    let e2 = theta2 / den2;

    let w20_0 = -g20 / iom - g02.conj() / (3.0 * iom) + e1;
    let w20_m = -(g20 / iom) * em - (g02.conj() / (3.0 * iom)) * em.conj() + e1 * em2;
    let w11_0 = g11 / iom - g11.conj() / iom + e2;
    let w11_m = (g11 / iom) * em - (g11.conj() / iom) * em.conj() + e2;

    let g21 = dbar
        * eta
        * (xi_yy * (4.0 * w11_m * em + 2.0 * w20_m * em.conj()) + 6.0 * xi_yyy * em);
    let c1 = Complex64::new(0.0, 1.0 / (2.0 * om))
        * (g20 * g11 - 2.0 * g11.norm_sqr() - g02.norm_sqr() / 3.0)
        + g21 / 2.0;

    Ok(Projection {
        d,
        g20,
        g11,
        g02,
        g21,
        e1,
        e2,
        w20_0,
        w20_m,
        w11_0,
        w11_m,
        c1,
    })
}

/// Full normal-form report for the linearization `lin` and cubic Taylor data
/// `taylor` at delay `τ`, with the nonlinear terms evaluated at time-scale
/// `η` and the crossing data at the critical point.
pub fn normal_form(
    lin: &LinearCoefficients,
    taylor: &TaylorCoefficients,
    tau: f64,
    eta: f64,
) -> Result<HopfReport, HopfError> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(HopfError::InvalidInput("eta must be positive"));
    }
    let hp = hopf_point(lin, tau)?;
    let ap = alpha_prime(lin, tau, hp.eta_c, hp.omega0)?;
    debug_assert!(ap > 0.0, "crossing speed must be positive, got {ap}");
    let at_eta = project(taylor, tau, eta, hp.omega0)?;
    let at_crit = project(taylor, tau, hp.eta_c, hp.omega0)?;

    let mu2 = -at_eta.c1.re / ap;
    let beta2 = 2.0 * at_eta.c1.re;
    Ok(HopfReport {
        eta,
        eta_c: hp.eta_c,
        omega0: hp.omega0,
        alpha_prime: ap,
        d: at_eta.d,
        g20: at_eta.g20,
        g11: at_eta.g11,
        g02: at_eta.g02,
        g21: at_eta.g21,
        e1: at_eta.e1,
        e2: at_eta.e2,
        w20_at_0: at_eta.w20_0,
        w20_at_minus_tau: at_eta.w20_m,
        w11_at_0: at_eta.w11_0,
        w11_at_minus_tau: at_eta.w11_m,
        c1_0: at_eta.c1,
        mu2,
        beta2,
        bifurcation_type: if mu2 > 0.0 {
            BifurcationType::Supercritical
        } else {
            BifurcationType::Subcritical
        },
        orbit_stable: beta2 < 0.0,
        period: 2.0 * std::f64::consts::PI / hp.omega0,
        c1_0_critical: at_crit.c1,
        mu2_critical: -at_crit.c1.re / ap,
        beta2_critical: 2.0 * at_crit.c1.re,
    })
}

/// Convenience wrapper: equilibrium, linearization and Taylor expansion of a
/// named model, then the normal form at `params.tau` / `params.eta`. Uses the
/// largest equilibrium.
pub fn model_report(
    kind: ModelKind,
    params: &ModelParameters,
) -> Result<(Equilibrium, HopfReport), HopfError> {
    let eq = largest_equilibrium(kind, params)?;
    let lin = linearize(kind, params, &eq);
    let xi = taylor_coefficients(kind, params, &eq);
    let report = normal_form(&lin, &xi, params.tau, params.eta)?;
    Ok((eq, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::characteristic_value;

    const MG: ModelParameters = ModelParameters {
        beta: 0.8,
        gamma: 0.3,
        n: 10.0,
        tau: 1.14,
        eta: 1.05,
    };
    const LS: ModelParameters = ModelParameters {
        beta: 0.9,
        gamma: 0.1,
        n: 0.1,
        tau: 17.69,
        eta: 1.05,
    };

    fn mg_pieces() -> (LinearCoefficients, TaylorCoefficients) {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        (
            linearize(ModelKind::MackeyGlass, &MG, &eq),
            taylor_coefficients(ModelKind::MackeyGlass, &MG, &eq),
        )
    }

    fn ls_pieces() -> (LinearCoefficients, TaylorCoefficients) {
        let eq = largest_equilibrium(ModelKind::Lasota, &LS).unwrap();
        (
            linearize(ModelKind::Lasota, &LS, &eq),
            taylor_coefficients(ModelKind::Lasota, &LS, &eq),
        )
    }

    #[test]
    fn critical_point_reference_values() {
        let (lin, _) = mg_pieces();
        let hp = hopf_point(&lin, 1.14).unwrap();
        assert!((hp.eta_c - 0.9998955348392958).abs() < 1e-12);
        assert!((hp.omega0 - 1.5460030892722048).abs() < 1e-12);

        let (lin, _) = ls_pieces();
        let hp = hopf_point(&lin, 17.69).unwrap();
        assert!((hp.eta_c - 1.0004385741525554).abs() < 1e-12);
        assert!((hp.omega0 - 0.126600050674389).abs() < 1e-12);
    }

    #[test]
    fn characteristic_equation_holds_at_the_critical_point() {
        for (lin, tau) in [(mg_pieces().0, 1.14), (ls_pieces().0, 17.69)] {
            let hp = hopf_point(&lin, tau).unwrap();
            let residual = characteristic_value(
                &lin,
                tau,
                hp.eta_c,
                Complex64::new(0.0, hp.omega0),
            );
            assert!(
                residual.norm() < 1e-10,
                "iω₀ must solve the characteristic equation, residual {}",
                residual.norm()
            );
        }
    }

    #[test]
    fn crossing_speed_reference_values() {
        let (lin, _) = mg_pieces();
        let hp = hopf_point(&lin, 1.14).unwrap();
        let ap = alpha_prime(&lin, 1.14, hp.eta_c, hp.omega0).unwrap();
        assert!((ap - 0.555326).abs() < 1e-5);

        let (lin, _) = ls_pieces();
        let hp = hopf_point(&lin, 17.69).unwrap();
        let ap = alpha_prime(&lin, 17.69, hp.eta_c, hp.omega0).unwrap();
        assert!((ap - 0.022338).abs() < 1e-5);
    }

    #[test]
    fn mackey_glass_normal_form_classification() {
        let (lin, xi) = mg_pieces();
        let r = normal_form(&lin, &xi, 1.14, 1.05).unwrap();
        assert!((r.c1_0.re - -16.281612).abs() < 1e-3);
        assert!((r.c1_0.im - -8.075493).abs() < 1e-3);
        assert!((r.mu2 - 29.3190).abs() < 2e-3);
        assert!((r.beta2 - -32.5632).abs() < 2e-3);
        assert!((r.mu2_critical - 28.6193).abs() < 2e-3);
        assert!((r.beta2_critical - -31.7861).abs() < 2e-3);
        assert_eq!(r.bifurcation_type, BifurcationType::Supercritical);
        assert!(r.orbit_stable);
        assert!((r.period - 2.0 * std::f64::consts::PI / r.omega0).abs() < 1e-14);
    }

    #[test]
    fn lasota_normal_form_classification() {
        let (lin, xi) = ls_pieces();
        let r = normal_form(&lin, &xi, 17.69, 1.05).unwrap();
        assert!((r.c1_0.re - -0.012598).abs() < 1e-5);
        assert!((r.c1_0.im - -0.005712).abs() < 1e-5);
        assert!((r.mu2 - 0.5640).abs() < 1e-3);
        assert!((r.beta2 - -0.025196).abs() < 1e-4);
        assert!((r.mu2_critical - 0.5325).abs() < 1e-3);
        assert!((r.beta2_critical - -0.0238).abs() < 1e-3);
        assert_eq!(r.bifurcation_type, BifurcationType::Supercritical);
        assert!(r.orbit_stable);
    }

    #[test]
    fn classification_numbers_are_consistent() {
        let (lin, xi) = mg_pieces();
        let r = normal_form(&lin, &xi, 1.14, 1.05).unwrap();
        assert_eq!(r.beta2, 2.0 * r.c1_0.re);
        assert!((r.mu2 * r.alpha_prime + r.c1_0.re).abs() < 1e-12);
        assert!(r.alpha_prime > 0.0);
    }

    #[test]
    fn evaluating_at_eta_c_matches_the_critical_fields() {
        let (lin, xi) = mg_pieces();
        let hp = hopf_point(&lin, 1.14).unwrap();
        let r = normal_form(&lin, &xi, 1.14, hp.eta_c).unwrap();
        assert_eq!(r.c1_0, r.c1_0_critical);
        assert_eq!(r.mu2, r.mu2_critical);
        assert_eq!(r.beta2, r.beta2_critical);
    }

    #[test]
    fn adjoint_normalization_integrates_to_one() {
        // ⟨q*, q⟩ = D̄ q(0) + ηξ_y ∫_{−τ}^{0} D̄ e^{−iω(ξ+τ)} e^{iωξ} dξ must
        // equal 1; Simpson quadrature checks the convention end to end.
        for (pieces, tau, eta) in [(mg_pieces(), 1.14, 1.05), (ls_pieces(), 17.69, 1.05)] {
            let (lin, xi) = pieces;
            let hp = hopf_point(&lin, tau).unwrap();
            let r = normal_form(&lin, &xi, tau, eta).unwrap();
            let dbar = r.d.conj();
            let om = hp.omega0;
            let nseg = 2000;
            let h = tau / nseg as f64;
            let integrand = |s: f64| {
                dbar * Complex64::from_polar(1.0, -om * (s + tau))
                    * Complex64::from_polar(1.0, om * s)
            };
            let mut sum = integrand(-tau) + integrand(0.0);
            for k in 1..nseg {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * integrand(-tau + k as f64 * h);
            }
            let integral = sum * (h / 3.0);
            let inner = dbar + eta * xi.xi_y * integral;
            assert!(
                (inner - Complex64::new(1.0, 0.0)).norm() < 1e-10,
                "⟨q*, q⟩ = {inner} should be 1"
            );
        }
    }

    #[test]
    fn weak_feedback_has_no_hopf_point() {
        let lin = LinearCoefficients::new(0.3, 0.168);
        assert!(matches!(hopf_point(&lin, 1.0), Err(HopfError::NoHopf { .. })));
        let xi = TaylorCoefficients {
            xi_x: -0.3,
            xi_y: -0.168,
            xi_yy: 0.1,
            xi_yyy: -0.01,
        };
        assert!(matches!(
            normal_form(&lin, &xi, 1.0, 1.0),
            Err(HopfError::NoHopf { .. })
        ));
    }

    #[test]
    fn model_report_composes_the_pieces() {
        let (eq, r) = model_report(ModelKind::MackeyGlass, &MG).unwrap();
        assert!((eq.x_star - 1.0524097791489255).abs() < 1e-12);
        let (lin, xi) = mg_pieces();
        let direct = normal_form(&lin, &xi, MG.tau, MG.eta).unwrap();
        assert_eq!(r, direct);
    }
}
