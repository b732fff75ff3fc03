//! Rightmost characteristic root of `λ + ηa + ηb e^{−λτ} = 0`, found
//! numerically.
//!
//! This module is the crate's independent oracle: it never consults the
//! closed-form thresholds or rate formulas, only damped Newton iteration on
//! the characteristic function from a deterministic multistart grid. Tests
//! cross-validate every closed form against it — the decay rate must equal
//! `−Re λ` of the root found here, and the critical delay must be where that
//! real part crosses zero.
//!
//! The start grid covers real parts in `[−ηa − η|b| − 2/τ, η|b|]` (a band
//! guaranteed to contain the rightmost root, since `Re λ ≤ η|b|` and the
//! branch-cut bound keeps it above `−ηa − 1/τ`) and imaginary parts at the
//! half-branch spacing `kπ/τ` up to at least `4η|b|`, beyond any frequency
//! the dominant pair can reach.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::LinearCoefficients;

/// One characteristic root, canonicalized to `Im λ ≥ 0`, with the achieved
/// residual `|λ + ηa + ηb e^{−λτ}|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRoot {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

impl CharacteristicRoot {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Errors from the root search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("no Newton start converged to a root with residual below 1e-10")]
    NoConvergence,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("no imaginary-axis crossing: b = {b} ≤ a = {a}")]
    NoHopf { a: f64, b: f64 },
}

/// Value of the characteristic function `λ + ηa + ηb e^{−λτ}`.
pub fn characteristic_value(
    lin: &LinearCoefficients,
    tau: f64,
    eta: f64,
    lambda: Complex64,
) -> Complex64 {
    lambda + eta * lin.a + eta * lin.b * (-lambda * tau).exp()
}

/// Frequency `ω₀ = η√(b² − a²)` at which roots cross the imaginary axis.
pub fn crossing_frequency(lin: &LinearCoefficients, eta: f64) -> Result<f64, SpectralError> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(SpectralError::InvalidInput("eta must be positive"));
    }
    if !lin.hopf_possible() {
        return Err(SpectralError::NoHopf { a: lin.a, b: lin.b });
    }
    Ok(eta * (lin.b * lin.b - lin.a * lin.a).sqrt())
}

/// Damped Newton iteration from one start; `None` when it fails to reach
/// residual `1e−10`. Exposed so tests can steer the oracle onto specific
/// branches.
pub fn newton_root(
    lin: &LinearCoefficients,
    tau: f64,
    eta: f64,
    start: Complex64,
) -> Option<CharacteristicRoot> {
    let f = |z: Complex64| characteristic_value(lin, tau, eta, z);
    let fp = |z: Complex64| 1.0 - eta * lin.b * tau * (-z * tau).exp();
    let mut z = start;
    let mut fz = f(z);
    for _ in 0..200 {
        let d = fp(z);
        if d.norm() < 1e-300 {
            break;
        }
        let mut step = fz / d;
        // Half the step (up to 40 times) until the residual improves; a
        // start whose step cannot improve at all has left its basin.
        let mut accepted = None;
        for _ in 0..40 {
            let cand = z - step;
            let fc = f(cand);
            if fc.norm() < fz.norm() {
                accepted = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((cand, fc)) => {
                let moved = (cand - z).norm() <= 1e-16 * (1.0 + z.norm());
                z = cand;
                fz = fc;
                if fz.norm() < 1e-14 || moved {
                    break;
                }
            }
            None => break,
        }
    }
    let residual = fz.norm();
    if residual < 1e-10 {
        Some(CharacteristicRoot {
            re: z.re,
            im: z.im.abs(),
            residual,
        })
    } else {
        None
    }
}

/// The characteristic root with the largest real part.
///
/// `τ = 0` and `b = 0` collapse to explicit roots; otherwise a multistart
/// damped Newton search collects every converged root, deduplicates them and
/// returns the rightmost. Deterministic: the start grid is fixed by the
/// inputs and iteration order never depends on timing.
pub fn rightmost_root(
    lin: &LinearCoefficients,
    tau: f64,
    eta: f64,
) -> Result<CharacteristicRoot, SpectralError> {
    let LinearCoefficients { a, b } = *lin;
    if !(a.is_finite() && b.is_finite() && a >= 0.0) {
        return Err(SpectralError::InvalidInput("need finite a ≥ 0 and finite b"));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(SpectralError::InvalidInput("eta must be positive"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(SpectralError::InvalidInput("tau must be non-negative"));
    }
    if tau == 0.0 {
        return Ok(CharacteristicRoot {
            re: -eta * (a + b),
            im: 0.0,
            residual: 0.0,
        });
    }
    if b == 0.0 {
        return Ok(CharacteristicRoot {
            re: -eta * a,
            im: 0.0,
            residual: 0.0,
        });
    }

    let abs_b = b.abs();
    let re_lo = -eta * a - eta * abs_b - 2.0 / tau;
    let re_hi = eta * abs_b;
    let re_starts: Vec<f64> = (0..7)
        .map(|i| re_lo + (re_hi - re_lo) * i as f64 / 6.0)
        .collect();
    let k_max = ((4.0 * eta * abs_b * tau / std::f64::consts::PI).ceil() as usize).clamp(4, 512);

    let mut roots: Vec<CharacteristicRoot> = Vec::new();
    for k in 0..=k_max {
        let im = k as f64 * std::f64::consts::PI / tau;
        for &re in &re_starts {
            if let Some(root) = newton_root(lin, tau, eta, Complex64::new(re, im)) {
                let dup = roots.iter().any(|r| {
                    (r.lambda() - root.lambda()).norm() < 1e-8 * (1.0 + root.lambda().norm())
                });
                if !dup {
                    roots.push(root);
                }
            }
        }
    }
    roots
        .into_iter()
        .max_by(|p, q| p.re.partial_cmp(&q.re).unwrap())
        .ok_or(SpectralError::NoConvergence)
}
