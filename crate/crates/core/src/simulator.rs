//! Direct integration of the full nonlinear delay models.
//!
//! Classical fixed-step RK4 via the method of steps: the state and its
//! derivative are stored at every node, and delayed lookups interpolate the
//! stored segment with cubic Hermite polynomials (matching RK4's fourth-order
//! accuracy). The initial history is the constant `x(t) = x₀` on `[−τ, 0]`.
//!
//! The integrator is deliberately rigid — fixed step, no adaptivity, no
//! randomness — so identical inputs reproduce trajectories bitwise. Step
//! sizes that would undersample the delay (`h > τ/20`) or the linear rates
//! (`η·h·max(γ, |b|) > 0.1`) are rejected up front.
//!
//! On top of the raw trajectories sit the measurement helpers used by the
//! oscillation studies: equilibrium sign-change counting, limit-cycle
//! amplitude/period extraction, delay-embedding phase portraits and
//! amplitude-versus-`η` bifurcation sweeps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{
    largest_equilibrium, linearize, ModelError, ModelKind, ModelParameters,
};
use crate::spectral::{rightmost_root, SpectralError};
use crate::stability::tau_critical;

/// Errors from integration and trajectory measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation input: {0}")]
    InvalidInput(&'static str),
    #[error("step h = {h} too large; need h ≤ {limit} for this parameter set")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("state left the positive domain at t = {t}: x = {x}")]
    NonPositiveState { t: f64, x: f64 },
    #[error("measurement window holds fewer than two oscillation crossings")]
    WindowTooShort,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Default step: 40 nodes per delay, capped at 0.01 days.
pub fn default_step(tau: f64) -> f64 {
    (tau / 40.0).min(0.01)
}

/// A completed simulation: node values and derivatives on the uniform grid
/// `t_k = k·h`, with constant history `x₀` before `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: ModelKind,
    pub params: ModelParameters,
    /// Constant history value on `[−τ, 0]` (also the initial state).
    pub history_value: f64,
    pub h: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl Trajectory {
    /// Number of stored nodes (including `t = 0`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn t_end(&self) -> f64 {
        self.time_at(self.len() - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivs
    }

    /// `(t, x)` pairs over all nodes.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &x)| (self.time_at(i), x))
    }

    /// Interpolated state at any `t ≤ t_end` (history for `t ≤ 0`, cubic
    /// Hermite between nodes; `t` past the end clamps to the final node).
    pub fn value_at(&self, t: f64) -> f64 {
        hermite_sample(&self.values, &self.derivs, self.h, self.history_value, t)
    }
}

/// Cubic Hermite read of a node series at time `t` (constant history before
/// zero). Works on partially filled series during integration, where every
/// queried time lies strictly behind the last completed node.
fn hermite_sample(values: &[f64], derivs: &[f64], h: f64, history_value: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return history_value;
    }
    let pos = t / h;
    let idx = (pos.floor() as usize).min(values.len().saturating_sub(2));
    let s = (pos - idx as f64).clamp(0.0, 1.0);
    let (x0, x1) = (values[idx], values[idx + 1]);
    let (d0, d1) = (derivs[idx] * h, derivs[idx + 1] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * x0 + h10 * d0 + h01 * x1 + h11 * d1
}

/// Integrate `ẋ = η(βF(x(t−τ)) − γx)` from the constant history `x₀`.
///
/// Runs `⌈t_end/h⌉` RK4 steps. Aborts with [`SimError::NonPositiveState`]
/// the moment the state (or a delayed lookup) leaves the positive domain,
/// where the fractional-exponent nonlinearities stop being defined.
pub fn integrate(
    kind: ModelKind,
    params: &ModelParameters,
    x0: f64,
    t_end: f64,
    h: f64,
) -> Result<Trajectory, SimError> {
    params.validate()?;
    if !(x0.is_finite() && x0 > 0.0) {
        return Err(SimError::InvalidInput("x0 must be positive"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(SimError::InvalidInput("t_end must be positive"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(SimError::InvalidInput("h must be positive"));
    }
    let ModelParameters {
        beta,
        gamma,
        n,
        tau,
        eta,
    } = *params;
    if tau <= 0.0 {
        return Err(SimError::InvalidInput(
            "delayed integration needs tau > 0",
        ));
    }
    if h > tau / 20.0 {
        return Err(SimError::StepTooLarge {
            h,
            limit: tau / 20.0,
        });
    }
    // Resolve the fastest linear rate as well: γ always, |b| when the model
    // has an equilibrium to linearize about.
    let b_scale = match largest_equilibrium(kind, params) {
        Ok(eq) => linearize(kind, params, &eq).b.abs(),
        Err(ModelError::NoEquilibrium) => 0.0,
        Err(e) => return Err(e.into()),
    };
    let rate = gamma.max(b_scale);
    if eta * h * rate > 0.1 {
        return Err(SimError::StepTooLarge {
            h,
            limit: 0.1 / (eta * rate),
        });
    }

    let production = move |y: f64| match kind {
        ModelKind::MackeyGlass => y / (1.0 + y.powf(n)),
        ModelKind::Lasota => y.powf(n) * (-y).exp(),
    };
    let rhs = move |x: f64, prod_lag: f64| eta * (beta * prod_lag - gamma * x);

    let nsteps = (t_end / h).ceil().max(1.0) as usize;
    let mut values = Vec::with_capacity(nsteps + 1);
    let mut derivs = Vec::with_capacity(nsteps + 1);
    values.push(x0);
    derivs.push(rhs(x0, production(x0)));

    for k in 0..nsteps {
        let t = k as f64 * h;
        let lag = |time: f64| -> Result<f64, SimError> {
            let v = hermite_sample(&values, &derivs, h, x0, time);
            if v > 0.0 {
                Ok(v)
            } else {
                Err(SimError::NonPositiveState { t: time, x: v })
            }
        };
        let l1 = lag(t - tau)?;
        let l2 = lag(t + 0.5 * h - tau)?;
        let l4 = lag(t + h - tau)?;
        let (p1, p2, p4) = (production(l1), production(l2), production(l4));

        let x = values[k];
        let k1 = rhs(x, p1);
        let k2 = rhs(x + 0.5 * h * k1, p2);
        let k3 = rhs(x + 0.5 * h * k2, p2);
        let k4 = rhs(x + h * k3, p4);
        let x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(x_next.is_finite() && x_next > 0.0) {
            return Err(SimError::NonPositiveState {
                t: (k + 1) as f64 * h,
                x: x_next,
            });
        }
        values.push(x_next);
        derivs.push(rhs(x_next, p4));
    }

    Ok(Trajectory {
        kind,
        params: *params,
        history_value: x0,
        h,
        values,
        derivs,
    })
}

/// Amplitude/period summary of a trajectory's tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleMetrics {
    /// Half the peak-to-peak spread over the window.
    pub amplitude: f64,
    /// Mean spacing of upward mean-crossings; `0` when converged.
    pub period: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Whether the window's amplitude sits below `10⁻⁴·x*`.
    pub converged_to_equilibrium: bool,
}

fn window_start(len: usize, transient_fraction: f64) -> Result<usize, SimError> {
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(SimError::InvalidInput(
            "transient fraction must lie in [0, 1)",
        ));
    }
    let start = (len as f64 * transient_fraction).floor() as usize;
    if start + 2 > len {
        return Err(SimError::WindowTooShort);
    }
    Ok(start)
}

/// Count strict sign flips of `x(t) − x*` after discarding the leading
/// `transient_fraction` of the trajectory. Exact zeros carry the previous
/// sign. A decayed or monotone tail counts zero.
pub fn count_sign_changes(
    traj: &Trajectory,
    x_star: f64,
    transient_fraction: f64,
) -> Result<usize, SimError> {
    let start = window_start(traj.len(), transient_fraction)?;
    let mut flips = 0;
    let mut prev = 0i8;
    for &x in &traj.values()[start..] {
        let s = if x > x_star {
            1
        } else if x < x_star {
            -1
        } else {
            0
        };
        if s != 0 {
            if prev != 0 && s != prev {
                flips += 1;
            }
            prev = s;
        }
    }
    Ok(flips)
}

/// Measure the tail window of a trajectory against the equilibrium `x*`.
///
/// If the window's peak-to-peak amplitude is below `10⁻⁴·x*` the trajectory
/// is reported as converged (`period = 0`). Otherwise the period is the mean
/// spacing of linearly interpolated upward crossings of the window mean;
/// fewer than two crossings yields [`SimError::WindowTooShort`].
pub fn limit_cycle_metrics(
    traj: &Trajectory,
    transient_fraction: f64,
    x_star: f64,
) -> Result<LimitCycleMetrics, SimError> {
    let start = window_start(traj.len(), transient_fraction)?;
    let w = &traj.values()[start..];
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sum = 0.0;
    for &x in w {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        sum += x;
    }
    let amplitude = 0.5 * (x_max - x_min);
    if x_max - x_min < 1e-4 * x_star {
        return Ok(LimitCycleMetrics {
            amplitude,
            period: 0.0,
            x_min,
            x_max,
            converged_to_equilibrium: true,
        });
    }
    let mean = sum / w.len() as f64;
    let mut first = None;
    let mut last = None;
    let mut crossings = 0usize;
    for i in 0..w.len() - 1 {
        if w[i] < mean && w[i + 1] >= mean {
            let frac = (mean - w[i]) / (w[i + 1] - w[i]);
            let t = traj.time_at(start + i) + frac * traj.h;
            if first.is_none() {
                first = Some(t);
            }
            last = Some(t);
            crossings += 1;
        }
    }
    if crossings < 2 {
        return Err(SimError::WindowTooShort);
    }
    let period = (last.unwrap() - first.unwrap()) / (crossings - 1) as f64;
    Ok(LimitCycleMetrics {
        amplitude,
        period,
        x_min,
        x_max,
        converged_to_equilibrium: false,
    })
}

/// Delay-embedding pairs `(x(t), x(t−τ))` over the tail window.
pub fn phase_portrait(
    traj: &Trajectory,
    transient_fraction: f64,
) -> Result<Vec<(f64, f64)>, SimError> {
    let start = window_start(traj.len(), transient_fraction)?;
    let tau = traj.params.tau;
    Ok((start..traj.len())
        .map(|i| (traj.values()[i], traj.value_at(traj.time_at(i) - tau)))
        .collect())
}

/// One point of an amplitude-versus-`η` bifurcation diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRow {
    pub eta: f64,
    pub x_min: f64,
    pub x_max: f64,
}

/// Simulate one `η` of a bifurcation sweep and report the settled state band.
///
/// Starts a fresh run from the tiny perturbation `x₀ = x*(1 + 2·10⁻⁵)` so
/// that stable points stay visibly on the equilibrium while unstable ones
/// grow onto their limit cycle. The horizon stretches with the spectral
/// growth rate when `η` sits barely above the Hopf point, where saturation
/// takes `∝ 1/Re λ` to reach.
pub fn bifurcation_point(
    kind: ModelKind,
    params: &ModelParameters,
    eta: f64,
) -> Result<BifurcationRow, SimError> {
    let p = params.with_eta(eta);
    p.validate()?;
    let eq = largest_equilibrium(kind, &p)?;
    let lin = linearize(kind, &p, &eq);
    let t_pred = match tau_critical(&lin, eta) {
        Ok(cd) => cd.period,
        Err(_) => 10.0 * p.tau,
    };
    let base = (100.0 * p.tau).max(50.0 * t_pred);
    let t_end = {
        let rightmost = rightmost_root(&lin, p.tau, eta)?;
        if rightmost.re > 1e-9 {
            base.max(20.0 / rightmost.re + 30.0 * t_pred)
        } else {
            base
        }
    };
    let x0 = eq.x_star * (1.0 + 2e-5);
    let traj = integrate(kind, &p, x0, t_end, default_step(p.tau))?;
    let m = limit_cycle_metrics(&traj, 0.6, eq.x_star)?;
    Ok(BifurcationRow {
        eta,
        x_min: m.x_min,
        x_max: m.x_max,
    })
}

/// Bifurcation diagram over an inclusive `η` grid.
pub fn bifurcation_sweep(
    kind: ModelKind,
    params: &ModelParameters,
    eta_lo: f64,
    eta_hi: f64,
    resolution: usize,
) -> Result<Vec<BifurcationRow>, SimError> {
    if resolution < 2 {
        return Err(SimError::InvalidInput("resolution must be at least 2"));
    }
    if !(eta_lo.is_finite() && eta_hi.is_finite() && eta_lo > 0.0 && eta_lo < eta_hi) {
        return Err(SimError::InvalidInput(
            "eta range must be positive and increasing",
        ));
    }
    crate::models::grid(eta_lo, eta_hi, resolution)
        .into_iter()
        .map(|eta| bifurcation_point(kind, params, eta))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MG: ModelParameters = ModelParameters {
        beta: 0.8,
        gamma: 0.3,
        n: 10.0,
        tau: 1.0,
        eta: 1.0,
    };

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        let traj = integrate(ModelKind::MackeyGlass, &MG, eq.x_star, 50.0, 0.01).unwrap();
        for (_, x) in traj.samples() {
            assert!((x - eq.x_star).abs() < 1e-9);
        }
    }

    #[test]
    fn stable_delay_decays_to_equilibrium() {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        let traj = integrate(ModelKind::MackeyGlass, &MG, 0.5, 200.0, 0.01).unwrap();
        let end = traj.values()[traj.len() - 1];
        assert!((end - eq.x_star).abs() < 1e-6);
        let m = limit_cycle_metrics(&traj, 0.5, eq.x_star).unwrap();
        assert!(m.converged_to_equilibrium);
        assert_eq!(m.period, 0.0);
    }

    #[test]
    fn supercritical_delay_settles_on_a_cycle() {
        let p = MG.with_tau(1.3);
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &p).unwrap();
        let traj = integrate(ModelKind::MackeyGlass, &p, 0.5, 300.0, 0.01).unwrap();
        let m = limit_cycle_metrics(&traj, 0.5, eq.x_star).unwrap();
        assert!(!m.converged_to_equilibrium);
        assert!(m.amplitude > 0.05);
        // Cross-checked against an independently written integrator: the
        // mature cycle at this delay runs noticeably slower than the onset
        // period 2π/ω₀ ≈ 4.06, settling near 4.576 days.
        assert!((m.period - 4.576).abs() < 0.02, "period {}", m.period);
        assert!(m.x_min < eq.x_star && eq.x_star < m.x_max);
    }

    #[test]
    fn fourth_order_convergence_under_step_halving() {
        let probe = |h: f64| {
            let traj = integrate(ModelKind::MackeyGlass, &MG, 0.5, 20.0, h).unwrap();
            traj.values()[traj.len() - 1]
        };
        let (c, f, ff) = (probe(0.05), probe(0.025), probe(0.0125));
        let e1 = (c - f).abs();
        let e2 = (f - ff).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}, errors {e1:.3e}/{e2:.3e}");
    }

    #[test]
    fn trajectories_are_bitwise_deterministic() {
        let a = integrate(ModelKind::Lasota, &ModelParameters::new(0.9, 0.1, 0.1, 5.0), 1.2, 100.0, 0.01)
            .unwrap();
        let b = integrate(ModelKind::Lasota, &ModelParameters::new(0.9, 0.1, 0.1, 5.0), 1.2, 100.0, 0.01)
            .unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.derivatives(), b.derivatives());
    }

    #[test]
    fn interpolation_reproduces_nodes_and_history() {
        let traj = integrate(ModelKind::MackeyGlass, &MG, 0.5, 10.0, 0.01).unwrap();
        for i in [0, 1, 57, traj.len() - 1] {
            let t = traj.time_at(i);
            assert!((traj.value_at(t) - traj.values()[i]).abs() < 1e-12);
        }
        assert_eq!(traj.value_at(-0.3), 0.5);
        assert_eq!(traj.value_at(0.0), 0.5);
    }

    #[test]
    fn oversized_steps_are_rejected() {
        // Undersampling the delay.
        assert!(matches!(
            integrate(ModelKind::MackeyGlass, &MG, 0.5, 10.0, 0.2),
            Err(SimError::StepTooLarge { .. })
        ));
        // Undersampling the linear rates (γ = 30 here).
        let stiff = ModelParameters::new(40.0, 30.0, 10.0, 1.0);
        assert!(matches!(
            integrate(ModelKind::MackeyGlass, &stiff, 1.0, 10.0, 0.01),
            Err(SimError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            integrate(ModelKind::MackeyGlass, &MG, -1.0, 10.0, 0.01),
            Err(SimError::InvalidInput(_))
        ));
        assert!(matches!(
            integrate(ModelKind::MackeyGlass, &MG, 0.5, 0.0, 0.01),
            Err(SimError::InvalidInput(_))
        ));
        let no_delay = MG.with_tau(0.0);
        assert!(matches!(
            integrate(ModelKind::MackeyGlass, &no_delay, 0.5, 10.0, 0.01),
            Err(SimError::InvalidInput(_))
        ));
    }

    #[test]
    fn sign_changes_separate_monotone_from_oscillatory_decay() {
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &MG).unwrap();
        // τ = 0.1 < τ*: dominant root is real, the tail is monotone.
        let p = MG.with_tau(0.1);
        let traj = integrate(ModelKind::MackeyGlass, &p, 0.5, 200.0, default_step(0.1)).unwrap();
        assert_eq!(count_sign_changes(&traj, eq.x_star, 0.5).unwrap(), 0);
        // τ = 1.0 > τ*: decay rings around the equilibrium.
        let traj = integrate(ModelKind::MackeyGlass, &MG, 0.5, 100.0, 0.01).unwrap();
        assert!(count_sign_changes(&traj, eq.x_star, 0.25).unwrap() > 4);
    }

    #[test]
    fn phase_portrait_loops_around_the_equilibrium() {
        let p = MG.with_tau(1.3);
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &p).unwrap();
        let traj = integrate(ModelKind::MackeyGlass, &p, 0.5, 300.0, 0.01).unwrap();
        let pairs = phase_portrait(&traj, 0.5).unwrap();
        let above = pairs.iter().filter(|(x, _)| *x > eq.x_star).count();
        let lagged_above = pairs.iter().filter(|(_, y)| *y > eq.x_star).count();
        assert!(above > 0 && above < pairs.len());
        assert!(lagged_above > 0 && lagged_above < pairs.len());
    }

    #[test]
    fn bifurcation_point_distinguishes_sides_of_the_hopf_point() {
        let p = ModelParameters::new(0.8, 0.3, 10.0, 1.139880909716797);
        let eq = largest_equilibrium(ModelKind::MackeyGlass, &p).unwrap();
        let stable = bifurcation_point(ModelKind::MackeyGlass, &p, 0.95).unwrap();
        assert!((stable.x_max - stable.x_min) < 2e-4 * eq.x_star);
        let unstable = bifurcation_point(ModelKind::MackeyGlass, &p, 1.1).unwrap();
        assert!((unstable.x_max - unstable.x_min) > 0.05 * eq.x_star);
    }
}
