//! Analysis toolkit for first-order scalar delay differential equations of the
//! blood-cell-production family
//!
//! ```text
//!     ẋ(t) = η ( β F(x(t − τ)) − γ x(t) )
//! ```
//!
//! with the Mackey-Glass nonlinearity `F(y) = y / (1 + yⁿ)` (white-cell
//! production) or the Lasota nonlinearity `F(y) = yⁿ e^{−y}` (red-cell
//! production). Everything downstream works through the linearization about a
//! positive equilibrium `x*`, which has the quasi-polynomial characteristic
//! equation `λ + ηa + ηb e^{−λτ} = 0` with `a = γ` and `b = −βF′(x*)`.
//!
//! The crate is organised by question:
//!
//! * [`models`] — nonlinearities, equilibria, linear and Taylor coefficients;
//! * [`stability`] — the three delay thresholds (non-oscillatory, sufficient,
//!   critical) and stability-chart grids;
//! * [`convergence`] — decay rate σ(τ) of the stable system and its peak τ*;
//! * [`spectral`] — an independent rightmost-characteristic-root oracle every
//!   closed form is cross-checked against;
//! * [`robust`] — delay bounds that survive interval parameter uncertainty;
//! * [`hopf`] — center-manifold normal form at the Hopf point: c₁(0), μ₂, β₂,
//!   bifurcation type and orbital stability of the emerging limit cycle;
//! * [`simulator`] — method-of-steps RK4 integration of the full nonlinear
//!   models, plus limit-cycle metrics, phase portraits and bifurcation sweeps.
//!
//! All computations are deterministic: fixed-iteration bisections, no
//! adaptive stepping, no internal randomness.

pub mod convergence;
pub mod hopf;
pub mod models;
pub mod robust;
pub mod simulator;
pub mod spectral;
pub mod stability;

mod solve;

pub use models::{
    Equilibrium, LinearCoefficients, ModelError, ModelKind, ModelParameters, TaylorCoefficients,
};
pub use stability::{StabilityError, StabilityThresholds};
