//! Named figure presets: ready-made configurations for every chart, curve,
//! portrait and diagram the project reproduces. `--preset <name>` replaces
//! all other value flags of the matching subcommand.

use hemodyn_core::models::{largest_equilibrium, linearize, ModelKind, ModelParameters};
use hemodyn_core::stability::tau_critical;

use crate::config::{OutputFormat, RunConfig, SweepAxis, VaryBound};

const MG: ModelKind = ModelKind::MackeyGlass;
const LS: ModelKind = ModelKind::Lasota;
const CSV: OutputFormat = OutputFormat::Csv;

/// All preset names in catalogue order, for help and error text.
pub const NAMES: &[&str] = &[
    "fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
    "fig6", "fig7a", "fig7b", "fig8a", "fig8b", "fig8c", "fig8d", "fig9", "fig10a", "fig10b",
];

/// Look a preset up by name.
///
/// The catalogue:
/// * `fig1` — generic stability boundaries over `a` at τ = 1;
/// * `fig2a/b/c` — delay thresholds versus β, n (Mackey-Glass) and n (Lasota);
/// * `fig3a/b` — Mackey-Glass time series below and above the critical delay;
/// * `fig4a/b` — rate-of-convergence curves for both models;
/// * `fig5a/b` — robust delay bounds versus the exponent interval ends;
/// * `fig6`, `fig9` — bifurcation diagrams over the time-scale factor η;
/// * `fig7a/b`, `fig10a/b` — phase portraits below and above the critical delay;
/// * `fig8a-d` — oscillation-period dependence on β and γ for both models.
pub fn lookup(name: &str) -> Option<RunConfig> {
    let config = match name {
        "fig1" => RunConfig::Chart {
            model: None,
            beta: None,
            gamma: None,
            n: None,
            tau: 1.0,
            eta: 1.0,
            sweep: SweepAxis::B,
            lo: 0.0,
            hi: 3.0,
            resolution: 61,
            format: CSV,
        },
        "fig2a" => mg_chart(SweepAxis::Beta, 0.5, 1.0, 51),
        "fig2b" => mg_chart(SweepAxis::N, 10.0, 100.0, 46),
        "fig2c" => RunConfig::Chart {
            model: Some(LS),
            beta: Some(0.9),
            gamma: Some(0.1),
            n: Some(0.1),
            tau: 1.0,
            eta: 1.0,
            sweep: SweepAxis::N,
            lo: 0.001,
            hi: 1.0,
            resolution: 50,
            format: CSV,
        },
        "fig3a" => mg_series(1.0, 200.0, false),
        "fig3b" => mg_series(1.3, 300.0, false),
        "fig4a" => RunConfig::Roc {
            model: MG,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            eta: 1.0,
            lo: 0.0,
            hi: 0.5,
            resolution: 200,
            format: CSV,
        },
        "fig4b" => RunConfig::Roc {
            model: LS,
            beta: 0.4,
            gamma: 0.3,
            n: 0.1,
            eta: 1.0,
            lo: 0.0,
            hi: 5.0,
            resolution: 200,
            format: CSV,
        },
        "fig5a" => RunConfig::Robust {
            model: MG,
            beta: [0.1, 2.0],
            gamma: [0.1, 2.0],
            n: [7.0, 7.0],
            vary: VaryBound::NHi,
            lo: 7.0,
            hi: 20.0,
            resolution: 27,
            format: CSV,
        },
        "fig5b" => RunConfig::Robust {
            model: LS,
            beta: [0.1, 2.0],
            gamma: [0.1, 2.0],
            n: [0.9, 0.9],
            vary: VaryBound::NLo,
            lo: 0.1,
            hi: 0.9,
            resolution: 17,
            format: CSV,
        },
        "fig6" => RunConfig::Bifurcate {
            model: MG,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            tau: critical_delay(MG, 0.8, 0.3, 10.0),
            lo: 0.9,
            hi: 1.2,
            resolution: 31,
            format: CSV,
        },
        "fig7a" => mg_series(1.0, 60.0, true),
        "fig7b" => mg_series(1.3, 100.0, true),
        "fig8a" => mg_chart(SweepAxis::Beta, 0.5, 1.0, 51),
        "fig8b" => ls_chart(SweepAxis::Beta, 0.5, 1.5, 51),
        "fig8c" => mg_chart(SweepAxis::Gamma, 0.1, 0.45, 36),
        "fig8d" => ls_chart(SweepAxis::Gamma, 0.05, 0.2, 31),
        "fig9" => RunConfig::Bifurcate {
            model: LS,
            beta: 0.9,
            gamma: 0.1,
            n: 0.1,
            tau: critical_delay(LS, 0.9, 0.1, 0.1),
            lo: 0.9,
            hi: 1.2,
            resolution: 31,
            format: CSV,
        },
        "fig10a" => ls_series(13.69, 1.0, 2000.0),
        "fig10b" => ls_series(21.69, 1.8, 2500.0),
        _ => return None,
    };
    Some(config)
}

/// Critical delay at the reference time scale, used by the bifurcation
/// presets. The reference parameter sets are oscillatory, so this cannot
/// fail for catalogue entries.
fn critical_delay(kind: ModelKind, beta: f64, gamma: f64, n: f64) -> f64 {
    let p = ModelParameters::new(beta, gamma, n, 1.0);
    let eq = largest_equilibrium(kind, &p).expect("catalogue parameters admit an equilibrium");
    let lin = linearize(kind, &p, &eq);
    tau_critical(&lin, 1.0)
        .expect("catalogue parameters are oscillatory")
        .tau_c
}

fn mg_chart(sweep: SweepAxis, lo: f64, hi: f64, resolution: usize) -> RunConfig {
    RunConfig::Chart {
        model: Some(MG),
        beta: Some(0.8),
        gamma: Some(0.3),
        n: Some(10.0),
        tau: 1.0,
        eta: 1.0,
        sweep,
        lo,
        hi,
        resolution,
        format: CSV,
    }
}

fn ls_chart(sweep: SweepAxis, lo: f64, hi: f64, resolution: usize) -> RunConfig {
    RunConfig::Chart {
        model: Some(LS),
        beta: Some(0.9),
        gamma: Some(0.1),
        n: Some(0.1),
        tau: 1.0,
        eta: 1.0,
        sweep,
        lo,
        hi,
        resolution,
        format: CSV,
    }
}

fn mg_series(tau: f64, t_end: f64, phase: bool) -> RunConfig {
    if phase {
        RunConfig::Phase {
            model: MG,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            tau,
            eta: 1.0,
            x0: 0.5,
            t_end,
            h: 0.01,
            transient: 0.0,
            format: CSV,
        }
    } else {
        RunConfig::Simulate {
            model: MG,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            tau,
            eta: 1.0,
            x0: 0.5,
            t_end,
            h: 0.01,
            format: CSV,
        }
    }
}

fn ls_series(tau: f64, x0: f64, t_end: f64) -> RunConfig {
    RunConfig::Phase {
        model: LS,
        beta: 0.9,
        gamma: 0.1,
        n: 0.1,
        tau,
        eta: 1.0,
        x0,
        t_end,
        h: 0.01,
        transient: 0.0,
        format: CSV,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalogued_name_resolves() {
        for name in NAMES {
            assert!(lookup(name).is_some(), "preset {name} missing");
        }
        assert!(lookup("fig99").is_none());
    }

    #[test]
    fn bifurcation_presets_pin_the_critical_delay() {
        let Some(RunConfig::Bifurcate { tau, .. }) = lookup("fig6") else {
            panic!("fig6 is a bifurcate preset")
        };
        // 2% band around the printed reference critical delay.
        assert!((tau - 1.14).abs() < 0.023);
    }
}
