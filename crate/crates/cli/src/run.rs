//! Execution of a resolved [`RunConfig`] into output text.
//!
//! Every function here is deterministic in the config alone: re-running a
//! config parsed back out of an output document reproduces the original
//! bytes exactly, which is what the `replay` subcommand relies on.

use rayon::prelude::*;
use serde_json::json;

use hemodyn_core::convergence::{rate_curve, tau_star, Branch};
use hemodyn_core::hopf::model_report;
use hemodyn_core::models::{
    largest_equilibrium, linearize, solve_equilibrium, ModelKind, ModelParameters,
};
use hemodyn_core::robust::{
    lasota_nominal_x_bound, robust_delay_bound, Interval, IntervalParameters,
};
use hemodyn_core::simulator::{bifurcation_point, integrate, phase_portrait};
use hemodyn_core::spectral::{characteristic_value, rightmost_root};
use hemodyn_core::stability::{
    generic_chart, model_chart, model_period, tau_critical, tau_non_oscillatory, tau_sufficient,
    thresholds, StabilityError,
};
use hemodyn_core::LinearCoefficients;

use crate::config::{OutputFormat, RunConfig, VaryBound};
use crate::error::CliError;
use crate::format::{cell, csv_document, g12, json_document};

/// Output text plus the process exit code (nonzero only for failed
/// verification).
pub struct RunOutput {
    pub text: String,
    pub exit: i32,
}

impl RunOutput {
    fn ok(text: String) -> Self {
        RunOutput { text, exit: 0 }
    }
}

/// Evenly spaced inclusive grid; mirrors the sweep grids used inside the
/// analysis crate so CLI-level parallel sweeps hit identical abscissae.
fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
        .collect()
}

fn params(beta: f64, gamma: f64, n: f64, tau: f64, eta: f64) -> Result<ModelParameters, CliError> {
    let p = ModelParameters::new(beta, gamma, n, tau).with_eta(eta);
    p.validate()?;
    Ok(p)
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Sigma1 => "sigma1",
        Branch::Sigma2 => "sigma2",
        Branch::Sigma3 => "sigma3",
    }
}

/// Run one configuration to completion.
pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    match config {
        RunConfig::Equilibrium {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            format,
        } => {
            let p = params(*beta, *gamma, *n, *tau, *eta)?;
            let roots = solve_equilibrium(*model, &p)?;
            let columns = ["x_star", "residual"];
            let text = match format {
                OutputFormat::Csv => {
                    let rows: Vec<Vec<String>> = roots
                        .iter()
                        .map(|e| vec![g12(e.x_star), g12(e.residual)])
                        .collect();
                    csv_document(config, &columns.join(","), &rows)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    roots.iter().map(|e| json!([e.x_star, e.residual])).collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Thresholds {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            format,
        } => {
            let p = params(*beta, *gamma, *n, *tau, *eta)?;
            let eq = largest_equilibrium(*model, &p)?;
            let lin = linearize(*model, &p, &eq);
            let (noc, suff, crit, period) = if lin.b > 0.0 {
                let noc = Some(tau_non_oscillatory(&lin, *eta));
                let suff = Some(tau_sufficient(&lin, *eta));
                match tau_critical(&lin, *eta) {
                    Ok(cd) => (noc, suff, Some(cd.tau_c), Some(cd.period)),
                    Err(StabilityError::NoHopf { .. }) => (noc, suff, None, None),
                    Err(e) => return Err(e.into()),
                }
            } else {
                (None, None, None, None)
            };
            let columns = ["tau", "tau_noc", "tau_suff", "tau_c", "period"];
            let text = match format {
                OutputFormat::Csv => csv_document(
                    config,
                    &columns.join(","),
                    &[vec![g12(*tau), cell(noc), cell(suff), cell(crit), cell(period)]],
                ),
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    vec![json!([tau, noc, suff, crit, period])],
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Chart {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            sweep,
            lo,
            hi,
            resolution,
            format,
        } => {
            let text = match sweep.model_parameter() {
                Some(parameter) => {
                    let kind = model.ok_or_else(|| {
                        CliError::Usage("a model-parameter sweep needs --model".to_string())
                    })?;
                    let missing =
                        || CliError::Usage("a model-parameter sweep needs --beta, --gamma and --n".to_string());
                    let base = params(
                        beta.ok_or_else(missing)?,
                        gamma.ok_or_else(missing)?,
                        n.ok_or_else(missing)?,
                        *tau,
                        *eta,
                    )?;
                    let rows = model_chart(kind, &base, parameter, *lo, *hi, *resolution)?;
                    let columns = [parameter.name(), "tau_noc", "tau_suff", "tau_c", "period"];
                    match format {
                        OutputFormat::Csv => {
                            let cells: Vec<Vec<String>> = rows
                                .iter()
                                .map(|r| {
                                    vec![
                                        g12(r.value),
                                        cell(r.tau_noc),
                                        cell(r.tau_suff),
                                        cell(r.tau_c),
                                        cell(r.period),
                                    ]
                                })
                                .collect();
                            csv_document(config, &columns.join(","), &cells)
                        }
                        OutputFormat::Json => json_document(
                            config,
                            &columns,
                            rows.iter()
                                .map(|r| json!([r.value, r.tau_noc, r.tau_suff, r.tau_c, r.period]))
                                .collect(),
                        ),
                    }
                }
                None => {
                    let rows = generic_chart(*tau, *eta, *lo, *hi, *resolution)?;
                    let columns = ["a", "b_noc", "b_suff", "b_crit"];
                    match format {
                        OutputFormat::Csv => {
                            let cells: Vec<Vec<String>> = rows
                                .iter()
                                .map(|r| {
                                    vec![g12(r.a), g12(r.b_noc), g12(r.b_suff), g12(r.b_crit)]
                                })
                                .collect();
                            csv_document(config, &columns.join(","), &cells)
                        }
                        OutputFormat::Json => json_document(
                            config,
                            &columns,
                            rows.iter()
                                .map(|r| json!([r.a, r.b_noc, r.b_suff, r.b_crit]))
                                .collect(),
                        ),
                    }
                }
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Roc {
            model,
            beta,
            gamma,
            n,
            eta,
            lo,
            hi,
            resolution,
            format,
        } => {
            let p = params(*beta, *gamma, *n, 1.0, *eta)?;
            let eq = largest_equilibrium(*model, &p)?;
            let lin = linearize(*model, &p, &eq);
            // Fold the time-scale factor into the coefficients: the decay
            // rate of λ + ηa + ηb e^{−λτ} is the η = 1 rate of (ηa, ηb).
            let eff = LinearCoefficients::new(*eta * lin.a, *eta * lin.b);
            let rows = rate_curve(&eff, *lo, *hi, *resolution)?;
            let columns = ["tau", "sigma", "branch"];
            let text = match format {
                OutputFormat::Csv => {
                    let cells: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            vec![g12(r.tau), g12(r.sigma), branch_name(r.branch).to_string()]
                        })
                        .collect();
                    csv_document(config, &columns.join(","), &cells)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    rows.iter()
                        .map(|r| json!([r.tau, r.sigma, branch_name(r.branch)]))
                        .collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Robust {
            model,
            beta,
            gamma,
            n,
            vary,
            lo,
            hi,
            resolution,
            format,
        } => {
            let values = if *resolution == 1 {
                vec![*lo]
            } else {
                grid(*lo, *hi, *resolution)
            };
            // Lasota rows carry both readings of the bound (worst-case and
            // midpoint equilibrium); the closed-form case has no such split.
            let both_readings = matches!(model, ModelKind::Lasota);
            let mut bounds = Vec::with_capacity(values.len());
            for &v in &values {
                let n_interval = match vary {
                    VaryBound::NHi => Interval::new(n[0], v)?,
                    VaryBound::NLo => Interval::new(v, n[1])?,
                };
                let iv = IntervalParameters {
                    beta: Interval::new(beta[0], beta[1])?,
                    gamma: Interval::new(gamma[0], gamma[1])?,
                    n: n_interval,
                };
                let robust = robust_delay_bound(*model, &iv)?.delay();
                let nominal = if both_readings {
                    Some(lasota_nominal_x_bound(&iv)?.delay())
                } else {
                    None
                };
                bounds.push((v, robust, nominal));
            }
            let mut columns = vec![vary.column(), "robust_bound"];
            if both_readings {
                columns.push("nominal_x_bound");
            }
            let text = match format {
                OutputFormat::Csv => {
                    let cells: Vec<Vec<String>> = bounds
                        .iter()
                        .map(|(v, r, m)| {
                            let mut row = vec![g12(*v), cell(*r)];
                            if let Some(m) = m {
                                row.push(cell(*m));
                            }
                            row
                        })
                        .collect();
                    csv_document(config, &columns.join(","), &cells)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    bounds
                        .iter()
                        .map(|(v, r, m)| match m {
                            Some(m) => json!([v, r, m]),
                            None => json!([v, r]),
                        })
                        .collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Hopf {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
        } => {
            let p = params(*beta, *gamma, *n, *tau, *eta)?;
            let (eq, report) = model_report(*model, &p)?;
            let doc = json!({
                "config": config,
                "equilibrium": eq,
                "report": report,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
            text.push('\n');
            Ok(RunOutput::ok(text))
        }

        RunConfig::Simulate {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            x0,
            t_end,
            h,
            format,
        } => {
            let p = params(*beta, *gamma, *n, *tau, *eta)?;
            let traj = integrate(*model, &p, *x0, *t_end, *h)?;
            let columns = ["t", "x"];
            let text = match format {
                OutputFormat::Csv => {
                    let cells: Vec<Vec<String>> = traj
                        .samples()
                        .map(|(t, x)| vec![g12(t), g12(x)])
                        .collect();
                    csv_document(config, &columns.join(","), &cells)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    traj.samples().map(|(t, x)| json!([t, x])).collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Phase {
            model,
            beta,
            gamma,
            n,
            tau,
            eta,
            x0,
            t_end,
            h,
            transient,
            format,
        } => {
            let p = params(*beta, *gamma, *n, *tau, *eta)?;
            let traj = integrate(*model, &p, *x0, *t_end, *h)?;
            let pairs = phase_portrait(&traj, *transient)?;
            let columns = ["x_t", "x_t_minus_tau"];
            let text = match format {
                OutputFormat::Csv => {
                    let cells: Vec<Vec<String>> = pairs
                        .iter()
                        .map(|(x, xd)| vec![g12(*x), g12(*xd)])
                        .collect();
                    csv_document(config, &columns.join(","), &cells)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    pairs.iter().map(|(x, xd)| json!([x, xd])).collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Bifurcate {
            model,
            beta,
            gamma,
            n,
            tau,
            lo,
            hi,
            resolution,
            format,
        } => {
            if *resolution < 2 {
                return Err(CliError::Domain("resolution must be at least 2".to_string()));
            }
            let p = params(*beta, *gamma, *n, *tau, 1.0)?;
            let rows = grid(*lo, *hi, *resolution)
                .par_iter()
                .map(|&eta| bifurcation_point(*model, &p, eta))
                .collect::<Result<Vec<_>, _>>()?;
            let columns = ["eta", "x_min", "x_max"];
            let text = match format {
                OutputFormat::Csv => {
                    let cells: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| vec![g12(r.eta), g12(r.x_min), g12(r.x_max)])
                        .collect();
                    csv_document(config, &columns.join(","), &cells)
                }
                OutputFormat::Json => json_document(
                    config,
                    &columns,
                    rows.iter().map(|r| json!([r.eta, r.x_min, r.x_max])).collect(),
                ),
            };
            Ok(RunOutput::ok(text))
        }

        RunConfig::Verify {} => verify(config),
    }
}

/// Deterministic self-check suite: analytic formulas against the spectral
/// search over fixed lattices; prints one PASS/FAIL line per check.
fn verify(config: &RunConfig) -> Result<RunOutput, CliError> {
    let config_line = serde_json::to_string(config).expect("config serializes");
    let mut lines = vec![format!("# config: {config_line}")];
    let mut failures = 0usize;

    // 1. Decay-rate formula versus the rightmost characteristic root.
    let a_values = [0.1, 0.3, 0.7, 1.0, 1.5, 2.0];
    let ratios = [1.1, 1.5, 2.5, 4.0, 6.0, 8.0];
    let fractions = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut cases = Vec::new();
    for &a in &a_values {
        for &r in &ratios {
            for &f in &fractions {
                cases.push((a, a * r, f));
            }
        }
    }
    let worst_gap = cases
        .par_iter()
        .map(|&(a, b, f)| {
            let lin = LinearCoefficients::new(a, b);
            let tau = f * tau_critical(&lin, 1.0).unwrap().tau_c;
            let sigma = hemodyn_core::convergence::rate_of_convergence(&lin, tau)
                .unwrap()
                .sigma;
            let root = rightmost_root(&lin, tau, 1.0).unwrap();
            (sigma + root.re).abs()
        })
        .reduce(|| 0.0, f64::max);
    failures += push_check(
        &mut lines,
        worst_gap < 1e-6,
        format!(
            "rate-vs-root agreement: {} cases, worst gap {} (tolerance 1e-6)",
            cases.len(),
            g12(worst_gap)
        ),
    );

    // 2. The reported rightmost root satisfies the characteristic equation,
    //    across stable, unstable and negative-feedback regimes.
    let mut spectra = Vec::new();
    for &a in &[0.0, 0.5, 1.5] {
        for &b in &[-1.5, -0.5, 0.5, 1.2, 3.0] {
            for &tau in &[0.0, 0.3, 1.0, 2.5] {
                for &eta in &[0.5, 1.0, 1.7] {
                    spectra.push((a, b, tau, eta));
                }
            }
        }
    }
    let worst_residual = spectra
        .par_iter()
        .map(|&(a, b, tau, eta)| {
            let lin = LinearCoefficients::new(a, b);
            let root = rightmost_root(&lin, tau, eta).unwrap();
            characteristic_value(&lin, tau, eta, root.lambda()).norm()
        })
        .reduce(|| 0.0, f64::max);
    failures += push_check(
        &mut lines,
        worst_residual < 1e-9,
        format!(
            "characteristic residual: {} roots, worst {} (tolerance 1e-9)",
            spectra.len(),
            g12(worst_residual)
        ),
    );

    // 3. Threshold ordering chain.
    let mut chains = 0usize;
    let mut chain_ok = true;
    for &a in &a_values {
        for &r in &ratios {
            for &eta in &[0.5, 1.0, 2.0] {
                let lin = LinearCoefficients::new(a, a * r);
                let th = thresholds(&lin, eta).unwrap();
                let inverse_b = 1.0 / (eta * lin.b);
                chains += 1;
                chain_ok &= 0.0 < th.tau_noc
                    && th.tau_noc < inverse_b
                    && inverse_b < th.tau_suff
                    && th.tau_suff < th.tau_c;
            }
        }
    }
    failures += push_check(
        &mut lines,
        chain_ok,
        format!("threshold ordering: {chains} chains strict"),
    );

    // 4. Printed period expressions versus the crossing frequency, at the
    //    two reference parameter sets.
    let mut period_ok = true;
    for (kind, beta, gamma, n) in [
        (ModelKind::MackeyGlass, 0.8, 0.3, 10.0),
        (ModelKind::Lasota, 0.9, 0.1, 0.1),
    ] {
        let p = ModelParameters::new(beta, gamma, n, 1.0);
        let eq = largest_equilibrium(kind, &p).unwrap();
        let lin = linearize(kind, &p, &eq);
        let th = thresholds(&lin, 1.0).unwrap();
        let printed = model_period(kind, &p, &eq).unwrap();
        period_ok &= (printed - th.hopf_period).abs() < 1e-9 * th.hopf_period;
    }
    failures += push_check(
        &mut lines,
        period_ok,
        "printed-period consistency: 2 models within 1e-9".to_string(),
    );

    // 5. The rate peak matches the non-oscillation threshold construction.
    let mut peak_ok = true;
    for &(a, b) in &[(0.3, 1.575), (0.1, 0.1613), (0.05, 2.0)] {
        let lin = LinearCoefficients::new(a, b);
        let ts = tau_star(&lin);
        let sigma = hemodyn_core::convergence::rate_of_convergence(&lin, ts)
            .unwrap()
            .sigma;
        peak_ok &= (sigma - (a + 1.0 / ts)).abs() < 1e-12 * sigma;
    }
    failures += push_check(
        &mut lines,
        peak_ok,
        "rate peak identity: 3 coefficient pairs".to_string(),
    );

    if failures == 0 {
        lines.push("all 5 checks passed".to_string());
    } else {
        lines.push(format!("{failures} of 5 checks failed"));
    }
    let mut text = lines.join("\n");
    text.push('\n');
    Ok(RunOutput {
        text,
        exit: if failures == 0 { 0 } else { 1 },
    })
}

fn push_check(lines: &mut Vec<String>, pass: bool, detail: String) -> usize {
    if pass {
        lines.push(format!("PASS {detail}"));
        0
    } else {
        lines.push(format!("FAIL {detail}"));
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hemodyn_core::models::ModelKind;

    fn mg_thresholds_config() -> RunConfig {
        RunConfig::Thresholds {
            model: ModelKind::MackeyGlass,
            beta: 0.8,
            gamma: 0.3,
            n: 10.0,
            tau: 1.14,
            eta: 1.0,
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn thresholds_csv_has_provenance_and_header() {
        let out = execute(&mg_thresholds_config()).unwrap();
        let mut lines = out.text.lines();
        assert!(lines.next().unwrap().starts_with("# config: {\"command\":\"thresholds\""));
        assert_eq!(lines.next().unwrap(), "tau,tau_noc,tau_suff,tau_c,period");
        let row = lines.next().unwrap();
        let tau_c: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((tau_c - 1.14).abs() < 0.005);
    }

    #[test]
    fn delay_independent_point_reports_unbounded() {
        let config = RunConfig::Thresholds {
            model: ModelKind::Lasota,
            beta: 0.4,
            gamma: 0.3,
            n: 0.1,
            tau: 1.0,
            eta: 1.0,
            format: OutputFormat::Csv,
        };
        let out = execute(&config).unwrap();
        let row = out.text.lines().nth(2).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_ne!(cells[1], "unbounded");
        assert_eq!(cells[3], "unbounded");
        assert_eq!(cells[4], "unbounded");
    }

    #[test]
    fn replayed_config_is_byte_identical() {
        let out = execute(&mg_thresholds_config()).unwrap();
        let line = out.text.lines().next().unwrap();
        let config: RunConfig =
            serde_json::from_str(line.strip_prefix("# config: ").unwrap()).unwrap();
        let again = execute(&config).unwrap();
        assert_eq!(out.text, again.text);
    }

    #[test]
    fn lasota_robust_rows_carry_both_bound_readings() {
        let config = RunConfig::Robust {
            model: ModelKind::Lasota,
            beta: [0.5, 0.9],
            gamma: [0.05, 0.1],
            n: [0.1, 0.5],
            vary: VaryBound::NLo,
            lo: 0.1,
            hi: 0.3,
            resolution: 2,
            format: OutputFormat::Csv,
        };
        let out = execute(&config).unwrap();
        let mut lines = out.text.lines().skip(1);
        assert_eq!(lines.next().unwrap(), "n_lo,robust_bound,nominal_x_bound");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let robust: f64 = row[1].parse().unwrap();
        let nominal: f64 = row[2].parse().unwrap();
        assert!(nominal >= robust);

        let mg = RunConfig::Robust {
            model: ModelKind::MackeyGlass,
            beta: [0.1, 2.0],
            gamma: [0.1, 2.0],
            n: [7.0, 7.0],
            vary: VaryBound::NHi,
            lo: 7.0,
            hi: 7.0,
            resolution: 1,
            format: OutputFormat::Csv,
        };
        let out = execute(&mg).unwrap();
        let mut lines = out.text.lines().skip(1);
        assert_eq!(lines.next().unwrap(), "n_hi,robust_bound");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let bound: f64 = row[1].parse().unwrap();
        assert!((bound - 0.1 / 26.4).abs() < 1e-12);
    }

    #[test]
    fn verify_suite_passes() {
        let out = execute(&RunConfig::Verify {}).unwrap();
        assert_eq!(out.exit, 0, "self-checks failed:\n{}", out.text);
        assert!(out.text.contains("all 5 checks passed"));
    }
}
