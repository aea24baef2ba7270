//! Runs a validated configuration and collects its records.

use oet_core::analytics::{asymptotic_gaps, expected_energy, thresholds_no_estimation, thresholds_with_estimation};
use oet_core::oracle::{binary_optimality_check, extract_threshold, solve_bellman, DpConfig};
use oet_core::policies::PolicySpec;
use oet_core::simulator::{monte_carlo, outage_probability, with_workers};
use oet_core::units::dbm_to_mw;
use oet_core::{Error, Scheme};

use crate::config::{ExperimentConfig, Task, DEFAULT_TRIALS};
use crate::dataset::Record;
use crate::{reproduce, CliError};

/// Records plus diagnostics worth showing the user.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub notes: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    with_workers(cfg.workers, || run_here(cfg))?
}

fn run_here(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    match cfg.task {
        Task::Thresholds => {
            for p in &cfg.powers {
                for &n in &cfg.frames {
                    out.records.extend(
                        thresholds(n, p.mw, cfg.estimation.energy(p.mw))?
                            .into_iter()
                            .map(|r| r.budget_dbm(p.dbm)),
                    );
                }
            }
        }
        Task::Expect => {
            for p in &cfg.powers {
                let e = cfg.estimation.energy(p.mw);
                for &n in &cfg.frames {
                    for &scheme in &cfg.schemes {
                        match expected_energy(scheme, p.mw, e, n) {
                            Ok(r) => out.records.push(
                                Record::new(scheme, n, p.mw, e, "expected_energy", r.expected_energy).budget_dbm(p.dbm),
                            ),
                            Err(Error::NoClosedForm(_)) => out
                                .notes
                                .push(format!("{scheme}: no closed form at N={n}, e_t={e}; use `simulate`")),
                            Err(err) => return Err(err.into()),
                        }
                    }
                }
            }
        }
        Task::Simulate => {
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            for p in &cfg.powers {
                let e = cfg.estimation.energy(p.mw);
                for &n in &cfg.frames {
                    for &scheme in &cfg.schemes {
                        out.records
                            .push(simulated_mean(scheme, n, p.mw, e, trials, cfg.seed)?.budget_dbm(p.dbm));
                    }
                }
            }
        }
        Task::Outage => {
            let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
            let threshold = dbm_to_mw(cfg.energy_threshold_dbm);
            for &n in &cfg.frames {
                for &scheme in &cfg.schemes {
                    for p in &cfg.powers {
                        let e = cfg.estimation.energy(p.mw);
                        out.records
                            .push(outage(scheme, n, p.mw, e, threshold, trials, cfg.seed)?.budget_dbm(p.dbm));
                    }
                }
            }
        }
        Task::Asymptotics => {
            let n_max = cfg.frames.iter().copied().max().unwrap_or(1);
            for &scheme in &cfg.schemes {
                let gaps = asymptotic_gaps(n_max, scheme)?;
                for &n in &cfg.frames {
                    out.records.push(Record::new(scheme, n, 1.0, 0.0, "gap", gaps[n - 1]));
                }
            }
        }
        Task::Oracle => {
            for p in &cfg.powers {
                let e = cfg.estimation.energy(p.mw);
                for &n in &cfg.frames {
                    out.records
                        .extend(oracle(n, p.mw, e)?.into_iter().map(|r| r.budget_dbm(p.dbm)));
                }
            }
        }
        Task::Reproduce(figure) => out.records = reproduce::figure(figure, cfg.trials, cfg.seed)?,
    }
    Ok(out)
}

/// Threshold table rows, frame 0 first.
pub fn thresholds(n: usize, budget: f64, e: f64) -> Result<Vec<Record>, CliError> {
    let table = if e == 0.0 {
        thresholds_no_estimation(budget, n)?
    } else {
        thresholds_with_estimation(budget, e, n)?
    };
    Ok(table
        .thresholds()
        .iter()
        .enumerate()
        .map(|(j, &g)| Record::new(Scheme::Optimal, n, budget, e, "threshold", g).frame(j))
        .collect())
}

pub fn simulated_mean(
    scheme: Scheme,
    n: usize,
    budget: f64,
    e: f64,
    trials: u64,
    seed: u64,
) -> Result<Record, CliError> {
    let s = monte_carlo(&PolicySpec::new(scheme, budget, e, n)?, trials, seed)?;
    Ok(Record::new(scheme, n, budget, e, "mean_harvested", s.mean).std_error(s.std_error))
}

pub fn outage(
    scheme: Scheme,
    n: usize,
    budget: f64,
    e: f64,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<Record, CliError> {
    let s = outage_probability(&PolicySpec::new(scheme, budget, e, n)?, threshold, trials, seed)?;
    let (f, se) = (s.outage_frequency.unwrap_or(0.0), s.outage_std_error.unwrap_or(0.0));
    Ok(Record::new(scheme, n, budget, e, "outage_probability", f).std_error(se))
}

/// DP value, its closed-form counterpart, refinement change, extracted
/// thresholds and the binary-action check.
pub fn oracle(n: usize, budget: f64, e: f64) -> Result<Vec<Record>, CliError> {
    let grid = solve_bellman(&DpConfig::new(n, budget, e))?;
    let closed = expected_energy(Scheme::Optimal, budget, e, n)?.expected_energy;
    let table = if e == 0.0 {
        thresholds_no_estimation(budget, n)?
    } else {
        thresholds_with_estimation(budget, e, n)?
    };
    let row = |metric: &str, v: f64| Record::new(Scheme::Optimal, n, budget, e, metric, v);
    let mut rows = vec![
        row("dp_value", grid.top_value()),
        row("closed_form_value", closed),
        row("refinement_change", grid.refinement_change().unwrap_or(0.0)),
    ];
    for j in 0..n {
        rows.push(row("dp_threshold", extract_threshold(&grid, j, table.available()[j])?).frame(j));
    }
    rows.push(row(
        "binary_optimal",
        if binary_optimality_check(&grid) { 1.0 } else { 0.0 },
    ));
    Ok(rows)
}
