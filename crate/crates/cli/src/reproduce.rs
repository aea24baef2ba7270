//! Figure presets. Each preset has a fixed default trial count, and every
//! row of a preset shares one master seed.

use oet_core::analytics::{asymptotic_gaps, expected_energy};
use oet_core::units::dbm_to_mw;
use oet_core::Scheme;

use crate::config::Figure;
use crate::dataset::Record;
use crate::experiments::{outage, simulated_mean, thresholds};
use crate::CliError;

/// Monte Carlo trials for the zero-estimation-cost figures.
pub const TRIALS_NO_ESTIMATION: u64 = 1_000_000;
/// Monte Carlo trials for the estimation-cost figure.
pub const TRIALS_ESTIMATION: u64 = 100_000;

pub const FIG2_FRAMES: std::ops::RangeInclusive<usize> = 1..=30;
pub const FIG3_ANALYTIC_FRAMES: usize = 100;
pub const FIG3_SIMULATED_FRAMES: [usize; 7] = [1, 2, 5, 10, 20, 50, 100];
pub const FIG4_POWER_DBM: std::ops::RangeInclusive<i32> = 0..=30;
pub const FIG4_POWER_STEP_DBM: usize = 2;
pub const FIG4_FRAMES: [usize; 3] = [1, 2, 3];
pub const FIG4_THRESHOLD_DBM: f64 = 10.0;
pub const FIG5_FRAMES: usize = 10;
pub const FIG5_ET_FRACTIONS: [f64; 4] = [0.0, 0.01, 0.05, 0.1];
pub const FIG6_FRAMES: std::ops::RangeInclusive<usize> = 1..=30;
pub const FIG6_ET_FRACTION: f64 = 0.1;

pub fn figure(fig: Figure, trials: Option<u64>, seed: u64) -> Result<Vec<Record>, CliError> {
    match fig {
        Figure::Fig2 => fig2(trials.unwrap_or(TRIALS_NO_ESTIMATION), seed),
        Figure::Fig3 => fig3(trials.unwrap_or(TRIALS_NO_ESTIMATION), seed),
        Figure::Fig4 => fig4(trials.unwrap_or(TRIALS_NO_ESTIMATION), seed),
        Figure::Fig5 => fig5(),
        Figure::Fig6 => fig6(trials.unwrap_or(TRIALS_ESTIMATION), seed),
    }
}

/// Simulated means for all schemes plus the optimal and genie closed forms.
fn fig2(trials: u64, seed: u64) -> Result<Vec<Record>, CliError> {
    let mut rows = Vec::new();
    for n in FIG2_FRAMES {
        for scheme in Scheme::ALL {
            rows.push(simulated_mean(scheme, n, 1.0, 0.0, trials, seed)?);
        }
        for scheme in [Scheme::Optimal, Scheme::Genie] {
            let v = expected_energy(scheme, 1.0, 0.0, n)?.expected_energy;
            rows.push(Record::new(scheme, n, 1.0, 0.0, "expected_energy", v));
        }
    }
    Ok(rows)
}

/// `R(1) - ln N`, in closed form for every N up to 100 and simulated at a
/// few horizons.
fn fig3(trials: u64, seed: u64) -> Result<Vec<Record>, CliError> {
    let mut rows = Vec::new();
    for scheme in [Scheme::Optimal, Scheme::Genie] {
        let gaps = asymptotic_gaps(FIG3_ANALYTIC_FRAMES, scheme)?;
        for (i, g) in gaps.into_iter().enumerate() {
            rows.push(Record::new(scheme, i + 1, 1.0, 0.0, "gap", g));
        }
        for n in FIG3_SIMULATED_FRAMES {
            let mut r = simulated_mean(scheme, n, 1.0, 0.0, trials, seed)?;
            r.value -= (n as f64).ln();
            r.metric = "gap_simulated".into();
            rows.push(r);
        }
    }
    Ok(rows)
}

fn fig4(trials: u64, seed: u64) -> Result<Vec<Record>, CliError> {
    let threshold = dbm_to_mw(FIG4_THRESHOLD_DBM);
    let mut rows = Vec::new();
    for n in FIG4_FRAMES {
        for scheme in Scheme::ALL {
            for dbm in FIG4_POWER_DBM.step_by(FIG4_POWER_STEP_DBM) {
                let dbm = dbm as f64;
                rows.push(outage(scheme, n, dbm_to_mw(dbm), 0.0, threshold, trials, seed)?.budget_dbm(dbm));
            }
        }
    }
    Ok(rows)
}

fn fig5() -> Result<Vec<Record>, CliError> {
    let mut rows = Vec::new();
    for frac in FIG5_ET_FRACTIONS {
        rows.extend(thresholds(FIG5_FRAMES, 1.0, frac)?);
    }
    Ok(rows)
}

/// Simulated means for all schemes at `e_t = 0.1 P`, with closed forms
/// where one exists (the genie only at `N = 1`).
fn fig6(trials: u64, seed: u64) -> Result<Vec<Record>, CliError> {
    let e = FIG6_ET_FRACTION;
    let mut rows = Vec::new();
    for n in FIG6_FRAMES {
        for scheme in Scheme::ALL {
            rows.push(simulated_mean(scheme, n, 1.0, e, trials, seed)?);
        }
        for scheme in Scheme::ALL {
            match expected_energy(scheme, 1.0, e, n) {
                Ok(r) => rows.push(Record::new(scheme, n, 1.0, e, "expected_energy", r.expected_energy)),
                Err(oet_core::Error::NoClosedForm(_)) => {}
                Err(err) => return Err(err.into()),
            }
        }
    }
    Ok(rows)
}
