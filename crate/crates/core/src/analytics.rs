//! Closed-form thresholds and expected harvested energy.
//!
//! Everything here is pure and deterministic. Energies are linear units;
//! gains are dimensionless with unit mean.
//!
//! Without estimation cost the optimal value of `N` frames is
//! `P * sum_{j<N} c_j` where `c_0 = 1` and `c_j = exp(-sum_{i<j} c_i)`, and the
//! transmit threshold of frame `j` is the partial sum `sum_{i<j} c_i`. With an
//! estimation cost `e_t` the threshold of frame `j` at available energy `A` is
//!
//! ```text
//! gamma_j(A) = (A - 2e_t)/(A - e_t) * [gamma_{j-1}(A - e_t) + exp(-gamma_{j-1}(A - e_t))]   if A > 2e_t
//!            = 0                                                                           otherwise
//! ```
//!
//! and the value is `(P - e_t) * [gamma_{N-1}(P) + exp(-gamma_{N-1}(P))]`.

use serde::{Deserialize, Serialize};

use crate::numeric::CompensatedSum;
use crate::{Error, Result, Scheme};

/// Euler–Mascheroni constant, the genie's asymptotic advantage per unit budget.
#[allow(clippy::excessive_precision)]
pub const EULER_MASCHERONI: f64 = 0.577215664901532860606512;

/// Relative slack used when comparing available energy against `2 e_t`.
pub(crate) const ENERGY_EPS: f64 = 1e-12;

pub(crate) fn check_frames(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroFrames)
    } else {
        Ok(())
    }
}

pub(crate) fn check_budget(budget: f64) -> Result<()> {
    if budget.is_finite() && budget > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBudget(budget))
    }
}

pub(crate) fn check_estimation(budget: f64, estimation: f64) -> Result<()> {
    check_budget(budget)?;
    if !estimation.is_finite() || estimation < 0.0 {
        return Err(Error::InvalidEstimationEnergy(estimation));
    }
    if estimation >= budget {
        return Err(Error::EstimationExceedsBudget { budget, estimation });
    }
    Ok(())
}

/// The sequence `c_0..c_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<f64>,
}

impl CoefficientSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Compensated `sum_j c_j`.
    pub fn sum(&self) -> f64 {
        self.values.iter().copied().collect::<CompensatedSum>().value()
    }

    /// `[0, c_0, c_0 + c_1, ...]`, one entry per coefficient.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::default();
        self.values
            .iter()
            .map(|&c| {
                let before = acc.value();
                acc.add(c);
                before
            })
            .collect()
    }
}

/// `c_0 = 1`, `c_{j+1} = c_j * exp(-c_j)`.
///
/// The product form is algebraically identical to `exp(-sum_{i<=j} c_i)` and
/// avoids re-summing the exponent at every step.
pub fn c_sequence(n: usize) -> Result<CoefficientSequence> {
    check_frames(n)?;
    let mut values = Vec::with_capacity(n);
    let mut c = 1.0_f64;
    for _ in 0..n {
        values.push(c);
        c *= (-c).exp();
    }
    Ok(CoefficientSequence { values })
}

/// Per-frame transmit thresholds and the available energy on the
/// no-transmission path. Both vectors are indexed by frame number `j`, so
/// index 0 is the deadline frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    frame_count: usize,
    estimation_energy: f64,
    budget: f64,
    thresholds: Vec<f64>,
    available: Vec<f64>,
}

impl ThresholdTable {
    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn estimation_energy(&self) -> f64 {
        self.estimation_energy
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Thresholds indexed by frame (`[gamma_0, gamma_1, ..]`).
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Available energy indexed by frame.
    pub fn available(&self) -> &[f64] {
        &self.available
    }

    pub fn threshold(&self, frame: usize) -> Result<f64> {
        self.thresholds.get(frame).copied().ok_or(Error::FrameOutOfRange(frame))
    }

    /// `(frame, threshold, available)` in play order, frame `N-1` first.
    pub fn in_play_order(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.frame_count)
            .rev()
            .map(move |j| (j, self.thresholds[j], self.available[j]))
    }

    /// Whether this table was built for `(budget, estimation, frames)`.
    pub fn matches(&self, budget: f64, estimation: f64, frames: usize) -> bool {
        let tol = ENERGY_EPS * budget.abs().max(1.0);
        self.frame_count == frames
            && (self.budget - budget).abs() <= tol
            && (self.estimation_energy - estimation).abs() <= tol
    }
}

/// Expected harvested energy of one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedEnergyReport {
    pub scheme: Scheme,
    pub frame_count: usize,
    pub budget: f64,
    pub estimation_energy: f64,
    pub expected_energy: f64,
}

/// `P * sum_{j<n} c_j`.
pub fn optimal_expected_energy(budget: f64, n: usize) -> Result<ExpectedEnergyReport> {
    check_budget(budget)?;
    let c = c_sequence(n)?;
    Ok(ExpectedEnergyReport {
        scheme: Scheme::Optimal,
        frame_count: n,
        budget,
        estimation_energy: 0.0,
        expected_energy: budget * c.sum(),
    })
}

/// Thresholds without estimation cost: `gamma_j = sum_{i<j} c_i`, and the
/// full budget is available in every frame.
pub fn thresholds_no_estimation(budget: f64, n: usize) -> Result<ThresholdTable> {
    check_budget(budget)?;
    let c = c_sequence(n)?;
    Ok(ThresholdTable {
        frame_count: n,
        estimation_energy: 0.0,
        budget,
        thresholds: c.partial_sums(),
        available: vec![budget; n],
    })
}

/// Compensated harmonic number `H_n`.
pub fn harmonic_number(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).collect::<CompensatedSum>().value()
}

/// Genie-aided benchmark without estimation cost: `P * H_n`.
pub fn genie_expected_energy(budget: f64, n: usize) -> Result<ExpectedEnergyReport> {
    check_budget(budget)?;
    check_frames(n)?;
    Ok(ExpectedEnergyReport {
        scheme: Scheme::Genie,
        frame_count: n,
        budget,
        estimation_energy: 0.0,
        expected_energy: budget * harmonic_number(n),
    })
}

/// Unit-budget expected energy minus `ln n`. Tends to 0 for the optimal
/// scheme and to the Euler–Mascheroni constant for the genie.
pub fn asymptotic_gap(n: usize, scheme: Scheme) -> Result<f64> {
    Ok(*asymptotic_gaps(n, scheme)?.last().expect("n >= 1"))
}

/// `asymptotic_gap(k, scheme)` for every `k` in `1..=n_max`, in one pass.
pub fn asymptotic_gaps(n_max: usize, scheme: Scheme) -> Result<Vec<f64>> {
    check_frames(n_max)?;
    let mut acc = CompensatedSum::default();
    let mut gaps = Vec::with_capacity(n_max);
    match scheme {
        Scheme::Optimal => {
            let mut c = 1.0_f64;
            for k in 1..=n_max {
                acc.add(c);
                c *= (-c).exp();
                gaps.push(acc.value() - (k as f64).ln());
            }
        }
        Scheme::Genie => {
            for k in 1..=n_max {
                acc.add(1.0 / k as f64);
                gaps.push(acc.value() - (k as f64).ln());
            }
        }
        other => return Err(Error::NoClosedForm(other)),
    }
    Ok(gaps)
}

/// Available energy at frame `j` when every earlier frame only estimated.
pub(crate) fn available_on_wait_path(budget: f64, estimation: f64, n: usize, frame: usize) -> f64 {
    budget - (n - 1 - frame) as f64 * estimation
}

/// Thresholds with estimation cost, evaluated along the deterministic
/// no-transmission path `A_j = P - (N-1-j) e_t`.
///
/// Only one energy trajectory is reachable under an all-or-nothing policy,
/// so the table is a pure function of `(P, e_t, N)`. A frame whose available
/// energy is at most `2 e_t` (equality included) gets threshold 0.
pub fn thresholds_with_estimation(budget: f64, estimation: f64, n: usize) -> Result<ThresholdTable> {
    check_estimation(budget, estimation)?;
    check_frames(n)?;
    let available: Vec<f64> = (0..n)
        .map(|j| available_on_wait_path(budget, estimation, n, j))
        .collect();
    let slack = ENERGY_EPS * budget;
    let mut thresholds = vec![0.0_f64; n];
    for j in 1..n {
        let a = available[j];
        if a - 2.0 * estimation > slack {
            let prev = thresholds[j - 1];
            thresholds[j] = (a - 2.0 * estimation) / (a - estimation) * (prev + (-prev).exp());
        }
    }
    Ok(ThresholdTable {
        frame_count: n,
        estimation_energy: estimation,
        budget,
        thresholds,
        available,
    })
}

/// `(P - e_t) * [gamma_{N-1}(P) + exp(-gamma_{N-1}(P))]`.
pub fn optimal_expected_energy_with_estimation(budget: f64, estimation: f64, n: usize) -> Result<ExpectedEnergyReport> {
    let table = thresholds_with_estimation(budget, estimation, n)?;
    let gamma = table.thresholds[n - 1];
    Ok(ExpectedEnergyReport {
        scheme: Scheme::Optimal,
        frame_count: n,
        budget,
        estimation_energy: estimation,
        expected_energy: (budget - estimation) * (gamma + (-gamma).exp()),
    })
}

/// Harvestable share per frame of the equal scheme, `max(P/N - e_t, 0)`.
pub fn equal_share(budget: f64, estimation: f64, n: usize) -> f64 {
    (budget / n as f64 - estimation).max(0.0)
}

/// Expected harvested energy of any scheme that has a closed form.
///
/// The genie with `e_t > 0` has none beyond `N = 1` and yields
/// [`Error::NoClosedForm`].
pub fn expected_energy(scheme: Scheme, budget: f64, estimation: f64, n: usize) -> Result<ExpectedEnergyReport> {
    check_estimation(budget, estimation)?;
    check_frames(n)?;
    let expected_energy = match scheme {
        Scheme::Optimal if estimation == 0.0 => return optimal_expected_energy(budget, n),
        Scheme::Optimal => return optimal_expected_energy_with_estimation(budget, estimation, n),
        Scheme::Genie if estimation == 0.0 => return genie_expected_energy(budget, n),
        Scheme::Genie if n == 1 => budget - estimation,
        Scheme::Genie => return Err(Error::NoClosedForm(Scheme::Genie)),
        Scheme::Equal => n as f64 * equal_share(budget, estimation, n),
        Scheme::Random => budget - estimation,
    };
    Ok(ExpectedEnergyReport {
        scheme,
        frame_count: n,
        budget,
        estimation_energy: estimation,
        expected_energy,
    })
}
