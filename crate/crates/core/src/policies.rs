//! The energy allocation schemes.
//!
//! Causal schemes decide frame by frame from `(frame, available, gain)`;
//! the genie sees the whole trace up front.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    available_on_wait_path, check_estimation, check_frames, thresholds_no_estimation, thresholds_with_estimation,
    ThresholdTable, ENERGY_EPS,
};
use crate::channel::ChannelTrace;
use crate::{Error, Result, Scheme};

/// Which scheme to run and with what parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    scheme: Scheme,
    budget: f64,
    estimation_energy: f64,
    frame_count: usize,
    threshold_table: Option<ThresholdTable>,
}

impl PolicySpec {
    /// Builds a policy; the optimal scheme gets its threshold table here.
    pub fn new(scheme: Scheme, budget: f64, estimation_energy: f64, frame_count: usize) -> Result<Self> {
        check_estimation(budget, estimation_energy)?;
        check_frames(frame_count)?;
        let threshold_table = match scheme {
            Scheme::Optimal if estimation_energy == 0.0 => Some(thresholds_no_estimation(budget, frame_count)?),
            Scheme::Optimal => Some(thresholds_with_estimation(budget, estimation_energy, frame_count)?),
            _ => None,
        };
        Ok(Self {
            scheme,
            budget,
            estimation_energy,
            frame_count,
            threshold_table,
        })
    }

    /// Optimal threshold policy with a caller-supplied table.
    pub fn optimal_with_table(table: ThresholdTable) -> Result<Self> {
        let spec = Self {
            scheme: Scheme::Optimal,
            budget: table.budget(),
            estimation_energy: table.estimation_energy(),
            frame_count: table.frame_count(),
            threshold_table: Some(table),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_estimation(self.budget, self.estimation_energy)?;
        check_frames(self.frame_count)?;
        if self.scheme == Scheme::Optimal {
            let consistent = self
                .threshold_table
                .as_ref()
                .is_some_and(|t| t.matches(self.budget, self.estimation_energy, self.frame_count));
            if !consistent {
                return Err(Error::TableMismatch {
                    budget: self.budget,
                    estimation: self.estimation_energy,
                    frames: self.frame_count,
                });
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn estimation_energy(&self) -> f64 {
        self.estimation_energy
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn threshold_table(&self) -> Option<&ThresholdTable> {
        self.threshold_table.as_ref()
    }
}

/// Energy sent in one frame. `active` is the frame's `s_j`: whether the
/// transmitter engages this frame at all (and so pays for estimation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub transmit_energy: f64,
    pub active: bool,
}

impl Decision {
    pub const IDLE: Decision = Decision {
        transmit_energy: 0.0,
        active: false,
    };

    /// Estimate the channel and wait.
    pub fn estimate_only(estimation: f64) -> Self {
        Self {
            transmit_energy: estimation,
            active: true,
        }
    }

    /// Send `energy`, of which `energy - e_t` reaches the harvester.
    pub fn transmit(energy: f64) -> Self {
        Self {
            transmit_energy: energy,
            active: true,
        }
    }

    /// `s_j (rho_j - e_t) g_j` with unit conversion efficiency.
    pub fn harvested(&self, estimation: f64, gain: f64) -> f64 {
        if self.active {
            (self.transmit_energy - estimation).max(0.0) * gain
        } else {
            0.0
        }
    }
}

/// All-or-nothing threshold decision. Ties (`gain == threshold`) transmit.
pub fn decide_optimal(frame: usize, available: f64, gain: f64, table: &ThresholdTable) -> Result<Decision> {
    let threshold = table.threshold(frame)?;
    let expected = table.available()[frame];
    let tol = 1e-9 * table.budget();
    if (available - expected).abs() > tol {
        return Err(Error::InconsistentAvailable {
            frame,
            available,
            expected,
        });
    }
    let estimation = table.estimation_energy();
    if available + ENERGY_EPS * table.budget() < estimation {
        return Err(Error::OverBudget {
            frame,
            requested: estimation,
            available,
        });
    }
    if gain >= threshold {
        Ok(Decision::transmit(available))
    } else {
        Ok(Decision::estimate_only(estimation))
    }
}

/// The genie's pick for one trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenieChoice {
    pub frame: usize,
    pub transmit_energy: f64,
    pub harvested: f64,
}

/// Frame maximizing `(A_j - e_t) g_j` with `A_j = P - (N-1-j) e_t`, ties to
/// the earliest frame. Without estimation cost this is the plain argmax.
pub fn decide_genie(trace: &ChannelTrace, budget: f64, estimation: f64) -> Result<GenieChoice> {
    check_estimation(budget, estimation)?;
    let n = trace.len();
    let mut best: Option<GenieChoice> = None;
    for frame in (0..n).rev() {
        let available = available_on_wait_path(budget, estimation, n, frame);
        let harvested = (available - estimation) * trace.gain(frame);
        if best.is_none_or(|b| harvested > b.harvested) {
            best = Some(GenieChoice {
                frame,
                transmit_energy: available,
                harvested,
            });
        }
    }
    best.ok_or(Error::ZeroFrames)
}

/// `P/N` per frame. When that share cannot cover the estimation cost the
/// frame stays idle; otherwise `P/N - e_t` is harvestable.
pub fn decide_equal(budget: f64, estimation: f64, n: usize) -> Decision {
    let share = budget / n as f64;
    if share >= estimation {
        Decision::transmit(share)
    } else {
        Decision::IDLE
    }
}

/// Uniformly chosen transmit frame.
pub fn decide_random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}
