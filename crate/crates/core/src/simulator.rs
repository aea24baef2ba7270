//! Episode accounting and Monte Carlo estimation.
//!
//! Trials are grouped into fixed-size blocks. Each block is reduced in trial
//! order and the block partials are merged in block order, so a summary
//! depends only on `(policy, trials, master_seed)` and never on how many
//! worker threads ran the blocks.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::ENERGY_EPS;
use crate::channel::{ChannelTrace, SeedSpec, TrialStream};
use crate::policies::{decide_equal, decide_genie, decide_optimal, decide_random, Decision, PolicySpec};
use crate::{Error, Result, Scheme};

/// Trials per reduction block. Part of the determinism contract.
pub const BLOCK_TRIALS: u64 = 4096;

/// Outcome of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Realized harvested energy `sum_j s_j (rho_j - e_t) g_j`.
    pub harvested: f64,
    /// Frame that received the whole remaining budget, if any.
    pub transmit_frame: Option<usize>,
    /// `rho_j` indexed by frame.
    pub energy_spent: Vec<f64>,
}

impl EpisodeResult {
    pub fn total_spent(&self) -> f64 {
        self.energy_spent.iter().sum()
    }
}

/// Plays one episode from frame `N-1` down to 0.
///
/// `rng` is consumed only by randomized schemes.
pub fn run_episode<R: Rng + ?Sized>(policy: &PolicySpec, trace: &ChannelTrace, rng: &mut R) -> Result<EpisodeResult> {
    let n = policy.frame_count();
    if trace.len() != n {
        return Err(Error::TraceLength {
            expected: n,
            actual: trace.len(),
        });
    }
    policy.validate()?;
    let budget = policy.budget();
    let estimation = policy.estimation_energy();
    let eps = ENERGY_EPS * budget;

    let target = match policy.scheme() {
        Scheme::Genie => Some(decide_genie(trace, budget, estimation)?.frame),
        Scheme::Random => Some(decide_random(rng, n)),
        Scheme::Optimal | Scheme::Equal => None,
    };

    let mut available = budget;
    let mut harvested = 0.0;
    let mut transmit_frame = None;
    let mut energy_spent = vec![0.0; n];
    for frame in (0..n).rev() {
        // s_j: is any energy left at all?
        if available <= eps {
            continue;
        }
        let gain = trace.gain(frame);
        let decision = match (policy.scheme(), target) {
            (Scheme::Optimal, _) => {
                let table = policy.threshold_table().expect("validated optimal policy has a table");
                decide_optimal(frame, available, gain, table)?
            }
            (Scheme::Equal, _) => decide_equal(budget, estimation, n),
            (Scheme::Genie, Some(t)) if frame > t => Decision::estimate_only(estimation),
            (Scheme::Genie | Scheme::Random, Some(t)) if frame == t => Decision::transmit(available),
            _ => Decision::IDLE,
        };
        if decision.transmit_energy > available + eps {
            return Err(Error::OverBudget {
                frame,
                requested: decision.transmit_energy,
                available,
            });
        }
        harvested += decision.harvested(estimation, gain);
        energy_spent[frame] = decision.transmit_energy;
        if policy.scheme() != Scheme::Equal && decision.active && decision.transmit_energy >= available - eps {
            transmit_frame = Some(frame);
        }
        available = (available - decision.transmit_energy).max(0.0);
    }
    Ok(EpisodeResult {
        harvested,
        transmit_frame,
        energy_spent,
    })
}

/// Aggregate over trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; 0 for a single trial.
    pub std_error: f64,
    pub outage_frequency: Option<f64>,
    /// Binomial standard error of `outage_frequency`.
    pub outage_std_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    count: u64,
    mean: f64,
    m2: f64,
    below: u64,
}

impl Partial {
    fn push(&mut self, x: f64, below: bool) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.below += below as u64;
    }

    fn merge(self, other: Partial) -> Partial {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Partial {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
            below: self.below + other.below,
        }
    }
}

fn run_trials(
    policy: &PolicySpec,
    trials: u64,
    master_seed: u64,
    outage_threshold: Option<f64>,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    policy.validate()?;
    let n = policy.frame_count();
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let partials: Vec<Partial> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK_TRIALS;
            let end = (start + BLOCK_TRIALS).min(trials);
            let mut acc = Partial::default();
            for trial in start..end {
                let mut stream = TrialStream::new(SeedSpec::new(master_seed, trial));
                let trace = stream.draw_trace(n)?;
                let episode = run_episode(policy, &trace, stream.rng_mut())?;
                let below = outage_threshold.is_some_and(|th| episode.harvested < th);
                acc.push(episode.harvested, below);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = partials.into_iter().fold(Partial::default(), Partial::merge);

    let std_error = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64).sqrt() / (total.count as f64).sqrt()
    } else {
        0.0
    };
    let outage = outage_threshold.map(|_| total.below as f64 / total.count as f64);
    Ok(MonteCarloSummary {
        trials: total.count,
        mean: total.mean,
        std_error,
        outage_frequency: outage,
        outage_std_error: outage.map(|p| (p * (1.0 - p) / total.count as f64).sqrt()),
    })
}

/// Mean harvested energy over `trials` seeded episodes.
///
/// Runs on the current rayon pool; see [`with_workers`].
pub fn monte_carlo(policy: &PolicySpec, trials: u64, master_seed: u64) -> Result<MonteCarloSummary> {
    run_trials(policy, trials, master_seed, None)
}

/// Fraction of episodes whose realized harvest falls below `threshold`.
pub fn outage_probability(
    policy: &PolicySpec,
    threshold: f64,
    trials: u64,
    master_seed: u64,
) -> Result<MonteCarloSummary> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidOutageThreshold(threshold));
    }
    run_trials(policy, trials, master_seed, Some(threshold))
}

/// Runs `f` on a dedicated pool of `workers` threads (0 picks rayon's
/// default). Results of this module do not depend on the choice.
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    Ok(pool.install(f))
}
