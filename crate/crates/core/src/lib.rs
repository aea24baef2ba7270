//! Opportunistic wireless energy transfer over a finite horizon of
//! block-fading Rayleigh frames.
//!
//! A transmitter holds an energy budget `P` and sees `N` frames, indexed
//! `N-1` (first) down to `0` (the deadline). Each frame reveals a channel
//! gain `g = |h|^2 ~ Exp(1)`; the transmitter decides how much energy to
//! send. The optimal causal policy is all-or-nothing with a per-frame gain
//! threshold. This crate provides:
//!
//! * [`analytics`]: closed-form thresholds and expected harvested energy,
//!   with and without a per-frame channel-estimation cost `e_t`.
//! * [`channel`]: seed-reproducible gain traces on counter-based substreams.
//! * [`policies`]: optimal threshold, genie-aided, equal and random schemes.
//! * [`simulator`]: episode accounting, Monte Carlo means and outage rates
//!   with results independent of the worker count.
//! * [`oracle`]: a discretized Bellman solver that checks the closed forms
//!   without reusing them.

pub mod analytics;
pub mod channel;
mod error;
mod numeric;
pub mod oracle;
pub mod policies;
pub mod simulator;
pub mod units;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use error::{Error, Result};

/// Energy allocation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Causal all-or-nothing threshold policy.
    Optimal,
    /// Non-causal benchmark: transmits everything in the best frame.
    Genie,
    /// `P/N` in every frame.
    Equal,
    /// Everything in one uniformly chosen frame.
    Random,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Optimal, Scheme::Genie, Scheme::Equal, Scheme::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::Genie => "genie",
            Scheme::Equal => "equal",
            Scheme::Random => "random",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" | "optimal_threshold" | "threshold" => Ok(Scheme::Optimal),
            "genie" => Ok(Scheme::Genie),
            "equal" => Ok(Scheme::Equal),
            "random" | "random_frame" => Ok(Scheme::Random),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}
