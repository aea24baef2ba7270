//! Seed-reproducible Rayleigh block-fading gain traces.
//!
//! Each trial owns a ChaCha8 substream. The 256-bit key holds the master
//! seed in its first 8 bytes (little endian) followed by a fixed domain tag;
//! the 64-bit stream id is the trial index. Distinct `(master_seed,
//! trial_index)` pairs therefore map to distinct keystreams, and the output
//! does not depend on which thread runs the trial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::check_frames;
use crate::{Error, Result};

const DOMAIN_TAG: &[u8; 24] = b"oet/channel-trace/v1\0\0\0\0";

/// Identifies the substream of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..].copy_from_slice(DOMAIN_TAG);
        key
    }
}

/// Random source for one trial: gains first, then any scheme-level draws.
#[derive(Debug, Clone)]
pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    pub fn new(seed: SeedSpec) -> Self {
        let mut rng = ChaCha8Rng::from_seed(seed.key());
        rng.set_stream(seed.trial_index);
        Self { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// `Exp(1)` by inversion, `-ln(1 - U)`. `U < 1` keeps the log finite.
    pub fn exponential(&mut self) -> f64 {
        let u = self.uniform();
        -libm::log1p(-u)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n as u64) as usize
    }

    pub fn draw_trace(&mut self, n: usize) -> Result<ChannelTrace> {
        check_frames(n)?;
        Ok(ChannelTrace {
            gains: (0..n).map(|_| self.exponential()).collect(),
        })
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Squared channel gains of one episode, stored in play order: index 0 is
/// frame `N-1`, the last entry is frame 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    gains: Vec<f64>,
}

impl ChannelTrace {
    /// Builds a trace from gains listed in play order (frame `N-1` first).
    pub fn from_play_order(gains: Vec<f64>) -> Result<Self> {
        check_frames(gains.len())?;
        if let Some(&bad) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::InvalidGain(bad));
        }
        Ok(Self { gains })
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// Gains in play order.
    pub fn play_order(&self) -> &[f64] {
        &self.gains
    }

    /// Gain of frame `j` (0 is the deadline).
    pub fn gain(&self, frame: usize) -> f64 {
        self.gains[self.gains.len() - 1 - frame]
    }
}

/// Trace of `n` i.i.d. `Exp(1)` gains for the given substream.
pub fn draw_trace(seed: SeedSpec, n: usize) -> Result<ChannelTrace> {
    TrialStream::new(seed).draw_trace(n)
}
