use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frame count must be at least 1")]
    ZeroFrames,

    #[error("budget must be positive and finite, got {0}")]
    InvalidBudget(f64),

    #[error("estimation energy must be finite and non-negative, got {0}")]
    InvalidEstimationEnergy(f64),

    #[error("estimation energy {estimation} leaves nothing of budget {budget}")]
    EstimationExceedsBudget { budget: f64, estimation: f64 },

    #[error("channel gain must be finite and non-negative, got {0}")]
    InvalidGain(f64),

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("scheme {0} has no closed form for this configuration")]
    NoClosedForm(crate::Scheme),

    #[error("trace has {actual} gains but the policy expects {expected} frames")]
    TraceLength { expected: usize, actual: usize },

    #[error("threshold table does not match policy (budget {budget}, e_t {estimation}, N {frames})")]
    TableMismatch {
        budget: f64,
        estimation: f64,
        frames: usize,
    },

    #[error("frame {frame}: available energy {available} inconsistent with table value {expected}")]
    InconsistentAvailable {
        frame: usize,
        available: f64,
        expected: f64,
    },

    #[error("frame {frame}: requested {requested} but only {available} available")]
    OverBudget {
        frame: usize,
        requested: f64,
        available: f64,
    },

    #[error("frame {0} is outside the horizon")]
    FrameOutOfRange(usize),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("outage threshold must be positive and finite, got {0}")]
    InvalidOutageThreshold(f64),

    #[error("invalid oracle configuration: {0}")]
    InvalidGrid(String),

    #[error(
        "oracle did not converge: V(P) moved {relative_change:e} (relative) under refinement, tolerance {tolerance:e}"
    )]
    NotConverged { relative_change: f64, tolerance: f64 },

    #[error("frame {frame}, available {available}: optimal action is not monotone in the gain")]
    NonMonotoneAction { frame: usize, available: f64 },

    #[error("worker pool: {0}")]
    Pool(String),
}
