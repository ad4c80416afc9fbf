use thiserror::Error;

/// Errors produced by the splicing toolkit.
#[derive(Debug, Error)]
pub enum SpliceError {
    #[error("path list is empty")]
    EmptyPathList,

    #[error("duplicate path delay {0} s")]
    DuplicateDelay(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("SNR must be positive, got {0}")]
    NonPositiveSnr(f64),

    #[error("bandwidth must be positive")]
    NonPositiveBandwidth,

    #[error("{num} is not an integer multiple of {den}")]
    NotDivisible { num: f64, den: f64 },

    #[error("band index {index} out of range for plan with {bands} bands")]
    BandOutOfRange { index: usize, bands: usize },

    #[error("pilot symbol at position {0} is not unit modulus")]
    NonUnitPilot(usize),

    #[error("channel has {taps} taps but cyclic prefix supports at most {max}")]
    ChannelTooLong { taps: usize, max: usize },

    #[error("rank-deficient least-squares system (pivot {index} below cutoff)")]
    RankDeficient { index: usize },

    #[error("pilot magnitude below 1e-12 at subcarrier position {0}, protected division")]
    PilotUnderflow(usize),

    #[error("duplicate band {0} in measurement set")]
    DuplicateBand(usize),

    #[error("measurement inconsistent with band plan: {0}")]
    PlanMismatch(String),

    #[error("grid factor must be at least 2 for a dense delay grid, got {0}")]
    GridTooCoarse(usize),

    #[error("sparsity order must satisfy 1 <= K <= {max}, got {got}")]
    BadSparsity { got: usize, max: usize },

    #[error("subset of {0} bands is not a positive integer count")]
    BadSubsetSize(f64),

    #[error("path delay {delay_s} s outside [0, {max_s}) for spacing {spacing_hz} Hz")]
    DelayOutOfRange {
        delay_s: f64,
        max_s: f64,
        spacing_hz: f64,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid scenario config: {0}")]
    BadConfig(String),
}
