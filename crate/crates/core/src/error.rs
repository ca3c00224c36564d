//! Crate-wide error type. Every fallible operation returns [`Result`].

use thiserror::Error;

/// Errors produced by configuration validation, the signal chain, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation; the message names the offending field.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Frame assembly or demodulation received inconsistent sizes or symmetry.
    #[error("framing error: {0}")]
    Framing(String),

    /// Equalizer training produced a non-finite weight.
    #[error("equalizer training diverged at iteration {iteration}")]
    TrainingDiverged { iteration: usize },

    /// A loaded subcarrier has a channel response too small to invert.
    #[error("subcarrier {bin} has near-zero channel response (|H| = {magnitude:.3e})")]
    ZeroResponse { bin: usize, magnitude: f64 },

    /// Channel estimation was given unusable pilot data.
    #[error("channel estimation error: {0}")]
    Estimation(String),

    /// A measured-response profile could not be parsed or fitted.
    #[error("profile error: {0}")]
    Profile(String),

    /// A waveform or sample-rate mismatch between chain stages.
    #[error("signal chain error: {0}")]
    Chain(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
