//! Shared DSP primitives: OFDM configuration, unitary transforms,
//! root-raised-cosine taps, and QAM constellations.

mod config;
mod constellation;
mod fft;
mod rrc;

pub use config::{FrameSpectrum, OfdmConfig, SignalOrigin, TimeWaveform};
pub use constellation::Constellation;
pub use fft::{unitary_dft, DftPlan, Direction};
pub use rrc::rrc_taps;
