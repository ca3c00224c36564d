//! Baseband simulator for laser LiFi links.
//!
//! Signal chain:
//!
//! ```text
//! bits -> QAM -> Hermitian OFDM frames -> IFFT+CP -> RRC pulse shaping -> clip
//!      -> drive scaling -> channel (nonlinearity, lowpass, echo, noise)
//!      -> matched filter -> Volterra equalizer -> FFT -> one-tap EQ -> demap
//! ```
//!
//! The [`dsp`] module holds shared numeric primitives, [`tx`] builds transmit
//! waveforms, [`channel`] emulates impaired links, [`rx`] recovers symbols and
//! trains the nonlinear equalizer, [`loading`] adapts bit/energy allocation to
//! the measured per-subcarrier SNR, [`link`] wires a full single-wavelength
//! link together, and [`wdm`] aggregates several wavelengths into one report.

pub mod channel;
pub mod dsp;
pub mod error;
pub mod link;
pub mod loading;
pub mod rx;
pub mod tx;
pub mod wdm;

pub use error::{Error, Result};
