//! OFDM link parameters and the two signal container types used across the
//! chain: real time-domain waveforms and per-frame subcarrier spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one DCO-OFDM link.
///
/// The symbol rate is `2 * bandwidth_hz`: the real baseband signal occupies a
/// single-sided band of `bandwidth_hz`, so one symbol period carries two real
/// samples worth of bandwidth. Subcarrier spacing follows as `2B / K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    /// FFT size K; power of two, at least 4.
    pub fft_size: usize,
    /// Cyclic prefix length in symbol-rate samples; strictly less than K.
    pub cp_length: usize,
    /// RRC roll-off factor in [0, 1].
    pub rolloff: f64,
    /// Clipping threshold in units of the waveform standard deviation.
    /// `f64::INFINITY` disables clipping.
    pub clip_level: f64,
    /// Samples per symbol period after pulse shaping; at least 1.
    pub oversampling: usize,
    /// Single-sided modulation bandwidth B in Hz.
    pub bandwidth_hz: f64,
    /// RRC filter span in symbol periods.
    #[serde(default = "default_rrc_span")]
    pub rrc_span: usize,
}

fn default_rrc_span() -> usize {
    16
}

impl OfdmConfig {
    pub fn new(
        fft_size: usize,
        cp_length: usize,
        rolloff: f64,
        clip_level: f64,
        oversampling: usize,
        bandwidth_hz: f64,
    ) -> Result<Self> {
        let cfg = Self {
            fft_size,
            cp_length,
            rolloff,
            clip_level,
            oversampling,
            bandwidth_hz,
            rrc_span: default_rrc_span(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rrc_span(mut self, span: usize) -> Result<Self> {
        self.rrc_span = span;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size < 4 || !self.fft_size.is_power_of_two() {
            return Err(Error::Config(format!(
                "fft_size must be a power of two >= 4, got {}",
                self.fft_size
            )));
        }
        if self.cp_length >= self.fft_size {
            return Err(Error::Config(format!(
                "cp_length must be < fft_size, got {} >= {}",
                self.cp_length, self.fft_size
            )));
        }
        if !(0.0..=1.0).contains(&self.rolloff) || self.rolloff.is_nan() {
            return Err(Error::Config(format!(
                "rolloff must lie in [0, 1], got {}",
                self.rolloff
            )));
        }
        if !(self.clip_level > 0.0) {
            return Err(Error::Config(format!(
                "clip_level must be positive, got {}",
                self.clip_level
            )));
        }
        if self.oversampling == 0 {
            return Err(Error::Config("oversampling must be >= 1".into()));
        }
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(Error::Config(format!(
                "bandwidth_hz must be positive and finite, got {}",
                self.bandwidth_hz
            )));
        }
        if self.rrc_span < 4 {
            return Err(Error::Config(format!(
                "rrc_span must be >= 4 symbols, got {}",
                self.rrc_span
            )));
        }
        if (self.rrc_span * self.oversampling) % 2 != 0 {
            return Err(Error::Config(
                "rrc_span * oversampling must be even so the tap count is odd".into(),
            ));
        }
        Ok(())
    }

    /// Symbol rate 1/T_s = 2B in Hz.
    pub fn symbol_rate(&self) -> f64 {
        2.0 * self.bandwidth_hz
    }

    /// Waveform sample rate after pulse shaping, Hz.
    pub fn sample_rate(&self) -> f64 {
        self.oversampling as f64 * self.symbol_rate()
    }

    /// Subcarrier spacing 2B/K in Hz.
    pub fn subcarrier_spacing(&self) -> f64 {
        self.symbol_rate() / self.fft_size as f64
    }

    /// Center frequency of data subcarrier `k` in Hz.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.subcarrier_spacing()
    }

    /// Indices of the information-carrying subcarriers: 1 ..= K/2 - 1.
    /// Bin 0 (DC) and bin K/2 (Nyquist) never carry data.
    pub fn data_bins(&self) -> std::ops::Range<usize> {
        1..self.fft_size / 2
    }

    /// Number of data subcarriers, K/2 - 1.
    pub fn data_bin_count(&self) -> usize {
        self.fft_size / 2 - 1
    }

    /// Symbol-rate samples per OFDM frame including the cyclic prefix.
    pub fn samples_per_frame(&self) -> usize {
        self.fft_size + self.cp_length
    }

    /// OFDM frame rate 2B/(K + CP) in frames per second.
    pub fn frame_rate(&self) -> f64 {
        self.symbol_rate() / self.samples_per_frame() as f64
    }
}

/// Stage of the chain a waveform was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalOrigin {
    Tx,
    ChannelOut,
    Rx,
}

/// Real-valued sampled signal with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWaveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub origin: SignalOrigin,
}

impl TimeWaveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64, origin: SignalOrigin) -> Self {
        Self {
            samples,
            sample_rate,
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// All samples finite (no NaN/Inf).
    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.is_finite())
    }

    /// Empirical (population) standard deviation of the samples.
    pub fn std_dev(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        let var = self.samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        var.sqrt()
    }
}

/// One OFDM frame in the frequency domain: K complex subcarrier symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpectrum {
    pub bins: Vec<Complex64>,
}

impl FrameSpectrum {
    pub fn zeros(fft_size: usize) -> Self {
        Self {
            bins: vec![Complex64::new(0.0, 0.0); fft_size],
        }
    }

    pub fn fft_size(&self) -> usize {
        self.bins.len()
    }

    /// True when X[k] = conj(X[K-k]) for all k and X[0], X[K/2] are real,
    /// within an absolute tolerance per component.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let k_max = self.bins.len();
        if k_max < 2 || k_max % 2 != 0 {
            return false;
        }
        if self.bins[0].im.abs() > tol || self.bins[k_max / 2].im.abs() > tol {
            return false;
        }
        for k in 1..k_max / 2 {
            let diff = self.bins[k] - self.bins[k_max - k].conj();
            if diff.re.abs() > tol || diff.im.abs() > tol {
                return false;
            }
        }
        true
    }
}
