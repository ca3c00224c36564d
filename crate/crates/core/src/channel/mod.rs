//! Impaired-link emulation: static memory-polynomial nonlinearity, band
//! limiting FIR, impedance-mismatch echo, and seeded additive white Gaussian
//! noise, plus fixed reference channels and measured-profile ingestion.

mod profile;

pub use profile::{fir_from_profile, load_profile, MeasuredProfile, ProfileData};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dsp::{SignalOrigin, TimeWaveform};
use crate::error::{Error, Result};

/// Memory-polynomial coefficients c[q-1][l] for orders q = 1..=3 and lags
/// l = 0..=2: y[n] = sum c_{q,l} * x[n-l]^q.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Nonlinearity {
    pub coeffs: [[f64; 3]; 3],
}

impl Nonlinearity {
    /// Pass-through polynomial: c_{1,0} = 1, everything else zero.
    pub fn identity() -> Self {
        let mut coeffs = [[0.0; 3]; 3];
        coeffs[0][0] = 1.0;
        Self { coeffs }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Sum of coefficient magnitudes; bounds the output for |x| <= 1.
    pub fn gain_sum(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.abs()).sum()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return x.to_vec();
        }
        let mut out = vec![0.0; x.len()];
        for (n, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for l in 0..3usize {
                if n < l {
                    continue;
                }
                let v = x[n - l];
                let mut p = v;
                for q in 0..3usize {
                    acc += self.coeffs[q][l] * p;
                    p *= v;
                }
            }
            *slot = acc;
        }
        out
    }
}

/// Single feed-forward reflection: y[n] = x[n] + gain * x[n - delay].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Echo {
    pub delay: usize,
    pub gain: f64,
}

/// Which side of the band-limiting filter the nonlinearity sits on.
/// The transmitter-side laser/driver distortion comes first by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ImpairmentOrder {
    NonlinearFirst,
    LinearFirst,
}

/// A complete link impairment model at a fixed waveform sample rate.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelModel {
    pub linear_fir: Vec<f64>,
    pub echo: Option<Echo>,
    pub nonlinearity: Nonlinearity,
    pub noise_std: f64,
    pub seed: u64,
    /// Sample rate the model was designed for; None accepts any rate.
    pub design_rate: Option<f64>,
    pub ordering: ImpairmentOrder,
}

impl ChannelModel {
    /// Distortion-free, noise-free pass-through.
    pub fn identity() -> Self {
        Self {
            linear_fir: vec![1.0],
            echo: None,
            nonlinearity: Nonlinearity::identity(),
            noise_std: 0.0,
            seed: 0,
            design_rate: None,
            ordering: ImpairmentOrder::NonlinearFirst,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.linear_fir.is_empty() {
            return Err(Error::Config("channel FIR must be nonempty".into()));
        }
        if !self.linear_fir.iter().all(|t| t.is_finite()) {
            return Err(Error::Config("channel FIR has non-finite taps".into()));
        }
        if let Some(echo) = &self.echo {
            if !(echo.gain.abs() < 1.0) {
                return Err(Error::Config(format!(
                    "echo gain magnitude must be < 1, got {}",
                    echo.gain
                )));
            }
        }
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(Error::Config(format!(
                "noise std must be >= 0, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }

    /// Peak output for peak-1 input, noise aside: every stage's gain bound
    /// multiplied together.
    pub fn amplitude_bound(&self) -> f64 {
        let fir: f64 = self.linear_fir.iter().map(|t| t.abs()).sum();
        let echo = 1.0 + self.echo.map_or(0.0, |e| e.gain.abs());
        self.nonlinearity.gain_sum() * fir * echo
    }
}

/// Run a waveform through the impairment chain. Deterministic for a fixed
/// model seed; only the noise realization depends on the seed.
pub fn apply_channel(x: &TimeWaveform, model: &ChannelModel) -> Result<TimeWaveform> {
    model.validate()?;
    if let Some(rate) = model.design_rate {
        if (x.sample_rate - rate).abs() > 1e-6 * rate {
            return Err(Error::Config(format!(
                "waveform sample rate {} does not match the channel design rate {rate}",
                x.sample_rate
            )));
        }
    }
    let mut y = match model.ordering {
        ImpairmentOrder::NonlinearFirst => {
            let nl = model.nonlinearity.apply(&x.samples);
            convolve_causal(&nl, &model.linear_fir)
        }
        ImpairmentOrder::LinearFirst => {
            let lin = convolve_causal(&x.samples, &model.linear_fir);
            model.nonlinearity.apply(&lin)
        }
    };
    if let Some(echo) = &model.echo {
        let base = y.clone();
        for n in echo.delay..y.len() {
            y[n] += echo.gain * base[n - echo.delay];
        }
    }
    if model.noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        for v in &mut y {
            let n: f64 = StandardNormal.sample(&mut rng);
            *v += model.noise_std * n;
        }
    }
    Ok(TimeWaveform::new(
        y,
        x.sample_rate,
        SignalOrigin::ChannelOut,
    ))
}

/// Causal same-length convolution with zero initial history; `taps == [1]`
/// is an exact pass-through.
fn convolve_causal(x: &[f64], taps: &[f64]) -> Vec<f64> {
    if taps == [1.0] {
        return x.to_vec();
    }
    let mut out = vec![0.0; x.len()];
    for (n, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &h) in taps.iter().enumerate().take(n + 1) {
            acc += h * x[n - j];
        }
        *slot = acc;
    }
    out
}

/// Complex frequency response of a real FIR at frequency `freq_hz`.
pub fn frequency_response(taps: &[f64], freq_hz: f64, sample_rate: f64) -> Complex64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / sample_rate;
    taps.iter()
        .enumerate()
        .map(|(j, &t)| Complex64::from_polar(t, -w * j as f64))
        .sum()
}

/// Truncated single-pole lowpass of unit DC gain: h[j] = (1-a) a^j with the
/// pole placed for a -3 dB point at `f3db_hz`.
fn single_pole_fir(f3db_hz: f64, sample_rate: f64, num_taps: usize) -> Vec<f64> {
    let c = (2.0 * std::f64::consts::PI * f3db_hz / sample_rate).cos();
    let b = 2.0 - c;
    let a = b - (b * b - 1.0).sqrt();
    (0..num_taps)
        .map(|j| (1.0 - a) * a.powi(j as i32))
        .collect()
}

/// Default design rate of the bundled reference channels: 4x oversampling
/// of a 2.67 GHz half-bandwidth (5.34 GHz symbol rate).
pub const REFERENCE_RATE: f64 = 21.36e9;

/// Default design rate of "longrange-apd": 4x oversampling of 1.33 GHz.
pub const LONGRANGE_RATE: f64 = 10.64e9;

/// Fixed reference impairment models at their default design rates.
///
/// - "ideal": exact pass-through, any rate.
/// - "lowpass-1g4": 1.4 GHz single-pole band limit, nothing else.
/// - "nonlinear-echo": band limit, reflection, mild static-plus-memory
///   nonlinearity and noise; the stress channel for equalizer tests.
/// - "longrange-apd": 1 GHz band limit with strong noise, no nonlinearity;
///   models a high-gain avalanche photodiode at long range.
pub fn reference_channel(name: &str) -> Result<ChannelModel> {
    let rate = match name {
        "longrange-apd" => LONGRANGE_RATE,
        _ => REFERENCE_RATE,
    };
    reference_channel_at(name, rate)
}

/// [`reference_channel`] with the band-limit poles re-synthesized for a
/// different waveform sample rate.
pub fn reference_channel_at(name: &str, sample_rate: f64) -> Result<ChannelModel> {
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(Error::Config(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    match name {
        "ideal" => Ok(ChannelModel::identity()),
        "lowpass-1g4" => Ok(ChannelModel {
            linear_fir: single_pole_fir(1.4e9, sample_rate, 64),
            echo: None,
            nonlinearity: Nonlinearity::identity(),
            noise_std: 0.0,
            seed: 0,
            design_rate: Some(sample_rate),
            ordering: ImpairmentOrder::NonlinearFirst,
        }),
        "nonlinear-echo" => {
            // Poles sit above the signal band so the droop stays gentle;
            // the link is distortion-limited, not bandwidth-limited.
            let fir = convolve_full(
                &single_pole_fir(4.2e9, sample_rate, 64),
                &single_pole_fir(5.6e9, sample_rate, 48),
            );
            let mut nl = Nonlinearity::identity();
            nl.coeffs[1][0] = 0.18;
            nl.coeffs[1][1] = 0.06;
            nl.coeffs[2][0] = -0.12;
            nl.coeffs[2][1] = -0.04;
            Ok(ChannelModel {
                linear_fir: fir,
                echo: Some(Echo {
                    delay: 16,
                    gain: 0.16,
                }),
                nonlinearity: nl,
                noise_std: 2.4e-3,
                seed: 0,
                design_rate: Some(sample_rate),
                ordering: ImpairmentOrder::NonlinearFirst,
            })
        }
        "longrange-apd" => Ok(ChannelModel {
            linear_fir: single_pole_fir(1.0e9, sample_rate, 64),
            echo: None,
            nonlinearity: Nonlinearity::identity(),
            noise_std: 1.9e-1,
            seed: 0,
            design_rate: Some(sample_rate),
            ordering: ImpairmentOrder::NonlinearFirst,
        }),
        other => Err(Error::Config(format!(
            "unknown reference channel '{other}'; expected ideal, lowpass-1g4, \
             nonlinear-echo, or longrange-apd"
        ))),
    }
}

fn convolve_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
