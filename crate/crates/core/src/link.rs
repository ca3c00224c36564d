//! Single-link end-to-end runner: wires the transmit chain, impairment
//! model, receive chain, channel estimation, and bit-loading adaptation
//! into one reproducible simulation.
//!
//!   train equalizer -> estimate channel from pilots -> initial loading
//!   -> adapt margin against measured BER -> report rate/BER/artifacts

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{apply_channel, ChannelModel};
use crate::dsp::{FrameSpectrum, OfdmConfig, TimeWaveform};
use crate::error::{Error, Result};
use crate::loading::{
    adapt_to_target, estimate_channel, hughes_hartogs_derated, AdaptRound, LinkMeasurement,
    LoadingPlan, SubcarrierStats,
};
use crate::rx::{
    build_term_set, demap_frame, matched_filter, measure_ber, ofdm_demodulate, one_tap_equalize,
    rls_train, volterra_apply, VolterraConfig, VolterraEqualizer,
};
use crate::tx::{
    apply_drive, build_burst, clip_waveform, ofdm_modulate, pilot_frame, pulse_shape, ClipStats,
};

/// Derive an independent substream seed from a master seed and a role tag
/// (FNV-1a over the seed bytes and the tag). Stable across runs and
/// platforms, so every randomized stage is reproducible in isolation.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in master.to_le_bytes().iter().chain(tag.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Everything one simulated link needs: modem parameters, the impairment
/// model, optional nonlinear equalization, and run bookkeeping.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub label: String,
    pub ofdm: OfdmConfig,
    pub channel: ChannelModel,
    pub volterra: Option<VolterraConfig>,
    pub target_ber: f64,
    /// Drive peak-to-peak voltage; recorded in reports. The impairment
    /// model sees a full-scale normalized waveform (see `transmit`).
    pub vpp: f64,
    /// Drive bias voltage; recorded in reports.
    pub bias: f64,
    pub pilot_frames: usize,
    pub training_frames: usize,
    /// Lower bound on payload bits per BER measurement round.
    pub payload_bits_per_round: usize,
    pub max_rounds: usize,
    /// RLS forgetting factor for equalizer training.
    pub beta: f64,
    pub seed: u64,
}

impl LinkConfig {
    pub fn new(ofdm: OfdmConfig, channel: ChannelModel, target_ber: f64) -> Self {
        Self {
            label: "link".into(),
            ofdm,
            channel,
            volterra: None,
            target_ber,
            vpp: 2.0,
            bias: 0.0,
            pilot_frames: 64,
            training_frames: 16,
            payload_bits_per_round: 200_000,
            max_rounds: 10,
            beta: crate::rx::DEFAULT_BETA,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.channel.validate()?;
        if let Some(v) = &self.volterra {
            v.validate()?;
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::Config(format!(
                "target BER must lie in (0, 0.5), got {}",
                self.target_ber
            )));
        }
        if self.pilot_frames < 2 {
            return Err(Error::Config(format!(
                "need at least 2 pilot frames, got {}",
                self.pilot_frames
            )));
        }
        if self.volterra.is_some() && self.training_frames == 0 {
            return Err(Error::Config(
                "equalizer training needs at least 1 training frame".into(),
            ));
        }
        if self.payload_bits_per_round == 0 {
            return Err(Error::Config("payload bits per round must be > 0".into()));
        }
        Ok(())
    }
}

/// One transmitted/received constellation point pair for scatter plots.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstellationSample {
    pub bits: u8,
    pub tx_re: f64,
    pub tx_im: f64,
    pub rx_re: f64,
    pub rx_im: f64,
}

/// Full outcome of one link run; serializable as the per-channel report.
#[derive(Debug, Clone, Serialize)]
pub struct LinkReport {
    pub label: String,
    pub rate_bps: f64,
    pub ber: f64,
    pub target_ber: f64,
    pub converged: bool,
    pub margin_db: f64,
    pub rounds: Vec<AdaptRound>,
    /// Bits per data subcarrier, bin 1 ..= K/2 - 1.
    pub bits: Vec<u8>,
    /// Energy per data subcarrier, same indexing.
    pub energy: Vec<f64>,
    /// (frequency Hz, SNR dB) for usable subcarriers.
    pub snr_db: Vec<(f64, f64)>,
    pub clip: Option<ClipStats>,
    pub equalizer: Option<VolterraEqualizer>,
    pub constellation_samples: Vec<ConstellationSample>,
    pub vpp: f64,
    pub bias: f64,
    pub seed: u64,
}

/// Transmit a frame sequence: modulate, pulse-shape, clip, and normalize
/// to full scale +/-1 for the impairment model. Returns the line waveform,
/// the symbol-rate reference sequence, and the clipping statistics.
fn transmit(frames: &[FrameSpectrum], ofdm: &OfdmConfig) -> Result<(TimeWaveform, Vec<f64>, ClipStats)> {
    let symbols = ofdm_modulate(frames, ofdm)?;
    let shaped = pulse_shape(&symbols, ofdm)?;
    let (clipped, clip) = clip_waveform(&shaped, ofdm.clip_level)?;
    let driven = apply_drive(&clipped, 2.0, 0.0);
    Ok((driven, symbols, clip))
}

/// Receive a waveform back to frame spectra: matched filter, optional
/// Volterra equalization, trim the filter ring-out, demodulate.
fn receive(
    wave: &TimeWaveform,
    equalizer: Option<&VolterraEqualizer>,
    n_frames: usize,
    ofdm: &OfdmConfig,
) -> Result<Vec<FrameSpectrum>> {
    let mf = matched_filter(wave, ofdm)?;
    let z = match equalizer {
        Some(eq) => volterra_apply(eq, &mf)?,
        None => mf,
    };
    let expected = n_frames * ofdm.samples_per_frame();
    if z.len() < expected {
        return Err(Error::Chain(format!(
            "received {} symbols for {expected} expected",
            z.len()
        )));
    }
    ofdm_demodulate(&z[..expected], ofdm)
}

/// Rescale plan energies so the loaded bins sum to one unit per data bin,
/// matching the pilot bursts the channel response was calibrated on.
fn drive_normalized(plan: &LoadingPlan, ofdm: &OfdmConfig) -> Result<LoadingPlan> {
    let total: f64 = ofdm
        .data_bins()
        .filter(|&k| plan.bits_for_bin(k) > 0)
        .map(|k| plan.energy_for_bin(k))
        .sum();
    if !(total > 0.0) {
        return Err(Error::Config(
            "plan loads bits but carries no energy".into(),
        ));
    }
    let c = ofdm.data_bin_count() as f64 / total;
    LoadingPlan::new(
        plan.fft_size(),
        plan.bits.clone(),
        plan.energy.iter().map(|e| e * c).collect(),
        plan.target_ber,
        plan.margin_db,
    )
}

/// Train the Volterra weights on one dedicated burst of random pilot
/// frames: the unclipped symbol-rate transmit sequence is the reference.
fn train_equalizer(cfg: &LinkConfig, vcfg: &VolterraConfig) -> Result<VolterraEqualizer> {
    let terms = build_term_set(vcfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "train-bits"));
    let frames: Vec<FrameSpectrum> = (0..cfg.training_frames)
        .map(|_| pilot_frame(&cfg.ofdm, &mut rng))
        .collect();
    let (wave, reference, _) = transmit(&frames, &cfg.ofdm)?;
    let channel = cfg
        .channel
        .clone()
        .with_seed(derive_seed(cfg.seed, "train-noise"));
    let received = apply_channel(&wave, &channel)?;
    let mf = matched_filter(&received, &cfg.ofdm)?;
    let n = reference.len().min(mf.len());
    rls_train(&terms, &mf[..n], &reference[..n], cfg.beta, n)
}

/// A calibrated link: trained equalizer plus channel estimate, ready to
/// measure BER for any loading plan. Implements [`LinkMeasurement`] so the
/// adaptation loop can drive it.
pub struct LinkRunner {
    cfg: LinkConfig,
    pub equalizer: Option<VolterraEqualizer>,
    pub stats: SubcarrierStats,
    response: Vec<Complex64>,
    round: usize,
    last_clip: Option<ClipStats>,
    last_samples: Vec<ConstellationSample>,
}

/// Cap on stored constellation sample pairs per measurement.
const MAX_CONSTELLATION_SAMPLES: usize = 600;

impl LinkRunner {
    /// Run the training and pilot phases against the configured channel.
    pub fn calibrate(cfg: LinkConfig) -> Result<Self> {
        cfg.validate()?;
        let equalizer = match &cfg.volterra {
            Some(vcfg) => Some(train_equalizer(&cfg, vcfg)?),
            None => None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "pilot-bits"));
        let pilots: Vec<FrameSpectrum> = (0..cfg.pilot_frames)
            .map(|_| pilot_frame(&cfg.ofdm, &mut rng))
            .collect();
        let (wave, _, _) = transmit(&pilots, &cfg.ofdm)?;
        let channel = cfg
            .channel
            .clone()
            .with_seed(derive_seed(cfg.seed, "pilot-noise"));
        let received = apply_channel(&wave, &channel)?;
        let frames = receive(&received, equalizer.as_ref(), pilots.len(), &cfg.ofdm)?;
        let stats = estimate_channel(&frames, &pilots)?;
        let response = stats.response_spectrum();
        Ok(Self {
            cfg,
            equalizer,
            stats,
            response,
            round: 0,
            last_clip: None,
            last_samples: Vec::new(),
        })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    /// Measure one plan under an explicit substream tag, without advancing
    /// the adaptation round counter. Repeating a tag repeats the payload
    /// bits and the noise draw, so sweeps compare values under common
    /// randomness.
    pub fn measure_once(&mut self, plan: &LoadingPlan, tag: &str) -> Result<f64> {
        self.measure_tagged(plan, tag)
    }

    /// Override the channel noise level while keeping the calibration
    /// (equalizer, channel estimate) frozen, for noise sweeps.
    pub fn set_noise_std(&mut self, noise_std: f64) -> Result<()> {
        if !(noise_std >= 0.0) || !noise_std.is_finite() {
            return Err(Error::Config(format!(
                "noise_std must be finite and non-negative, got {noise_std}"
            )));
        }
        self.cfg.channel.noise_std = noise_std;
        Ok(())
    }

    /// Transmit one payload burst under `plan` and measure its BER.
    /// Each call draws fresh payload bits and a fresh noise realization,
    /// both derived deterministically from the link seed and `tag`.
    fn measure_tagged(&mut self, plan: &LoadingPlan, tag: &str) -> Result<f64> {
        let per_frame = plan.bits_per_frame();
        if per_frame == 0 {
            self.last_samples.clear();
            return Ok(0.0);
        }
        // The drive stage pins the line signal to full scale, so plan
        // energies act as relative weights. Rescale them to the pilot
        // total (one unit per data bin) so the pilot-calibrated response
        // stays valid; a uniform rescale leaves the waveform unchanged.
        let plan = &drive_normalized(plan, &self.cfg.ofdm)?;
        let n_frames = self.cfg.payload_bits_per_round.div_ceil(per_frame).max(1);
        let n_bits = n_frames * per_frame;
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(self.cfg.seed, &format!("{tag}-bits")));
        let bits: Vec<bool> = (0..n_bits).map(|_| rng.random()).collect();
        let burst = build_burst(&bits, plan, &self.cfg.ofdm, 0, &mut rng)?;
        let (wave, _, clip) = transmit(&burst.frames, &self.cfg.ofdm)?;
        let channel = self
            .cfg
            .channel
            .clone()
            .with_seed(derive_seed(self.cfg.seed, &format!("{tag}-noise")));
        let received = apply_channel(&wave, &channel)?;
        let frames = receive(&received, self.equalizer.as_ref(), n_frames, &self.cfg.ofdm)?;

        self.last_samples.clear();
        let mut decoded = Vec::with_capacity(n_bits);
        for (frame, sent) in frames.iter().zip(&burst.frames) {
            let equalized = one_tap_equalize(frame, &self.response, plan)?;
            decoded.extend(demap_frame(&equalized, plan)?);
            if self.last_samples.len() < MAX_CONSTELLATION_SAMPLES {
                for k in self.cfg.ofdm.data_bins() {
                    let b = plan.bits_for_bin(k);
                    if b == 0 || self.last_samples.len() >= MAX_CONSTELLATION_SAMPLES {
                        continue;
                    }
                    let scale = plan.energy_for_bin(k).sqrt();
                    let tx = sent.bins[k] / scale;
                    let rx = equalized.bins[k] / scale;
                    self.last_samples.push(ConstellationSample {
                        bits: b,
                        tx_re: tx.re,
                        tx_im: tx.im,
                        rx_re: rx.re,
                        rx_im: rx.im,
                    });
                }
            }
        }
        self.last_clip = Some(clip);
        measure_ber(&decoded, &bits)
    }
}

impl LinkMeasurement for LinkRunner {
    fn measure(&mut self, plan: &LoadingPlan) -> Result<f64> {
        self.round += 1;
        self.measure_tagged(plan, &format!("payload-{}", self.round))
    }
}

/// Calibrate, load, adapt, and report one complete link simulation.
pub fn run_link(cfg: &LinkConfig) -> Result<LinkReport> {
    let mut runner = LinkRunner::calibrate(cfg.clone())?;
    let stats = runner.stats.clone();
    let budget = cfg.ofdm.data_bin_count() as f64;
    let initial = hughes_hartogs_derated(&stats, cfg.target_ber, budget, 0.0)?;
    let outcome = adapt_to_target(&mut runner, &stats, initial, budget, cfg.max_rounds)?;
    let ber = match outcome.trace.last() {
        Some(round) => round.ber,
        None => runner.measure_tagged(&outcome.plan, "payload-final")?,
    };
    let rate = crate::loading::achievable_rate(&outcome.plan, &cfg.ofdm);
    let snr_db: Vec<(f64, f64)> = cfg
        .ofdm
        .data_bins()
        .filter(|&k| stats.is_usable(k))
        .map(|k| {
            (
                cfg.ofdm.bin_frequency(k),
                10.0 * stats.snr_linear(k).log10(),
            )
        })
        .collect();
    Ok(LinkReport {
        label: cfg.label.clone(),
        rate_bps: rate,
        ber,
        target_ber: cfg.target_ber,
        converged: outcome.converged,
        margin_db: outcome.plan.margin_db,
        rounds: outcome.trace,
        bits: outcome.plan.bits.clone(),
        energy: outcome.plan.energy.clone(),
        snr_db,
        clip: runner.last_clip,
        equalizer: runner.equalizer,
        constellation_samples: runner.last_samples,
        vpp: cfg.vpp,
        bias: cfg.bias,
        seed: cfg.seed,
    })
}
