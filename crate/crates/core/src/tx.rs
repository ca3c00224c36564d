//! Transmit chain: payload bits -> per-subcarrier QAM symbols -> Hermitian
//! OFDM frames -> IFFT + cyclic prefix -> root-raised-cosine pulse shaping
//! -> amplitude clipping -> drive scaling.

use rand::Rng;

use crate::dsp::{
    rrc_taps, Constellation, DftPlan, Direction, FrameSpectrum, OfdmConfig, SignalOrigin,
    TimeWaveform,
};
use crate::error::{Error, Result};
use crate::loading::LoadingPlan;

/// Frames of one transmission burst: pilots first, then payload frames.
#[derive(Debug, Clone)]
pub struct TxBurst {
    pub frames: Vec<FrameSpectrum>,
    pub pilot_count: usize,
}

impl TxBurst {
    pub fn pilot_frames(&self) -> &[FrameSpectrum] {
        &self.frames[..self.pilot_count]
    }

    pub fn data_frames(&self) -> &[FrameSpectrum] {
        &self.frames[self.pilot_count..]
    }
}

/// Outcome of [`clip_waveform`]: the threshold actually applied and how many
/// samples hit it. `sigma` is recorded so clipping can be replayed exactly.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ClipStats {
    pub sigma: f64,
    pub threshold: f64,
    pub clipped: usize,
    pub total: usize,
}

impl ClipStats {
    pub fn clipped_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.clipped as f64 / self.total as f64
        }
    }
}

/// Map payload bits onto one Hermitian-symmetric OFDM frame.
///
/// Bits are consumed MSB-first, data bins in ascending order; bin k carries
/// `plan.bits_for_bin(k)` bits scaled by sqrt(e_k). Bins 0 and K/2 stay
/// zero; bins above K/2 mirror as conjugates.
pub fn assemble_frame(
    bits: &[bool],
    plan: &LoadingPlan,
    config: &OfdmConfig,
) -> Result<FrameSpectrum> {
    if plan.fft_size() != config.fft_size {
        return Err(Error::Framing(format!(
            "plan is for FFT size {}, config has {}",
            plan.fft_size(),
            config.fft_size
        )));
    }
    let expected = plan.bits_per_frame();
    if bits.len() != expected {
        return Err(Error::Framing(format!(
            "expected {expected} payload bits per frame, got {}",
            bits.len()
        )));
    }
    let k_fft = config.fft_size;
    let mut frame = FrameSpectrum::zeros(k_fft);
    let mut cursor = 0usize;
    for k in config.data_bins() {
        let b = plan.bits_for_bin(k);
        if b == 0 {
            continue;
        }
        let constellation = Constellation::for_bits(b)?;
        let chunk = &bits[cursor..cursor + b as usize];
        cursor += b as usize;
        let symbol = constellation.map_bits(chunk)? * plan.energy_for_bin(k).sqrt();
        frame.bins[k] = symbol;
        frame.bins[k_fft - k] = symbol.conj();
    }
    Ok(frame)
}

/// One pilot frame: independent unit-variance 4-QAM on every data bin.
pub fn pilot_frame<R: Rng + ?Sized>(config: &OfdmConfig, rng: &mut R) -> FrameSpectrum {
    let constellation = Constellation::for_bits(2).expect("4-QAM");
    let k_fft = config.fft_size;
    let mut frame = FrameSpectrum::zeros(k_fft);
    for k in config.data_bins() {
        let label = rng.random_range(0..4usize);
        let symbol = constellation.points()[label];
        frame.bins[k] = symbol;
        frame.bins[k_fft - k] = symbol.conj();
    }
    frame
}

/// Build a burst: `n_pilot` pilot frames followed by payload frames that
/// consume `payload_bits` (length must be a whole number of frames).
pub fn build_burst<R: Rng + ?Sized>(
    payload_bits: &[bool],
    plan: &LoadingPlan,
    config: &OfdmConfig,
    n_pilot: usize,
    rng: &mut R,
) -> Result<TxBurst> {
    let per_frame = plan.bits_per_frame();
    if per_frame == 0 && !payload_bits.is_empty() {
        return Err(Error::Framing(
            "payload bits supplied but the plan loads no bits".into(),
        ));
    }
    if per_frame > 0 && !payload_bits.len().is_multiple_of(per_frame) {
        return Err(Error::Framing(format!(
            "payload length {} is not a multiple of {per_frame} bits per frame",
            payload_bits.len()
        )));
    }
    let mut frames = Vec::new();
    for _ in 0..n_pilot {
        frames.push(pilot_frame(config, rng));
    }
    if per_frame > 0 {
        for chunk in payload_bits.chunks(per_frame) {
            frames.push(assemble_frame(chunk, plan, config)?);
        }
    }
    Ok(TxBurst {
        frames,
        pilot_count: n_pilot,
    })
}

/// Hermitian frames -> real symbol-rate sequence: unitary IFFT per frame
/// with the last `cp_length` body samples copied in front.
pub fn ofdm_modulate(frames: &[FrameSpectrum], config: &OfdmConfig) -> Result<Vec<f64>> {
    let k_fft = config.fft_size;
    let plan = DftPlan::new(k_fft);
    let mut out = Vec::with_capacity(frames.len() * (k_fft + config.cp_length));
    for (idx, frame) in frames.iter().enumerate() {
        if frame.fft_size() != k_fft {
            return Err(Error::Framing(format!(
                "frame {idx} has FFT size {}, config has {k_fft}",
                frame.fft_size()
            )));
        }
        if !frame.is_hermitian(1e-9) {
            return Err(Error::Framing(format!(
                "frame {idx} is not Hermitian-symmetric; IFFT would be complex"
            )));
        }
        let mut buf = frame.bins.clone();
        plan.process(&mut buf, Direction::Inverse);
        let body: Vec<f64> = buf.iter().map(|c| c.re).collect();
        out.extend_from_slice(&body[k_fft - config.cp_length..]);
        out.extend_from_slice(&body);
    }
    Ok(out)
}

/// Upsample by the configured factor and convolve with the unit-energy RRC
/// pulse (full convolution; group delay = (taps-1)/2 samples).
pub fn pulse_shape(symbols: &[f64], config: &OfdmConfig) -> Result<TimeWaveform> {
    if config.oversampling < 2 {
        return Err(Error::Config(format!(
            "pulse shaping needs oversampling >= 2, got {}",
            config.oversampling
        )));
    }
    let taps = rrc_taps(config.rolloff, config.oversampling, config.rrc_span)?;
    let os = config.oversampling;
    if symbols.is_empty() {
        return Ok(TimeWaveform::new(
            Vec::new(),
            config.sample_rate(),
            SignalOrigin::Tx,
        ));
    }
    // Impulse train spans (N-1)*os + 1 samples; full convolution appends
    // the pulse tail, so a single unit symbol reproduces the taps exactly.
    let out_len = (symbols.len() - 1) * os + taps.len();
    let mut out = vec![0.0f64; out_len];
    for (n, &s) in symbols.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let base = n * os;
        for (j, &t) in taps.iter().enumerate() {
            out[base + j] += s * t;
        }
    }
    Ok(TimeWaveform::new(
        out,
        config.sample_rate(),
        SignalOrigin::Tx,
    ))
}

/// Clip to +/- sigma*kappa where sigma is the waveform's own standard
/// deviation (recorded in the returned stats for exact replay).
pub fn clip_waveform(wave: &TimeWaveform, kappa: f64) -> Result<(TimeWaveform, ClipStats)> {
    let sigma = wave.std_dev();
    clip_waveform_with_sigma(wave, sigma, kappa)
}

/// [`clip_waveform`] against a caller-supplied sigma; reapplying with the
/// recorded sigma is a no-op. Zero sigma passes the waveform through.
pub fn clip_waveform_with_sigma(
    wave: &TimeWaveform,
    sigma: f64,
    kappa: f64,
) -> Result<(TimeWaveform, ClipStats)> {
    if !(kappa > 0.0) {
        return Err(Error::Config(format!(
            "clip level must be positive, got {kappa}"
        )));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Config(format!("invalid clip sigma {sigma}")));
    }
    let total = wave.samples.len();
    if sigma == 0.0 {
        let stats = ClipStats {
            sigma,
            threshold: 0.0,
            clipped: 0,
            total,
        };
        return Ok((wave.clone(), stats));
    }
    let threshold = sigma * kappa;
    let mut clipped = 0usize;
    let samples: Vec<f64> = wave
        .samples
        .iter()
        .map(|&x| {
            if x.abs() > threshold {
                clipped += 1;
                x.signum() * threshold
            } else {
                x
            }
        })
        .collect();
    let stats = ClipStats {
        sigma,
        threshold,
        clipped,
        total,
    };
    Ok((
        TimeWaveform::new(samples, wave.sample_rate, wave.origin),
        stats,
    ))
}

/// Scale the waveform's peak-to-peak swing to `vpp` and add the `bias`
/// offset. A constant waveform becomes the bias alone.
pub fn apply_drive(wave: &TimeWaveform, vpp: f64, bias: f64) -> TimeWaveform {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &wave.samples {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let range = hi - lo;
    let scale = if range > 0.0 { vpp / range } else { 0.0 };
    let samples = wave.samples.iter().map(|&x| x * scale + bias).collect();
    TimeWaveform::new(samples, wave.sample_rate, wave.origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use statrs::function::erf::erfc;

    fn config_k(fft_size: usize, cp: usize) -> OfdmConfig {
        OfdmConfig::new(fft_size, cp, 0.1, 3.2, 4, 1e9).unwrap()
    }

    // -- frame assembly ----------------------------------------------------

    #[test]
    fn empty_plan_gives_zero_spectrum() {
        let config = config_k(16, 4);
        let plan = LoadingPlan::flat(&config, 0, 0.056).unwrap();
        let frame = assemble_frame(&[], &plan, &config).unwrap();
        assert!(frame.bins.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn single_qpsk_bin_fills_hermitian_mirror() {
        let config = config_k(8, 2);
        let mut plan = LoadingPlan::flat(&config, 0, 0.056).unwrap();
        plan.bits[0] = 2;
        plan.energy[0] = 1.0;
        let frame = assemble_frame(&[false, false], &plan, &config).unwrap();
        let want = Constellation::for_bits(2)
            .unwrap()
            .map_bits(&[false, false])
            .unwrap();
        assert!((frame.bins[1] - want).norm() < 1e-12);
        assert!((frame.bins[7] - want.conj()).norm() < 1e-12);
        for k in [0usize, 2, 3, 4, 5, 6] {
            assert_eq!(frame.bins[k].norm(), 0.0, "bin {k}");
        }
    }

    #[test]
    fn random_loading_ifft_is_real_to_1e9() {
        let config = config_k(1024, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut plan = LoadingPlan::flat(&config, 0, 0.056).unwrap();
        for i in 0..plan.bits.len() {
            let b = rng.random_range(0..=9u8);
            plan.bits[i] = b;
            plan.energy[i] = if b == 0 { 0.0 } else { rng.random_range(0.2..1.8) };
        }
        let bits: Vec<bool> = (0..plan.bits_per_frame()).map(|_| rng.random()).collect();
        let frame = assemble_frame(&bits, &plan, &config).unwrap();
        let mut buf = frame.bins.clone();
        DftPlan::new(1024).process(&mut buf, Direction::Inverse);
        let worst = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "worst imaginary part {worst}");
    }

    #[test]
    fn bpsk_and_qpsk_bins_carry_exactly_their_energy() {
        // Unit-modulus constellations make the per-bin energy deterministic;
        // higher orders match in expectation via unit average energy.
        let config = config_k(16, 4);
        let mut plan = LoadingPlan::flat(&config, 0, 0.056).unwrap();
        plan.bits[0] = 1;
        plan.energy[0] = 0.7;
        plan.bits[3] = 2;
        plan.energy[3] = 1.3;
        let frame = assemble_frame(&[true, false, true], &plan, &config).unwrap();
        assert!((frame.bins[1].norm_sqr() - 0.7).abs() < 1e-9);
        assert!((frame.bins[4].norm_sqr() - 1.3).abs() < 1e-9);
    }

    #[test]
    fn wrong_bit_count_is_a_framing_error() {
        let config = config_k(16, 4);
        let plan = LoadingPlan::flat(&config, 2, 0.056).unwrap();
        assert!(matches!(
            assemble_frame(&[true; 3], &plan, &config),
            Err(Error::Framing(_))
        ));
    }

    #[test]
    fn pilot_frames_are_hermitian_unit_variance() {
        let config = config_k(64, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let frame = pilot_frame(&config, &mut rng);
        assert!(frame.is_hermitian(1e-12));
        for k in config.data_bins() {
            assert!((frame.bins[k].norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    // -- modulation ---------------------------------------------------------

    #[test]
    fn zero_frame_modulates_to_zeros() {
        let config = config_k(16, 4);
        let out = ofdm_modulate(&[FrameSpectrum::zeros(16)], &config).unwrap();
        assert_eq!(out.len(), 20);
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn k4_cp1_matches_hand_evaluation() {
        let config = OfdmConfig::new(4, 1, 0.1, 3.2, 4, 1e9).unwrap();
        let mut frame = FrameSpectrum::zeros(4);
        frame.bins[1] = Complex64::new(1.0, 0.0);
        frame.bins[3] = Complex64::new(1.0, 0.0);
        let out = ofdm_modulate(&[frame], &config).unwrap();
        let want = [0.0, 1.0, 0.0, -1.0, 0.0];
        for (got, want) in out.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{out:?}");
        }
    }

    #[test]
    fn cyclic_prefix_replicates_body_tail() {
        let config = config_k(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let frame = pilot_frame(&config, &mut rng);
        let out = ofdm_modulate(&[frame], &config).unwrap();
        assert_eq!(out.len(), 80);
        for i in 0..16 {
            assert!((out[i] - out[64 + i]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_frame_is_rejected() {
        let config = config_k(16, 4);
        let mut frame = FrameSpectrum::zeros(16);
        frame.bins[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            ofdm_modulate(&[frame], &config),
            Err(Error::Framing(_))
        ));
    }

    // -- pulse shaping -------------------------------------------------------

    #[test]
    fn zero_symbols_shape_to_zeros() {
        let config = config_k(16, 4);
        let wave = pulse_shape(&[0.0; 32], &config).unwrap();
        assert!(wave.samples.iter().all(|&x| x == 0.0));
        assert_eq!(wave.sample_rate, config.sample_rate());
    }

    #[test]
    fn unit_impulse_reproduces_the_rrc_taps() {
        let config = config_k(16, 4);
        let taps = rrc_taps(0.1, 4, 16).unwrap();
        let wave = pulse_shape(&[1.0], &config).unwrap();
        assert_eq!(wave.len(), taps.len());
        for (got, want) in wave.samples.iter().zip(&taps) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_band_rejection_at_least_30db() {
        let config = config_k(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let symbols: Vec<f64> = (0..4096)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let wave = pulse_shape(&symbols, &config).unwrap();
        let n = 16384;
        let mut buf: Vec<Complex64> = wave.samples[..n]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        DftPlan::new(n).process(&mut buf, Direction::Forward);
        let fs = config.sample_rate();
        let band_edge = (1.0 + config.rolloff) * config.bandwidth_hz;
        let mut in_band = (0.0, 0usize);
        let mut out_band = (0.0, 0usize);
        for (i, c) in buf.iter().enumerate().take(n / 2) {
            let f = i as f64 * fs / n as f64;
            let p = c.norm_sqr();
            if f <= config.bandwidth_hz {
                in_band.0 += p;
                in_band.1 += 1;
            } else if f > band_edge {
                out_band.0 += p;
                out_band.1 += 1;
            }
        }
        let ratio =
            (out_band.0 / out_band.1 as f64) / (in_band.0 / in_band.1 as f64);
        assert!(
            ratio < 1e-3,
            "out-of-band rejection only {:.1} dB",
            -10.0 * ratio.log10()
        );
    }

    // -- clipping -----------------------------------------------------------

    fn wave_of(samples: Vec<f64>) -> TimeWaveform {
        TimeWaveform::new(samples, 1.0, SignalOrigin::Tx)
    }

    #[test]
    fn clip_examples_at_unit_sigma() {
        let wave = wave_of(vec![4.0, -5.0, 1.0]);
        let (out, stats) = clip_waveform_with_sigma(&wave, 1.0, 3.2).unwrap();
        assert_eq!(out.samples, vec![3.2, -3.2, 1.0]);
        assert_eq!(stats.clipped, 2);
        assert_eq!(stats.threshold, 3.2);
    }

    #[test]
    fn gaussian_clip_fraction_matches_two_q_kappa() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        let wave = wave_of(samples);
        let (out, stats) = clip_waveform(&wave, 3.2).unwrap();
        let expected = erfc(3.2 / std::f64::consts::SQRT_2); // 2*Q(3.2)
        let got = stats.clipped_fraction();
        assert!(
            (got - expected).abs() < 5e-4,
            "clipped fraction {got}, expected {expected}"
        );
        let bound = stats.threshold + 1e-12;
        assert!(out.samples.iter().all(|&x| x.abs() <= bound));
        // Peak power over recorded variance stays within kappa^2.
        let peak = out.samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!(peak * peak <= 3.2f64.powi(2) * stats.sigma * stats.sigma + 1e-12);
    }

    #[test]
    fn clipping_is_idempotent_with_recorded_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<f64> = (0..4096)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        let (once, stats) = clip_waveform(&wave_of(samples), 2.0).unwrap();
        let (twice, again) = clip_waveform_with_sigma(&once, stats.sigma, 2.0).unwrap();
        assert_eq!(once.samples, twice.samples);
        assert_eq!(again.clipped, 0);
    }

    #[test]
    fn inside_samples_pass_unchanged_and_zero_variance_passes_through() {
        let wave = wave_of(vec![0.5, -0.25, 0.1, -0.6]);
        let (out, stats) = clip_waveform(&wave, 3.2).unwrap();
        assert_eq!(out.samples, wave.samples);
        assert_eq!(stats.clipped, 0);

        let flat = wave_of(vec![2.0; 8]);
        let (out, stats) = clip_waveform(&flat, 0.5).unwrap();
        assert_eq!(out.samples, flat.samples);
        assert_eq!(stats.clipped, 0);
        assert_eq!(stats.sigma, 0.0);
    }

    #[test]
    fn rejects_non_positive_kappa() {
        let wave = wave_of(vec![1.0, -1.0]);
        assert!(clip_waveform(&wave, 0.0).is_err());
        assert!(clip_waveform(&wave, -1.0).is_err());
    }

    // -- drive ----------------------------------------------------------------

    #[test]
    fn drive_sets_peak_to_peak_and_bias() {
        let wave = wave_of(vec![-1.0, 0.0, 1.0]);
        let out = apply_drive(&wave, 0.14, 1.171);
        assert!((out.samples[0] - (1.171 - 0.07)).abs() < 1e-12);
        assert!((out.samples[2] - (1.171 + 0.07)).abs() < 1e-12);
        let constant = apply_drive(&wave_of(vec![3.0; 4]), 2.0, 0.5);
        assert!(constant.samples.iter().all(|&x| x == 0.5));
    }

    // -- burst ------------------------------------------------------------------

    #[test]
    fn burst_layout_and_bit_consumption() {
        let config = config_k(16, 4);
        let plan = LoadingPlan::flat(&config, 2, 0.056).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<bool> = (0..plan.bits_per_frame() * 3).map(|_| rng.random()).collect();
        let burst = build_burst(&bits, &plan, &config, 2, &mut rng).unwrap();
        assert_eq!(burst.frames.len(), 5);
        assert_eq!(burst.pilot_frames().len(), 2);
        assert_eq!(burst.data_frames().len(), 3);
        assert!(burst.frames.iter().all(|f| f.is_hermitian(1e-9)));

        let ragged: Vec<bool> = vec![true; plan.bits_per_frame() + 1];
        assert!(build_burst(&ragged, &plan, &config, 0, &mut rng).is_err());
    }
}
