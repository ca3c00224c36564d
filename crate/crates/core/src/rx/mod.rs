//! Receive chain: matched filtering back to symbol rate, nonlinear
//! equalization, OFDM demodulation, one-tap frequency-domain equalization,
//! per-bin demapping, and BER bookkeeping.
//!
//!   waveform -> matched_filter -> volterra_apply -> ofdm_demodulate
//!            -> one_tap_equalize -> demap_frame -> measure_ber

mod rls;
mod volterra;

pub use rls::{rls_train, RlsState, DEFAULT_BETA};
pub use volterra::{
    build_term_set, volterra_apply, TapWindow, Term, VolterraConfig, VolterraEqualizer,
    DEFAULT_TERM_BUDGET,
};

use num_complex::Complex64;

use crate::dsp::{rrc_taps, Constellation, DftPlan, Direction, FrameSpectrum, OfdmConfig, TimeWaveform};
use crate::error::{Error, Result};
use crate::loading::LoadingPlan;

/// Smallest channel magnitude a loaded subcarrier may be divided by.
pub const EPSILON_H: f64 = 1e-6;

/// Correlate the received waveform with the transmit RRC pulse and sample
/// at symbol instants. Sample n of the output corresponds to transmit
/// symbol n: the filter group delay is already absorbed.
///
/// The output keeps every symbol instant the record covers, which includes
/// the filter ring-out past the last transmitted symbol; the caller trims
/// to the frame count it expects.
pub fn matched_filter(y: &TimeWaveform, config: &OfdmConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let os = config.oversampling;
    if os < 2 {
        return Err(Error::Config(
            "matched filtering requires oversampling >= 2".into(),
        ));
    }
    let rate = config.sample_rate();
    if (y.sample_rate - rate).abs() > 1e-6 * rate {
        return Err(Error::Chain(format!(
            "waveform sample rate {} does not match the link rate {rate}",
            y.sample_rate
        )));
    }
    let taps = rrc_taps(config.rolloff, os, config.rrc_span)?;
    if y.len() < taps.len() {
        return Err(Error::Chain(format!(
            "waveform of {} samples is shorter than the {}-tap pulse",
            y.len(),
            taps.len()
        )));
    }
    // Full convolution evaluated only at the symbol sampling grid
    // (taps.len() - 1) + n * os, so symbol n lands at output index n.
    let n_sym = (y.len() - 1) / os + 1;
    let mut out = vec![0.0; n_sym];
    let delay = taps.len() - 1;
    for (n, slot) in out.iter_mut().enumerate() {
        let m = delay + n * os;
        let j_lo = (m + 1).saturating_sub(y.len());
        let j_hi = m.min(taps.len() - 1);
        let mut acc = 0.0;
        for j in j_lo..=j_hi {
            acc += taps[j] * y.samples[m - j];
        }
        *slot = acc;
    }
    Ok(out)
}

/// Split a symbol-rate record into OFDM frames, drop each cyclic prefix,
/// and transform to per-subcarrier spectra with the forward unitary DFT.
pub fn ofdm_demodulate(z: &[f64], config: &OfdmConfig) -> Result<Vec<FrameSpectrum>> {
    config.validate()?;
    let spf = config.samples_per_frame();
    if !z.len().is_multiple_of(spf) {
        return Err(Error::Framing(format!(
            "record of {} samples is not a whole number of {spf}-sample frames",
            z.len()
        )));
    }
    let plan = DftPlan::new(config.fft_size);
    let mut frames = Vec::with_capacity(z.len() / spf);
    for chunk in z.chunks_exact(spf) {
        let mut buf: Vec<Complex64> = chunk[config.cp_length..]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        plan.process(&mut buf, Direction::Forward);
        frames.push(FrameSpectrum { bins: buf });
    }
    Ok(frames)
}

/// Divide every subcarrier by its channel response. Bins whose response
/// magnitude is at most [`EPSILON_H`] are zeroed when they carry no data
/// and rejected when the plan loads them.
pub fn one_tap_equalize(
    frame: &FrameSpectrum,
    response: &[Complex64],
    plan: &LoadingPlan,
) -> Result<FrameSpectrum> {
    let k_max = frame.fft_size();
    if response.len() != k_max || plan.fft_size() != k_max {
        return Err(Error::Chain(format!(
            "frame ({k_max}), response ({}) and plan ({}) disagree on FFT size",
            response.len(),
            plan.fft_size()
        )));
    }
    let mut out = FrameSpectrum::zeros(k_max);
    for k in 0..k_max {
        let h = response[k];
        if h.norm() > EPSILON_H {
            out.bins[k] = frame.bins[k] / h;
            continue;
        }
        // Data index of this bin or of its Hermitian mirror.
        let data_k = k.min(k_max - k);
        let loaded = data_k >= 1 && data_k < k_max / 2 && plan.bits_for_bin(data_k) > 0;
        if loaded {
            return Err(Error::ZeroResponse {
                bin: data_k,
                magnitude: h.norm(),
            });
        }
        out.bins[k] = Complex64::new(0.0, 0.0);
    }
    Ok(out)
}

/// Recover the payload bits of one equalized frame: undo each bin's energy
/// scaling and demap with its constellation, most significant bit first.
pub fn demap_frame(frame: &FrameSpectrum, plan: &LoadingPlan) -> Result<Vec<bool>> {
    if frame.fft_size() != plan.fft_size() {
        return Err(Error::Chain(format!(
            "frame FFT size {} does not match the plan's {}",
            frame.fft_size(),
            plan.fft_size()
        )));
    }
    let mut bits = Vec::with_capacity(plan.bits_per_frame());
    for k in 1..plan.fft_size() / 2 {
        let b = plan.bits_for_bin(k);
        if b == 0 {
            continue;
        }
        let scale = plan.energy_for_bin(k).sqrt();
        if scale <= 0.0 {
            return Err(Error::Chain(format!(
                "bin {k} carries {b} bits but zero energy"
            )));
        }
        let constellation = Constellation::for_bits(b)?;
        constellation.demap_into(frame.bins[k] / scale, &mut bits);
    }
    Ok(bits)
}

/// Fraction of disagreeing positions. Empty streams count as error-free.
pub fn measure_ber(decoded: &[bool], reference: &[bool]) -> Result<f64> {
    if decoded.len() != reference.len() {
        return Err(Error::Chain(format!(
            "bit streams differ in length: {} vs {}",
            decoded.len(),
            reference.len()
        )));
    }
    if decoded.is_empty() {
        return Ok(0.0);
    }
    let errors = decoded
        .iter()
        .zip(reference)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / decoded.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::SignalOrigin;
    use crate::tx::{assemble_frame, ofdm_modulate, pulse_shape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn config(fft: usize, cp: usize) -> OfdmConfig {
        OfdmConfig::new(fft, cp, 0.1, f64::INFINITY, 4, 2.67e9).unwrap()
    }

    fn small_config() -> OfdmConfig {
        OfdmConfig::new(16, 2, 0.1, f64::INFINITY, 4, 1.0).unwrap()
    }

    fn tx_wave(samples: Vec<f64>, cfg: &OfdmConfig) -> TimeWaveform {
        TimeWaveform::new(samples, cfg.sample_rate(), SignalOrigin::Tx)
    }

    // --- matched filter ---

    #[test]
    fn loopback_recovers_symbols_within_truncation_bound() {
        // A wide-enough pulse keeps the truncation ISI bound under 1e-3;
        // the bound is the off-peak mass of the pulse self-convolution.
        let cfg = OfdmConfig::new(256, 16, 0.5, f64::INFINITY, 4, 2.67e9)
            .unwrap()
            .with_rrc_span(32)
            .unwrap();
        let taps = rrc_taps(cfg.rolloff, cfg.oversampling, cfg.rrc_span).unwrap();
        let center = taps.len() - 1;
        let mut self_conv = vec![0.0; 2 * taps.len() - 1];
        for (i, &a) in taps.iter().enumerate() {
            for (j, &b) in taps.iter().enumerate() {
                self_conv[i + j] += a * b;
            }
        }
        let isi_bound: f64 = (1..=cfg.rrc_span as i64)
            .flat_map(|m| [m, -m])
            .map(|m| self_conv[(center as i64 + m * cfg.oversampling as i64) as usize].abs())
            .sum();
        assert!(isi_bound < 1e-3, "truncation bound {isi_bound}");

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let symbols: Vec<f64> = (0..1000)
            .map(|_| if rng.random() { 1.0 } else { -1.0 })
            .collect();
        let wave = pulse_shape(&symbols, &cfg).unwrap();
        let out = matched_filter(&wave, &cfg).unwrap();
        assert!(out.len() >= symbols.len());
        let worst = symbols
            .iter()
            .zip(&out)
            .map(|(s, o)| (s - o).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "worst symbol error {worst}");
        assert!(worst <= isi_bound + 1e-12);
    }

    #[test]
    fn all_zero_waveform_gives_all_zero_symbols() {
        let cfg = config(256, 16);
        let out = matched_filter(&tx_wave(vec![0.0; 500], &cfg), &cfg).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_shaped_symbol_peaks_at_zero_delay_with_unit_gain() {
        let cfg = config(256, 16);
        let wave = pulse_shape(&[1.0], &cfg).unwrap();
        let out = matched_filter(&wave, &cfg).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-3, "peak {}", out[0]);
        for &v in &out[1..] {
            assert!(v.abs() < out[0].abs());
        }
    }

    #[test]
    fn short_waveform_and_rate_mismatch_are_rejected() {
        let cfg = config(256, 16);
        assert!(matched_filter(&tx_wave(vec![0.0; 10], &cfg), &cfg).is_err());
        let wrong_rate = TimeWaveform::new(vec![0.0; 500], 1e9, SignalOrigin::Tx);
        assert!(matched_filter(&wrong_rate, &cfg).is_err());
    }

    // --- OFDM demodulation ---

    #[test]
    fn modulate_demodulate_round_trip_is_identity() {
        let cfg = config(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut frame = FrameSpectrum::zeros(64);
        for k in 1..32 {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            frame.bins[k] = v;
            frame.bins[64 - k] = v.conj();
        }
        let samples = ofdm_modulate(std::slice::from_ref(&frame), &cfg).unwrap();
        let back = ofdm_demodulate(&samples, &cfg).unwrap();
        assert_eq!(back.len(), 1);
        for k in 0..64 {
            assert!((back[0].bins[k] - frame.bins[k]).norm() < 1e-9, "bin {k}");
        }
    }

    #[test]
    fn hand_worked_4_point_frame_inverts() {
        let cfg = OfdmConfig::new(4, 1, 0.1, f64::INFINITY, 4, 1.0).unwrap();
        let back = ofdm_demodulate(&[0.0, 1.0, 0.0, -1.0, 0.0], &cfg).unwrap();
        let want = [0.0, 1.0, 0.0, 1.0];
        for (k, &w) in want.iter().enumerate() {
            assert!((back[0].bins[k] - Complex64::new(w, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn ragged_length_is_rejected_and_empty_input_is_empty() {
        let cfg = config(64, 16);
        assert!(ofdm_demodulate(&vec![0.0; 81], &cfg).is_err());
        assert!(ofdm_demodulate(&[], &cfg).unwrap().is_empty());
    }

    // --- one-tap equalizer ---

    #[test]
    fn unit_response_is_passthrough() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut frame = FrameSpectrum::zeros(16);
        for bin in &mut frame.bins {
            *bin = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let h = vec![Complex64::new(1.0, 0.0); 16];
        let plan = LoadingPlan::flat(&small_config(), 2, 0.056).unwrap();
        let out = one_tap_equalize(&frame, &h, &plan).unwrap();
        assert_eq!(out.bins, frame.bins);
    }

    #[test]
    fn synthetic_distortion_is_exactly_undone() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let k_max = 16;
        let plan = LoadingPlan::flat(&small_config(), 2, 0.056).unwrap();
        let mut x = FrameSpectrum::zeros(k_max);
        for k in 1..k_max / 2 {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            x.bins[k] = v;
            x.bins[k_max - k] = v.conj();
        }
        let h: Vec<Complex64> = (0..k_max)
            .map(|_| Complex64::new(rng.random_range(0.5..2.0), rng.random_range(-0.5..0.5)))
            .collect();
        let mut y = FrameSpectrum::zeros(k_max);
        for k in 0..k_max {
            y.bins[k] = h[k] * x.bins[k];
        }
        let out = one_tap_equalize(&y, &h, &plan).unwrap();
        for k in 0..k_max {
            assert!((out.bins[k] - x.bins[k]).norm() < 1e-12, "bin {k}");
        }
    }

    #[test]
    fn dead_bin_errors_only_when_loaded() {
        let k_max = 16;
        let frame = FrameSpectrum::zeros(k_max);
        let mut h = vec![Complex64::new(1.0, 0.0); k_max];
        h[3] = Complex64::new(1e-9, 0.0);
        h[k_max - 3] = h[3].conj();

        let loaded = LoadingPlan::flat(&small_config(), 2, 0.056).unwrap();
        match one_tap_equalize(&frame, &h, &loaded) {
            Err(Error::ZeroResponse { bin, .. }) => assert_eq!(bin, 3),
            other => panic!("expected a dead-bin error, got {other:?}"),
        }

        let mut unloaded = loaded.clone();
        unloaded.bits[2] = 0; // bin 3 holds plan index 2
        unloaded.energy[2] = 0.0;
        let out = one_tap_equalize(&frame, &h, &unloaded).unwrap();
        assert_eq!(out.bins[3], Complex64::new(0.0, 0.0));
    }

    // --- demapping and BER ---

    #[test]
    fn assemble_then_demap_round_trips_the_bits() {
        let cfg = config(64, 16);
        let mut plan = LoadingPlan::flat(&cfg, 0, 0.056).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for k in 1..32usize {
            plan.bits[k - 1] = rng.random_range(0..=6);
            plan.energy[k - 1] = if plan.bits[k - 1] == 0 {
                0.0
            } else {
                rng.random_range(0.5..1.5)
            };
        }
        let n_bits = plan.bits_per_frame();
        let bits: Vec<bool> = (0..n_bits).map(|_| rng.random()).collect();
        let frame = assemble_frame(&bits, &plan, &cfg).unwrap();
        let back = demap_frame(&frame, &plan).unwrap();
        assert_eq!(back, bits);
    }

    #[test]
    fn ber_counts_disagreements() {
        let a = vec![true; 1000];
        assert_eq!(measure_ber(&a, &a).unwrap(), 0.0);
        let mut one_flip = a.clone();
        one_flip[500] = false;
        assert_eq!(measure_ber(&one_flip, &a).unwrap(), 0.001);
        let complement: Vec<bool> = a.iter().map(|b| !b).collect();
        assert_eq!(measure_ber(&complement, &a).unwrap(), 1.0);
        assert!(measure_ber(&a[..9], &a).is_err());
        assert_eq!(measure_ber(&[], &[]).unwrap(), 0.0);
    }
}
