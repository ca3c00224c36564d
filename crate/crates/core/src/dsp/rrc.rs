//! Root-raised-cosine pulse taps. The transmit filter and the receive matched
//! filter share these taps; their self-convolution is a raised cosine, which
//! is what makes symbol-instant sampling (near) ISI-free.

use crate::error::{Error, Result};

/// Generate unit-energy RRC taps spanning `span_symbols` symbol periods at
/// `oversampling` samples per symbol. Tap count is span*oversampling + 1
/// (odd, symmetric about the center).
pub fn rrc_taps(rolloff: f64, oversampling: usize, span_symbols: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rolloff) || rolloff.is_nan() {
        return Err(Error::Config(format!("rolloff must lie in [0, 1], got {rolloff}")));
    }
    if oversampling == 0 {
        return Err(Error::Config("oversampling must be >= 1".into()));
    }
    if span_symbols < 4 {
        return Err(Error::Config(format!(
            "rrc span must be >= 4 symbols, got {span_symbols}"
        )));
    }
    let num_intervals = span_symbols * oversampling;
    if num_intervals % 2 != 0 {
        return Err(Error::Config(
            "span_symbols * oversampling must be even so the tap count is odd".into(),
        ));
    }

    let half = (num_intervals / 2) as i64;
    let mut taps = Vec::with_capacity(num_intervals + 1);
    for i in -half..=half {
        // t in symbol periods
        let t = i as f64 / oversampling as f64;
        taps.push(rrc_value(t, rolloff));
    }

    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let norm = energy.sqrt();
    for h in &mut taps {
        *h /= norm;
    }
    Ok(taps)
}

/// Un-normalized RRC impulse response at time `t` (symbol periods).
/// The two removable singularities (t = 0 and |t| = 1/(4a)) use their
/// analytic limits.
fn rrc_value(t: f64, a: f64) -> f64 {
    use std::f64::consts::PI;
    if a == 0.0 {
        // Degenerates to a sinc pulse.
        return if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
    }
    if t == 0.0 {
        return 1.0 - a + 4.0 * a / PI;
    }
    let four_at = 4.0 * a * t;
    let denom = PI * t * (1.0 - four_at * four_at);
    if denom.abs() < 1e-9 {
        // |t| = 1/(4a)
        let x = PI / (4.0 * a);
        return (a / 2f64.sqrt())
            * ((1.0 + 2.0 / PI) * x.sin() + (1.0 - 2.0 / PI) * x.cos());
    }
    ((PI * t * (1.0 - a)).sin() + four_at * (PI * t * (1.0 + a)).cos()) / denom
}
