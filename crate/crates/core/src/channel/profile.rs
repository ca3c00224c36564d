//! Measured frequency-response ingestion: CSV profiles and least-squares
//! FIR synthesis so a bench measurement can drive the impairment model.

use std::io::BufRead;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// What a profile row carries besides its frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileData {
    /// Complex small-signal response per frequency.
    Response(Vec<Complex64>),
    /// Measured SNR in dB per frequency; phase is unknown.
    SnrDb(Vec<f64>),
}

/// A frequency grid with measured data, strictly ascending in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredProfile {
    pub freqs_hz: Vec<f64>,
    pub data: ProfileData,
}

impl MeasuredProfile {
    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs_hz.is_empty()
    }

    /// SNR values in dB when this profile carries them.
    pub fn snr_points(&self) -> Option<Vec<(f64, f64)>> {
        match &self.data {
            ProfileData::SnrDb(snr) => {
                Some(self.freqs_hz.iter().copied().zip(snr.iter().copied()).collect())
            }
            ProfileData::Response(_) => None,
        }
    }
}

/// Read a profile from a CSV file. See [`parse_profile`] for the format.
pub fn load_profile(path: &Path) -> Result<MeasuredProfile> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Profile(format!("cannot open profile {}: {e}", path.display())))?;
    parse_profile(std::io::BufReader::new(file))
}

/// Parse a profile CSV. The header selects the flavor: `freq_hz,re,im`
/// for complex responses or `freq_hz,snr_db` for SNR measurements. Rows
/// must be finite and strictly ascending in frequency.
pub fn parse_profile<R: BufRead>(reader: R) -> Result<MeasuredProfile> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::Profile(format!("profile read failed: {e}")))?,
        None => return Err(Error::Profile("profile file is empty".into())),
    };
    let complex = match header.trim() {
        "freq_hz,re,im" => true,
        "freq_hz,snr_db" => false,
        other => {
            return Err(Error::Profile(format!(
                "unknown profile header '{other}'; expected freq_hz,re,im or freq_hz,snr_db"
            )))
        }
    };
    let mut freqs = Vec::new();
    let mut resp = Vec::new();
    let mut snr = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Profile(format!("profile read failed: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = idx + 2;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let want = if complex { 3 } else { 2 };
        if fields.len() != want {
            return Err(Error::Profile(format!(
                "profile line {row}: expected {want} fields, got {}",
                fields.len()
            )));
        }
        let mut nums = Vec::with_capacity(want);
        for f in &fields {
            let v: f64 = f.parse().map_err(|_| {
                Error::Profile(format!("profile line {row}: '{f}' is not a number"))
            })?;
            if !v.is_finite() {
                return Err(Error::Profile(format!(
                    "profile line {row}: non-finite value"
                )));
            }
            nums.push(v);
        }
        if let Some(&prev) = freqs.last() {
            if nums[0] <= prev {
                return Err(Error::Profile(format!(
                    "profile line {row}: frequencies must be strictly ascending"
                )));
            }
        }
        freqs.push(nums[0]);
        if complex {
            resp.push(Complex64::new(nums[1], nums[2]));
        } else {
            snr.push(nums[1]);
        }
    }
    if freqs.is_empty() {
        return Err(Error::Profile("profile has no data rows".into()));
    }
    let data = if complex {
        ProfileData::Response(resp)
    } else {
        ProfileData::SnrDb(snr)
    };
    Ok(MeasuredProfile {
        freqs_hz: freqs,
        data,
    })
}

/// Fit a real FIR to a measured profile by least squares and report the
/// RMS complex fit residual alongside the taps.
///
/// `num_taps` must be odd so a magnitude-only (SNR) profile can be given a
/// symmetric linear-phase target centered on the middle tap. Complex
/// profiles are fitted against their measured phase directly. The grid
/// needs at least as many points as taps, and at least three overall.
pub fn fir_from_profile(
    profile: &MeasuredProfile,
    num_taps: usize,
    sample_rate: f64,
) -> Result<(Vec<f64>, f64)> {
    if num_taps == 0 || num_taps % 2 == 0 {
        return Err(Error::Profile(format!(
            "num_taps must be odd and positive, got {num_taps}"
        )));
    }
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(Error::Profile(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let m = profile.len();
    if m < num_taps.max(3) {
        return Err(Error::Profile(format!(
            "profile grid too sparse: {m} points cannot constrain {num_taps} taps"
        )));
    }
    let nyquist = sample_rate / 2.0;
    for &f in &profile.freqs_hz {
        if f < 0.0 || f > nyquist * (1.0 + 1e-9) {
            return Err(Error::Profile(format!(
                "profile frequency {f} Hz is outside [0, {nyquist}]"
            )));
        }
    }
    let target: Vec<Complex64> = match &profile.data {
        ProfileData::Response(resp) => resp.clone(),
        ProfileData::SnrDb(snr) => {
            // Magnitude shape normalized to 0 dB peak, with a linear-phase
            // target so the fit stays causal around the center tap.
            let peak = snr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let delay = (num_taps - 1) as f64 / 2.0;
            profile
                .freqs_hz
                .iter()
                .zip(snr)
                .map(|(&f, &s)| {
                    let mag = 10f64.powf((s - peak) / 20.0);
                    let w = 2.0 * std::f64::consts::PI * f / sample_rate;
                    Complex64::from_polar(mag, -w * delay)
                })
                .collect()
        }
    };
    // Real unknowns against complex targets: stack the real and imaginary
    // equations, 2m rows by num_taps columns.
    let mut a = DMatrix::zeros(2 * m, num_taps);
    let mut b = DVector::zeros(2 * m);
    for (row, (&f, h)) in profile.freqs_hz.iter().zip(&target).enumerate() {
        let w = 2.0 * std::f64::consts::PI * f / sample_rate;
        for j in 0..num_taps {
            a[(row, j)] = (w * j as f64).cos();
            a[(m + row, j)] = -(w * j as f64).sin();
        }
        b[row] = h.re;
        b[m + row] = h.im;
    }
    let residual_vec = a.clone();
    let svd = a.svd(true, true);
    let taps = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::Profile(format!("profile fit failed: {e}")))?;
    let err = residual_vec * &taps - b;
    let residual = (err.norm_squared() / m as f64).sqrt();
    Ok((taps.iter().copied().collect(), residual))
}
