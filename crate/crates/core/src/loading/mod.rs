//! Per-subcarrier channel/SNR estimation from pilot frames, greedy
//! Hughes-Hartogs bit/energy allocation toward a BER target, the
//! margin-adaptation loop that walks measured BER onto the target, and
//! achievable-rate bookkeeping.

mod cross_tables;

use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::dsp::{FrameSpectrum, OfdmConfig};
use crate::error::{Error, Result};

/// Estimates above this cap are clamped; keeps noiseless tests finite.
pub const SNR_CAP_DB: f64 = 60.0;

/// Residual noise variance is averaged over +/- this many neighboring data
/// bins. A single-bin estimate from N pilot frames has a relative std of
/// ~1/sqrt(N) (chi-squared), i.e. ~0.44 dB at N = 100; pooling 9 bins brings
/// the spread under 0.15 dB while noise spectra stay smooth at that scale.
pub const NOISE_SMOOTHING_RADIUS: usize = 4;

/// Highest bits-per-subcarrier step on the modulation ladder (M = 512).
pub const MAX_BITS_PER_BIN: u8 = 9;

// ---------------------------------------------------------------------------
// Subcarrier statistics
// ---------------------------------------------------------------------------

/// Per-data-subcarrier channel response and SNR estimated from pilots.
/// Index i corresponds to subcarrier bin i + 1 (bins 1 ..= K/2 - 1).
#[derive(Debug, Clone)]
pub struct SubcarrierStats {
    fft_size: usize,
    response: Vec<Complex64>,
    snr: Vec<f64>,
    usable: Vec<bool>,
    frames_used: usize,
}

impl SubcarrierStats {
    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn data_bin_count(&self) -> usize {
        self.snr.len()
    }

    pub fn frames_used(&self) -> usize {
        self.frames_used
    }

    /// Channel response of data bin `k` (1-based subcarrier index).
    pub fn response(&self, k: usize) -> Complex64 {
        self.response[k - 1]
    }

    /// Linear SNR of data bin `k`.
    pub fn snr_linear(&self, k: usize) -> f64 {
        self.snr[k - 1]
    }

    pub fn is_usable(&self, k: usize) -> bool {
        self.usable[k - 1]
    }

    /// Full response vector over bins 0..K, for one-tap equalization:
    /// data bins carry the estimate, all other bins are zero.
    pub fn response_spectrum(&self) -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); self.fft_size];
        for (i, r) in self.response.iter().enumerate() {
            h[i + 1] = *r;
        }
        for k in self.fft_size / 2 + 1..self.fft_size {
            h[k] = h[self.fft_size - k].conj();
        }
        h
    }

    /// Build stats from measured (frequency, SNR dB) points: linear
    /// interpolation in dB, bins outside the sampled range are unusable.
    /// Responses are unknown and set to unity; callers that only allocate
    /// bits (no equalization) are the intended users.
    pub fn from_snr_points(points: &[(f64, f64)], config: &OfdmConfig) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Estimation(
                "need at least 2 SNR profile points".into(),
            ));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = config.data_bin_count();
        let mut response = vec![Complex64::new(0.0, 0.0); n];
        let mut snr = vec![0.0; n];
        let mut usable = vec![false; n];
        for k in config.data_bins() {
            let f = config.bin_frequency(k);
            if f < sorted[0].0 || f > sorted[sorted.len() - 1].0 {
                continue;
            }
            let j = sorted.partition_point(|p| p.0 < f).min(sorted.len() - 1).max(1);
            let (f0, s0) = sorted[j - 1];
            let (f1, s1) = sorted[j];
            let db = if f1 == f0 {
                s0
            } else {
                s0 + (s1 - s0) * (f - f0) / (f1 - f0)
            };
            let db = db.min(SNR_CAP_DB);
            response[k - 1] = Complex64::new(1.0, 0.0);
            snr[k - 1] = 10f64.powf(db / 10.0);
            usable[k - 1] = true;
        }
        Ok(Self {
            fft_size: config.fft_size,
            response,
            snr,
            usable,
            frames_used: 0,
        })
    }
}

/// Estimate per-subcarrier response and SNR from pilot frames.
///
/// H[k] is the mean over frames of Y[k]/X[k]; the noise variance is the
/// unbiased residual variance of Y[k] - H[k]X[k], averaged over
/// [`NOISE_SMOOTHING_RADIUS`] neighboring usable bins; SNR = |H[k]|^2 / var,
/// capped at [`SNR_CAP_DB`].
pub fn estimate_channel(
    received: &[FrameSpectrum],
    sent: &[FrameSpectrum],
) -> Result<SubcarrierStats> {
    if received.len() < 2 {
        return Err(Error::Estimation(format!(
            "need at least 2 pilot frames, got {}",
            received.len()
        )));
    }
    if received.len() != sent.len() {
        return Err(Error::Estimation(format!(
            "received {} frames but sent {}",
            received.len(),
            sent.len()
        )));
    }
    let k_fft = sent[0].fft_size();
    if received.iter().chain(sent).any(|f| f.fft_size() != k_fft) {
        return Err(Error::Estimation("pilot frames differ in FFT size".into()));
    }

    let n_frames = received.len();
    let n_bins = k_fft / 2 - 1;
    let mut response = vec![Complex64::new(0.0, 0.0); n_bins];
    let mut raw_var = vec![0.0f64; n_bins];
    let mut usable = vec![true; n_bins];

    for k in 1..k_fft / 2 {
        let i = k - 1;
        if sent.iter().any(|f| f.bins[k].norm_sqr() < 1e-24) {
            usable[i] = false;
            continue;
        }
        let mut h = Complex64::new(0.0, 0.0);
        for (rx, tx) in received.iter().zip(sent) {
            h += rx.bins[k] / tx.bins[k];
        }
        h /= n_frames as f64;
        let mut resid = 0.0;
        for (rx, tx) in received.iter().zip(sent) {
            resid += (rx.bins[k] - h * tx.bins[k]).norm_sqr();
        }
        response[i] = h;
        raw_var[i] = resid / (n_frames - 1) as f64;
    }

    // Pool the variance over neighboring usable bins.
    let cap = 10f64.powf(SNR_CAP_DB / 10.0);
    let mut snr = vec![0.0f64; n_bins];
    for i in 0..n_bins {
        if !usable[i] {
            continue;
        }
        let lo = i.saturating_sub(NOISE_SMOOTHING_RADIUS);
        let hi = (i + NOISE_SMOOTHING_RADIUS).min(n_bins - 1);
        let mut acc = 0.0;
        let mut cnt = 0usize;
        for (j, &v) in raw_var.iter().enumerate().take(hi + 1).skip(lo) {
            if usable[j] {
                acc += v;
                cnt += 1;
            }
        }
        let var = acc / cnt as f64;
        snr[i] = if var > 0.0 {
            (response[i].norm_sqr() / var).min(cap)
        } else {
            cap
        };
    }

    Ok(SubcarrierStats {
        fft_size: k_fft,
        response,
        snr,
        usable,
        frames_used: n_frames,
    })
}

// ---------------------------------------------------------------------------
// Required-SNR thresholds
// ---------------------------------------------------------------------------

fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Gray-coded BER approximation for square M-QAM at linear SNR `gamma`.
fn square_qam_ber(order: usize, gamma: f64) -> f64 {
    let m = order as f64;
    let b = (order.trailing_zeros()) as f64;
    (4.0 / b) * (1.0 - 1.0 / m.sqrt()) * q_func((3.0 * gamma / (m - 1.0)).sqrt())
}

/// Minimum linear SNR at which constellation order `order` meets
/// `target_ber` under hard-decision Gray demapping.
///
/// BPSK and square orders invert closed-form expressions; the cross and
/// rectangular orders (8, 32, 128, 512) interpolate the committed Monte
/// Carlo table in (SNR dB, log10 BER) space.
pub fn required_snr(order: usize, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(Error::Config(format!(
            "target_ber must lie in (0, 0.5), got {target_ber}"
        )));
    }
    match order {
        2 => {
            // BER = Q(sqrt(2 gamma))
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            let q = normal.inverse_cdf(1.0 - target_ber);
            Ok((q * q / 2.0).max(0.0))
        }
        4 | 16 | 64 | 256 => Ok(invert_decreasing(
            |g| square_qam_ber(order, g),
            target_ber,
        )),
        8 | 32 | 128 | 512 => {
            let table: &[f64] = match order {
                8 => &cross_tables::BER_M8,
                32 => &cross_tables::BER_M32,
                128 => &cross_tables::BER_M128,
                _ => &cross_tables::BER_M512,
            };
            Ok(invert_mc_table(table, target_ber))
        }
        _ => Err(Error::Config(format!(
            "unsupported modulation order {order}"
        ))),
    }
}

/// Smallest gamma with f(gamma) <= target, for f strictly decreasing.
/// Returns 0 when even gamma = 0 meets the target.
fn invert_decreasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    if f(0.0) <= target {
        return 0.0;
    }
    let mut hi = 1.0;
    while f(hi) > target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Invert a Monte Carlo BER grid: monotonize with a running minimum, then
/// interpolate log10(BER) linearly between grid points. Targets worse than
/// the 0 dB grid edge floor there; targets below the table's reliable range
/// extrapolate the final slope.
fn invert_mc_table(ber: &[f64], target: f64) -> f64 {
    const LOG_FLOOR: f64 = -12.0;
    let log_of = |b: f64| {
        if b > 0.0 {
            b.log10()
        } else {
            LOG_FLOOR
        }
    };
    let lt = target.log10();

    let mut mono = Vec::with_capacity(ber.len());
    let mut cur = f64::INFINITY;
    for &b in ber {
        cur = cur.min(b);
        mono.push(cur);
    }
    if mono[0] <= target {
        return 10f64.powf(cross_tables::GRID_START_DB / 10.0);
    }
    let db_at = |i: usize| cross_tables::GRID_START_DB + i as f64 * cross_tables::GRID_STEP_DB;
    for i in 1..mono.len() {
        if mono[i] <= target {
            let (l0, l1) = (log_of(mono[i - 1]), log_of(mono[i]));
            let frac = if l0 > l1 { (l0 - lt) / (l0 - l1) } else { 1.0 };
            let db = db_at(i - 1) + frac * cross_tables::GRID_STEP_DB;
            return 10f64.powf(db / 10.0);
        }
    }
    // Extrapolate past the grid using the last two distinct levels.
    let last = mono.len() - 1;
    let mut j = last;
    while j > 0 && log_of(mono[j]) >= log_of(mono[last]) {
        j -= 1;
    }
    let slope = (log_of(mono[last]) - log_of(mono[j])) / ((last - j) as f64
        * cross_tables::GRID_STEP_DB);
    let db = db_at(last) + (lt - log_of(mono[last])) / slope;
    10f64.powf(db / 10.0)
}

// ---------------------------------------------------------------------------
// Loading plan
// ---------------------------------------------------------------------------

/// Bit and energy allocation over the data subcarriers.
/// Index i corresponds to subcarrier bin i + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingPlan {
    fft_size: usize,
    pub bits: Vec<u8>,
    pub energy: Vec<f64>,
    pub target_ber: f64,
    pub margin_db: f64,
}

impl LoadingPlan {
    pub fn new(
        fft_size: usize,
        bits: Vec<u8>,
        energy: Vec<f64>,
        target_ber: f64,
        margin_db: f64,
    ) -> Result<Self> {
        let plan = Self {
            fft_size,
            bits,
            energy,
            target_ber,
            margin_db,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Same constellation on every data subcarrier with unit energy.
    pub fn flat(config: &OfdmConfig, bits_per_bin: u8, target_ber: f64) -> Result<Self> {
        let n = config.data_bin_count();
        let energy = if bits_per_bin == 0 { 0.0 } else { 1.0 };
        Self::new(
            config.fft_size,
            vec![bits_per_bin; n],
            vec![energy; n],
            target_ber,
            0.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.fft_size / 2 - 1;
        if self.bits.len() != n || self.energy.len() != n {
            return Err(Error::Config(format!(
                "plan length {} does not match {} data bins",
                self.bits.len(),
                n
            )));
        }
        if self.bits.iter().any(|&b| b > MAX_BITS_PER_BIN) {
            return Err(Error::Config(format!(
                "bits per subcarrier above {MAX_BITS_PER_BIN} unsupported"
            )));
        }
        if self.energy.iter().any(|&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::Config("subcarrier energies must be >= 0".into()));
        }
        for (i, (&b, &e)) in self.bits.iter().zip(&self.energy).enumerate() {
            if b == 0 && e != 0.0 {
                return Err(Error::Config(format!(
                    "bin {} has zero bits but nonzero energy",
                    i + 1
                )));
            }
        }
        let total: f64 = self.energy.iter().sum();
        if total > n as f64 + 1e-9 {
            return Err(Error::Config(format!(
                "total energy {total} exceeds the normalized budget {n}"
            )));
        }
        Ok(())
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    /// Payload bits carried by one OFDM frame.
    pub fn bits_per_frame(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Bits for data bin `k` (1-based).
    pub fn bits_for_bin(&self, k: usize) -> u8 {
        self.bits[k - 1]
    }

    /// Energy scale for data bin `k` (1-based).
    pub fn energy_for_bin(&self, k: usize) -> f64 {
        self.energy[k - 1]
    }

    /// Serialize as `k,bits,energy` CSV rows over the data bins.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,bits,energy")?;
        for (i, (&b, &e)) in self.bits.iter().zip(&self.energy).enumerate() {
            writeln!(w, "{},{},{}", i + 1, b, e)?;
        }
        Ok(())
    }

    /// Parse the `k,bits,energy` CSV form; rows must cover bins 1..=K/2-1
    /// in order.
    pub fn read_csv<R: std::io::BufRead>(
        r: R,
        fft_size: usize,
        target_ber: f64,
        margin_db: f64,
    ) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Serialization("empty loading CSV".into()))?
            .map_err(Error::Io)?;
        if header.trim() != "k,bits,energy" {
            return Err(Error::Serialization(format!(
                "expected header 'k,bits,energy', got '{header}'"
            )));
        }
        let mut bits = Vec::new();
        let mut energy = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(Error::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.trim().split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Serialization(format!(
                    "loading CSV row {} malformed: '{line}'",
                    row + 2
                )));
            }
            let k: usize = parts[0]
                .parse()
                .map_err(|_| Error::Serialization(format!("bad bin index '{}'", parts[0])))?;
            if k != bits.len() + 1 {
                return Err(Error::Serialization(format!(
                    "loading CSV rows out of order at k={k}"
                )));
            }
            bits.push(
                parts[1]
                    .parse()
                    .map_err(|_| Error::Serialization(format!("bad bit count '{}'", parts[1])))?,
            );
            energy.push(
                parts[2]
                    .parse()
                    .map_err(|_| Error::Serialization(format!("bad energy '{}'", parts[2])))?,
            );
        }
        Self::new(fft_size, bits, energy, target_ber, margin_db)
    }
}

/// Write usable bins as `freq_hz,snr_db` CSV (the schema the channel module
/// ingests as a measured profile).
pub fn write_snr_csv<W: std::io::Write>(
    stats: &SubcarrierStats,
    config: &OfdmConfig,
    mut w: W,
) -> Result<()> {
    writeln!(w, "freq_hz,snr_db")?;
    for k in config.data_bins() {
        if stats.is_usable(k) {
            let db = 10.0 * stats.snr_linear(k).log10();
            writeln!(w, "{},{}", config.bin_frequency(k), db)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hughes-Hartogs allocation
// ---------------------------------------------------------------------------

/// Greedy Hughes-Hartogs allocation: repeatedly grant the bit increment with
/// the smallest incremental energy (required_snr(next) - required_snr(cur))
/// divided by the bin's SNR, until no increment fits `energy_budget`.
/// Cost ties prefer the bin with fewer bits, then the lower index.
///
/// The measured threshold ladder is not convex: the 8-QAM step costs more
/// per bit than the following 16-QAM step, and single-increment greedy can
/// stall there (burning budget on a weaker bin instead of crossing the
/// expensive step toward the cheap one). A dynamic program over (bin, total
/// bits) computes the exact bit-maximal, then energy-minimal allocation; the
/// greedy result is kept when it already attains that optimum (preserving
/// grant-order tie behavior), otherwise the exact allocation is returned.
pub fn hughes_hartogs(
    stats: &SubcarrierStats,
    target_ber: f64,
    energy_budget: f64,
) -> Result<LoadingPlan> {
    hughes_hartogs_derated(stats, target_ber, energy_budget, 0.0)
}

/// [`hughes_hartogs`] with every SNR derated by `margin_db` before
/// allocation; the adaptation loop walks this margin.
pub fn hughes_hartogs_derated(
    stats: &SubcarrierStats,
    target_ber: f64,
    energy_budget: f64,
    margin_db: f64,
) -> Result<LoadingPlan> {
    let n = stats.data_bin_count();
    if n == 0 {
        return Err(Error::Config("empty subcarrier stats".into()));
    }
    if !(energy_budget >= 0.0) {
        return Err(Error::Config(format!(
            "energy budget must be >= 0, got {energy_budget}"
        )));
    }
    let derate = 10f64.powf(-margin_db / 10.0);
    let gamma: Vec<f64> = (1..=n)
        .map(|k| {
            if stats.is_usable(k) {
                stats.snr_linear(k) * derate
            } else {
                0.0
            }
        })
        .collect();
    if gamma.iter().all(|&g| g <= 0.0) {
        return Err(Error::Config(
            "no usable subcarrier with positive SNR".into(),
        ));
    }

    // Threshold ladder: gamma required for b bits, b = 0..=9.
    let mut ladder = [0.0f64; MAX_BITS_PER_BIN as usize + 1];
    for (b, slot) in ladder.iter_mut().enumerate().skip(1) {
        *slot = required_snr(1usize << b, target_ber)?;
    }

    let mut plain = vec![0u8; n];
    fill_single_increments(&mut plain, &gamma, &ladder, energy_budget);
    let exact = exact_allocation(&gamma, &ladder, energy_budget);

    let total_energy = |bits: &[u8]| -> f64 {
        bits.iter()
            .zip(&gamma)
            .map(|(&b, &g)| if b > 0 { ladder[b as usize] / g } else { 0.0 })
            .sum()
    };
    let plain_bits: usize = plain.iter().map(|&b| b as usize).sum();
    let exact_bits: usize = exact.iter().map(|&b| b as usize).sum();
    let plain_energy = total_energy(&plain);
    let exact_energy = total_energy(&exact);
    // Keep greedy unless the optimum strictly beats it; the slack leaves
    // ulp-scale energy differences (equal-cost level splits) to the greedy
    // tie rule.
    let bits = if exact_bits > plain_bits
        || (exact_bits == plain_bits
            && exact_energy < plain_energy - (1e-10 * plain_energy).max(1e-12))
    {
        exact
    } else {
        plain
    };

    let energy: Vec<f64> = bits
        .iter()
        .zip(&gamma)
        .map(|(&b, &g)| if b > 0 { ladder[b as usize] / g } else { 0.0 })
        .collect();
    LoadingPlan::new(stats.fft_size(), bits, energy, target_ber, margin_db)
}

fn fits(spent: f64, cost: f64, budget: f64) -> bool {
    spent + cost <= budget * (1.0 + 1e-12) + 1e-12
}

/// Plain greedy: grant the single cheapest next-bit increment until the
/// cheapest one no longer fits the budget.
fn fill_single_increments(bits: &mut [u8], gamma: &[f64], ladder: &[f64], budget: f64) {
    let mut spent: f64 = bits
        .iter()
        .zip(gamma)
        .map(|(&b, &g)| if b > 0 { ladder[b as usize] / g } else { 0.0 })
        .sum();
    loop {
        let mut best: Option<(f64, u8, usize)> = None; // (cost, current bits, index)
        for (i, &g) in gamma.iter().enumerate() {
            if g <= 0.0 || bits[i] >= MAX_BITS_PER_BIN {
                continue;
            }
            let b = bits[i] as usize;
            let cost = (ladder[b + 1] - ladder[b]) / g;
            best = match best {
                None => Some((cost, bits[i], i)),
                Some(cur) => {
                    // Tolerant tie on cost, then fewer bits, then lower index.
                    let tie = (cost - cur.0).abs() <= 1e-9 * cost.max(cur.0).max(1e-300);
                    if (!tie && cost < cur.0) || (tie && (bits[i], i) < (cur.1, cur.2)) {
                        Some((cost, bits[i], i))
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        let Some((cost, _, i)) = best else { break };
        if !fits(spent, cost, budget) {
            break;
        }
        spent += cost;
        bits[i] += 1;
    }
}

/// Exact bit-maximal, then energy-minimal allocation by dynamic programming
/// over (bin, total bits): dp[t] = least energy attaining t bits total.
fn exact_allocation(gamma: &[f64], ladder: &[f64], budget: f64) -> Vec<u8> {
    let n = gamma.len();
    let levels = ladder.len(); // 0..=MAX_BITS_PER_BIN
    let usable: Vec<usize> = (0..n).filter(|&i| gamma[i] > 0.0).collect();
    let t_max = usable.len() * (levels - 1);
    let mut dp = vec![f64::INFINITY; t_max + 1];
    dp[0] = 0.0;
    // choice[j][t]: level granted to the j-th usable bin on the best path
    // reaching t bits after bins 0..=j.
    let mut choice = vec![vec![0u8; t_max + 1]; usable.len()];
    for (j, &i) in usable.iter().enumerate() {
        let costs: Vec<f64> = ladder.iter().map(|&l| l / gamma[i]).collect();
        // Descending t keeps dp[t - b] at the previous bin's layer.
        for t in (0..=t_max).rev() {
            let mut best = dp[t]; // level 0
            let mut pick = 0u8;
            for (b, &c) in costs.iter().enumerate().skip(1).take(t.min(levels - 1)) {
                let cand = dp[t - b] + c;
                if cand < best {
                    best = cand;
                    pick = b as u8;
                }
            }
            dp[t] = best;
            choice[j][t] = pick;
        }
    }
    let mut t_star = 0;
    for (t, &e) in dp.iter().enumerate() {
        if e <= budget * (1.0 + 1e-12) + 1e-12 {
            t_star = t;
        }
    }
    let mut bits = vec![0u8; n];
    let mut t = t_star;
    for (j, &i) in usable.iter().enumerate().rev() {
        let b = choice[j][t];
        bits[i] = b;
        t -= b as usize;
    }
    debug_assert_eq!(t, 0);
    bits
}

// ---------------------------------------------------------------------------
// BER-target adaptation
// ---------------------------------------------------------------------------

/// End-to-end measurement a loading plan can be evaluated against.
pub trait LinkMeasurement {
    /// Transmit payload under `plan` and return the measured BER.
    fn measure(&mut self, plan: &LoadingPlan) -> Result<f64>;
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AdaptRound {
    pub round: usize,
    pub margin_db: f64,
    pub bits_per_frame: usize,
    pub ber: f64,
}

#[derive(Debug)]
pub struct AdaptOutcome {
    pub plan: LoadingPlan,
    pub trace: Vec<AdaptRound>,
    pub converged: bool,
}

const MARGIN_STEP_DB: f64 = 0.5;

/// Walk the loading margin until measured BER meets the plan's target.
///
/// Each round measures the current plan. Above target: raise the margin by
/// [`MARGIN_STEP_DB`] and re-allocate. Below target by more than a factor of
/// 4 with margin to give back (and no overshoot seen yet): lower the margin
/// by half a step and re-allocate. Otherwise stop. Rounds are capped at
/// `max_rounds`; running out while above target yields `converged = false`
/// rather than an error.
pub fn adapt_to_target(
    runner: &mut dyn LinkMeasurement,
    stats: &SubcarrierStats,
    initial_plan: LoadingPlan,
    energy_budget: f64,
    max_rounds: usize,
) -> Result<AdaptOutcome> {
    let target = initial_plan.target_ber;
    let mut plan = initial_plan;
    let mut margin = plan.margin_db;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut overshot = false;

    for round in 1..=max_rounds {
        let ber = runner.measure(&plan)?;
        trace.push(AdaptRound {
            round,
            margin_db: margin,
            bits_per_frame: plan.bits_per_frame(),
            ber,
        });
        if ber > target {
            overshot = true;
            if round == max_rounds {
                break;
            }
            margin += MARGIN_STEP_DB;
            plan = hughes_hartogs_derated(stats, target, energy_budget, margin)?;
            continue;
        }
        // At or below target. Give back margin only while grossly under
        // target and never after an overshoot (prevents oscillation).
        if ber * 4.0 < target && margin > 0.0 && !overshot && round < max_rounds {
            margin = (margin - MARGIN_STEP_DB / 2.0).max(0.0);
            let refined = hughes_hartogs_derated(stats, target, energy_budget, margin)?;
            if refined.bits == plan.bits {
                converged = true;
                break;
            }
            plan = refined;
            continue;
        }
        converged = true;
        break;
    }

    Ok(AdaptOutcome {
        plan,
        trace,
        converged,
    })
}

// ---------------------------------------------------------------------------
// Rate bookkeeping
// ---------------------------------------------------------------------------

/// Achievable bit rate of a plan: (sum of b_k) * 2B / (K + CP).
pub fn achievable_rate(plan: &LoadingPlan, config: &OfdmConfig) -> f64 {
    plan.bits_per_frame() as f64 * config.frame_rate()
}
