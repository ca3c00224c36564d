//! Multi-wavelength orchestration: run N independent link simulations in
//! parallel, one per optical carrier, and aggregate their rates into a
//! total throughput with a rate-weighted effective BER.
//!
//!   WdmPlan -> [run_link x N, seeded per label] -> AggregateReport

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::reference_channel_at;
use crate::dsp::OfdmConfig;
use crate::error::{Error, Result};
use crate::link::{derive_seed, run_link, LinkConfig, LinkReport};
use crate::rx::VolterraConfig;

/// FEC pre-decoder BER ceiling the adaptive loading aims for.
pub const TARGET_BER: f64 = 5.6e-2;

/// One carrier of a multi-wavelength plan.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub label: String,
    pub ofdm: OfdmConfig,
    pub channel: crate::channel::ChannelModel,
    pub volterra: Option<VolterraConfig>,
    /// AWG peak-to-peak drive in mV; report metadata.
    pub vpp_mv: f64,
    /// DC bias current in mA; report metadata.
    pub bias_ma: f64,
}

/// A full multi-channel run: carriers plus the shared measurement knobs.
#[derive(Debug, Clone)]
pub struct WdmPlan {
    pub channels: Vec<ChannelSpec>,
    pub target_ber: f64,
    pub payload_bits_per_round: usize,
    pub pilot_frames: usize,
    pub training_frames: usize,
    pub max_rounds: usize,
}

pub const MAX_CHANNELS: usize = 16;

impl WdmPlan {
    pub fn new(channels: Vec<ChannelSpec>, target_ber: f64) -> Self {
        Self {
            channels,
            target_ber,
            payload_bits_per_round: 200_000,
            pilot_frames: 64,
            training_frames: 16,
            max_rounds: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() || self.channels.len() > MAX_CHANNELS {
            return Err(Error::Config(format!(
                "plan needs 1..={MAX_CHANNELS} channels, got {}",
                self.channels.len()
            )));
        }
        for (i, a) in self.channels.iter().enumerate() {
            if a.label.is_empty() {
                return Err(Error::Config(format!("channel {i} has an empty label")));
            }
            for b in &self.channels[..i] {
                if a.label == b.label {
                    return Err(Error::Config(format!(
                        "duplicate channel label '{}'",
                        a.label
                    )));
                }
            }
            a.ofdm.validate()?;
            a.channel.validate()?;
            if let Some(v) = &a.volterra {
                v.validate()?;
            }
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::Config(format!(
                "target BER must lie in (0, 0.5), got {}",
                self.target_ber
            )));
        }
        Ok(())
    }

    /// Expand one channel spec into a runnable link configuration; the
    /// link seed is derived from the master seed and the channel label,
    /// so results do not depend on channel order.
    pub fn link_config(&self, spec: &ChannelSpec, master_seed: u64) -> LinkConfig {
        let mut cfg = LinkConfig::new(spec.ofdm.clone(), spec.channel.clone(), self.target_ber);
        cfg.label = spec.label.clone();
        cfg.volterra = spec.volterra.clone();
        cfg.vpp = spec.vpp_mv;
        cfg.bias = spec.bias_ma;
        cfg.payload_bits_per_round = self.payload_bits_per_round;
        cfg.pilot_frames = self.pilot_frames;
        cfg.training_frames = self.training_frames;
        cfg.max_rounds = self.max_rounds;
        cfg.seed = derive_seed(master_seed, &spec.label);
        cfg
    }
}

/// Per-channel outcome; a failure never hides sibling results.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ChannelOutcome {
    Completed { report: LinkReport },
    Failed { message: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct WdmChannelResult {
    pub label: String,
    #[serde(flatten)]
    pub outcome: ChannelOutcome,
}

/// Aggregate of a multi-channel run. Rates sum over completed channels;
/// the effective BER is their rate-weighted mean (absent if none completed).
#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub channels: Vec<WdmChannelResult>,
    pub completed: usize,
    pub failed: usize,
    pub total_rate_bps: f64,
    pub effective_ber: Option<f64>,
    pub target_ber: f64,
    pub seed: u64,
}

/// Total rate and rate-weighted effective BER of per-channel results.
pub fn aggregate(rates: &[f64], bers: &[f64]) -> Result<(f64, f64)> {
    if rates.is_empty() {
        return Err(Error::Config("nothing to aggregate".into()));
    }
    if rates.len() != bers.len() {
        return Err(Error::Config(format!(
            "{} rates but {} BERs",
            rates.len(),
            bers.len()
        )));
    }
    for (&r, &b) in rates.iter().zip(bers) {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Config(format!("rates must be positive, got {r}")));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("BER out of range: {b}")));
        }
    }
    let total: f64 = rates.iter().sum();
    let weighted: f64 = rates.iter().zip(bers).map(|(r, b)| r * b).sum();
    Ok((total, weighted / total))
}

/// Run every channel of the plan (in parallel) and aggregate.
///
/// Each channel's seed derives from (master seed, label) alone, so results
/// are invariant under channel reordering and under running any subset.
pub fn run_wdm(plan: &WdmPlan, seed: u64) -> Result<AggregateReport> {
    plan.validate()?;
    let channels: Vec<WdmChannelResult> = plan
        .channels
        .par_iter()
        .map(|spec| WdmChannelResult {
            label: spec.label.clone(),
            outcome: match run_link(&plan.link_config(spec, seed)) {
                Ok(report) => ChannelOutcome::Completed { report },
                Err(e) => ChannelOutcome::Failed {
                    message: e.to_string(),
                },
            },
        })
        .collect();

    // Sum in label order, not plan order: float addition is not
    // associative, and the totals must be invariant under reordering.
    let mut per_channel: Vec<(&str, f64, f64)> = channels
        .iter()
        .filter_map(|ch| match &ch.outcome {
            ChannelOutcome::Completed { report } => {
                Some((ch.label.as_str(), report.rate_bps, report.ber))
            }
            ChannelOutcome::Failed { .. } => None,
        })
        .collect();
    per_channel.sort_by(|a, b| a.0.cmp(b.0));
    let rates: Vec<f64> = per_channel.iter().map(|c| c.1).collect();
    let bers: Vec<f64> = per_channel.iter().map(|c| c.2).collect();
    let completed = rates.len();
    let failed = channels.len() - completed;
    let (total_rate_bps, effective_ber) = if completed > 0 && rates.iter().all(|&r| r > 0.0) {
        let (t, e) = aggregate(&rates, &bers)?;
        (t, Some(e))
    } else {
        (rates.iter().sum(), None)
    };
    Ok(AggregateReport {
        channels,
        completed,
        failed,
        total_rate_bps,
        effective_ber,
        target_ber: plan.target_ber,
        seed,
    })
}

fn spec(
    label: &str,
    bandwidth_hz: f64,
    clip_level: f64,
    q_max: usize,
    vpp_mv: f64,
    bias_ma: f64,
    channel_name: &str,
) -> Result<ChannelSpec> {
    let ofdm = OfdmConfig::new(1024, 20, 0.1, clip_level, 4, bandwidth_hz)?;
    let channel = reference_channel_at(channel_name, ofdm.sample_rate())?;
    let volterra = match q_max {
        0 => None,
        q => Some(VolterraConfig::reference_preset().truncated(q)?),
    };
    Ok(ChannelSpec {
        label: label.into(),
        ofdm,
        channel,
        volterra,
        vpp_mv,
        bias_ma,
    })
}

/// Named measurement-campaign presets.
///
/// - "table1-905nm": the single 905 nm link (2.67 GHz, clip 3.2, 5th-order
///   equalizer, 140 mV / 1171 mA drive).
/// - "table2-ten-channel": ten wavelengths 405..1064 nm with per-channel
///   drive, bandwidth, clipping and equalizer order; five channels run
///   without a nonlinear equalizer.
/// - "table3-500m": the long-range pair (450 nm at 1.33 GHz, 905 nm at
///   1.14 GHz) on the high-noise APD channel, no nonlinear equalizer.
pub fn preset(name: &str) -> Result<WdmPlan> {
    let channels = match name {
        "table1-905nm" => vec![spec(
            "905nm",
            2.67e9,
            3.2,
            5,
            140.0,
            1171.0,
            "nonlinear-echo",
        )?],
        "table2-ten-channel" => {
            let rows: [(&str, f64, f64, f64, f64, usize); 10] = [
                ("405nm", 280.0, 930.0, 1.33e9, 3.4, 5),
                ("450nm", 450.0, 1000.0, 1.6e9, 3.2, 0),
                ("455nm", 320.0, 1050.0, 1.6e9, 3.3, 3),
                ("850nm", 200.0, 1000.0, 2.67e9, 3.2, 0),
                ("900nm", 100.0, 1100.0, 3.0e9, 3.9, 3),
                ("905nm", 140.0, 1171.0, 2.67e9, 3.2, 5),
                ("940nm", 140.0, 1450.0, 2.67e9, 3.2, 0),
                ("955nm", 140.0, 1450.0, 2.67e9, 3.2, 0),
                ("980nm", 130.0, 1300.0, 2.67e9, 3.2, 0),
                ("1064nm", 175.0, 1050.0, 3.0e9, 3.4, 3),
            ];
            rows.iter()
                .map(|&(label, vpp, bias, b, kappa, q)| {
                    spec(label, b, kappa, q, vpp, bias, "nonlinear-echo")
                })
                .collect::<Result<Vec<_>>>()?
        }
        "table3-500m" => vec![
            spec("450nm", 1.33e9, 3.2, 0, 700.0, 850.0, "longrange-apd")?,
            spec("905nm", 1.14e9, 3.2, 0, 450.0, 850.0, "longrange-apd")?,
        ],
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}'; expected table1-905nm, \
                 table2-ten-channel, or table3-500m"
            )))
        }
    };
    Ok(WdmPlan::new(channels, TARGET_BER))
}
