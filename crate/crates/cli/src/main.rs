//! Command-line front end for the link simulator.
//!
//! source (preset | JSON file) -> plan -> run | wdm | sweep | loading -> out/
//!     out/report.json          structured result, byte-stable for a fixed
//!                              (source, seed); timestamps live in meta.json
//!     out/snr_vs_freq.csv      estimated SNR per subcarrier frequency
//!     out/loading.csv          bit/energy table per subcarrier
//!     out/ber_vs_rate.csv      per-round (or per-sweep-value) rate and BER
//!     out/constellations.csv   transmitted/received symbol pairs per order
//!
//! `aggregate` is pure arithmetic on already-measured per-channel results
//! and only prints; `loading` computes a table from a measured SNR profile
//! without running a simulation.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration
//! (diagnostic names the offending field), 3 partial multi-channel failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lifi_core::channel::{load_profile, reference_channel_at};
use lifi_core::dsp::OfdmConfig;
use lifi_core::link::{run_link, LinkReport, LinkRunner};
use lifi_core::loading::{achievable_rate, hughes_hartogs_derated, SubcarrierStats};
use lifi_core::rx::VolterraConfig;
use lifi_core::wdm::{self, run_wdm, AggregateReport, ChannelOutcome, ChannelSpec, WdmPlan};
use lifi_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "lifi-sim",
    version,
    about = "Baseband simulator for adaptive DCO-OFDM optical links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one adaptive link end to end and write its report.
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every channel of a multi-wavelength plan and aggregate.
    Wdm {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rerun one link while stepping a single parameter.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to step.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values; an empty list writes an empty report.
        #[arg(long, default_value = "", value_name = "CSV")]
        values: String,
    },
    /// Combine per-channel rates and BERs into campaign totals.
    Aggregate {
        /// Per-channel data rates in Gbps, comma separated.
        #[arg(long, value_name = "CSV")]
        rates: String,
        /// Per-channel bit error rates, comma separated, same order.
        #[arg(long, value_name = "CSV")]
        bers: String,
        /// Optional directory for report.json; totals print regardless.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Compute a bit/energy loading table from a measured SNR profile.
    Loading {
        #[command(flatten)]
        source: SourceArgs,
        /// CSV profile with header `freq_hz,snr_db`.
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

/// Exactly one experiment source: a built-in preset or a JSON file.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Built-in preset name (table1-905nm, table2-ten-channel, table3-500m).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// JSON experiment description; schema documented in the README.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

/// Flags shared by the simulating subcommands; all explicit, none echoed
/// into reports from hidden defaults.
#[derive(Args)]
struct RunArgs {
    /// Master seed; every random substream derives from it.
    #[arg(long)]
    seed: u64,
    /// Payload bits per BER measurement round.
    #[arg(long)]
    bits: usize,
    /// Output directory; created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    /// SNR derating applied to the loader; calibration stays frozen.
    #[value(name = "margin_db")]
    MarginDb,
    /// Channel noise level; the loading plan stays frozen.
    #[value(name = "noise_std")]
    NoiseStd,
    /// Clipping threshold in waveform standard deviations; full rerun.
    #[value(name = "clip_level")]
    ClipLevel,
    /// Equalizer order 0..=5 (0 disables it); full rerun.
    #[value(name = "q_max")]
    QMax,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::MarginDb => "margin_db",
            SweepParam::NoiseStd => "noise_std",
            SweepParam::ClipLevel => "clip_level",
            SweepParam::QMax => "q_max",
        }
    }
}

// ---------------------------------------------------------------------------
// Config file schema
// ---------------------------------------------------------------------------

/// JSON experiment description: a BER target plus one entry per channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    /// Campaign BER target; defaults to the FEC threshold 5.6e-2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_ber: Option<f64>,
    channels: Vec<FileChannel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileChannel {
    label: String,
    fft_size: usize,
    cp_length: usize,
    rolloff: f64,
    /// Clipping threshold in waveform standard deviations; omit to disable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clip_level: Option<f64>,
    #[serde(default = "default_oversampling")]
    oversampling: usize,
    bandwidth_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rrc_span: Option<usize>,
    /// Reference impairment model: ideal, lowpass-1g4, nonlinear-echo,
    /// or longrange-apd.
    channel: String,
    /// Overrides the model's noise level when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_std: Option<f64>,
    /// Pins the model to a waveform rate; mismatches fail at run time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    design_rate_hz: Option<f64>,
    /// Nonlinear equalizer order 0..=5; 0 (the default) disables it.
    #[serde(default)]
    equalizer_order: usize,
    /// Drive settings recorded in reports; 0 when unspecified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vpp_mv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias_ma: Option<f64>,
}

fn default_oversampling() -> usize {
    4
}

fn build_spec(ch: &FileChannel) -> anyhow::Result<ChannelSpec> {
    let clip = ch.clip_level.unwrap_or(f64::INFINITY);
    let mut ofdm = OfdmConfig::new(
        ch.fft_size,
        ch.cp_length,
        ch.rolloff,
        clip,
        ch.oversampling,
        ch.bandwidth_hz,
    )
    .with_context(|| format!("channel '{}'", ch.label))?;
    if let Some(span) = ch.rrc_span {
        if span == 0 {
            return Err(CoreError::Config(format!(
                "channel '{}': rrc_span must be at least 1",
                ch.label
            ))
            .into());
        }
        ofdm.rrc_span = span;
    }
    let mut channel = reference_channel_at(&ch.channel, ofdm.sample_rate())
        .with_context(|| format!("channel '{}'", ch.label))?;
    if let Some(std) = ch.noise_std {
        channel.noise_std = std;
    }
    if let Some(rate) = ch.design_rate_hz {
        channel.design_rate = Some(rate);
    }
    let volterra = match ch.equalizer_order {
        0 => None,
        q => Some(
            VolterraConfig::reference_preset()
                .truncated(q)
                .with_context(|| format!("channel '{}': equalizer_order", ch.label))?,
        ),
    };
    Ok(ChannelSpec {
        label: ch.label.clone(),
        ofdm,
        channel,
        volterra,
        vpp_mv: ch.vpp_mv.unwrap_or(0.0),
        bias_ma: ch.bias_ma.unwrap_or(0.0),
    })
}

/// What the report echoes back about where the plan came from: the preset
/// name, or the full parsed config so equal content gives equal bytes.
#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum SourceEcho {
    Preset(String),
    Config(FileConfig),
}

fn resolve_source(source: &SourceArgs) -> anyhow::Result<(WdmPlan, SourceEcho)> {
    if let Some(name) = &source.preset {
        let plan = wdm::preset(name)?;
        return Ok((plan, SourceEcho::Preset(name.clone())));
    }
    let path = source
        .config
        .as_ref()
        .expect("clap guarantees one source is present");
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let file: FileConfig = serde_json::from_str(&text)
        .map_err(|e| CoreError::Config(format!("config file {}: {e}", path.display())))?;
    let specs = file
        .channels
        .iter()
        .map(build_spec)
        .collect::<anyhow::Result<Vec<_>>>()?;
    let plan = WdmPlan::new(specs, file.target_ber.unwrap_or(wdm::TARGET_BER));
    plan.validate()?;
    Ok((plan, SourceEcho::Config(file)))
}

/// The single-link commands refuse multi-channel sources up front.
fn single_channel<'p>(plan: &'p WdmPlan, command: &str) -> anyhow::Result<&'p ChannelSpec> {
    if plan.channels.len() != 1 {
        return Err(CoreError::Config(format!(
            "{command} takes a single channel, but the source defines {} (field: channels)",
            plan.channels.len()
        ))
        .into());
    }
    Ok(&plan.channels[0])
}

fn parse_values(field: &str, text: &str) -> anyhow::Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                CoreError::Config(format!("{field}: '{tok}' is not a number")).into()
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

/// Stable JSON: pretty-printed with a trailing newline, no timestamps.
fn write_json<T: Serialize>(dir: &Path, name: &str, doc: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Wall-clock data lives here so report.json stays byte-stable.
#[derive(Serialize)]
struct Meta {
    command: &'static str,
    started_unix_s: u64,
    elapsed_s: f64,
}

fn write_meta(dir: &Path, command: &'static str, t0: Instant) -> anyhow::Result<()> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = Meta {
        command,
        started_unix_s: started,
        elapsed_s: t0.elapsed().as_secs_f64(),
    };
    write_json(dir, "meta.json", &meta)
}

/// Per-link CSV series; `label` prefixes each row in multi-channel runs.
fn push_series(
    report: &LinkReport,
    ofdm: &OfdmConfig,
    label: Option<&str>,
    snr: &mut String,
    loading: &mut String,
    rounds: &mut String,
    constellations: &mut String,
) {
    let prefix = |s: &mut String| {
        if let Some(l) = label {
            s.push_str(l);
            s.push(',');
        }
    };
    for &(freq, db) in &report.snr_db {
        prefix(snr);
        snr.push_str(&format!("{freq},{db}\n"));
    }
    for (i, (&b, &e)) in report.bits.iter().zip(&report.energy).enumerate() {
        prefix(loading);
        loading.push_str(&format!("{},{b},{e}\n", i + 1));
    }
    for r in &report.rounds {
        let rate = r.bits_per_frame as f64 * ofdm.frame_rate();
        prefix(rounds);
        rounds.push_str(&format!(
            "{},{},{rate},{}\n",
            r.round, r.margin_db, r.ber
        ));
    }
    for s in &report.constellation_samples {
        prefix(constellations);
        constellations.push_str(&format!(
            "{},{},{},{},{}\n",
            1usize << s.bits,
            s.tx_re,
            s.tx_im,
            s.rx_re,
            s.rx_im
        ));
    }
}

fn series_headers(labeled: bool) -> (String, String, String, String) {
    let l = if labeled { "label," } else { "" };
    (
        format!("{l}freq_hz,snr_db\n"),
        format!("{l}k,bits,energy\n"),
        format!("{l}round,margin_db,rate_bps,ber\n"),
        format!("{l}order,tx_re,tx_im,rx_re,rx_im\n"),
    )
}

#[derive(Serialize)]
struct RunDoc<'a> {
    command: &'static str,
    source: &'a SourceEcho,
    seed: u64,
    payload_bits: usize,
    link: &'a LinkReport,
}

#[derive(Serialize)]
struct WdmDoc<'a> {
    command: &'static str,
    source: &'a SourceEcho,
    seed: u64,
    payload_bits: usize,
    aggregate: &'a AggregateReport,
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    rate_bps: f64,
    ber: f64,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    command: &'static str,
    source: &'a SourceEcho,
    seed: u64,
    payload_bits: usize,
    param: &'static str,
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct AggregateDoc<'a> {
    command: &'static str,
    rates_gbps: &'a [f64],
    bers: &'a [f64],
    total_rate_gbps: f64,
    effective_ber: f64,
}

#[derive(Serialize)]
struct LoadingDoc<'a> {
    command: &'static str,
    source: &'a SourceEcho,
    profile_points: usize,
    target_ber: f64,
    bits_per_frame: usize,
    rate_bps: f64,
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_run(source: &SourceArgs, args: &RunArgs) -> anyhow::Result<u8> {
    let t0 = Instant::now();
    let (mut plan, echo) = resolve_source(source)?;
    plan.payload_bits_per_round = args.bits;
    let spec = single_channel(&plan, "run")?;
    let cfg = plan.link_config(spec, args.seed);
    let report = run_link(&cfg)?;

    fs::create_dir_all(&args.out)?;
    let doc = RunDoc {
        command: "run",
        source: &echo,
        seed: args.seed,
        payload_bits: args.bits,
        link: &report,
    };
    write_json(&args.out, "report.json", &doc)?;
    let (mut snr, mut loading, mut rounds, mut constellations) = series_headers(false);
    push_series(
        &report,
        &cfg.ofdm,
        None,
        &mut snr,
        &mut loading,
        &mut rounds,
        &mut constellations,
    );
    write_text(&args.out, "snr_vs_freq.csv", &snr)?;
    write_text(&args.out, "loading.csv", &loading)?;
    write_text(&args.out, "ber_vs_rate.csv", &rounds)?;
    write_text(&args.out, "constellations.csv", &constellations)?;
    write_meta(&args.out, "run", t0)?;

    println!(
        "{}: {:.3} Gbps at BER {:.3e} (target {:.1e}, converged: {})",
        report.label,
        report.rate_bps / 1e9,
        report.ber,
        report.target_ber,
        report.converged
    );
    Ok(0)
}

fn cmd_wdm(source: &SourceArgs, args: &RunArgs) -> anyhow::Result<u8> {
    let t0 = Instant::now();
    let (mut plan, echo) = resolve_source(source)?;
    plan.payload_bits_per_round = args.bits;
    let report = run_wdm(&plan, args.seed)?;

    fs::create_dir_all(&args.out)?;
    let doc = WdmDoc {
        command: "wdm",
        source: &echo,
        seed: args.seed,
        payload_bits: args.bits,
        aggregate: &report,
    };
    write_json(&args.out, "report.json", &doc)?;
    let (mut snr, mut loading, mut rounds, mut constellations) = series_headers(true);
    for result in &report.channels {
        if let ChannelOutcome::Completed { report: link } = &result.outcome {
            let ofdm = &plan
                .channels
                .iter()
                .find(|s| s.label == result.label)
                .expect("result labels come from the plan")
                .ofdm;
            push_series(
                link,
                ofdm,
                Some(&result.label),
                &mut snr,
                &mut loading,
                &mut rounds,
                &mut constellations,
            );
        }
    }
    write_text(&args.out, "snr_vs_freq.csv", &snr)?;
    write_text(&args.out, "loading.csv", &loading)?;
    write_text(&args.out, "ber_vs_rate.csv", &rounds)?;
    write_text(&args.out, "constellations.csv", &constellations)?;
    write_meta(&args.out, "wdm", t0)?;

    match report.effective_ber {
        Some(ber) => println!(
            "{} of {} channels completed: {:.3} Gbps aggregate, effective BER {:.4}",
            report.completed,
            report.channels.len(),
            report.total_rate_bps / 1e9,
            ber
        ),
        None => println!(
            "{} of {} channels completed: {:.3} Gbps aggregate",
            report.completed,
            report.channels.len(),
            report.total_rate_bps / 1e9
        ),
    }
    for result in &report.channels {
        if let ChannelOutcome::Failed { message } = &result.outcome {
            eprintln!("channel {} failed: {message}", result.label);
        }
    }
    if report.completed == 0 {
        anyhow::bail!("every channel failed");
    }
    Ok(if report.failed > 0 { 3 } else { 0 })
}

fn cmd_sweep(
    source: &SourceArgs,
    args: &RunArgs,
    param: SweepParam,
    values_text: &str,
) -> anyhow::Result<u8> {
    let t0 = Instant::now();
    let (mut plan, echo) = resolve_source(source)?;
    plan.payload_bits_per_round = args.bits;
    let spec = single_channel(&plan, "sweep")?;
    let base = plan.link_config(spec, args.seed);
    let values = parse_values("values", values_text)?;

    let rows = match param {
        // Loader-side parameters reuse one calibration; every value sees
        // the same payload bits and noise draw, so comparisons are under
        // common randomness.
        SweepParam::MarginDb => {
            let mut runner = LinkRunner::calibrate(base.clone())?;
            let budget = base.ofdm.data_bin_count() as f64;
            values
                .iter()
                .map(|&margin| {
                    let plan =
                        hughes_hartogs_derated(&runner.stats, base.target_ber, budget, margin)?;
                    let ber = runner.measure_once(&plan, "sweep")?;
                    Ok(SweepRow {
                        value: margin,
                        rate_bps: achievable_rate(&plan, &base.ofdm),
                        ber,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?
        }
        SweepParam::NoiseStd => {
            let mut runner = LinkRunner::calibrate(base.clone())?;
            let budget = base.ofdm.data_bin_count() as f64;
            let frozen = hughes_hartogs_derated(&runner.stats, base.target_ber, budget, 0.0)?;
            let rate = achievable_rate(&frozen, &base.ofdm);
            values
                .iter()
                .map(|&std| {
                    runner.set_noise_std(std)?;
                    let ber = runner.measure_once(&frozen, "sweep")?;
                    Ok(SweepRow {
                        value: std,
                        rate_bps: rate,
                        ber,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?
        }
        // Chain-shape parameters need full reruns; the shared master seed
        // keeps the derived bit/noise substreams identical across values.
        SweepParam::ClipLevel => values
            .iter()
            .map(|&clip| {
                let mut cfg = base.clone();
                cfg.ofdm.clip_level = clip;
                cfg.ofdm.validate()?;
                let report = run_link(&cfg)?;
                Ok(SweepRow {
                    value: clip,
                    rate_bps: report.rate_bps,
                    ber: report.ber,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?,
        SweepParam::QMax => values
            .iter()
            .map(|&q| {
                if q.fract() != 0.0 || q < 0.0 {
                    return Err(CoreError::Config(format!(
                        "values: q_max entries must be non-negative integers, got {q}"
                    ))
                    .into());
                }
                let mut cfg = base.clone();
                cfg.volterra = match q as usize {
                    0 => None,
                    order => {
                        let full = base
                            .volterra
                            .clone()
                            .unwrap_or_else(VolterraConfig::reference_preset);
                        Some(full.truncated(order)?)
                    }
                };
                let report = run_link(&cfg)?;
                Ok(SweepRow {
                    value: q,
                    rate_bps: report.rate_bps,
                    ber: report.ber,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?,
    };

    fs::create_dir_all(&args.out)?;
    let doc = SweepDoc {
        command: "sweep",
        source: &echo,
        seed: args.seed,
        payload_bits: args.bits,
        param: param.name(),
        rows: &rows,
    };
    write_json(&args.out, "report.json", &doc)?;
    let mut csv = String::from("param,value,rate_bps,ber\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            param.name(),
            row.value,
            row.rate_bps,
            row.ber
        ));
    }
    write_text(&args.out, "ber_vs_rate.csv", &csv)?;
    write_meta(&args.out, "sweep", t0)?;

    println!("{} values of {} swept", rows.len(), param.name());
    Ok(0)
}

fn cmd_aggregate(rates_text: &str, bers_text: &str, out: Option<&Path>) -> anyhow::Result<u8> {
    let t0 = Instant::now();
    let rates = parse_values("rates", rates_text)?;
    let bers = parse_values("bers", bers_text)?;
    let (total, effective) = wdm::aggregate(&rates, &bers)?;
    println!("{}", format_aggregate(total, effective));
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let doc = AggregateDoc {
            command: "aggregate",
            rates_gbps: &rates,
            bers: &bers,
            total_rate_gbps: total,
            effective_ber: effective,
        };
        write_json(dir, "report.json", &doc)?;
        write_meta(dir, "aggregate", t0)?;
    }
    Ok(0)
}

fn format_aggregate(total: f64, effective: f64) -> String {
    format!("{total:.2} Gbps, {effective:.4}")
}

fn cmd_loading(source: &SourceArgs, profile: &Path, out: &Path) -> anyhow::Result<u8> {
    let t0 = Instant::now();
    let (plan, echo) = resolve_source(source)?;
    let spec = single_channel(&plan, "loading")?;
    let measured = load_profile(profile)?;
    let points = measured.snr_points().ok_or_else(|| {
        CoreError::Profile(format!(
            "profile {} carries a complex response, not SNR; expected header freq_hz,snr_db",
            profile.display()
        ))
    })?;
    let stats = SubcarrierStats::from_snr_points(&points, &spec.ofdm)?;
    let budget = spec.ofdm.data_bin_count() as f64;
    let table = hughes_hartogs_derated(&stats, plan.target_ber, budget, 0.0)?;

    fs::create_dir_all(out)?;
    let doc = LoadingDoc {
        command: "loading",
        source: &echo,
        profile_points: points.len(),
        target_ber: plan.target_ber,
        bits_per_frame: table.bits_per_frame(),
        rate_bps: achievable_rate(&table, &spec.ofdm),
    };
    write_json(out, "report.json", &doc)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    write_text(out, "loading.csv", std::str::from_utf8(&csv)?)?;
    write_meta(out, "loading", t0)?;

    println!(
        "{} bits per frame, {:.3} Gbps at target BER {:.1e}",
        table.bits_per_frame(),
        achievable_rate(&table, &spec.ofdm) / 1e9,
        plan.target_ber
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn dispatch(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Run { source, run } => cmd_run(source, run),
        Command::Wdm { source, run } => cmd_wdm(source, run),
        Command::Sweep {
            source,
            run,
            param,
            values,
        } => cmd_sweep(source, run, *param, values),
        Command::Aggregate { rates, bers, out } => {
            cmd_aggregate(rates, bers, out.as_deref())
        }
        Command::Loading {
            source,
            profile,
            out,
        } => cmd_loading(source, profile, out),
    }
}

/// Configuration mistakes exit 2; anything else that errors exits 1.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::Config(_) | CoreError::Profile(_) | CoreError::Estimation(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}
