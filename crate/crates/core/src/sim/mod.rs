//! Monte-Carlo FER/BER simulation over a parameter sweep.
//!
//! Frames are processed in fixed batches. Every frame draws its message and
//! channel noise from its own counter-based stream, so the counts for a given
//! seed do not depend on the number of worker threads.

pub mod config;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{depuncture_rx, frame_rng, puncture_tx, transmit, ChannelConfig};
use crate::codec::{encode, extract_info, MessageFrame, PathMetric, ScDecoder, SclDecoder};
use crate::construct::{Construction, PolarCodeSpec, ReliabilityProfile};
use crate::error::{Error, Result};
use crate::puncture::{qup_pattern, wqp_pattern, PuncturePattern, Scheme};

pub use config::{
    ChannelChoice, CheckNodeChoice, ConstructionChoice, DecoderChoice, PunctureChoice, SimConfig,
    StopRule,
};

/// Frames per batch; the stopping rule is checked between batches.
pub const BATCH: u64 = 64;

/// Everything a sweep needs that does not change between points.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub construction: Construction,
    pub profile: ReliabilityProfile,
    pub spec: PolarCodeSpec,
    pub pattern: PuncturePattern,
    /// `K / M`, message bits over transmitted symbols.
    pub rate: f64,
}

impl Prepared {
    /// Assemble from parts, for experiments that fix the information set by hand.
    pub fn from_parts(
        construction: Construction,
        profile: ReliabilityProfile,
        spec: PolarCodeSpec,
        pattern: PuncturePattern,
    ) -> Result<Self> {
        if pattern.n != spec.n {
            return Err(Error::InvalidArgument(
                "pattern and code must share n".into(),
            ));
        }
        let rate = spec.k as f64 / pattern.transmitted_len() as f64;
        if rate > 1.0 {
            return Err(Error::UnsupportedConfiguration(format!(
                "K = {} exceeds the {} transmitted symbols",
                spec.k,
                pattern.transmitted_len()
            )));
        }
        Ok(Self {
            construction,
            profile,
            spec,
            pattern,
            rate,
        })
    }
}

/// Build the profile, code and pattern described by `cfg`.
pub fn prepare(cfg: &SimConfig) -> Result<Prepared> {
    cfg.validate()?;
    let size = cfg.block_len();
    let transmitted = match cfg.puncture {
        PunctureChoice::None => size,
        PunctureChoice::Qup | PunctureChoice::Wqp => size - cfg.q,
        PunctureChoice::Custom => {
            let mut c = cfg.custom_coded_positions()?;
            c.sort_unstable();
            c.dedup();
            size.saturating_sub(c.len())
        }
    };
    if transmitted == 0 {
        return Err(Error::Config("pattern punctures every symbol".into()));
    }
    let rate = cfg.k as f64 / transmitted as f64;
    let construction = cfg.construction.resolve(rate.min(1.0), &cfg.sweep);
    let profile = construction.build(cfg.n)?;
    let spec = PolarCodeSpec::from_profile(&profile, cfg.k, cfg.crc)?;
    let pattern = match cfg.puncture {
        PunctureChoice::None => PuncturePattern::none(cfg.n)?,
        PunctureChoice::Qup => qup_pattern(cfg.n, cfg.q)?,
        PunctureChoice::Wqp => wqp_pattern(&spec, &profile, cfg.q)?,
        PunctureChoice::Custom => PuncturePattern::custom(cfg.n, cfg.custom_coded_positions()?)?,
    };
    Prepared::from_parts(construction, profile, spec, pattern)
}

enum Decoder {
    Sc(ScDecoder),
    Scl(SclDecoder),
}

impl Decoder {
    fn new(prep: &Prepared, cfg: &SimConfig) -> Self {
        match cfg.decoder {
            DecoderChoice::Sc => {
                Decoder::Sc(ScDecoder::with_check(&prep.spec, cfg.check_node.into()))
            }
            DecoderChoice::Scl => Decoder::Scl(SclDecoder::with_options(
                &prep.spec,
                cfg.list_size,
                cfg.check_node.into(),
                PathMetric::Exact,
            )),
        }
    }

    fn decode(&mut self, llrs: &[f64]) -> Vec<u8> {
        match self {
            Decoder::Sc(d) => d.decode(llrs),
            Decoder::Scl(d) => d.decode(llrs),
        }
    }
}

/// Channel for one sweep value.
pub fn point_channel(cfg: &SimConfig, rate: f64, param: f64) -> Result<ChannelConfig> {
    match cfg.channel {
        ChannelChoice::Awgn => ChannelConfig::awgn(param, rate),
        ChannelChoice::Bec => ChannelConfig::bec(param),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            frames: self.frames + o.frames,
            frame_errors: self.frame_errors + o.frame_errors,
            bit_errors: self.bit_errors + o.bit_errors,
        }
    }
}

fn run_frame(
    prep: &Prepared,
    channel: &ChannelConfig,
    dec: &mut Decoder,
    seed: u64,
    point: u32,
    frame: u64,
) -> Result<Tally> {
    let mut rng = frame_rng(seed, point, frame);
    let info: Vec<u8> = (0..prep.spec.k)
        .map(|_| rng.random::<bool>() as u8)
        .collect();
    let msg = MessageFrame::build(&info, &prep.spec)?;
    let x = encode(&msg.u_vector)?;
    let tx = puncture_tx(&x, &prep.pattern)?;
    let rx = transmit(&tx, channel, &mut rng);
    let soft = depuncture_rx(&rx, &prep.pattern)?;
    let u_hat = dec.decode(&soft.llrs);
    let errors = extract_info(&u_hat, &prep.spec)
        .iter()
        .zip(&info)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(Tally {
        frames: 1,
        frame_errors: u64::from(errors > 0),
        bit_errors: errors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    /// Eb/N0 in dB for AWGN, erasure probability for the BEC.
    pub param: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub info_bits_sent: u64,
    pub fer: f64,
    pub ber: f64,
    pub wall_time_s: f64,
}

/// Simulate one sweep point until the stopping rule fires.
pub fn run_point(prep: &Prepared, cfg: &SimConfig, point: u32, param: f64) -> Result<PointResult> {
    let channel = point_channel(cfg, prep.rate, param)?;
    let start = Instant::now();
    let mut total = Tally::default();
    let max = cfg.stop.max_frames;
    while total.frames < max && total.frame_errors < cfg.stop.min_frame_errors.max(1) {
        let lo = total.frames;
        let hi = (lo + BATCH).min(max);
        let batch = (lo..hi)
            .into_par_iter()
            .map_init(
                || Decoder::new(prep, cfg),
                |dec, f| run_frame(prep, &channel, dec, cfg.seed, point, f),
            )
            .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;
        total = total.add(batch);
    }
    let info_bits_sent = total.frames * prep.spec.k as u64;
    Ok(PointResult {
        param,
        frames: total.frames,
        frame_errors: total.frame_errors,
        bit_errors: total.bit_errors,
        info_bits_sent,
        fer: total.frame_errors as f64 / total.frames as f64,
        ber: total.bit_errors as f64 / info_bits_sent as f64,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSummary {
    pub scheme: Scheme,
    #[serde(rename = "Q")]
    pub q: usize,
    pub source_set: Vec<u32>,
    pub coded_set: Vec<u32>,
    pub destination_set: Vec<u32>,
}

impl From<&PuncturePattern> for PatternSummary {
    fn from(p: &PuncturePattern) -> Self {
        Self {
            scheme: p.scheme,
            q: p.q,
            source_set: p.source_set.clone(),
            coded_set: p.coded_set.clone(),
            destination_set: p.destination_set.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub construction: Construction,
    pub rate: f64,
    pub info_set: Vec<u32>,
    pub pattern: PatternSummary,
    pub points: Vec<PointResult>,
    pub version: String,
}

impl SimResult {
    /// Copy with wall times zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for p in &mut r.points {
            p.wall_time_s = 0.0;
        }
        r
    }

    pub fn label(&self) -> String {
        match self.config.puncture {
            PunctureChoice::None => "none".into(),
            PunctureChoice::Qup => "qup".into(),
            PunctureChoice::Wqp => "wqp".into(),
            PunctureChoice::Custom => "custom".into(),
        }
    }
}

/// Run every sweep point, calling `progress` after each one.
pub fn run_sweep_with(
    cfg: &SimConfig,
    mut progress: impl FnMut(&PointResult),
) -> Result<SimResult> {
    let prep = prepare(cfg)?;
    run_prepared(&prep, cfg, &mut progress)
}

pub fn run_sweep(cfg: &SimConfig) -> Result<SimResult> {
    run_sweep_with(cfg, |_| {})
}

/// Sweep with a caller-built code and pattern.
pub fn run_prepared(
    prep: &Prepared,
    cfg: &SimConfig,
    progress: &mut dyn FnMut(&PointResult),
) -> Result<SimResult> {
    let mut points = Vec::with_capacity(cfg.sweep.len());
    for (i, &param) in cfg.sweep.iter().enumerate() {
        let p = run_point(prep, cfg, i as u32, param)?;
        progress(&p);
        points.push(p);
    }
    Ok(SimResult {
        config: cfg.clone(),
        construction: prep.construction,
        rate: prep.rate,
        info_set: prep.spec.info_set.clone(),
        pattern: (&prep.pattern).into(),
        points,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

pub const CSV_HEADER: &str = "sweep_param,frames,frame_errors,FER,bit_errors,BER";

pub fn to_csv(result: &SimResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{},{:e}",
            p.param, p.frames, p.frame_errors, p.fer, p.bit_errors, p.ber
        );
    }
    out
}

/// One CSV with a leading `scheme` column for several runs.
pub fn compare_csv(results: &[SimResult]) -> String {
    let mut out = format!("scheme,{CSV_HEADER}\n");
    for r in results {
        let label = r.label();
        for p in &r.points {
            let _ = writeln!(
                out,
                "{label},{},{},{},{:e},{},{:e}",
                p.param, p.frames, p.frame_errors, p.fer, p.bit_errors, p.ber
            );
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    /// `.csv` selects CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

pub fn render(result: &SimResult, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(result)?,
        OutputFormat::Csv => to_csv(result),
    })
}

/// Write `result` to `path`, choosing the format from the extension.
pub fn emit(result: &SimResult, path: &Path) -> Result<()> {
    std::fs::write(path, render(result, OutputFormat::from_path(path))?)?;
    Ok(())
}

/// Parse a CSV written by [`to_csv`] back into `(param, frames, frame_errors, bit_errors)`.
pub fn parse_csv(text: &str) -> Result<Vec<(f64, u64, u64, u64)>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Config(format!("bad CSV row `{l}`")));
            }
            let bad = |e: &dyn std::fmt::Display| Error::Config(format!("bad CSV row `{l}`: {e}"));
            Ok((
                f[0].parse().map_err(|e| bad(&e))?,
                f[1].parse().map_err(|e| bad(&e))?,
                f[2].parse().map_err(|e| bad(&e))?,
                f[4].parse().map_err(|e| bad(&e))?,
            ))
        })
        .collect()
}
