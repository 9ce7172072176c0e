use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use polarpunct::codec::crc::parse_optional_crc;
use polarpunct::codec::EncodingVector;
use polarpunct::degrade::{propagate, LevelSet};
use polarpunct::puncture::{analyze_pattern, compare_patterns};
use polarpunct::sim::{
    compare_csv, emit, prepare, render, run_sweep_with, ChannelChoice, CheckNodeChoice,
    ConstructionChoice, OutputFormat, Prepared, PunctureChoice, SimConfig, SimResult,
};
use polarpunct::{Error, PatternReport, PuncturePattern, Result};

#[derive(Parser)]
#[command(
    name = "polarpunct",
    version,
    about = "Punctured polar codes with a fixed information set"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bit-channel reliabilities plus the information and frozen sets.
    Construct(CodeArgs),
    /// Puncturing pattern, its propagation and its quality report.
    Puncture {
        #[command(flatten)]
        code: CodeArgs,
        /// Report several schemes side by side, e.g. `qup,wqp`.
        #[arg(long, value_delimiter = ',')]
        compare: Vec<PunctureChoice>,
    },
    /// Degradation map of an index set.
    Propagate {
        #[arg(long)]
        n: u32,
        /// Bit-channel indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<u32>,
        /// Treat `--set` as coded-symbol positions and bit-reverse them first.
        #[arg(long)]
        coded: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polar transform of a `u` vector, written as a golden vector `{n, u, x}`.
    Encode {
        /// Bits of `u`, comma separated; the length must be a power of two.
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo FER/BER sweep.
    Simulate(CodeArgs),
    /// Run two or more configurations over one sweep and write a joint CSV.
    Compare {
        #[command(flatten)]
        code: CodeArgs,
        /// Further config files; each is run as given.
        #[arg(long = "with")]
        with: Vec<PathBuf>,
        /// Puncturing schemes to run with the base configuration.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<PunctureChoice>,
    },
}

#[derive(Args, Clone, Default)]
struct CodeArgs {
    /// TOML config; flags given on the command line override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code length exponent, `N = 2^n`.
    #[arg(long)]
    n: Option<u32>,
    /// Message bits, CRC excluded.
    #[arg(long)]
    k: Option<usize>,
    /// none, 8 or 16.
    #[arg(long)]
    crc: Option<String>,
    /// bec[:eps], ga[:design Eb/N0 dB] or pw[:beta].
    #[arg(long)]
    construction: Option<ConstructionChoice>,
    /// none, qup, wqp or custom.
    #[arg(long)]
    puncture: Option<PunctureChoice>,
    #[arg(long)]
    q: Option<usize>,
    /// File of coded positions for `--puncture custom`.
    #[arg(long)]
    custom_file: Option<PathBuf>,
    /// sc, scl or scl:L.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    check_node: Option<CheckNodeChoice>,
    /// awgn (sweep in Eb/N0 dB) or bec (sweep in erasure probability).
    #[arg(long)]
    channel: Option<ChannelChoice>,
    /// Comma separated points, or `start:step:stop`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    /// Output file; `.csv` selects CSV where applicable, otherwise JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let bad = |e: &dyn std::fmt::Display| Error::Config(format!("sweep `{s}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(&e)))
            .collect::<Result<_>>()?;
        let (start, step, stop) = (v[0], v[1], v[2]);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad(&"need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| bad(&e)))
        .collect()
}

impl CodeArgs {
    fn config(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimConfig::load(path)?,
            None => {
                let n = self
                    .n
                    .ok_or_else(|| Error::Config("--n is required without --config".into()))?;
                let k = self
                    .k
                    .ok_or_else(|| Error::Config("--k is required without --config".into()))?;
                SimConfig::new(n, k, ConstructionChoice::Ga(None), Vec::new())
            }
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(c) = &self.crc {
            cfg.crc = parse_optional_crc(c)?;
        }
        if let Some(c) = self.construction {
            cfg.construction = c;
        }
        if let Some(p) = self.puncture {
            cfg.puncture = p;
        }
        if let Some(q) = self.q {
            cfg.q = q;
        }
        if let Some(f) = &self.custom_file {
            cfg.custom_file = Some(f.clone());
            cfg.custom_positions = None;
        }
        if let Some(d) = &self.decoder {
            let (kind, list) = match d.split_once(':') {
                Some((k, l)) => (k, Some(l)),
                None => (d.as_str(), None),
            };
            cfg.decoder = kind.parse()?;
            if let Some(l) = list {
                cfg.list_size = l
                    .parse()
                    .map_err(|e| Error::Config(format!("decoder `{d}`: {e}")))?;
            }
        }
        if let Some(l) = self.list_size {
            cfg.list_size = l;
        }
        if let Some(c) = self.check_node {
            cfg.check_node = c;
        }
        if let Some(c) = self.channel {
            cfg.channel = c;
        }
        if let Some(s) = &self.sweep {
            cfg.sweep = parse_sweep(s)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.max_frames {
            cfg.stop.max_frames = m;
        }
        if let Some(m) = self.min_frame_errors {
            cfg.stop.min_frame_errors = m;
        }
        Ok(cfg)
    }

    /// Config for commands that build a code but do not simulate.
    fn design_config(&self) -> Result<SimConfig> {
        let mut cfg = self.config()?;
        if cfg.sweep.is_empty() {
            match cfg.construction {
                ConstructionChoice::Ga(None) => {
                    return Err(Error::Config(
                        "ga needs a design point: use ga:<Eb/N0 dB> or give --sweep".into(),
                    ))
                }
                ConstructionChoice::Bec(None) => {
                    return Err(Error::Config(
                        "bec needs an erasure probability: use bec:<eps> or give --sweep".into(),
                    ))
                }
                _ => cfg.sweep = vec![0.0],
            }
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    n: u32,
    method: polarpunct::Method,
    params: &'a BTreeMap<String, f64>,
    metric: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    error_prob: Option<&'a [f64]>,
    #[serde(rename = "K")]
    k: usize,
    crc_bits: usize,
    #[serde(rename = "I")]
    info_set: &'a [u32],
    #[serde(rename = "F")]
    frozen_set: &'a [u32],
}

#[derive(Serialize)]
struct PunctureOutput {
    pattern: PuncturePattern,
    /// Absent for constructions without error probabilities (PW).
    report: Option<PatternReport>,
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            // a closed pipe (`| head`) is not an error
            if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    write_text(out, &serde_json::to_string_pretty(value)?)
}

fn puncture_output(prep: &Prepared) -> PunctureOutput {
    let report = match analyze_pattern(&prep.pattern, &prep.spec, &prep.profile) {
        Ok(r) => Some(r),
        Err(e) => {
            eprintln!("note: {e}");
            None
        }
    };
    PunctureOutput {
        pattern: prep.pattern.clone(),
        report,
    }
}

fn run_and_report(cfg: &SimConfig) -> Result<SimResult> {
    eprintln!(
        "n = {}, K = {}, puncture = {:?}, Q = {}, decoder = {:?}",
        cfg.n, cfg.k, cfg.puncture, cfg.q, cfg.decoder
    );
    run_sweep_with(cfg, |p| {
        eprintln!(
            "  {:>8} frames {:>7} errors {:>6} FER {:.3e} BER {:.3e} ({:.1} s)",
            p.param, p.frames, p.frame_errors, p.fer, p.ber, p.wall_time_s
        )
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct(args) => {
            let prep = prepare(&args.design_config()?)?;
            let p = &prep.profile;
            write_json(
                args.out.as_deref(),
                &ConstructOutput {
                    n: p.n,
                    method: p.method,
                    params: &p.params,
                    metric: &p.metric,
                    error_prob: p.error_prob.as_deref(),
                    k: prep.spec.k,
                    crc_bits: prep.spec.crc_bits,
                    info_set: &prep.spec.info_set,
                    frozen_set: &prep.spec.frozen_set,
                },
            )
        }
        Command::Puncture { code, compare } => {
            let base = code.design_config()?;
            if compare.is_empty() {
                return write_json(code.out.as_deref(), &puncture_output(&prepare(&base)?));
            }
            let mut reports = BTreeMap::new();
            let mut ordered = Vec::new();
            for scheme in compare {
                let mut cfg = base.clone();
                cfg.puncture = scheme;
                let out = puncture_output(&prepare(&cfg)?);
                ordered.push(out.report.clone());
                reports.insert(format!("{scheme:?}").to_lowercase(), out);
            }
            let comparison = match (ordered.first(), ordered.get(1)) {
                (Some(Some(a)), Some(Some(b))) => Some(compare_patterns(a, b)?),
                _ => None,
            };
            #[derive(Serialize)]
            struct Side {
                patterns: BTreeMap<String, PunctureOutput>,
                /// First scheme minus second.
                comparison: Option<polarpunct::puncture::PatternComparison>,
            }
            write_json(
                code.out.as_deref(),
                &Side {
                    patterns: reports,
                    comparison,
                },
            )
        }
        Command::Propagate { n, set, coded, out } => {
            let sources: Vec<u32> = if coded {
                if let Some(bad) = set.iter().find(|&&c| n > 31 || c >= 1 << n) {
                    return Err(Error::Config(format!("position {bad} outside [0, 2^{n})")));
                }
                polarpunct::bitops::reverse_all(&set, n)
            } else {
                set
            };
            let map = propagate(&LevelSet::initial(sources, n)?)?;
            write_json(out.as_deref(), &map)
        }
        Command::Encode { u, out } => write_json(out.as_deref(), &EncodingVector::from_u(u)?),
        Command::Simulate(args) => {
            let cfg = args.config()?;
            let result = run_and_report(&cfg)?;
            match &args.out {
                Some(path) => emit(&result, path),
                None => write_text(None, &render(&result, OutputFormat::Json)?),
            }
        }
        Command::Compare {
            code,
            with,
            schemes,
        } => {
            let mut configs = Vec::new();
            if code.config.is_some() || code.n.is_some() {
                let base = code.config()?;
                if schemes.is_empty() {
                    configs.push(base);
                } else {
                    for s in &schemes {
                        let mut cfg = base.clone();
                        cfg.puncture = *s;
                        configs.push(cfg);
                    }
                }
            }
            for path in &with {
                configs.push(SimConfig::load(path)?);
            }
            if configs.len() < 2 {
                return Err(Error::Config(
                    "compare needs two runs: --schemes a,b or extra --with configs".into(),
                ));
            }
            let results = configs
                .iter()
                .map(run_and_report)
                .collect::<Result<Vec<_>>>()?;
            match code.out.as_deref() {
                Some(path) if OutputFormat::from_path(path) == OutputFormat::Json => {
                    write_json(Some(path), &results)
                }
                out => write_text(out, compare_csv(&results).trim_end()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
