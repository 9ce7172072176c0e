//! Simulation configuration, read from TOML or assembled from CLI flags.
//!
//! ```toml
//! n = 8
//! k = 93
//! crc = "none"              # none | crc8 | crc16
//! construction = "ga"       # bec[:eps] | ga[:design Eb/N0 dB] | pw[:beta]
//! puncture = "wqp"          # none | qup | wqp | custom
//! q = 70
//! # custom_positions = [0, 128, 64]   # coded positions, with puncture = "custom"
//! # custom_file = "drop.json"         # or a JSON array / whitespace list in a file
//! decoder = "sc"            # sc | scl
//! list_size = 8
//! check_node = "exact"      # exact | minsum
//! channel = "awgn"          # awgn (sweep = Eb/N0 dB) | bec (sweep = erasure prob.)
//! sweep = [1.0, 2.0, 3.0, 4.0]
//! seed = 1
//!
//! [stop]
//! max_frames = 100000
//! min_frame_errors = 100
//! ```
//!
//! A construction without a parameter is designed at the midpoint of the sweep.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::crc::CrcPoly;
use crate::codec::CheckNode;
use crate::construct::{Construction, PW_BETA};
use crate::error::{Error, Result};

/// Construction as written in a config: `ga:X` is a design Eb/N0 in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstructionChoice {
    Bec(Option<f64>),
    Ga(Option<f64>),
    Pw(f64),
}

impl ConstructionChoice {
    /// Concrete construction for a code of rate `rate` over `sweep`.
    pub fn resolve(&self, rate: f64, sweep: &[f64]) -> Construction {
        let mid = sweep_midpoint(sweep);
        match *self {
            ConstructionChoice::Bec(e) => Construction::Bec {
                erasure: e.unwrap_or(mid),
            },
            ConstructionChoice::Ga(ebn0) => Construction::Ga {
                design_esn0_db: ebn0.unwrap_or(mid) + 10.0 * rate.log10(),
            },
            ConstructionChoice::Pw(beta) => Construction::Pw { beta },
        }
    }
}

fn sweep_midpoint(sweep: &[f64]) -> f64 {
    let lo = sweep.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sweep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        0.5 * (lo + hi)
    } else {
        0.0
    }
}

impl FromStr for ConstructionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let arg = arg
            .map(|a| {
                a.parse::<f64>()
                    .map_err(|e| Error::Config(format!("construction `{s}`: {e}")))
            })
            .transpose()?;
        match kind.to_ascii_lowercase().as_str() {
            "bec" => Ok(ConstructionChoice::Bec(arg)),
            "ga" => Ok(ConstructionChoice::Ga(arg)),
            "pw" => Ok(ConstructionChoice::Pw(arg.unwrap_or(PW_BETA))),
            other => Err(Error::Config(format!("unknown construction `{other}`"))),
        }
    }
}

impl fmt::Display for ConstructionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionChoice::Bec(None) => f.write_str("bec"),
            ConstructionChoice::Bec(Some(e)) => write!(f, "bec:{e}"),
            ConstructionChoice::Ga(None) => f.write_str("ga"),
            ConstructionChoice::Ga(Some(s)) => write!(f, "ga:{s}"),
            ConstructionChoice::Pw(b) => write!(f, "pw:{b}"),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(ConstructionChoice);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctureChoice {
    None,
    Qup,
    Wqp,
    Custom,
}

impl FromStr for PunctureChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(PunctureChoice::None),
            "qup" => Ok(PunctureChoice::Qup),
            "wqp" => Ok(PunctureChoice::Wqp),
            "custom" => Ok(PunctureChoice::Custom),
            other => Err(Error::Config(format!("unknown puncturing `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderChoice {
    Sc,
    Scl,
}

impl FromStr for DecoderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sc" => Ok(DecoderChoice::Sc),
            "scl" => Ok(DecoderChoice::Scl),
            other => Err(Error::Config(format!("unknown decoder `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelChoice {
    Awgn,
    Bec,
}

impl FromStr for ChannelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelChoice::Awgn),
            "bec" => Ok(ChannelChoice::Bec),
            other => Err(Error::Config(format!("unknown channel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckNodeChoice {
    Exact,
    Minsum,
}

impl FromStr for CheckNodeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(CheckNodeChoice::Exact),
            "minsum" | "min-sum" => Ok(CheckNodeChoice::Minsum),
            other => Err(Error::Config(format!("unknown check node `{other}`"))),
        }
    }
}

impl From<CheckNodeChoice> for CheckNode {
    fn from(c: CheckNodeChoice) -> Self {
        match c {
            CheckNodeChoice::Exact => CheckNode::Exact,
            CheckNodeChoice::Minsum => CheckNode::MinSum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
}

fn default_max_frames() -> u64 {
    100_000
}

fn default_min_frame_errors() -> u64 {
    100
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_frames: default_max_frames(),
            min_frame_errors: default_min_frame_errors(),
        }
    }
}

mod crc_serde {
    use crate::codec::crc::{parse_optional_crc, CrcPoly};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Option<CrcPoly>, s: S) -> Result<S::Ok, S::Error> {
        match c {
            Some(p) => s.collect_str(p),
            None => s.serialize_str("none"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CrcPoly>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Width(u64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Width(w) => w.to_string(),
        };
        parse_optional_crc(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: u32,
    pub k: usize,
    #[serde(default, with = "crc_serde")]
    pub crc: Option<CrcPoly>,
    pub construction: ConstructionChoice,
    #[serde(default = "default_puncture")]
    pub puncture: PunctureChoice,
    #[serde(default)]
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_positions: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_file: Option<PathBuf>,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderChoice,
    #[serde(default = "default_list_size")]
    pub list_size: usize,
    #[serde(default = "default_check_node")]
    pub check_node: CheckNodeChoice,
    #[serde(default = "default_channel")]
    pub channel: ChannelChoice,
    pub sweep: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub stop: StopRule,
}

fn default_puncture() -> PunctureChoice {
    PunctureChoice::None
}
fn default_decoder() -> DecoderChoice {
    DecoderChoice::Sc
}
fn default_list_size() -> usize {
    8
}
fn default_check_node() -> CheckNodeChoice {
    CheckNodeChoice::Exact
}
fn default_channel() -> ChannelChoice {
    ChannelChoice::Awgn
}
fn default_seed() -> u64 {
    1
}

impl SimConfig {
    /// Minimal AWGN/SC configuration; the other fields take their defaults.
    pub fn new(n: u32, k: usize, construction: ConstructionChoice, sweep: Vec<f64>) -> Self {
        Self {
            n,
            k,
            crc: None,
            construction,
            puncture: PunctureChoice::None,
            q: 0,
            custom_positions: None,
            custom_file: None,
            decoder: DecoderChoice::Sc,
            list_size: default_list_size(),
            check_node: CheckNodeChoice::Exact,
            channel: ChannelChoice::Awgn,
            sweep,
            seed: default_seed(),
            stop: StopRule::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(file), Some(dir)) = (cfg.custom_file.as_mut(), path.parent()) {
            if file.is_relative() {
                *file = dir.join(&*file);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn block_len(&self) -> usize {
        1usize << self.n
    }

    pub fn crc_bits(&self) -> usize {
        self.crc.map_or(0, |c| c.width())
    }

    /// Coded positions of a custom pattern, from the inline list or the file.
    pub fn custom_coded_positions(&self) -> Result<Vec<u32>> {
        if let Some(p) = &self.custom_positions {
            return Ok(p.clone());
        }
        let file = self.custom_file.as_ref().ok_or_else(|| {
            Error::Config("custom puncturing needs custom_positions or custom_file".into())
        })?;
        let text = std::fs::read_to_string(file)?;
        read_positions(&text)
    }

    /// Structural checks that need no construction work.
    pub fn validate(&self) -> Result<()> {
        let size = self.block_len();
        if self.n == 0 || self.n > 24 {
            return Err(Error::Config(format!("n = {} outside 1..=24", self.n)));
        }
        if self.k == 0 || self.k + self.crc_bits() > size {
            return Err(Error::Config(format!(
                "K + r = {} must lie in 1..={size}",
                self.k + self.crc_bits()
            )));
        }
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep is empty".into()));
        }
        if self.sweep.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep values must be finite".into()));
        }
        if self.channel == ChannelChoice::Bec && self.sweep.iter().any(|e| !(0.0..=1.0).contains(e))
        {
            return Err(Error::Config(
                "BEC sweep values are erasure probabilities in [0, 1]".into(),
            ));
        }
        if self.stop.max_frames == 0 {
            return Err(Error::Config("max_frames must be positive".into()));
        }
        if self.decoder == DecoderChoice::Scl && self.list_size == 0 {
            return Err(Error::Config("list_size must be positive".into()));
        }
        match self.puncture {
            PunctureChoice::None => {}
            PunctureChoice::Qup | PunctureChoice::Wqp if self.q == 0 || self.q >= size => {
                return Err(Error::Config(format!(
                    "Q = {} must satisfy 0 < Q < N = {size}",
                    self.q
                )));
            }
            PunctureChoice::Wqp if self.q > size - self.k - self.crc_bits() => {
                return Err(Error::Config(format!(
                    "WQP needs Q <= N - (K + r) = {}",
                    size - self.k - self.crc_bits()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parse a list of positions: a JSON array or whitespace/comma separated integers.
pub fn read_positions(text: &str) -> Result<Vec<u32>> {
    if let Ok(v) = serde_json::from_str::<Vec<u32>>(text) {
        return Ok(v);
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| Error::Config(format!("bad position `{t}`: {e}")))
        })
        .collect()
}
