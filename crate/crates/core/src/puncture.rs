//! Puncturing patterns for a fixed information set and their diagnostics.
//!
//! A pattern is described in two domains: the source set `Q_0` of bit-channel
//! indices and the coded set `pi{Q_0}` of coded symbols that are not sent. The
//! destination set `Q_n` is what the puncture propagation reaches, i.e. the bit
//! channels that end up punctured.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitops::{check_width, reverse_all};
use crate::construct::{PolarCodeSpec, ReliabilityProfile};
use crate::degrade::{propagate_puncture, LevelSet, PropagationMap};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    /// Quasi-uniform puncturing: `Q_0 = {0, ..., Q-1}`.
    Qup,
    /// Worst-quality puncturing: the `Q` worst frozen bit channels.
    Wqp,
    /// Caller-supplied coded positions.
    Custom,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Qup => "QUP",
            Scheme::Wqp => "WQP",
            Scheme::Custom => "CUSTOM",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qup" => Ok(Scheme::Qup),
            "wqp" => Ok(Scheme::Wqp),
            "custom" => Ok(Scheme::Custom),
            other => Err(invalid(format!("unknown puncturing scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuncturePattern {
    pub scheme: Scheme,
    pub n: u32,
    #[serde(rename = "Q")]
    pub q: usize,
    /// `Q_0`, ascending.
    pub source_set: Vec<u32>,
    /// `pi{Q_0}`, ascending.
    pub coded_set: Vec<u32>,
    /// `Q_n`, ascending.
    pub destination_set: Vec<u32>,
    pub propagation: PropagationMap,
}

impl PuncturePattern {
    /// Pattern from a bit-channel-domain source set.
    pub fn from_source_set(
        scheme: Scheme,
        n: u32,
        source: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        check_width(n)?;
        let q0 = LevelSet::initial(source, n)?;
        let size = 1usize << n;
        if q0.len() >= size {
            return Err(invalid(format!(
                "puncturing {} of {size} symbols leaves nothing to send",
                q0.len()
            )));
        }
        let propagation = propagate_puncture(&q0)?;
        let mut coded_set = reverse_all(q0.indices(), n);
        coded_set.sort_unstable();
        Ok(Self {
            scheme,
            n,
            q: q0.len(),
            source_set: q0.indices().to_vec(),
            coded_set,
            destination_set: propagation.destinations().into_iter().collect(),
            propagation,
        })
    }

    /// Pattern from the coded-symbol positions a transmitter drops.
    pub fn custom(n: u32, coded_positions: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_width(n)?;
        let coded: Vec<u32> = coded_positions.into_iter().collect();
        Self::from_source_set(Scheme::Custom, n, reverse_all(&coded, n))
    }

    /// No puncturing.
    pub fn none(n: u32) -> Result<Self> {
        Self::from_source_set(Scheme::Custom, n, [])
    }

    pub fn block_len(&self) -> usize {
        1usize << self.n
    }

    /// Transmitted length `M = N - Q`.
    pub fn transmitted_len(&self) -> usize {
        self.block_len() - self.q
    }

    pub fn coded_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.block_len()];
        for &c in &self.coded_set {
            mask[c as usize] = true;
        }
        mask
    }
}

/// Quasi-uniform puncturing of `q` coded symbols.
pub fn qup_pattern(n: u32, q: usize) -> Result<PuncturePattern> {
    check_width(n)?;
    let size = 1usize << n;
    if q == 0 || q >= size {
        return Err(invalid(format!("QUP needs 0 < Q < N = {size}, got {q}")));
    }
    PuncturePattern::from_source_set(Scheme::Qup, n, 0..q as u32)
}

/// Frozen set in ascending quality order (worst first).
pub fn frozen_by_ascending_quality(spec: &PolarCodeSpec, profile: &ReliabilityProfile) -> Vec<u32> {
    let mut frozen = spec.frozen_set.clone();
    frozen.sort_by(|&a, &b| profile.compare(a as usize, b as usize));
    frozen
}

/// Worst-quality puncturing: the `q` lowest-quality frozen bit channels, so no
/// information bit channel is punctured.
pub fn wqp_pattern(
    spec: &PolarCodeSpec,
    profile: &ReliabilityProfile,
    q: usize,
) -> Result<PuncturePattern> {
    if profile.n != spec.n {
        return Err(invalid(format!(
            "profile for n = {} used with code of n = {}",
            profile.n, spec.n
        )));
    }
    let frozen = spec.frozen_set.len();
    if q == 0 {
        return Err(invalid("WQP needs Q > 0"));
    }
    if q > frozen {
        return Err(Error::UnsupportedConfiguration(format!(
            "WQP needs Q <= N - (K + r) = {frozen}, got {q}"
        )));
    }
    let order = frozen_by_ascending_quality(spec, profile);
    PuncturePattern::from_source_set(Scheme::Wqp, spec.n, order[..q].iter().copied())
}

/// Quality loss at one punctured position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitLoss {
    pub source: u32,
    pub destination: u32,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub scheme: Scheme,
    #[serde(rename = "Q")]
    pub q: usize,
    pub code_id: String,
    /// `Q_n ∩ I`.
    pub punctured_info_channels: Vec<u32>,
    /// Union bound over `I` with punctured information channels at 1/2.
    pub union_bound: f64,
    /// Union bound of the unpunctured code.
    pub design_union_bound: f64,
    /// Sum of the per-position losses.
    pub quality_loss: f64,
    pub per_bit_loss: Vec<BitLoss>,
}

/// Punctured-information detection, union bound and quality loss.
///
/// Every information channel outside `Q_n` keeps its unpunctured error
/// probability. Each punctured position contributes `0.5 - P_b(j)` for the
/// destination `j` it reaches.
pub fn analyze_pattern(
    pattern: &PuncturePattern,
    spec: &PolarCodeSpec,
    profile: &ReliabilityProfile,
) -> Result<PatternReport> {
    if pattern.n != spec.n || profile.n != spec.n {
        return Err(invalid("pattern, code and profile must share n"));
    }
    let pb = profile.error_prob.as_ref().ok_or_else(|| {
        Error::UnsupportedConfiguration(format!(
            "{} profiles carry no error probability; quality loss is undefined",
            profile.method
        ))
    })?;
    let destinations: BTreeSet<u32> = pattern.destination_set.iter().copied().collect();

    let punctured_info_channels: Vec<u32> = spec
        .info_set
        .iter()
        .copied()
        .filter(|i| destinations.contains(i))
        .collect();
    let design_union_bound: f64 = spec.info_set.iter().map(|&i| pb[i as usize]).sum();
    let union_bound = spec
        .info_set
        .iter()
        .map(|&i| {
            if destinations.contains(&i) {
                0.5
            } else {
                pb[i as usize]
            }
        })
        .sum();
    let per_bit_loss: Vec<BitLoss> = pattern
        .propagation
        .pairs
        .iter()
        .map(|p| BitLoss {
            source: p.source,
            destination: p.destination,
            loss: 0.5 - pb[p.destination as usize],
        })
        .collect();
    let quality_loss = per_bit_loss.iter().map(|b| b.loss).sum();

    Ok(PatternReport {
        scheme: pattern.scheme,
        q: pattern.q,
        code_id: code_id(spec, profile),
        punctured_info_channels,
        union_bound,
        design_union_bound,
        quality_loss,
        per_bit_loss,
    })
}

/// Identity of a (code, profile) pair; reports are only comparable when equal.
fn code_id(spec: &PolarCodeSpec, profile: &ReliabilityProfile) -> String {
    // FNV-1a over the information set and profile parameters
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for &i in &spec.info_set {
        eat(&i.to_le_bytes());
    }
    eat(profile.method.to_string().as_bytes());
    for (k, v) in &profile.params {
        eat(k.as_bytes());
        eat(&v.to_le_bytes());
    }
    format!("n{}-k{}-r{}-{h:016x}", spec.n, spec.k, spec.crc_bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternComparison {
    /// `alpha(a) - alpha(b)`.
    pub quality_loss_delta: f64,
    /// `P_B(a) - P_B(b)`.
    pub union_bound_delta: f64,
    /// `Less` when `a` is better (smaller loss, then smaller bound).
    #[serde(with = "ordering_serde")]
    pub ordering: Ordering,
}

/// Compare two reports of the same code.
pub fn compare_patterns(a: &PatternReport, b: &PatternReport) -> Result<PatternComparison> {
    if a.code_id != b.code_id {
        return Err(invalid(format!(
            "reports belong to different codes ({} vs {})",
            a.code_id, b.code_id
        )));
    }
    let quality_loss_delta = a.quality_loss - b.quality_loss;
    let union_bound_delta = a.union_bound - b.union_bound;
    let ordering = a
        .quality_loss
        .total_cmp(&b.quality_loss)
        .then(a.union_bound.total_cmp(&b.union_bound));
    Ok(PatternComparison {
        quality_loss_delta,
        union_bound_delta,
        ordering,
    })
}

mod ordering_serde {
    use std::cmp::Ordering;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(*o as i8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ordering, D::Error> {
        Ok(i8::deserialize(d)?.cmp(&0))
    }
}
