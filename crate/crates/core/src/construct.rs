//! Bit-channel reliability profiles and information-set selection.
//!
//! Index `i` with MSB-first expansion `(b_1, ..., b_n)` is the channel obtained
//! by applying, at level `k`, the "minus" (check) transform when `b_k = 0` and
//! the "plus" (variable) transform when `b_k = 1`.
//!
//! All three constructions produce a profile that is monotone along the
//! covering order: if `i` covers `j`, then `j` is never strictly better than
//! `i`. Reliability ties are broken in favour of the higher index, which keeps
//! that monotonicity intact in the total order used for selection.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitops::check_width;
use crate::codec::crc::CrcPoly;
use crate::error::{invalid, Error, Result};

/// Construction method of a [`ReliabilityProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    BecExact,
    Ga,
    Pw,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BecExact => "BEC_EXACT",
            Method::Ga => "GA",
            Method::Pw => "PW",
        })
    }
}

/// Per-bit-channel quality metric.
///
/// `metric` holds the Bhattacharyya parameter for BEC (lower is better), the
/// LLR mean for GA and the polarization weight for PW (higher is better).
/// `error_prob` is present for BEC (`Z / 2`) and GA (`Q(sqrt(m / 2))`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub n: u32,
    pub method: Method,
    pub params: BTreeMap<String, f64>,
    pub metric: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_prob: Option<Vec<f64>>,
}

impl ReliabilityProfile {
    pub fn len(&self) -> usize {
        self.metric.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metric.is_empty()
    }

    /// Larger is better, regardless of method.
    #[inline]
    pub fn quality(&self, i: usize) -> f64 {
        match self.method {
            Method::BecExact => -self.metric[i],
            Method::Ga | Method::Pw => self.metric[i],
        }
    }

    /// Total reliability order on indices: `Greater` means `i` is more reliable
    /// than `j`. Equal qualities rank the higher index as more reliable.
    pub fn compare(&self, i: usize, j: usize) -> Ordering {
        self.quality(i).total_cmp(&self.quality(j)).then(i.cmp(&j))
    }

    /// Indices from most to least reliable.
    pub fn descending_order(&self) -> Vec<u32> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.compare(b, a));
        idx.into_iter().map(|i| i as u32).collect()
    }

    pub fn has_error_prob(&self) -> bool {
        self.error_prob.is_some()
    }
}

/// A construction recipe: which method, with which parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Construction {
    /// Exact Bhattacharyya recursion for a BEC with this erasure probability.
    Bec { erasure: f64 },
    /// Gaussian approximation at a design Es/N0 in dB.
    Ga { design_esn0_db: f64 },
    /// Polarization weight with expansion base `beta`.
    Pw { beta: f64 },
}

/// `2^(1/4)`, the usual polarization-weight base.
pub const PW_BETA: f64 = 1.189_207_115_002_721;

impl Construction {
    pub fn build(&self, n: u32) -> Result<ReliabilityProfile> {
        match *self {
            Construction::Bec { erasure } => bec_bhattacharyya(n, erasure),
            Construction::Ga { design_esn0_db } => ga_reliability(n, design_esn0_db),
            Construction::Pw { beta } => pw_reliability(n, beta),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Bec { erasure } => write!(f, "bec:{erasure}"),
            Construction::Ga { design_esn0_db } => write!(f, "ga:{design_esn0_db}"),
            Construction::Pw { beta } => write!(f, "pw:{beta}"),
        }
    }
}

/// Exact Bhattacharyya parameters of the `2^n` bit channels of a BEC(`erasure`).
pub fn bec_bhattacharyya(n: u32, erasure: f64) -> Result<ReliabilityProfile> {
    check_width_or_zero(n)?;
    if !(0.0..=1.0).contains(&erasure) {
        return Err(invalid(format!(
            "erasure probability {erasure} outside [0, 1]"
        )));
    }
    let z = polarize(n, erasure, |z| {
        // 1 - (1 - z)^2 evaluated step by step is monotone under rounding; the
        // clamps keep minus >= z >= plus, which rounding alone would not.
        let minus = (1.0 - (1.0 - z) * (1.0 - z)).max(z);
        let plus = (z * z).min(z);
        Ok((minus, plus))
    })?;
    let error_prob = z.iter().map(|&v| v / 2.0).collect();
    Ok(ReliabilityProfile {
        n,
        method: Method::BecExact,
        params: BTreeMap::from([("erasure".to_string(), erasure)]),
        metric: z,
        error_prob: Some(error_prob),
    })
}

/// Gaussian-approximation density evolution at design Es/N0 (dB).
///
/// BPSK with unit symbol energy gives `sigma^2 = 1 / (2 Es/N0)` and initial LLR
/// mean `2 / sigma^2`.
pub fn ga_reliability(n: u32, design_esn0_db: f64) -> Result<ReliabilityProfile> {
    check_width_or_zero(n)?;
    if !design_esn0_db.is_finite() {
        return Err(invalid("design SNR must be finite"));
    }
    let sigma2 = 1.0 / (2.0 * db_to_linear(design_esn0_db));
    let means = polarize(n, 2.0 / sigma2, |m| Ok((ga_check_mean(m)?, 2.0 * m)))?;
    let error_prob = means.iter().map(|&m| ga_error_prob(m)).collect();
    Ok(ReliabilityProfile {
        n,
        method: Method::Ga,
        params: BTreeMap::from([("design_esn0_db".to_string(), design_esn0_db)]),
        metric: means,
        error_prob: Some(error_prob),
    })
}

/// Polarization weight `sum_j b_j beta^j` (LSB at `j = 0`). No error probability.
pub fn pw_reliability(n: u32, beta: f64) -> Result<ReliabilityProfile> {
    check_width_or_zero(n)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("PW base must be positive, got {beta}")));
    }
    let powers: Vec<f64> = (0..n).map(|j| beta.powi(j as i32)).collect();
    let size = 1usize << n;
    let metric = (0..size)
        .map(|i| {
            powers
                .iter()
                .enumerate()
                .filter(|(j, _)| (i >> j) & 1 == 1)
                .map(|(_, p)| p)
                .sum()
        })
        .collect();
    Ok(ReliabilityProfile {
        n,
        method: Method::Pw,
        params: BTreeMap::from([("beta".to_string(), beta)]),
        metric,
        error_prob: None,
    })
}

fn check_width_or_zero(n: u32) -> Result<()> {
    if n == 0 {
        Ok(())
    } else {
        check_width(n)?;
        if n > 24 {
            return Err(invalid(format!(
                "n = {n} too large for an explicit profile"
            )));
        }
        Ok(())
    }
}

/// Apply the one-step transform `n` times. Children of index `i` at each level
/// are `2i` (minus) and `2i + 1` (plus), so the first level sets the MSB.
fn polarize<F>(n: u32, init: f64, step: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let mut cur = vec![init];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &v in &cur {
            let (minus, plus) = step(v)?;
            next.push(minus);
            next.push(plus);
        }
        cur = next;
    }
    Ok(cur)
}

pub(crate) fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

// --- Gaussian approximation -------------------------------------------------

const PHI_A: f64 = 0.4527;
const PHI_B: f64 = 0.86;
const PHI_C: f64 = 0.0218;
const PHI_SPLIT: f64 = 10.0;

fn ln_phi_small(x: f64) -> f64 {
    (-PHI_A * x.powf(PHI_B) + PHI_C).min(0.0)
}

/// `ln phi(x)` for the two-regime approximation of
/// `phi(x) = 1 - E[tanh(u / 2)]`, `u ~ N(x, 2x)`.
///
/// Exponential fit below the split, asymptotic form above it. The asymptotic
/// branch starts slightly above the fitted one, so it is capped at the fitted
/// value at the split to keep `phi` non-increasing.
pub fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= PHI_SPLIT {
        ln_phi_small(x)
    } else {
        let asym = 0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln();
        asym.min(ln_phi_small(PHI_SPLIT))
    }
}

pub fn phi(x: f64) -> f64 {
    ln_phi(x).exp()
}

/// Smallest `x >= 0` with `ln_phi(x) <= target`.
///
/// Bisection runs over the bit patterns of non-negative doubles, which are
/// ordered like the values themselves, so the result is exact to one ulp and is
/// monotone in `target`.
pub fn phi_inverse_ln(target: f64) -> Result<f64> {
    if target.is_nan() || target > 0.0 {
        return Err(Error::Internal(format!(
            "phi inverse: target ln(phi) = {target} outside (-inf, 0]"
        )));
    }
    if ln_phi(0.0) <= target {
        return Ok(0.0);
    }
    let mut lo = 0u64;
    let mut hi = f64::MAX.to_bits();
    if ln_phi(f64::from_bits(hi)) > target {
        return Err(Error::Internal(format!(
            "phi inverse did not bracket target ln(phi) = {target}"
        )));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ln_phi(f64::from_bits(mid)) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(f64::from_bits(hi))
}

/// Mean of the check-node output: `phi^-1(1 - (1 - phi(m))^2)`.
pub fn ga_check_mean(m: f64) -> Result<f64> {
    let lp = ln_phi(m);
    let p = lp.exp();
    // 1 - (1 - p)^2 = p (2 - p), taken in the log domain
    let target = lp + (2.0 - p).ln();
    Ok(phi_inverse_ln(target.min(0.0))?.min(m))
}

/// `Q(sqrt(m / 2))`, the error probability of a consistent Gaussian LLR with mean `m`.
pub fn ga_error_prob(m: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(m.max(0.0).sqrt() / 2.0)
}

// --- code specification -------------------------------------------------------

/// A polar code with a fixed information set.
///
/// `info_set` holds `k + crc_bits` indices in ascending order; the message and
/// its CRC are placed there in that order. `frozen_set` is the complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCodeSpec {
    pub n: u32,
    #[serde(rename = "N")]
    pub block_len: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub crc_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc: Option<CrcPoly>,
    #[serde(rename = "I")]
    pub info_set: Vec<u32>,
    #[serde(rename = "F")]
    pub frozen_set: Vec<u32>,
    pub method: Option<Method>,
}

impl PolarCodeSpec {
    /// Build a spec from an explicit information set.
    pub fn with_info_set(
        n: u32,
        k: usize,
        crc: Option<CrcPoly>,
        info_set: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        check_width(n)?;
        let block_len = 1usize << n;
        let crc_bits = crc.map_or(0, |c| c.width());
        let mut info: Vec<u32> = info_set.into_iter().collect();
        info.sort_unstable();
        info.dedup();
        if info.iter().any(|&i| i as usize >= block_len) {
            return Err(invalid("information index out of range"));
        }
        if k == 0 || info.len() != k + crc_bits {
            return Err(invalid(format!(
                "information set has {} entries, expected K + r = {}",
                info.len(),
                k + crc_bits
            )));
        }
        let mut mask = vec![false; block_len];
        for &i in &info {
            mask[i as usize] = true;
        }
        let frozen_set = (0..block_len as u32)
            .filter(|&i| !mask[i as usize])
            .collect();
        Ok(Self {
            n,
            block_len,
            k,
            crc_bits,
            crc,
            info_set: info,
            frozen_set,
            method: None,
        })
    }

    /// `K` information bits plus an optional CRC on the `K + r` most reliable
    /// channels of `profile`.
    pub fn from_profile(
        profile: &ReliabilityProfile,
        k: usize,
        crc: Option<CrcPoly>,
    ) -> Result<Self> {
        let count = k + crc.map_or(0, |c| c.width());
        let size = profile.len();
        if k == 0 || count > size {
            return Err(invalid(format!(
                "information count {count} outside 1..={size}"
            )));
        }
        let order = profile.descending_order();
        let mut spec = Self::with_info_set(profile.n, k, crc, order[..count].iter().copied())?;
        spec.method = Some(profile.method);
        Ok(spec)
    }

    pub fn frozen_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.block_len];
        for &i in &self.info_set {
            mask[i as usize] = false;
        }
        mask
    }

    /// `K + r`.
    pub fn info_len(&self) -> usize {
        self.info_set.len()
    }
}

/// Fixed information set of the `count` most reliable channels, no CRC.
pub fn select_information_set(profile: &ReliabilityProfile, count: usize) -> Result<PolarCodeSpec> {
    if profile.n == 0 {
        return Err(invalid("a code needs n >= 1"));
    }
    PolarCodeSpec::from_profile(profile, count, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitops::covers_raw;

    const BEC_N3: [f64; 8] = [
        0.99609375, 0.87890625, 0.80859375, 0.31640625, 0.68359375, 0.19140625, 0.12109375,
        0.00390625,
    ];

    #[test]
    fn bec_table() {
        let p = bec_bhattacharyya(3, 0.5).unwrap();
        assert_eq!(p.metric, BEC_N3.to_vec());
        assert_eq!(p.descending_order(), vec![7, 6, 5, 3, 4, 2, 1, 0]);
        let ep = p.error_prob.unwrap();
        assert_eq!(ep[3], BEC_N3[3] / 2.0);
    }

    #[test]
    fn bec_trivial_channels() {
        assert_eq!(bec_bhattacharyya(2, 0.0).unwrap().metric, vec![0.0; 4]);
        assert_eq!(bec_bhattacharyya(1, 1.0).unwrap().metric, vec![1.0; 2]);
        assert!(bec_bhattacharyya(2, 1.5).is_err());
        assert!(bec_bhattacharyya(2, -0.1).is_err());
    }

    #[test]
    fn bec_capacity_is_conserved() {
        for n in 1..=12 {
            for &eps in &[0.1, 0.25, 0.5, 0.75] {
                let p = bec_bhattacharyya(n, eps).unwrap();
                let total: f64 = p.metric.iter().map(|z| 1.0 - z).sum();
                let expect = (1u64 << n) as f64 * (1.0 - eps);
                assert!(
                    (total - expect).abs() <= 1e-12 * expect.max(1.0) * n as f64,
                    "n={n} eps={eps}"
                );
            }
        }
    }

    #[test]
    fn pw_order_and_extremes() {
        let p = pw_reliability(3, PW_BETA).unwrap();
        assert_eq!(p.descending_order(), vec![7, 6, 5, 3, 4, 2, 1, 0]);
        assert_eq!(p.metric[0], 0.0);
        let top: f64 = (0..3).map(|j| PW_BETA.powi(j)).sum();
        assert!((p.metric[7] - top).abs() < 1e-15);
        assert!(p.error_prob.is_none());
        assert!(pw_reliability(3, 0.0).is_err());
    }

    #[test]
    fn ga_single_level() {
        let esn0 = 10.0 * 0.5f64.log10();
        let p0 = ga_reliability(0, esn0).unwrap();
        assert!((p0.metric[0] - 2.0).abs() < 1e-12);
        let p1 = ga_reliability(1, esn0).unwrap();
        assert_eq!(p1.metric[1], 2.0 * p0.metric[0]);
        let expect = phi_inverse_ln((1.0 - (1.0 - phi(p0.metric[0])).powi(2)).ln()).unwrap();
        assert!((p1.metric[0] - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn phi_inverse_roundtrip() {
        for &x in &[0.05, 0.5, 1.0, 3.0, 9.99, 10.5, 30.0, 300.0, 5000.0] {
            let inv = phi_inverse_ln(ln_phi(x)).unwrap();
            assert!((inv - x).abs() <= 1e-9 * x, "x={x} inv={inv}");
        }
        assert!(phi_inverse_ln(f64::NAN).is_err());
        assert!(phi_inverse_ln(0.5).is_err());
    }

    #[test]
    fn phi_is_non_increasing() {
        let mut prev = ln_phi(0.0);
        let mut x = 0.0;
        while x < 60.0 {
            x += 0.001;
            let v = ln_phi(x);
            assert!(v <= prev, "x={x}");
            prev = v;
        }
    }

    #[test]
    fn ga_lower_mean_doubles_everywhere() {
        let n = 6;
        let p = ga_reliability(n, 1.0).unwrap();
        let parent = ga_reliability(n - 1, 1.0).unwrap();
        for i in 0..parent.len() {
            assert_eq!(p.metric[2 * i + 1], 2.0 * parent.metric[i]);
        }
    }

    #[test]
    fn ga_high_snr_limit() {
        let p = ga_reliability(6, 60.0).unwrap();
        assert!(p.error_prob.unwrap().iter().all(|&e| e < 1e-12));
    }

    #[test]
    fn ga_error_prob_strictly_decreasing() {
        let mut prev = ga_error_prob(0.0);
        assert_eq!(prev, 0.5);
        for k in 1..400 {
            let e = ga_error_prob(k as f64 * 0.25);
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn monotone_along_covering() {
        for n in 1..=6u32 {
            let profiles = [
                bec_bhattacharyya(n, 0.3).unwrap(),
                bec_bhattacharyya(n, 0.9).unwrap(),
                pw_reliability(n, PW_BETA).unwrap(),
                ga_reliability(n, -2.0).unwrap(),
                ga_reliability(n, 4.0).unwrap(),
            ];
            for p in &profiles {
                for i in 0..(1u32 << n) {
                    for j in 0..(1u32 << n) {
                        if covers_raw(i, j) {
                            assert!(
                                p.quality(j as usize) <= p.quality(i as usize),
                                "{:?} n={n} i={i} j={j}",
                                p.method
                            );
                            assert_ne!(p.compare(j as usize, i as usize), Ordering::Greater);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn select_examples() {
        let bec = bec_bhattacharyya(3, 0.5).unwrap();
        let spec = select_information_set(&bec, 4).unwrap();
        assert_eq!(spec.info_set, vec![3, 5, 6, 7]);
        assert_eq!(spec.frozen_set, vec![0, 1, 2, 4]);

        let all = select_information_set(&bec, 8).unwrap();
        assert_eq!(all.info_set.len(), 8);
        assert!(all.frozen_set.is_empty());

        let pw = pw_reliability(3, PW_BETA).unwrap();
        assert_eq!(
            select_information_set(&pw, 4).unwrap().info_set,
            vec![3, 5, 6, 7]
        );

        assert!(select_information_set(&bec, 0).is_err());
        assert!(select_information_set(&bec, 9).is_err());
    }

    #[test]
    fn select_with_crc_counts_crc_bits() {
        let p = ga_reliability(8, 0.0).unwrap();
        let spec = PolarCodeSpec::from_profile(&p, 93, Some(CrcPoly::Crc8)).unwrap();
        assert_eq!(spec.info_set.len(), 101);
        assert_eq!(spec.frozen_set.len(), 155);
        assert_eq!(spec.crc_bits, 8);
    }
}
