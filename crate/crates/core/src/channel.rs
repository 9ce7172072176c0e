//! BPSK-AWGN and BEC channels, transmit-side puncturing and receive-side
//! depuncturing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::codec::{SoftFrame, LLR_SATURATION};
use crate::construct::db_to_linear;
use crate::error::{invalid, Result};
use crate::puncture::PuncturePattern;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn { ebn0_db: f64 },
    Bec { erasure: f64 },
}

/// Channel model plus the rate `R = K / M` used to turn Eb/N0 into a noise
/// variance. `K` counts message bits only, not CRC bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub rate: f64,
}

impl ChannelConfig {
    pub fn awgn(ebn0_db: f64, rate: f64) -> Result<Self> {
        Self::new(ChannelKind::Awgn { ebn0_db }, rate)
    }

    pub fn bec(erasure: f64) -> Result<Self> {
        Self::new(ChannelKind::Bec { erasure }, 1.0)
    }

    pub fn new(kind: ChannelKind, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(invalid(format!("rate {rate} outside (0, 1]")));
        }
        match kind {
            ChannelKind::Bec { erasure } if !(0.0..=1.0).contains(&erasure) => {
                return Err(invalid(format!(
                    "erasure probability {erasure} outside [0, 1]"
                )))
            }
            ChannelKind::Awgn { ebn0_db } if !ebn0_db.is_finite() && ebn0_db != f64::INFINITY => {
                return Err(invalid("Eb/N0 must be a number"))
            }
            _ => {}
        }
        Ok(Self { kind, rate })
    }

    /// `sigma^2 = 1 / (2 R Eb/N0)`; `None` for the BEC.
    pub fn noise_variance(&self) -> Option<f64> {
        match self.kind {
            ChannelKind::Awgn { ebn0_db } => Some(1.0 / (2.0 * self.rate * db_to_linear(ebn0_db))),
            ChannelKind::Bec { .. } => None,
        }
    }
}

/// Drop the coded positions of `pattern`; survivors keep ascending order.
pub fn puncture_tx(x: &[u8], pattern: &PuncturePattern) -> Result<Vec<u8>> {
    if x.len() != pattern.block_len() {
        return Err(invalid(format!(
            "codeword length {} does not match pattern N = {}",
            x.len(),
            pattern.block_len()
        )));
    }
    let mask = pattern.coded_mask();
    Ok(x.iter()
        .zip(&mask)
        .filter(|(_, &dropped)| !dropped)
        .map(|(&b, _)| b)
        .collect())
}

/// Put received LLRs back on their original positions, with 0 at punctured ones.
pub fn depuncture_rx(rx: &[f64], pattern: &PuncturePattern) -> Result<SoftFrame> {
    if rx.len() != pattern.transmitted_len() {
        return Err(invalid(format!(
            "received {} LLRs, pattern transmits M = {}",
            rx.len(),
            pattern.transmitted_len()
        )));
    }
    let mask = pattern.coded_mask();
    let mut it = rx.iter();
    let llrs = mask
        .iter()
        .map(|&dropped| {
            if dropped {
                0.0
            } else {
                *it.next().expect("length checked")
            }
        })
        .collect();
    Ok(SoftFrame { llrs })
}

/// Transmit bits over the channel, returning per-symbol LLRs.
///
/// AWGN: BPSK `0 -> +1`, `1 -> -1`, LLR `2y / sigma^2`. BEC: erased symbols get
/// LLR 0, the others `+-40`.
pub fn transmit<R: Rng + ?Sized>(tx: &[u8], cfg: &ChannelConfig, rng: &mut R) -> Vec<f64> {
    match cfg.kind {
        ChannelKind::Awgn { .. } => {
            let sigma2 = cfg.noise_variance().expect("awgn");
            let sigma = sigma2.sqrt();
            tx.iter()
                .map(|&b| {
                    let s = if b == 0 { 1.0 } else { -1.0 };
                    let noise: f64 = StandardNormal.sample(rng);
                    let y = s + sigma * noise;
                    let l = 2.0 * y / sigma2;
                    if l.is_nan() {
                        s * LLR_SATURATION
                    } else {
                        l
                    }
                })
                .collect()
        }
        ChannelKind::Bec { erasure } => tx
            .iter()
            .map(|&b| {
                if rng.random_bool(erasure) {
                    0.0
                } else if b == 0 {
                    LLR_SATURATION
                } else {
                    -LLR_SATURATION
                }
            })
            .collect(),
    }
}

/// [`transmit`] with a freshly seeded generator.
pub fn transmit_seeded(tx: &[u8], cfg: &ChannelConfig, seed: u64) -> Vec<f64> {
    transmit(tx, cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Counter-based per-frame generator: the master seed fixes the key and
/// `(point, frame)` selects the stream, so a frame's randomness does not depend
/// on which thread runs it or in which order.
pub fn frame_rng(master_seed: u64, point: u32, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(point) << 40) ^ frame);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puncture::PuncturePattern;

    #[test]
    fn puncture_identity_and_positions() {
        let none = PuncturePattern::none(3).unwrap();
        let x = vec![1, 0, 1, 1, 0, 0, 1, 0];
        assert_eq!(puncture_tx(&x, &none).unwrap(), x);

        let p = PuncturePattern::custom(3, [0, 1, 2, 4]).unwrap();
        let x: Vec<u8> = vec![0, 0, 0, 1, 0, 1, 1, 0];
        assert_eq!(puncture_tx(&x, &p).unwrap(), vec![1, 1, 1, 0]);
        assert!(puncture_tx(&x[..4], &p).is_err());
    }

    #[test]
    fn depuncture_placement() {
        let p = PuncturePattern::custom(3, [0, 1, 2, 4]).unwrap();
        let soft = depuncture_rx(&[1.0, 2.0, 3.0, 4.0], &p).unwrap();
        assert_eq!(soft.llrs, vec![0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 3.0, 4.0]);
        assert!(depuncture_rx(&[1.0], &p).is_err());
        let none = PuncturePattern::none(2).unwrap();
        assert_eq!(
            depuncture_rx(&[1.0, -2.0, 3.0, 4.0], &none).unwrap().llrs,
            vec![1.0, -2.0, 3.0, 4.0]
        );
    }

    #[test]
    fn noiseless_limit_signs() {
        let cfg = ChannelConfig::awgn(80.0, 0.5).unwrap();
        let tx: Vec<u8> = (0..64).map(|i| (i % 3 == 0) as u8).collect();
        let l = transmit_seeded(&tx, &cfg, 7);
        for (b, l) in tx.iter().zip(&l) {
            assert_eq!(*b, u8::from(*l < 0.0));
        }
    }

    #[test]
    fn bec_all_erased() {
        let cfg = ChannelConfig::bec(1.0).unwrap();
        assert!(transmit_seeded(&[0, 1, 1, 0], &cfg, 1)
            .iter()
            .all(|&l| l == 0.0));
    }

    #[test]
    fn bec_erasure_fraction() {
        let cfg = ChannelConfig::bec(0.3).unwrap();
        let tx = vec![0u8; 100_000];
        let l = transmit_seeded(&tx, &cfg, 11);
        let frac = l.iter().filter(|&&v| v == 0.0).count() as f64 / tx.len() as f64;
        assert!((frac - 0.3).abs() < 0.01, "{frac}");
    }

    #[test]
    fn config_validation() {
        assert!(ChannelConfig::bec(1.2).is_err());
        assert!(ChannelConfig::awgn(1.0, 0.0).is_err());
        assert!(ChannelConfig::awgn(1.0, 1.5).is_err());
        let c = ChannelConfig::awgn(0.0, 0.5).unwrap();
        assert!((c.noise_variance().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_streams_are_distinct_and_repeatable() {
        let a: u64 = frame_rng(5, 0, 0).random();
        let b: u64 = frame_rng(5, 0, 1).random();
        let c: u64 = frame_rng(5, 1, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, frame_rng(5, 0, 0).random::<u64>());
    }
}
