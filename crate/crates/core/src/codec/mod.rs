//! Polar encoder `x = u G_N`, `G_N = B_N F^{(x)n}`, with CRC attachment and
//! SC / CRC-aided SCL decoding.

pub mod crc;
mod decoder;

use serde::{Deserialize, Serialize};

pub use crc::{crc_append, crc_check, CrcPoly};
pub use decoder::{sc_decode, scl_decode, CheckNode, PathMetric, ScDecoder, SclDecoder};

use crate::bitops::reverse_bits;
use crate::construct::PolarCodeSpec;
use crate::error::{invalid, Result};

/// LLR magnitude used for "certain" symbols.
pub const LLR_SATURATION: f64 = 40.0;

fn log2_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(invalid(format!("length {len} is not a power of two >= 2")));
    }
    Ok(len.trailing_zeros())
}

/// Encode `u` into a fresh codeword.
pub fn encode(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    encode_in_place(&mut x)?;
    Ok(x)
}

/// In-place polar transform. The map is a GF(2) involution.
pub fn encode_in_place(bits: &mut [u8]) -> Result<()> {
    let n = log2_len(bits.len())?;
    // w = u F^{(x)n}: w_j = xor of u_i over i covering j
    let mut half = 1;
    while half < bits.len() {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half <<= 1;
    }
    bit_reverse_permute(bits, n);
    Ok(())
}

/// `x_k <- x_{pi(k)}`, in place.
pub(crate) fn bit_reverse_permute<T>(data: &mut [T], n: u32) {
    for k in 0..data.len() {
        let r = reverse_bits(k as u32, n) as usize;
        if k < r {
            data.swap(k, r);
        }
    }
}

/// An uncoded frame: message bits, their CRC, and the `u` vector with both
/// placed on the information set in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageFrame {
    pub info_bits: Vec<u8>,
    pub crc_bits: Vec<u8>,
    pub u_vector: Vec<u8>,
}

impl MessageFrame {
    pub fn build(info: &[u8], spec: &PolarCodeSpec) -> Result<Self> {
        if info.len() != spec.k {
            return Err(invalid(format!(
                "message has {} bits, code expects K = {}",
                info.len(),
                spec.k
            )));
        }
        let crc_bits = match spec.crc {
            Some(poly) => poly.remainder(info),
            None => Vec::new(),
        };
        let mut u_vector = vec![0u8; spec.block_len];
        for (&pos, &bit) in spec.info_set.iter().zip(info.iter().chain(crc_bits.iter())) {
            u_vector[pos as usize] = bit & 1;
        }
        Ok(Self {
            info_bits: info.to_vec(),
            crc_bits,
            u_vector,
        })
    }

    pub fn codeword(&self) -> Vec<u8> {
        encode(&self.u_vector).expect("u vector length is a power of two")
    }
}

/// Bits on the information set of `u`, in ascending index order (`K + r` bits).
pub fn info_and_crc(u: &[u8], spec: &PolarCodeSpec) -> Vec<u8> {
    spec.info_set.iter().map(|&i| u[i as usize]).collect()
}

/// The `K` message bits carried by `u`.
pub fn extract_info(u: &[u8], spec: &PolarCodeSpec) -> Vec<u8> {
    spec.info_set[..spec.k]
        .iter()
        .map(|&i| u[i as usize])
        .collect()
}

/// Receiver-side LLRs `log P(y|0) / P(y|1)` in coded-symbol order. Punctured
/// positions carry exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftFrame {
    pub llrs: Vec<f64>,
}

impl SoftFrame {
    pub fn new(llrs: Vec<f64>) -> Self {
        Self { llrs }
    }

    /// Noiseless LLRs for a codeword.
    pub fn from_codeword(x: &[u8]) -> Self {
        Self {
            llrs: x
                .iter()
                .map(|&b| {
                    if b == 0 {
                        LLR_SATURATION
                    } else {
                        -LLR_SATURATION
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }
}

/// Golden encoding record, `{n, u[], x[]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingVector {
    pub n: u32,
    pub u: Vec<u8>,
    pub x: Vec<u8>,
}

impl EncodingVector {
    pub fn from_u(u: Vec<u8>) -> Result<Self> {
        let n = log2_len(u.len())?;
        let x = encode(&u)?;
        Ok(Self { n, u, x })
    }

    pub fn verify(&self) -> bool {
        encode(&self.u).map(|x| x == self.x).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{bec_bhattacharyya, PolarCodeSpec};

    #[test]
    fn zero_and_kernel() {
        assert_eq!(encode(&[0; 16]).unwrap(), vec![0; 16]);
        for u0 in 0..2u8 {
            for u1 in 0..2u8 {
                assert_eq!(encode(&[u0, u1]).unwrap(), vec![u0 ^ u1, u1]);
            }
        }
    }

    #[test]
    fn n3_columns() {
        // x_j = xor of u_i over i covering pi(j)
        for i in 0..8 {
            let mut u = [0u8; 8];
            u[i] = 1;
            let x = encode(&u).unwrap();
            for j in 0..8u32 {
                let pj = reverse_bits(j, 3) as usize;
                assert_eq!(x[j as usize], u8::from(i & pj == pj), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn length_errors() {
        assert!(encode(&[0; 6]).is_err());
        assert!(encode(&[0]).is_err());
        assert!(encode(&[]).is_err());
    }

    #[test]
    fn frame_places_info_then_crc() {
        let profile = bec_bhattacharyya(5, 0.5).unwrap();
        let spec = PolarCodeSpec::from_profile(&profile, 4, Some(CrcPoly::Crc8)).unwrap();
        let info = [1, 0, 1, 1];
        let frame = MessageFrame::build(&info, &spec).unwrap();
        let placed = info_and_crc(&frame.u_vector, &spec);
        assert_eq!(&placed[..4], &info);
        assert!(crc_check(&placed, CrcPoly::Crc8));
        for &f in &spec.frozen_set {
            assert_eq!(frame.u_vector[f as usize], 0);
        }
        assert_eq!(extract_info(&frame.u_vector, &spec), info.to_vec());
        assert!(MessageFrame::build(&[1, 0], &spec).is_err());
    }

    #[test]
    fn golden_vector_json() {
        let v = EncodingVector::from_u(vec![1, 0, 1, 1, 0, 0, 1, 0]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        let back: EncodingVector = serde_json::from_str(&s).unwrap();
        assert!(back.verify());
        assert_eq!(back.n, 3);
    }
}
