//! Bitwise CRCs for CRC-aided list decoding.
//!
//! Convention: MSB-first shift register, initial value 0, no reflection, no
//! final XOR. The CRC is the remainder of `M(x) x^r` modulo the generator and
//! is appended after the message bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrcPoly {
    /// `x^8 + x^7 + x^4 + x^3 + x + 1` (0x9B).
    Crc8,
    /// `x^16 + x^15 + x^2 + 1` (0x8005).
    Crc16,
}

impl CrcPoly {
    pub fn width(self) -> usize {
        match self {
            CrcPoly::Crc8 => 8,
            CrcPoly::Crc16 => 16,
        }
    }

    /// Generator without the leading `x^r` term.
    pub fn poly(self) -> u32 {
        match self {
            CrcPoly::Crc8 => 0x9B,
            CrcPoly::Crc16 => 0x8005,
        }
    }

    pub fn from_poly(poly: u32) -> Result<Self> {
        match poly {
            0x9B => Ok(CrcPoly::Crc8),
            0x8005 => Ok(CrcPoly::Crc16),
            other => Err(invalid(format!("unknown CRC polynomial {other:#x}"))),
        }
    }

    /// Remainder bits, MSB first.
    pub fn remainder(self, bits: &[u8]) -> Vec<u8> {
        let width = self.width() as u32;
        let top = 1u32 << (width - 1);
        let mask = (1u32 << width) - 1;
        let mut reg = 0u32;
        for &b in bits {
            let feedback = (reg & top != 0) ^ (b & 1 != 0);
            reg = (reg << 1) & mask;
            if feedback {
                reg ^= self.poly();
            }
        }
        (0..width).rev().map(|k| ((reg >> k) & 1) as u8).collect()
    }
}

impl fmt::Display for CrcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "crc{}", self.width())
    }
}

impl FromStr for CrcPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "8" | "crc8" | "0x9b" => Ok(CrcPoly::Crc8),
            "16" | "crc16" | "0x8005" => Ok(CrcPoly::Crc16),
            other => Err(invalid(format!("unknown CRC `{other}`"))),
        }
    }
}

/// Parse `none`/`0` as no CRC, otherwise a [`CrcPoly`].
pub fn parse_optional_crc(s: &str) -> Result<Option<CrcPoly>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "none" | "0" => Ok(None),
        other => other.parse().map(Some),
    }
}

/// `info || crc(info)`.
pub fn crc_append(info: &[u8], poly: CrcPoly) -> Result<Vec<u8>> {
    if info.is_empty() {
        return Err(invalid("CRC of an empty message"));
    }
    let mut out = info.to_vec();
    out.extend(poly.remainder(info));
    Ok(out)
}

/// True iff the trailing `r` bits are the CRC of the leading ones.
pub fn crc_check(bits: &[u8], poly: CrcPoly) -> bool {
    let r = poly.width();
    if bits.len() <= r {
        return false;
    }
    let (msg, crc) = bits.split_at(bits.len() - r);
    poly.remainder(msg) == crc
}
