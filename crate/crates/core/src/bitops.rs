//! Bit-index algebra for bit-channel and coded-symbol indices.
//!
//! Binary expansions are written MSB first: for `i` of width `n`,
//! `(i)_b = (b_1, ..., b_n)` with `i = sum_k b_k * 2^(n-k)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest supported index width (block length `2^32`).
pub const MAX_WIDTH: u32 = 32;

/// An index in `[0, 2^width)` that carries its own width.
///
/// Bit reversal is only defined relative to a width, so the width travels with
/// the value. Ordering is by width, then value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitIndex {
    width: u32,
    value: u32,
}

impl BitIndex {
    pub fn new(value: u32, width: u32) -> Result<Self> {
        check_width(width)?;
        if u64::from(value) >= 1u64 << width {
            return Err(invalid(format!(
                "index {value} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, value })
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    /// `(b_1, ..., b_n)`, MSB first.
    pub fn binary_expand(self) -> Vec<u8> {
        (0..self.width)
            .map(|k| ((self.value >> (self.width - 1 - k)) & 1) as u8)
            .collect()
    }

    pub fn bit_reverse(self) -> Self {
        Self {
            width: self.width,
            value: reverse_bits(self.value, self.width),
        }
    }

    /// True iff `other` is covered by `self`: every bit of `other` is at most the
    /// corresponding bit of `self`. The covered bit channel is stochastically
    /// degraded with respect to the covering one.
    pub fn covers(self, other: BitIndex) -> Result<bool> {
        same_width(self, other)?;
        Ok(covers_raw(self.value, other.value))
    }
}

impl fmt::Display for BitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn check_width(width: u32) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(invalid(format!(
            "index width {width} outside supported range 1..={MAX_WIDTH}"
        )));
    }
    Ok(())
}

fn same_width(a: BitIndex, b: BitIndex) -> Result<()> {
    if a.width != b.width {
        return Err(invalid(format!(
            "mixed index widths {} and {}",
            a.width, b.width
        )));
    }
    Ok(())
}

/// Free-function form of [`BitIndex::binary_expand`].
pub fn binary_expand(value: u32, width: u32) -> Result<Vec<u8>> {
    Ok(BitIndex::new(value, width)?.binary_expand())
}

/// Free-function form of [`BitIndex::bit_reverse`].
pub fn bit_reverse(value: u32, width: u32) -> Result<u32> {
    Ok(BitIndex::new(value, width)?.bit_reverse().value)
}

/// Free-function form of [`BitIndex::covers`]: is `j` covered by `i`?
pub fn covers(i: BitIndex, j: BitIndex) -> Result<bool> {
    i.covers(j)
}

/// Bit-reverse every element of a set. All elements must share one width.
pub fn bit_reverse_set<'a, I>(set: I) -> Result<BTreeSet<BitIndex>>
where
    I: IntoIterator<Item = &'a BitIndex>,
{
    let mut width = None;
    let mut out = BTreeSet::new();
    for &idx in set {
        match width {
            None => width = Some(idx.width),
            Some(w) if w != idx.width => {
                return Err(invalid(format!("mixed index widths {w} and {}", idx.width)))
            }
            Some(_) => {}
        }
        out.insert(idx.bit_reverse());
    }
    Ok(out)
}

/// Reverse the low `width` bits of `value`. `width` must be in `1..=32`.
#[inline]
pub fn reverse_bits(value: u32, width: u32) -> u32 {
    debug_assert!((1..=MAX_WIDTH).contains(&width));
    value.reverse_bits() >> (32 - width)
}

/// Raw covering test on plain integers: `j` covered by `i`.
#[inline]
pub fn covers_raw(i: u32, j: u32) -> bool {
    j & !i == 0
}

/// Bit-reverse a slice of raw indices, preserving element order.
pub fn reverse_all(values: &[u32], width: u32) -> Vec<u32> {
    values.iter().map(|&v| reverse_bits(v, width)).collect()
}
