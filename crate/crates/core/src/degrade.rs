//! The general degradation process and its reuse for puncture propagation.
//!
//! An initial index set `D_0` is pushed through `n` levels. At level `k` every
//! index is paired with the index that differs from it only in bit `k`
//! (MSB = bit 1). The basic mappings are applied per pair:
//!
//! - `{0}` or `{1}` -> `{0}`: a lone index with bit `k` set moves to its
//!   partner, a lone index with bit `k` clear stays;
//! - `{0, 1}` -> `{0, 1}`: when both partners are occupied, both stay.
//!
//! Every index therefore only ever clears bits, so each destination is covered
//! by its source, and the process is a bijection between `D_0` and `D_n`.
//! Puncturing coded symbols `pi{Q_0}` renders exactly the bit channels of
//! `D_n` (for `D_0 = Q_0`) punctured.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::bitops::{check_width, reverse_all};
use crate::error::{invalid, Result};

/// An index set at a given level of the degradation process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSet {
    n: u32,
    level: u32,
    indices: Vec<u32>,
}

impl LevelSet {
    /// Level-0 set. Indices must be distinct and lie in `[0, 2^n)`; they are
    /// stored in ascending order.
    pub fn initial(indices: impl IntoIterator<Item = u32>, n: u32) -> Result<Self> {
        check_width(n)?;
        let mut sorted: Vec<u32> = indices.into_iter().collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate index in level set"));
        }
        if let Some(&max) = sorted.last() {
            if u64::from(max) >= 1u64 << n {
                return Err(invalid(format!("index {max} out of range for n = {n}")));
            }
        }
        Ok(Self {
            n,
            level: 0,
            indices: sorted,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// One source -> destination pair of a [`PropagationMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub source: u32,
    pub destination: u32,
}

/// The bijection produced by the degradation process.
///
/// `pairs` are in ascending source order. `levels[k][p]` is the position the
/// `p`-th source has reached after level `k`, so `levels[0]` lists the sources
/// and `levels[n]` the destinations in pairing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationMap {
    pub n: u32,
    pub pairs: Vec<Pair>,
    pub levels: Vec<Vec<u32>>,
}

impl PropagationMap {
    pub fn sources(&self) -> BTreeSet<u32> {
        self.pairs.iter().map(|p| p.source).collect()
    }

    pub fn destinations(&self) -> BTreeSet<u32> {
        self.pairs.iter().map(|p| p.destination).collect()
    }

    pub fn destination_of(&self, source: u32) -> Option<u32> {
        self.pairs
            .binary_search_by_key(&source, |p| p.source)
            .ok()
            .map(|k| self.pairs[k].destination)
    }

    /// Intermediate set `D_k` as a sorted set.
    pub fn level_set(&self, k: usize) -> Option<BTreeSet<u32>> {
        self.levels.get(k).map(|l| l.iter().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Basic degradation mapping for `N = 2`.
///
/// `occupied` is a non-empty subset of `{0, 1}`; the result pairs each occupied
/// input with the node it reaches.
pub fn basic_map(occupied: &BTreeSet<u8>) -> Result<Vec<(u8, u8)>> {
    let has0 = occupied.contains(&0);
    let has1 = occupied.contains(&1);
    if occupied.iter().any(|&b| b > 1) {
        return Err(invalid("basic mapping operates on subsets of {0, 1}"));
    }
    match (has0, has1) {
        (true, true) => Ok(vec![(0, 0), (1, 1)]),
        (true, false) => Ok(vec![(0, 0)]),
        (false, true) => Ok(vec![(1, 0)]),
        (false, false) => Err(invalid("basic mapping of the empty set")),
    }
}

/// Run the general degradation process from a level-0 set.
pub fn propagate(d0: &LevelSet) -> Result<PropagationMap> {
    if d0.level != 0 {
        return Err(invalid(format!(
            "propagation starts from level 0, got level {}",
            d0.level
        )));
    }
    let n = d0.n;
    let mut current = d0.indices.clone();
    let mut levels = Vec::with_capacity(n as usize + 1);
    levels.push(current.clone());
    let mut occupied: HashSet<u32> = current.iter().copied().collect();

    for k in 1..=n {
        let bit = 1u32 << (n - k);
        let next: Vec<u32> = current
            .iter()
            .map(|&i| {
                if i & bit != 0 && !occupied.contains(&(i ^ bit)) {
                    i ^ bit
                } else {
                    i
                }
            })
            .collect();
        occupied.clear();
        occupied.extend(next.iter().copied());
        levels.push(next.clone());
        current = next;
    }

    let pairs = d0
        .indices
        .iter()
        .zip(&current)
        .map(|(&source, &destination)| Pair {
            source,
            destination,
        })
        .collect();
    Ok(PropagationMap { n, pairs, levels })
}

/// Puncture propagation. A punctured input renders the upper output of the
/// one-step transform punctured, which is the same mapping as the degradation
/// process; the destinations are the bit channels left punctured.
pub fn propagate_puncture(q0: &LevelSet) -> Result<PropagationMap> {
    propagate(q0)
}

/// Bit channels punctured when the given coded-symbol positions are not sent.
pub fn punctured_bit_channels(coded_positions: &[u32], n: u32) -> Result<BTreeSet<u32>> {
    check_width(n)?;
    let q0 = LevelSet::initial(reverse_all(coded_positions, n), n)?;
    Ok(propagate_puncture(&q0)?.destinations())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn basic_mappings() {
        assert_eq!(basic_map(&[1].into()).unwrap(), vec![(1, 0)]);
        assert_eq!(basic_map(&[0].into()).unwrap(), vec![(0, 0)]);
        assert_eq!(basic_map(&[0, 1].into()).unwrap(), vec![(0, 0), (1, 1)]);
        assert!(basic_map(&BTreeSet::new()).is_err());
        assert!(basic_map(&[2].into()).is_err());
    }

    #[test]
    fn worked_example_chain() {
        let map = propagate(&LevelSet::initial([2, 3, 4, 7], 3).unwrap()).unwrap();
        assert_eq!(map.levels[1], vec![2, 3, 0, 7]);
        assert_eq!(map.levels[2], vec![2, 1, 0, 5]);
        assert_eq!(map.levels[3], vec![2, 1, 0, 4]);
        assert_eq!(map.destinations(), set(&[0, 1, 2, 4]));
        let pairs: Vec<_> = map
            .pairs
            .iter()
            .map(|p| (p.source, p.destination))
            .collect();
        assert_eq!(pairs, vec![(2, 2), (3, 1), (4, 0), (7, 4)]);
        assert_eq!(map.destination_of(7), Some(4));
        assert_eq!(map.destination_of(5), None);
    }

    #[test]
    fn full_set_is_identity() {
        for n in 1..=8 {
            let map = propagate(&LevelSet::initial(0..(1u32 << n), n).unwrap()).unwrap();
            assert!(map.pairs.iter().all(|p| p.source == p.destination));
        }
    }

    #[test]
    fn top_index_falls_to_zero() {
        for n in 1..=16 {
            let top = (1u32 << n) - 1;
            let map = propagate(&LevelSet::initial([top], n).unwrap()).unwrap();
            assert_eq!(map.destination_of(top), Some(0));
            // one bit cleared per level
            for k in 0..=n as usize {
                assert_eq!(map.levels[k][0].count_ones(), n - k as u32);
            }
        }
    }

    #[test]
    fn puncture_examples() {
        let q = propagate_puncture(&LevelSet::initial([0, 1, 2, 4], 3).unwrap()).unwrap();
        assert_eq!(q.destinations(), set(&[0, 1, 2, 4]));
        let empty = propagate_puncture(&LevelSet::initial([], 3).unwrap()).unwrap();
        assert!(empty.is_empty());
        // a downward-closed source set is its own destination
        let qup = propagate_puncture(&LevelSet::initial([0, 1, 2, 3], 3).unwrap()).unwrap();
        assert_eq!(qup.destinations(), set(&[0, 1, 2, 3]));
    }

    #[test]
    fn punctured_channels_from_coded_positions() {
        assert_eq!(
            punctured_bit_channels(&[0, 4, 2, 1], 3).unwrap(),
            set(&[0, 1, 2, 4])
        );
        assert!(punctured_bit_channels(&[], 3).unwrap().is_empty());
        let all: Vec<u32> = (0..8).collect();
        assert_eq!(punctured_bit_channels(&all, 3).unwrap(), set(&all));
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(LevelSet::initial([1, 1], 3).is_err());
        assert!(LevelSet::initial([8], 3).is_err());
        assert!(LevelSet::initial([0], 0).is_err());
        let mut l = LevelSet::initial([1], 3).unwrap();
        l.level = 2;
        assert!(propagate(&l).is_err());
    }
}
