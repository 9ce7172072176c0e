//! Successive cancellation and CRC-aided successive cancellation list decoding.
//!
//! Channel LLRs arrive in coded-symbol order. Because `B_N` commutes with
//! `F^{(x)n}`, bit-reversing them once gives the LLRs of `w = u F^{(x)n}`, which
//! the decoders then process with the halves recursion
//! `w = ((a ^ b) F', b F')` for `u = (a, b)`.
//!
//! Per-level scratch layout (for a path): level `s` occupies `[2^s, 2^(s+1))` of
//! the LLR and partial-sum buffers, the left-child codeword saved at level `s`
//! occupies `[2^(s-1), 2^s)` of `left`.

use crate::bitops::reverse_bits;
use crate::codec::crc::{crc_check, CrcPoly};
use crate::codec::SoftFrame;
use crate::construct::PolarCodeSpec;

/// Check-node combine rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckNode {
    /// `2 atanh(tanh(a/2) tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a) sign(b) min(|a|, |b|)`.
    MinSum,
}

/// Path-metric update for list decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathMetric {
    /// `ln(1 + exp(-(1 - 2u) L))`; with exact check nodes the final metric is
    /// the negative log-posterior of the path.
    #[default]
    Exact,
    /// Add `|L|` when the decision contradicts the sign of `L`.
    Approx,
}

#[inline]
fn check_combine(mode: CheckNode, a: f64, b: f64) -> f64 {
    let s = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    match mode {
        CheckNode::MinSum => s * m,
        // tanh rule keeps relative precision for small outputs; the log form
        // avoids atanh(1) once both inputs are large
        CheckNode::Exact if m < 4.0 => 2.0 * ((0.5 * a).tanh() * (0.5 * b).tanh()).atanh(),
        CheckNode::Exact => s * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p(),
    }
}

#[inline]
fn bit_combine(a: f64, b: f64, left: u8) -> f64 {
    if left == 0 {
        b + a
    } else {
        b - a
    }
}

#[inline]
fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

#[inline]
fn penalty(metric: PathMetric, llr: f64, bit: u8) -> f64 {
    match metric {
        PathMetric::Approx => {
            if bit == hard(llr) {
                0.0
            } else {
                llr.abs()
            }
        }
        PathMetric::Exact => {
            // softplus(x), x = -(1 - 2 bit) llr
            let x = if bit == 0 { -llr } else { llr };
            x.max(0.0) + (-x.abs()).exp().ln_1p()
        }
    }
}

fn load_channel(dst: &mut [f64], llrs: &[f64], n: u32) {
    let size = llrs.len();
    for (k, &l) in llrs.iter().enumerate() {
        dst[size + reverse_bits(k as u32, n) as usize] = l;
    }
}

/// Single-path SC decoder. Owns its scratch memory.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: u32,
    frozen: Vec<bool>,
    check: CheckNode,
    llr: Vec<f64>,
    ret: Vec<u8>,
    left: Vec<u8>,
    u: Vec<u8>,
    leaf_llr: Vec<f64>,
}

impl ScDecoder {
    pub fn new(spec: &PolarCodeSpec) -> Self {
        Self::with_check(spec, CheckNode::Exact)
    }

    pub fn with_check(spec: &PolarCodeSpec, check: CheckNode) -> Self {
        let size = spec.block_len;
        Self {
            n: spec.n,
            frozen: spec.frozen_mask(),
            check,
            llr: vec![0.0; 2 * size],
            ret: vec![0; 2 * size],
            left: vec![0; size],
            u: vec![0; size],
            leaf_llr: vec![0.0; size],
        }
    }

    pub fn block_len(&self) -> usize {
        self.frozen.len()
    }

    /// Decode to `u_hat`. Frozen bits are 0; an LLR of exactly 0 decides 0.
    pub fn decode(&mut self, llrs: &[f64]) -> Vec<u8> {
        self.run(llrs, None);
        self.u.clone()
    }

    /// LLR seen at every leaf, using the decoder's own decisions for
    /// cancellation, or the supplied genie bits when given.
    pub fn decision_llrs(&mut self, llrs: &[f64], genie: Option<&[u8]>) -> Vec<f64> {
        self.run(llrs, genie);
        self.leaf_llr.clone()
    }

    fn run(&mut self, llrs: &[f64], genie: Option<&[u8]>) {
        assert_eq!(llrs.len(), self.block_len(), "LLR length must equal N");
        if let Some(g) = genie {
            assert_eq!(g.len(), self.block_len(), "genie length must equal N");
        }
        load_channel(&mut self.llr, llrs, self.n);
        self.node(self.n, 0, genie);
    }

    fn node(&mut self, s: u32, offset: usize, genie: Option<&[u8]>) {
        if s == 0 {
            let l = self.llr[1];
            self.leaf_llr[offset] = l;
            let bit = match genie {
                Some(g) => g[offset] & 1,
                None if self.frozen[offset] => 0,
                None => hard(l),
            };
            self.u[offset] = bit;
            self.ret[1] = bit;
            return;
        }
        let half = 1usize << (s - 1);
        let base = half << 1;
        for k in 0..half {
            self.llr[half + k] =
                check_combine(self.check, self.llr[base + k], self.llr[base + half + k]);
        }
        self.node(s - 1, offset, genie);
        self.left[half..base].copy_from_slice(&self.ret[half..base]);
        for k in 0..half {
            self.llr[half + k] = bit_combine(
                self.llr[base + k],
                self.llr[base + half + k],
                self.left[half + k],
            );
        }
        self.node(s - 1, offset + half, genie);
        for k in 0..half {
            let cb = self.ret[half + k];
            self.ret[base + k] = self.left[half + k] ^ cb;
            self.ret[base + half + k] = cb;
        }
    }
}

#[derive(Debug, Clone)]
struct Path {
    llr: Vec<f64>,
    ret: Vec<u8>,
    left: Vec<u8>,
    u: Vec<u8>,
    metric: f64,
}

impl Path {
    fn new(size: usize) -> Self {
        Self {
            llr: vec![0.0; 2 * size],
            ret: vec![0; 2 * size],
            left: vec![0; size],
            u: vec![0; size],
            metric: 0.0,
        }
    }

    fn copy_from(&mut self, other: &Path) {
        self.llr.copy_from_slice(&other.llr);
        self.ret.copy_from_slice(&other.ret);
        self.left.copy_from_slice(&other.left);
        self.u.copy_from_slice(&other.u);
        self.metric = other.metric;
    }
}

/// CRC-aided SC list decoder. Owns its path storage.
///
/// At each information bit every path is split into both decisions and the
/// `L` candidates with the smallest metric survive (ties: lower path index,
/// then bit 0). The output is the best-metric path that passes the CRC, or the
/// best-metric path when none does or no CRC is configured.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    n: u32,
    frozen: Vec<bool>,
    info_set: Vec<u32>,
    crc: Option<CrcPoly>,
    list_size: usize,
    check: CheckNode,
    metric: PathMetric,
    paths: Vec<Path>,
    pool: Vec<Path>,
    candidates: Vec<(f64, usize, u8)>,
}

impl SclDecoder {
    pub fn new(spec: &PolarCodeSpec, list_size: usize) -> Self {
        Self::with_options(spec, list_size, CheckNode::Exact, PathMetric::Exact)
    }

    pub fn with_options(
        spec: &PolarCodeSpec,
        list_size: usize,
        check: CheckNode,
        metric: PathMetric,
    ) -> Self {
        assert!(list_size >= 1, "list size must be at least 1");
        Self {
            n: spec.n,
            frozen: spec.frozen_mask(),
            info_set: spec.info_set.clone(),
            crc: spec.crc,
            list_size,
            check,
            metric,
            paths: Vec::with_capacity(list_size),
            pool: Vec::new(),
            candidates: Vec::with_capacity(2 * list_size),
        }
    }

    /// Override the CRC used for final path selection.
    pub fn set_crc(&mut self, crc: Option<CrcPoly>) {
        self.crc = crc;
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Vec<u8> {
        let size = self.frozen.len();
        assert_eq!(llrs.len(), size, "LLR length must equal N");
        self.pool.append(&mut self.paths);
        let mut root = self.pool.pop().unwrap_or_else(|| Path::new(size));
        root.metric = 0.0;
        load_channel(&mut root.llr, llrs, self.n);
        self.paths.push(root);
        self.node(self.n, 0);

        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        order.sort_by(|&a, &b| {
            self.paths[a]
                .metric
                .total_cmp(&self.paths[b].metric)
                .then(a.cmp(&b))
        });
        let chosen = match self.crc {
            Some(poly) => order
                .iter()
                .copied()
                .find(|&p| {
                    let bits: Vec<u8> = self
                        .info_set
                        .iter()
                        .map(|&i| self.paths[p].u[i as usize])
                        .collect();
                    crc_check(&bits, poly)
                })
                .unwrap_or(order[0]),
            None => order[0],
        };
        self.paths[chosen].u.clone()
    }

    fn node(&mut self, s: u32, offset: usize) {
        if s == 0 {
            self.leaf(offset);
            return;
        }
        let half = 1usize << (s - 1);
        let base = half << 1;
        let check = self.check;
        for p in &mut self.paths {
            for k in 0..half {
                p.llr[half + k] = check_combine(check, p.llr[base + k], p.llr[base + half + k]);
            }
        }
        self.node(s - 1, offset);
        for p in &mut self.paths {
            p.left[half..base].copy_from_slice(&p.ret[half..base]);
            for k in 0..half {
                p.llr[half + k] =
                    bit_combine(p.llr[base + k], p.llr[base + half + k], p.left[half + k]);
            }
        }
        self.node(s - 1, offset + half);
        for p in &mut self.paths {
            for k in 0..half {
                let cb = p.ret[half + k];
                p.ret[base + k] = p.left[half + k] ^ cb;
                p.ret[base + half + k] = cb;
            }
        }
    }

    fn leaf(&mut self, offset: usize) {
        let metric = self.metric;
        if self.frozen[offset] {
            for p in &mut self.paths {
                p.metric += penalty(metric, p.llr[1], 0);
                p.u[offset] = 0;
                p.ret[1] = 0;
            }
            return;
        }

        self.candidates.clear();
        for (idx, p) in self.paths.iter().enumerate() {
            let l = p.llr[1];
            self.candidates
                .push((p.metric + penalty(metric, l, 0), idx, 0));
            self.candidates
                .push((p.metric + penalty(metric, l, 1), idx, 1));
        }
        self.candidates
            .sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let keep = self.list_size.min(self.candidates.len());
        self.candidates.truncate(keep);
        self.candidates
            .sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)));

        let mut uses = vec![0usize; self.paths.len()];
        for &(_, idx, _) in &self.candidates {
            uses[idx] += 1;
        }
        let mut old: Vec<Option<Path>> = self.paths.drain(..).map(Some).collect();
        for (idx, slot) in old.iter_mut().enumerate() {
            if uses[idx] == 0 {
                if let Some(p) = slot.take() {
                    self.pool.push(p);
                }
            }
        }
        let size = self.frozen.len();
        for &(m, idx, bit) in &self.candidates {
            uses[idx] -= 1;
            let mut path = if uses[idx] > 0 {
                let mut fresh = self.pool.pop().unwrap_or_else(|| Path::new(size));
                fresh.copy_from(old[idx].as_ref().expect("parent still owned"));
                fresh
            } else {
                old[idx].take().expect("parent still owned")
            };
            path.metric = m;
            path.u[offset] = bit;
            path.ret[1] = bit;
            self.paths.push(path);
        }
    }
}

/// One-shot SC decode.
pub fn sc_decode(soft: &SoftFrame, spec: &PolarCodeSpec) -> Vec<u8> {
    ScDecoder::new(spec).decode(&soft.llrs)
}

/// One-shot SCL decode with an explicit list size and CRC.
pub fn scl_decode(
    soft: &SoftFrame,
    spec: &PolarCodeSpec,
    list_size: usize,
    crc: Option<CrcPoly>,
) -> Vec<u8> {
    let mut dec = SclDecoder::new(spec, list_size);
    dec.set_crc(crc);
    dec.decode(&soft.llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode, MessageFrame};
    use crate::construct::{bec_bhattacharyya, PolarCodeSpec};

    #[test]
    fn check_node_exact_matches_tanh_rule() {
        for &(a, b) in &[(0.3, -1.2), (4.0, 5.0), (-7.5, -0.01), (0.0, 3.0)] {
            let want = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            let got = check_combine(CheckNode::Exact, a, b);
            assert!(
                (got - want).abs() < 1e-9,
                "a={a} b={b} got={got} want={want}"
            );
        }
        // tanh saturates here; use ln((1 + e^(a+b)) / (e^a + e^b)) in log domain
        let lse = |x: f64, y: f64| x.max(y) + (-(x - y).abs()).exp().ln_1p();
        for &(a, b) in &[(30.0, -35.0), (-40.0, -38.5), (25.0, 26.0)] {
            let want = lse(0.0, a + b) - lse(a, b);
            let got = check_combine(CheckNode::Exact, a, b);
            assert!(
                (got - want).abs() < 1e-12,
                "a={a} b={b} got={got} want={want}"
            );
        }
        assert_eq!(check_combine(CheckNode::Exact, 0.0, 12.0), 0.0);
        assert_eq!(check_combine(CheckNode::MinSum, -2.0, 3.0), -2.0);
    }

    #[test]
    fn penalties() {
        assert_eq!(penalty(PathMetric::Approx, 2.0, 0), 0.0);
        assert_eq!(penalty(PathMetric::Approx, 2.0, 1), 2.0);
        let e0 = penalty(PathMetric::Exact, 2.0, 0);
        assert!((e0 - (1.0 + (-2.0f64).exp()).ln()).abs() < 1e-15);
        assert_eq!(
            penalty(PathMetric::Exact, 0.0, 0),
            penalty(PathMetric::Exact, 0.0, 1)
        );
    }

    fn spec(n: u32, k: usize) -> PolarCodeSpec {
        let p = bec_bhattacharyya(n, 0.4).unwrap();
        PolarCodeSpec::from_profile(&p, k, None).unwrap()
    }

    #[test]
    fn noiseless_sc_and_scl() {
        for n in 1..=8 {
            let size = 1usize << n;
            let k = (size / 2).max(1);
            let sp = spec(n, k);
            let info: Vec<u8> = (0..k)
                .map(|i| (i * 5 + n as usize).is_multiple_of(3) as u8)
                .collect();
            let frame = MessageFrame::build(&info, &sp).unwrap();
            let soft = SoftFrame::from_codeword(&encode(&frame.u_vector).unwrap());
            assert_eq!(sc_decode(&soft, &sp), frame.u_vector);
            assert_eq!(scl_decode(&soft, &sp, 4, None), frame.u_vector);
        }
    }

    #[test]
    fn erased_everything_decodes_zero() {
        let sp = spec(4, 8);
        let soft = SoftFrame::new(vec![0.0; 16]);
        assert_eq!(sc_decode(&soft, &sp), vec![0; 16]);
    }

    #[test]
    fn genie_llrs_equal_own_decisions_when_correct() {
        let sp = spec(5, 16);
        let info = vec![1u8; 16];
        let frame = MessageFrame::build(&info, &sp).unwrap();
        let soft = SoftFrame::from_codeword(&encode(&frame.u_vector).unwrap());
        let mut dec = ScDecoder::new(&sp);
        let own = dec.decision_llrs(&soft.llrs, None);
        let genie = dec.decision_llrs(&soft.llrs, Some(&frame.u_vector));
        assert_eq!(own, genie);
    }
}
