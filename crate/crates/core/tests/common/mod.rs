//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use polarpunct::codec::{encode, MessageFrame};
use polarpunct::construct::PolarCodeSpec;
use rand::Rng;

/// `B_N F^{(x)n}` over GF(2), built from explicit Kronecker products.
pub fn generator(n: u32) -> Vec<Vec<u8>> {
    let mut g = vec![vec![1u8]];
    for _ in 0..n {
        let s = g.len();
        let mut next = vec![vec![0u8; 2 * s]; 2 * s];
        // F = [[1, 0], [1, 1]]
        for (bi, row) in [[1u8, 0], [1, 1]].iter().enumerate() {
            for (bj, &f) in row.iter().enumerate() {
                for i in 0..s {
                    for j in 0..s {
                        next[bi * s + i][bj * s + j] = f & g[i][j];
                    }
                }
            }
        }
        g = next;
    }
    let size = g.len();
    let rev = |mut v: usize| {
        let mut r = 0;
        for _ in 0..n {
            r = (r << 1) | (v & 1);
            v >>= 1;
        }
        r
    };
    (0..size).map(|i| g[rev(i)].clone()).collect()
}

pub fn mat_encode(g: &[Vec<u8>], u: &[u8]) -> Vec<u8> {
    let size = g.len();
    (0..size)
        .map(|j| (0..size).fold(0u8, |acc, i| acc ^ (u[i] & g[i][j])))
        .collect()
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

/// `log P(y | x)` up to a constant for channel LLRs `l`.
pub fn log_lik(x: &[u8], l: &[f64]) -> f64 {
    x.iter()
        .zip(l)
        .map(|(&b, &l)| if b == 0 { l / 2.0 } else { -l / 2.0 })
        .sum()
}

pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// SC decisions by marginalising the bit channel over all future inputs.
pub fn ml_bit_channel_sc(n: u32, frozen: &[bool], l: &[f64]) -> (Vec<u8>, Vec<f64>) {
    let size = 1usize << n;
    let mut u = vec![0u8; size];
    let mut leaf = vec![0.0; size];
    for i in 0..size {
        let mut sums = [Vec::new(), Vec::new()];
        let rest = size - i - 1;
        for bit in 0..2u8 {
            for tail in 0..(1usize << rest) {
                let mut cand = u.clone();
                cand[i] = bit;
                for t in 0..rest {
                    cand[i + 1 + t] = ((tail >> t) & 1) as u8;
                }
                sums[bit as usize].push(log_lik(&encode(&cand).unwrap(), l));
            }
        }
        leaf[i] = log_sum_exp(&sums[0]) - log_sum_exp(&sums[1]);
        u[i] = if frozen[i] {
            0
        } else {
            u8::from(leaf[i] < 0.0)
        };
    }
    (u, leaf)
}

/// Maximum-likelihood message among those passing the CRC (all when `crc` is `None`).
pub fn exhaustive_ml(spec: &PolarCodeSpec, l: &[f64]) -> Vec<u8> {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for m in 0..(1u32 << spec.k) {
        let info: Vec<u8> = (0..spec.k).map(|b| ((m >> b) & 1) as u8).collect();
        let x = MessageFrame::build(&info, spec).unwrap().codeword();
        let ll = log_lik(&x, l);
        if ll > best.0 {
            best = (ll, info);
        }
    }
    best.1
}

pub fn poly_mod_oracle(msg: &[u8], gen: &[u8]) -> Vec<u8> {
    // long division of msg * x^r by gen (highest degree first, gen[0] = 1)
    let r = gen.len() - 1;
    let mut rem: Vec<u8> = msg.to_vec();
    rem.extend(std::iter::repeat_n(0, r));
    for i in 0..msg.len() {
        if rem[i] == 1 {
            for (k, &g) in gen.iter().enumerate() {
                rem[i + k] ^= g;
            }
        }
    }
    rem[msg.len()..].to_vec()
}

pub fn gen_bits(poly: u32, width: usize) -> Vec<u8> {
    let mut g = vec![1u8];
    g.extend((0..width).rev().map(|b| ((poly >> b) & 1) as u8));
    g
}

pub fn gf2_rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] == 1) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][c] == 1 {
                let pivot = m[rank].clone();
                for (a, b) in m[i].iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Bit channels that carry no information when the coded positions in
/// `punctured` are never observed and all others are seen without noise.
pub fn erased_bit_channels(n: u32, punctured: &[u32]) -> Vec<u32> {
    let g = generator(n);
    let size = 1usize << n;
    let observed: Vec<usize> = (0..size)
        .filter(|j| !punctured.contains(&(*j as u32)))
        .collect();
    let rows: Vec<Vec<u8>> = g
        .iter()
        .map(|r| observed.iter().map(|&j| r[j]).collect())
        .collect();
    (0..size)
        .filter(|&i| gf2_rank(&rows[i..]) == gf2_rank(&rows[i + 1..]))
        .map(|i| i as u32)
        .collect()
}
