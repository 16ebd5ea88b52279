//! Shared helpers for the integration suites: a tiny deterministic PRNG
//! for instance generation and a brute-force reference law that enumerates
//! all 2^n spin configurations.
#![allow(dead_code)]

use curie_weiss::numeric::log_sum_exp;

/// SplitMix64: tiny, seedable, and good enough for generating test
/// instances reproducibly without pulling a crate into the dev graph.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn usize_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Exact tilted law by enumeration of all 2^n configurations:
/// `P(M = k) ~ sum_{sigma: M(sigma)=k} e^{theta k^2/(2n)} prod_i w_i(sigma_i)`.
/// Returns `(k, mass)` for k = -n, -n+2, ..., n. Only feasible for n <= ~20.
pub fn enumeration_law(p: &[f64], beta: f64, coupling: f64) -> Vec<(i64, f64)> {
    let n = p.len();
    assert!(n >= 1 && n <= 24, "enumeration oracle is exponential");
    let theta = beta * coupling;
    let log_up: Vec<f64> = p.iter().map(|&q| q.ln()).collect();
    let log_dn: Vec<f64> = p.iter().map(|&q| (1.0 - q).ln()).collect();
    let mut log_terms: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for mask in 0u64..(1u64 << n) {
        let mut log_w = 0.0;
        let mut ups = 0usize;
        for (i, _) in p.iter().enumerate() {
            if mask >> i & 1 == 1 {
                log_w += log_up[i];
                ups += 1;
            } else {
                log_w += log_dn[i];
            }
        }
        let k = 2 * ups as i64 - n as i64;
        log_terms[ups].push(log_w + theta * (k * k) as f64 / (2.0 * n as f64));
    }
    let log_sums: Vec<f64> = log_terms.iter().map(|t| log_sum_exp(t)).collect();
    let log_z = log_sum_exp(&log_sums);
    (0..=n)
        .map(|ups| (2 * ups as i64 - n as i64, (log_sums[ups] - log_z).exp()))
        .collect()
}

/// Total-variation distance between an exact library law and the
/// enumeration reference.
pub fn tv_against_enumeration(
    law: &curie_weiss::distribution::MagnetizationLaw,
    reference: &[(i64, f64)],
) -> f64 {
    let mut acc = 0.0;
    for &(k, mass) in reference {
        acc += (law.mass(k) - mass).abs();
    }
    0.5 * acc
}
