//! Exact finite-n laws of the magnetization under the Gibbs measure, their
//! affine rescalings, the limiting densities they converge to, per-minimum
//! mixture weights, and a seeded Metropolis sampler used as an independent
//! cross-check.
//!
//! All mass arithmetic is performed in log space: the Gibbs tilt
//! `exp(theta k^2 / (2n))` reaches `exp(theta n / 2)` at the support edge,
//! far beyond floating-point range for interesting `n`. Normalization is a
//! single log-sum-exp subtraction at the end.

mod limit;
mod metropolis;
mod mixture;

pub use limit::{ks_distance, LimitDensity};
pub use metropolis::{metropolis_sample, MagnetizationHistogram};
pub use mixture::{mixture_weights, two_peak_log_weights, MixtureWeights};

use crate::dynsys::FieldSequence;
use crate::numeric::{log_add_exp, log_sum_exp, CompensatedSum};
use crate::{Error, Result};
use sha2::{Digest, Sha256};
use std::path::Path;

/// The law of `M_n = sum of n spins`: support `{-n, -n+2, ..., n}` indexed
/// by the number of up spins, with normalized log-masses. Keeps the field
/// sequence and the `(beta, J)` pair that produced it.
#[derive(Clone, Debug)]
pub struct MagnetizationLaw {
    n: usize,
    beta: f64,
    coupling: f64,
    log_mass: Vec<f64>,
    field: FieldSequence,
}

impl MagnetizationLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> &FieldSequence {
        &self.field
    }

    /// Normalized log-masses indexed by the number of up spins
    /// (`index j` holds `M_n = 2j - n`).
    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    /// Support values in ascending order.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.n as i64;
        (0..=n).map(move |j| 2 * j - n)
    }

    /// Log-mass at magnetization `k`; `-inf` off the support or at the
    /// wrong parity.
    pub fn log_mass_at(&self, k: i64) -> f64 {
        let n = self.n as i64;
        if k.abs() > n || (k + n) % 2 != 0 {
            return f64::NEG_INFINITY;
        }
        self.log_mass[((k + n) / 2) as usize]
    }

    /// Probability of magnetization `k` (zero off the support).
    pub fn mass(&self, k: i64) -> f64 {
        self.log_mass_at(k).exp()
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &lm in &self.log_mass {
            acc.add(lm.exp());
        }
        acc.value()
    }

    pub fn mean(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for (j, &lm) in self.log_mass.iter().enumerate() {
            let k = (2 * j) as f64 - self.n as f64;
            acc.add(k * lm.exp());
        }
        acc.value()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let mut acc = CompensatedSum::new();
        for (j, &lm) in self.log_mass.iter().enumerate() {
            let k = (2 * j) as f64 - self.n as f64;
            acc.add((k - mean) * (k - mean) * lm.exp());
        }
        acc.value()
    }

    /// CSV rows `k,mass` over the support.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mass\n");
        let n = self.n as i64;
        for (j, &lm) in self.log_mass.iter().enumerate() {
            out.push_str(&format!("{},{:.16e}\n", 2 * j as i64 - n, lm.exp()));
        }
        out
    }

    /// Content hash identifying (field values, beta, J, n) for cache reuse.
    pub fn cache_key(&self) -> String {
        cache_key(&self.field, self.beta, self.coupling)
    }

    /// Serialize to the compact binary cache format.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(40 + 16 * self.n);
        bytes.extend_from_slice(CACHE_MAGIC);
        bytes.extend_from_slice(&(self.n as u64).to_le_bytes());
        bytes.extend_from_slice(&self.beta.to_le_bytes());
        bytes.extend_from_slice(&self.coupling.to_le_bytes());
        for &v in self.field.values() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for &lm in &self.log_mass {
            bytes.extend_from_slice(&lm.to_le_bytes());
        }
        std::fs::write(path, bytes).map_err(|e| Error::CacheFormat {
            reason: format!("write {}: {e}", path.display()),
        })
    }

    /// Read a law back from the binary cache format.
    pub fn read_cache(path: &Path) -> Result<MagnetizationLaw> {
        let bytes = std::fs::read(path).map_err(|e| Error::CacheFormat {
            reason: format!("read {}: {e}", path.display()),
        })?;
        let fail = |reason: &str| Error::CacheFormat {
            reason: format!("{}: {reason}", path.display()),
        };
        if bytes.len() < 32 || &bytes[..8] != CACHE_MAGIC {
            return Err(fail("bad magic"));
        }
        let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        if n == 0 || n > 100_000_000 {
            return Err(fail("implausible site count"));
        }
        let expected = 32 + 8 * n + 8 * (n + 1);
        if bytes.len() != expected {
            return Err(fail("truncated payload"));
        }
        let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let beta = f64_at(16);
        let coupling = f64_at(24);
        let values: Vec<f64> = (0..n).map(|i| f64_at(32 + 8 * i)).collect();
        let base = 32 + 8 * n;
        let log_mass: Vec<f64> = (0..=n).map(|j| f64_at(base + 8 * j)).collect();
        if log_mass.iter().any(|lm| lm.is_nan() || *lm > 1e-6) {
            return Err(fail("log-masses not normalized"));
        }
        let field = FieldSequence::from_values(values)?;
        Ok(MagnetizationLaw {
            n,
            beta,
            coupling,
            log_mass,
            field,
        })
    }
}

const CACHE_MAGIC: &[u8; 8] = b"CWMLAW1\0";

/// Content hash of (field values, beta, J, n), hex-encoded.
pub fn cache_key(field: &FieldSequence, beta: f64, coupling: f64) -> String {
    let mut hasher = Sha256::new();
    hasher.update((field.len() as u64).to_le_bytes());
    hasher.update(beta.to_le_bytes());
    hasher.update(coupling.to_le_bytes());
    for &v in field.values() {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Gibbs law read from `dir` when cached, computed and written otherwise.
/// The boolean reports a cache hit. Unreadable or corrupt cache entries are
/// silently recomputed and rewritten.
pub fn cached_gibbs_pmf(
    dir: &Path,
    field: &FieldSequence,
    beta: f64,
    coupling: f64,
) -> Result<(MagnetizationLaw, bool)> {
    let path = dir.join(format!("{}.law", cache_key(field, beta, coupling)));
    if path.exists() {
        if let Ok(law) = MagnetizationLaw::read_cache(&path) {
            if law.n == field.len() && law.beta == beta && law.coupling == coupling {
                return Ok((law, true));
            }
        }
    }
    let law = gibbs_pmf(field, beta, coupling)?;
    law.write_cache(&path)?;
    Ok((law, false))
}

/// Law of the inhomogeneous random walk `S_n` with step `+1` w.p. `p_i`:
/// sequential in-place log-space convolution, `O(n^2)` log-add-exps.
/// The result is the infinite-temperature (`beta = 0`) magnetization law.
pub fn walk_pmf(field: &FieldSequence) -> Result<MagnetizationLaw> {
    if field.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = field.len();
    let mut ll: Vec<f64> = Vec::with_capacity(n + 1);
    ll.push(0.0);
    for (i, &p) in field.values().iter().enumerate() {
        let lp = p.ln();
        let lq = (1.0 - p).ln();
        ll.push(f64::NEG_INFINITY);
        // Descending so ll[j-1] and ll[j] are still the previous row.
        for j in (0..=i + 1).rev() {
            let stay = if j <= i {
                ll[j] + lq
            } else {
                f64::NEG_INFINITY
            };
            let up = if j >= 1 {
                ll[j - 1] + lp
            } else {
                f64::NEG_INFINITY
            };
            ll[j] = log_add_exp(stay, up);
        }
    }
    normalize(&mut ll)?;
    Ok(MagnetizationLaw {
        n,
        beta: 0.0,
        coupling: 0.0,
        log_mass: ll,
        field: field.clone(),
    })
}

/// The Gibbs magnetization law: the walk law reweighted by
/// `exp(beta J k^2 / (2n))` and renormalized. `beta = 0` is the product
/// measure itself (infinite temperature), so it is accepted here even
/// though the free-energy analysis requires `beta > 0`.
pub fn gibbs_pmf(field: &FieldSequence, beta: f64, coupling: f64) -> Result<MagnetizationLaw> {
    if !(beta >= 0.0 && beta.is_finite()) || !(coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidParams { beta, coupling });
    }
    let mut law = walk_pmf(field)?;
    let theta = beta * coupling;
    let nf = law.n as f64;
    for (j, lm) in law.log_mass.iter_mut().enumerate() {
        let k = 2.0 * j as f64 - nf;
        *lm += theta * k * k / (2.0 * nf);
    }
    normalize(&mut law.log_mass)?;
    law.beta = beta;
    law.coupling = coupling;
    Ok(law)
}

fn normalize(ll: &mut [f64]) -> Result<()> {
    let lse = log_sum_exp(ll);
    if !lse.is_finite() {
        return Err(Error::Overflow);
    }
    for lm in ll.iter_mut() {
        *lm -= lse;
    }
    Ok(())
}

/// An affinely rescaled magnetization law: atom `k` moves to
/// `(k - n*center) / n^exponent`, masses unchanged. `exponent = 1` gives
/// `M_n/n`, `1/2` gives `M_n/sqrt(n)`, `3/4` the critical scaling.
#[derive(Clone, Debug)]
pub struct ScaledLaw {
    pub positions: Vec<f64>,
    pub log_mass: Vec<f64>,
}

pub fn scaled_law(law: &MagnetizationLaw, center: f64, exponent: f64) -> ScaledLaw {
    let nf = law.n as f64;
    let scale = nf.powf(exponent);
    let positions = (0..=law.n)
        .map(|j| (2.0 * j as f64 - nf - nf * center) / scale)
        .collect();
    ScaledLaw {
        positions,
        log_mass: law.log_mass.clone(),
    }
}

impl ScaledLaw {
    pub fn mean(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, &lm) in self.positions.iter().zip(&self.log_mass) {
            acc.add(x * lm.exp());
        }
        acc.value()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let mut acc = CompensatedSum::new();
        for (x, &lm) in self.positions.iter().zip(&self.log_mass) {
            acc.add((x - mean) * (x - mean) * lm.exp());
        }
        acc.value()
    }

    /// Total mass strictly outside the interval `(lo, hi)`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, &lm) in self.positions.iter().zip(&self.log_mass) {
            if *x < lo || *x > hi {
                acc.add(lm.exp());
            }
        }
        acc.value()
    }
}
