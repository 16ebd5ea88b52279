//! Single-spin-flip Metropolis sampler for the tilted spin measure: an
//! independent stochastic cross-check of the exact transfer computation in
//! [`gibbs_pmf`](super::gibbs_pmf).

use super::MagnetizationLaw;
use crate::dynsys::FieldSequence;
use crate::numeric::CompensatedSum;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Empirical histogram of the total magnetization over recorded sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnetizationHistogram {
    counts: BTreeMap<i64, u64>,
    recorded: u64,
}

impl MagnetizationHistogram {
    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn recorded(&self) -> u64 {
        self.recorded
    }

    pub fn empirical_mass(&self, k: i64) -> f64 {
        match self.counts.get(&k) {
            Some(&c) => c as f64 / self.recorded as f64,
            None => 0.0,
        }
    }

    /// Total-variation distance `(1/2) sum_k |empirical(k) - exact(k)|`
    /// against an exact law on the same lattice.
    pub fn tv_distance(&self, law: &MagnetizationLaw) -> f64 {
        let mut acc = CompensatedSum::new();
        for k in law.support() {
            acc.add((self.empirical_mass(k) - law.mass(k)).abs());
        }
        // Any empirical atom off the law's lattice (impossible for a
        // correct chain, but the metric should stay honest).
        for (&k, &c) in &self.counts {
            if !law.log_mass_at(k).is_finite() && law.mass(k) == 0.0 {
                acc.add(c as f64 / self.recorded as f64);
            }
        }
        0.5 * acc.value()
    }
}

/// Runs a single-site-flip Metropolis chain targeting the tilted measure
/// `Q(sigma) ~ exp(theta M^2 / (2n)) prod_i p_i^{(1+sigma_i)/2} (1-p_i)^{(1-sigma_i)/2}`
/// and records the total magnetization once per sweep (`n` proposed flips)
/// after discarding the first 10% of sweeps as burn-in.
///
/// `beta = 0` is allowed and samples the product measure itself. The chain
/// is fully determined by `seed`.
pub fn metropolis_sample(
    field: &FieldSequence,
    beta: f64,
    coupling: f64,
    sweeps: usize,
    seed: u64,
) -> Result<MagnetizationHistogram> {
    if field.is_empty() {
        return Err(Error::EmptyInput);
    }
    if sweeps == 0 {
        return Err(Error::InvalidDepth { depth: 0 });
    }
    if !(beta >= 0.0 && beta.is_finite() && coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidParams { beta, coupling });
    }
    let n = field.len();
    let theta = beta * coupling;
    // Half log odds per site; +/-inf freezes a deterministic site.
    let half_log_odds: Vec<f64> = field
        .values()
        .iter()
        .map(|&p| 0.5 * (p / (1.0 - p)).ln())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spins: Vec<i8> = field
        .values()
        .iter()
        .map(|&p| if rng.gen_bool(p) { 1 } else { -1 })
        .collect();
    let mut magnetization: i64 = spins.iter().map(|&s| s as i64).sum();

    let burn_in = sweeps / 10;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut recorded = 0u64;
    for sweep in 0..sweeps {
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let s = spins[i] as f64;
            // Flipping site i sends M to M - 2 sigma_i, so the quadratic
            // tilt changes by theta(-4 sigma_i M + 4)/(2n) and the product
            // part by -2 sigma_i h_i.
            let delta = theta * (-4.0 * s * magnetization as f64 + 4.0) / (2.0 * n as f64)
                - 2.0 * s * half_log_odds[i];
            if rng.gen::<f64>() < delta.exp() {
                spins[i] = -spins[i];
                magnetization -= 2 * s as i64;
            }
        }
        if sweep >= burn_in {
            *counts.entry(magnetization).or_insert(0) += 1;
            recorded += 1;
        }
    }
    Ok(MagnetizationHistogram { counts, recorded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{gibbs_pmf, walk_pmf};

    fn orbit_field(n: usize) -> FieldSequence {
        let alpha = crate::dynsys::golden_ratio_frac();
        let values = (1..=n).map(|i| (0.3 + i as f64 * alpha).fract()).collect();
        FieldSequence::from_values(values).unwrap()
    }

    #[test]
    fn chain_matches_the_exact_law_on_a_small_system() {
        let field = orbit_field(8);
        let law = gibbs_pmf(&field, 1.2, 1.0).unwrap();
        let hist = metropolis_sample(&field, 1.2, 1.0, 1_000_000, 7).unwrap();
        let tv = hist.tv_distance(&law);
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn infinite_temperature_samples_the_product_measure() {
        let field = orbit_field(6);
        let law = walk_pmf(&field).unwrap();
        let hist = metropolis_sample(&field, 0.0, 1.0, 400_000, 11).unwrap();
        let tv = hist.tv_distance(&law);
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn fixed_seed_reproduces_the_histogram_exactly() {
        let field = orbit_field(10);
        let a = metropolis_sample(&field, 0.8, 1.5, 5000, 42).unwrap();
        let b = metropolis_sample(&field, 0.8, 1.5, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = metropolis_sample(&field, 0.8, 1.5, 5000, 43).unwrap();
        assert_ne!(a, c, "different seeds should explore differently");
    }

    #[test]
    fn deterministic_sites_stay_frozen() {
        let field = FieldSequence::homogeneous(1.0, 12).unwrap();
        let hist = metropolis_sample(&field, 0.5, 1.0, 2000, 3).unwrap();
        assert_eq!(hist.counts().len(), 1);
        assert_eq!(hist.empirical_mass(12), 1.0);
        assert_eq!(hist.recorded(), 2000 - 200);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let field = orbit_field(4);
        assert!(metropolis_sample(&field, 1.0, 1.0, 0, 1).is_err());
        assert!(metropolis_sample(&field, -1.0, 1.0, 10, 1).is_err());
        assert!(metropolis_sample(&field, 1.0, 0.0, 10, 1).is_err());
        assert!(metropolis_sample(&field, f64::NAN, 1.0, 10, 1).is_err());
    }
}
