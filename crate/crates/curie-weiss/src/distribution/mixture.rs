//! Relative weights of the mixture components that the magnetization law
//! splits into when the limiting free energy has several global minima.

use crate::dynsys::FieldSequence;
use crate::freeenergy::{g_n_value, l_value, FreeEnergyReport};
use crate::numeric::jet::factorial;
use crate::numeric::CompensatedSum;
use crate::{Error, Result};
use statrs::function::gamma::gamma;

/// Per-minimum weights in log scale, paired with the minimum locations.
/// Only ratios are meaningful; [`MixtureWeights::normalized`] converts to
/// probabilities.
#[derive(Clone, Debug)]
pub struct MixtureWeights {
    /// `(location, log weight)` pairs, ascending by location.
    pub entries: Vec<(f64, f64)>,
}

impl MixtureWeights {
    /// Weights as probabilities, computed stably by shifting out the
    /// largest log weight before exponentiating.
    pub fn normalized(&self) -> Vec<(f64, f64)> {
        let top = self
            .entries
            .iter()
            .fold(f64::NEG_INFINITY, |m, &(_, lw)| m.max(lw));
        let mut total = CompensatedSum::new();
        let shifted: Vec<f64> = self
            .entries
            .iter()
            .map(|&(_, lw)| {
                let w = (lw - top).exp();
                total.add(w);
                w
            })
            .collect();
        let total = total.value();
        self.entries
            .iter()
            .zip(shifted)
            .map(|(&(m, _), w)| (m, w / total))
            .collect()
    }

    /// Expectation of `h` under the discrete law that puts the normalized
    /// weights on the component locations.
    pub fn predict(&self, mut h: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (m, w) in self.normalized() {
            acc.add(w * h(m));
        }
        acc.value()
    }
}

/// Laplace-approximation weight of each global minimum for the `n`-site
/// model: a minimum of type `2k`, strength `lambda`, contributes
/// `n^{-1/2k} e^{-n G_n(m)} lambda^{-1/2k} * 2 Gamma(1 + 1/2k) (2k)!^{1/2k}`.
pub fn mixture_weights(report: &FreeEnergyReport, field: &FieldSequence) -> Result<MixtureWeights> {
    if report.minima.is_empty() || field.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = field.len() as f64;
    let mut entries = Vec::with_capacity(report.minima.len());
    for rec in &report.minima {
        let inv = 1.0 / rec.order as f64;
        let g_n = g_n_value(&report.params, field, rec.location)?;
        let log_w = -inv * n.ln() - n * g_n - inv * rec.strength.ln()
            + (2.0 * gamma(1.0 + inv)).ln()
            + inv * factorial(rec.order).ln();
        entries.push((rec.location, log_w));
    }
    Ok(MixtureWeights { entries })
}

/// Exact two-component log weights for a symmetric supercritical pair
/// `+-m`: `log b_{+-m} = sum_j log(p_j e^{+-theta m} + (1 - p_j) e^{-+theta m})`,
/// evaluated stably one site at a time.
pub fn two_peak_log_weights(
    field: &FieldSequence,
    params: &crate::freeenergy::ModelParams,
    m: f64,
) -> Result<MixtureWeights> {
    if field.is_empty() {
        return Err(Error::EmptyInput);
    }
    let u = params.theta() * m;
    let mut plus = CompensatedSum::new();
    let mut minus = CompensatedSum::new();
    for &p in field.values() {
        plus.add(l_value(p, u));
        minus.add(l_value(p, -u));
    }
    Ok(MixtureWeights {
        entries: vec![(-m, minus.value()), (m, plus.value())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{FieldFunction, TorusRotation};
    use crate::freeenergy::{find_minima, FieldDistribution, ModelParams};

    #[test]
    fn a_single_minimum_gets_all_the_weight() {
        let params = ModelParams::new(0.5, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let report = find_minima(&params, &dist).unwrap();
        assert_eq!(report.minima.len(), 1);
        let field = FieldSequence::homogeneous(0.5, 64).unwrap();
        let w = mixture_weights(&report, &field).unwrap();
        let probs = w.normalized();
        assert_eq!(probs.len(), 1);
        assert!((probs[0].1 - 1.0).abs() < 1e-15);
        assert!((w.predict(|m| m) - probs[0].0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_field_gives_exactly_balanced_peaks() {
        // With every site at 1/2 the two per-site factors coincide term by
        // term, so the two log weights must be bit-for-bit equal.
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let field = FieldSequence::homogeneous(0.5, 101).unwrap();
        let w = two_peak_log_weights(&field, &params, 0.9575040240772688).unwrap();
        assert_eq!(w.entries[0].1, w.entries[1].1);
        let probs = w.normalized();
        assert!((probs[0].1 - 0.5).abs() < 1e-15);
        assert!((probs[1].1 - 0.5).abs() < 1e-15);
        // And the predicted magnetization vanishes by symmetry.
        assert!(w.predict(|m| m).abs() < 1e-15);
    }

    #[test]
    fn predict_matches_a_hand_mixture() {
        let w = MixtureWeights {
            entries: vec![(-0.5, 0.0), (0.5, std::f64::consts::LN_2)],
        };
        // Weights 1:2, so P(-0.5) = 1/3, P(0.5) = 2/3.
        let probs = w.normalized();
        assert!((probs[0].1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((probs[1].1 - 2.0 / 3.0).abs() < 1e-15);
        let mean = w.predict(|m| m);
        assert!((mean - (0.5 * 2.0 / 3.0 - 0.5 / 3.0)).abs() < 1e-15);
        let second = w.predict(|m| m * m);
        assert!((second - 0.25).abs() < 1e-15);
    }

    #[test]
    fn laplace_and_two_peak_weights_agree_for_a_symmetric_pair() {
        // For two minima of the same order and strength every factor except
        // e^{-n G_n} cancels in the weight ratio, and the product form is
        // that same ratio, so the two code paths must agree to rounding.
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let report = find_minima(&params, &dist).unwrap();
        assert_eq!(report.minima.len(), 2);
        let m = report.minima[1].location;
        let system = TorusRotation::golden();
        let field =
            FieldSequence::along_orbit(&system, &FieldFunction::Identity, &[0.2], 500).unwrap();
        let general = mixture_weights(&report, &field).unwrap().normalized();
        let exact = two_peak_log_weights(&field, &params, m)
            .unwrap()
            .normalized();
        assert!(
            (general[1].1 - exact[1].1).abs() < 1e-9,
            "{} vs {}",
            general[1].1,
            exact[1].1
        );
    }

    #[test]
    fn mixture_prediction_approximates_the_finite_law() {
        // Supercritical model on a golden-rotation orbit: the predicted
        // E[(M/n)^2] from the two-point mixture must approach the exact
        // finite-n Gibbs expectation as n grows.
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let report = find_minima(&params, &dist).unwrap();
        let system = TorusRotation::golden();
        let mut gaps = Vec::new();
        for n in [300usize, 3000] {
            let field =
                FieldSequence::along_orbit(&system, &FieldFunction::Identity, &[0.2], n).unwrap();
            let weights = mixture_weights(&report, &field).unwrap();
            let predicted = weights.predict(|m| m * m);
            let law = crate::distribution::gibbs_pmf(&field, 2.0, 1.0).unwrap();
            let nn = n as f64;
            let exact = law.variance() / (nn * nn) + (law.mean() / nn).powi(2);
            gaps.push((predicted - exact).abs());
        }
        assert!(gaps[1] < gaps[0], "gap should shrink with n: {gaps:?}");
        assert!(gaps[1] < 5e-3, "gap at n = 3000: {}", gaps[1]);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let report = find_minima(&params, &dist).unwrap();
        let empty = FieldSequence::from_values(Vec::new());
        assert!(empty.is_err() || mixture_weights(&report, &empty.unwrap()).is_err());
    }
}
