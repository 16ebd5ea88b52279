//! Deterministic bounds on Birkhoff-sum and quadrature errors.
//!
//! Two classical inequalities are checked numerically rather than assumed:
//! the Denjoy-Koksma bound, which controls an orbit sum over exactly `q`
//! steps when `q` is a principal-convergent denominator of the rotation
//! number, and the Hlawka-Zaremba (Koksma-Hlawka) bound, which controls the
//! quadrature error of any point set through variations and projected
//! discrepancies.

use std::collections::BTreeMap;

use super::cfrac::ContinuedFraction;
use crate::dynsys::{FieldFunction, TorusRotation};
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Slack added to the variation before declaring the inequality violated;
/// absorbs the rounding of the orbit sum itself.
const DK_SLACK: f64 = 1e-9;

/// Outcome of one Denjoy-Koksma evaluation.
#[derive(Clone, Copy, Debug)]
pub struct DkReport {
    /// Number of orbit steps summed.
    pub q: u64,
    /// `|sum_{l=1}^{q} f(T^l x) - q * integral(f)|`.
    pub lhs: f64,
    /// Total variation of `f`, the claimed bound.
    pub variation: f64,
    /// `lhs <= variation` (with rounding slack).
    pub holds: bool,
    /// Whether `q` is a principal-convergent denominator of the rotation
    /// number; the inequality is only guaranteed when this is true.
    pub applicable: bool,
}

impl DkReport {
    /// `q, lhs, variation, holds, applicable` with floats at 17 significant
    /// digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{},{}",
            self.q, self.lhs, self.variation, self.holds, self.applicable
        )
    }
}

/// Evaluate the Denjoy-Koksma inequality for one horizon `q`.
///
/// The system must be one-dimensional (the inequality concerns circle
/// rotations). `applicable` records whether `q` appears among the convergent
/// denominators of `cf`; the bound is still evaluated otherwise, which is
/// how counterexamples at non-convergent horizons are observed.
pub fn denjoy_koksma_check(
    f: &FieldFunction,
    system: &TorusRotation,
    x: &[f64],
    cf: &ContinuedFraction,
    q: u64,
) -> Result<DkReport> {
    if system.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: system.dimension(),
        });
    }
    if q == 0 {
        return Err(Error::InvalidDepth { depth: 0 });
    }
    f.check_integral_consistency(1e-8)?;
    let integral = f.integral();
    let mut acc = CompensatedSum::new();
    for l in 1..=q {
        let p = system.orbit_point(x, l)?;
        acc.add(f.eval(&p) - integral);
    }
    let lhs = acc.value().abs();
    let variation = f.variation();
    Ok(DkReport {
        q,
        lhs,
        variation,
        holds: lhs <= variation + DK_SLACK,
        applicable: cf.denominators_u64().contains(&q),
    })
}

/// The Denjoy-Koksma check at every convergent denominator `q <= q_max`
/// (deduplicated and increasing).
pub fn denjoy_koksma_ladder(
    f: &FieldFunction,
    system: &TorusRotation,
    x: &[f64],
    cf: &ContinuedFraction,
    q_max: u64,
) -> Result<Vec<DkReport>> {
    let mut qs: Vec<u64> = cf
        .denominators_u64()
        .into_iter()
        .filter(|&q| q >= 1 && q <= q_max)
        .collect();
    qs.sort_unstable();
    qs.dedup();
    qs.iter()
        .map(|&q| denjoy_koksma_check(f, system, x, cf, q))
        .collect()
}

/// Hlawka-Zaremba bound: `sum_S V_S * D*_S` over the coordinate subsets
/// carried by `variations`. Every subset with nonzero variation must come
/// with a discrepancy value for its projection.
///
/// Subset keys are sorted coordinate index lists, e.g. `[0]`, `[1]`,
/// `[0, 1]`.
pub fn hlawka_zaremba_bound(
    variations: &BTreeMap<Vec<usize>, f64>,
    discrepancies: &BTreeMap<Vec<usize>, f64>,
) -> Result<f64> {
    if variations.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut acc = CompensatedSum::new();
    for (subset, &v) in variations {
        let d = discrepancies
            .get(subset)
            .ok_or_else(|| Error::MissingProjection {
                subset: subset.clone(),
            })?;
        acc.add(v * d);
    }
    Ok(acc.value())
}

/// Actual quadrature error `|mean_l f(x_l) - integral(f)|` of a point set;
/// the quantity the Hlawka-Zaremba bound dominates.
pub fn quadrature_error<'a, I>(f: &FieldFunction, points: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    f.check_integral_consistency(1e-8)?;
    let integral = f.integral();
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for p in points {
        acc.add(f.eval(p) - integral);
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Ok((acc.value() / n as f64).abs())
}
