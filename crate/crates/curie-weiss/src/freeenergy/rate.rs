//! The Legendre–Fenchel transform of the cumulant integral and the large
//! deviation rate function of the scaled magnetization.

use super::{find_minima, lambda_jet, lambda_prime, lambda_value, FieldDistribution, ModelParams};
use crate::{Error, Result};

/// Tabulated cumulant transform data: `lambda_values[i]` is the cumulant
/// integral at `u_grid[i]`; `lambda_star_values[j]` its convex conjugate at
/// `z_grid[j]`; `rate_values[j]` the rate `conjugate - (theta/2) z^2 - shift`
/// where `shift` makes the infimum zero. `rate_at_minima` evaluates the rate
/// at the free-energy minima (where it vanishes up to numerics).
#[derive(Clone, Debug)]
pub struct RateFunction {
    pub u_grid: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub z_grid: Vec<f64>,
    pub lambda_star_values: Vec<f64>,
    pub rate_values: Vec<f64>,
    pub shift: f64,
    pub rate_at_minima: Vec<(f64, f64)>,
}

/// The conjugate is reported as +infinity when the maximizing slope is not
/// reached within this bound (the true value there exceeds several hundred,
/// so any `exp(-n * rate)` underflows regardless).
const LAMBDA_LIMIT: f64 = 700.0;
/// z-grid entries are clamped into [-1 + Z_MARGIN, 1 - Z_MARGIN]; the
/// conjugate diverges at the endpoints whenever the field can be
/// deterministic.
const Z_MARGIN: f64 = 1e-6;

/// Convex conjugate `sup_l (l z - Lambda(l))` of the cumulant integral,
/// computed by solving the stationarity condition `Lambda'(l) = z` with a
/// bracketed Newton iteration.
pub fn lambda_star(dist: &FieldDistribution, z: f64) -> Result<f64> {
    if dist.is_flat() {
        return Err(Error::FlatLambda);
    }
    if z.abs() >= 1.0 || !z.is_finite() {
        return Err(Error::BoundaryZ { z });
    }

    let slope_origin = lambda_prime(dist, 0.0)?;
    if (slope_origin - z).abs() < 1e-15 {
        // The supremum is attained at the origin, where the cumulant is 0.
        return Ok(-lambda_value(dist, 0.0)?);
    }
    let direction = if z > slope_origin { 1.0 } else { -1.0 };

    let mut near = 0.0f64;
    let mut far = direction;
    loop {
        let slope = lambda_prime(dist, far)?;
        if (slope - z) * direction >= 0.0 {
            break;
        }
        near = far;
        far *= 2.0;
        if far.abs() > LAMBDA_LIMIT {
            return Ok(f64::INFINITY);
        }
    }
    let (mut lo, mut hi) = if direction > 0.0 {
        (near, far)
    } else {
        (far, near)
    };

    let mut l = 0.5 * (lo + hi);
    for _ in 0..100 {
        let jet = lambda_jet(dist, l, 2)?;
        let residual = jet.derivative(1) - z;
        if residual < 0.0 {
            lo = l;
        } else {
            hi = l;
        }
        if residual.abs() < 1e-13 {
            break;
        }
        let curvature = jet.derivative(2);
        let newton = l - residual / curvature;
        let next = if curvature > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - l).abs() < 1e-15 * (1.0 + l.abs()) {
            l = next;
            break;
        }
        l = next;
    }
    Ok(l * z - lambda_value(dist, l)?)
}

/// Tabulate the cumulant integral, its conjugate on the (clamped) `z_grid`,
/// and the shifted rate function. The shift is the infimum of
/// `conjugate - (theta/2) z^2` over the grid together with the free-energy
/// minima, so the rate vanishes at the minimizers even when they fall
/// between grid points.
pub fn rate_function(
    params: &ModelParams,
    dist: &FieldDistribution,
    z_grid: &[f64],
) -> Result<RateFunction> {
    if z_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &z in z_grid {
        if z.abs() >= 1.0 || !z.is_finite() {
            return Err(Error::BoundaryZ { z });
        }
    }
    let z_grid: Vec<f64> = z_grid
        .iter()
        .map(|&z| z.clamp(-1.0 + Z_MARGIN, 1.0 - Z_MARGIN))
        .collect();

    const U_POINTS: usize = 201;
    const U_MAX: f64 = 8.0;
    let mut u_grid = Vec::with_capacity(U_POINTS);
    let mut lambda_values = Vec::with_capacity(U_POINTS);
    for i in 0..U_POINTS {
        let u = -U_MAX + 2.0 * U_MAX * i as f64 / (U_POINTS - 1) as f64;
        u_grid.push(u);
        lambda_values.push(lambda_value(dist, u)?);
    }

    let theta = params.theta();
    let mut lambda_star_values = Vec::with_capacity(z_grid.len());
    for &z in &z_grid {
        lambda_star_values.push(lambda_star(dist, z)?);
    }

    let report = find_minima(params, dist)?;
    let mut minima_unshifted = Vec::with_capacity(report.minima.len());
    for m in &report.minima {
        let star = lambda_star(dist, m.location)?;
        minima_unshifted.push((m.location, star - 0.5 * theta * m.location * m.location));
    }

    let mut shift = f64::INFINITY;
    for (i, &z) in z_grid.iter().enumerate() {
        let v = lambda_star_values[i] - 0.5 * theta * z * z;
        if v < shift {
            shift = v;
        }
    }
    for &(_, v) in &minima_unshifted {
        if v < shift {
            shift = v;
        }
    }

    let rate_values = z_grid
        .iter()
        .zip(&lambda_star_values)
        .map(|(&z, &star)| star - 0.5 * theta * z * z - shift)
        .collect();
    let rate_at_minima = minima_unshifted
        .into_iter()
        .map(|(m, v)| (m, v - shift))
        .collect();

    Ok(RateFunction {
        u_grid,
        lambda_values,
        z_grid,
        lambda_star_values,
        rate_values,
        shift,
        rate_at_minima,
    })
}

impl RateFunction {
    /// CSV with a cumulant table section and a rate table section.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,u,value\n");
        for (u, v) in self.u_grid.iter().zip(&self.lambda_values) {
            out.push_str(&format!("lambda,{u:.16e},{v:.16e}\n"));
        }
        out.push_str("rate,z,lambda_star,rate\n");
        for ((z, star), rate) in self
            .z_grid
            .iter()
            .zip(&self.lambda_star_values)
            .zip(&self.rate_values)
        {
            out.push_str(&format!("rate,{z:.16e},{star:.16e},{rate:.16e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Atom, FieldDistribution, ModelParams};
    use super::*;

    fn binary_entropy(z: f64) -> f64 {
        0.5 * (1.0 + z) * (1.0 + z).ln() + 0.5 * (1.0 - z) * (1.0 - z).ln()
    }

    #[test]
    fn conjugate_of_log_cosh_is_binary_entropy() {
        let dist = FieldDistribution::constant(0.5).unwrap();
        let mut z = -0.99;
        while z < 0.995 {
            let got = lambda_star(&dist, z).unwrap();
            assert!(
                (got - binary_entropy(z)).abs() < 1e-10,
                "z={z}: {got} vs {}",
                binary_entropy(z)
            );
            z += 0.03;
        }
    }

    #[test]
    fn conjugate_vanishes_at_the_mean_slope() {
        let uniform = FieldDistribution::uniform();
        assert!(lambda_star(&uniform, 0.0).unwrap().abs() < 1e-10);
        let skew = FieldDistribution::constant(0.7).unwrap();
        // Slope at the origin is 2*0.7 - 1 = 0.4.
        assert!(lambda_star(&skew, 0.4).unwrap().abs() < 1e-10);
        let star = lambda_star(&skew, 0.0).unwrap();
        assert!(star > 1e-3, "away from the mean the conjugate is positive");
    }

    #[test]
    fn conjugate_is_nonnegative_at_grid_points() {
        let dist = FieldDistribution::two_point(0.2).unwrap();
        for i in 0..40 {
            let z = -0.975 + 0.05 * i as f64;
            let star = lambda_star(&dist, z).unwrap();
            assert!(star > -1e-11, "z={z}: {star}");
        }
    }

    #[test]
    fn flat_distribution_is_rejected() {
        let flat = FieldDistribution::atomic(vec![
            Atom {
                location: 0.0,
                weight: 0.25,
            },
            Atom {
                location: 1.0,
                weight: 0.75,
            },
        ])
        .unwrap();
        assert!(matches!(lambda_star(&flat, 0.3), Err(Error::FlatLambda)));
    }

    #[test]
    fn boundary_z_is_rejected() {
        let dist = FieldDistribution::uniform();
        assert!(matches!(
            lambda_star(&dist, 1.0),
            Err(Error::BoundaryZ { .. })
        ));
        let params = ModelParams::new(1.0, 1.0).unwrap();
        assert!(rate_function(&params, &dist, &[0.0, -1.2]).is_err());
    }

    #[test]
    fn rate_vanishes_at_free_energy_minima() {
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let z_grid: Vec<f64> = (0..81).map(|i| -0.8 + 0.02 * i as f64).collect();
        let rf = rate_function(&params, &dist, &z_grid).unwrap();
        assert_eq!(rf.rate_at_minima.len(), 2);
        for &(m, rate) in &rf.rate_at_minima {
            assert!(rate.abs() < 1e-8, "rate at {m} is {rate}");
        }
        for (&z, &rate) in rf.z_grid.iter().zip(&rf.rate_values) {
            assert!(rate > -1e-10, "rate at z={z} is {rate}");
        }
    }

    #[test]
    fn tabulated_cumulant_is_convex_and_zero_at_origin() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let dist = FieldDistribution::two_point(0.3).unwrap();
        let rf = rate_function(&params, &dist, &[-0.5, 0.0, 0.5]).unwrap();
        let mid = rf.u_grid.len() / 2;
        assert_eq!(rf.u_grid[mid], 0.0);
        assert!(rf.lambda_values[mid].abs() < 1e-13);
        for w in rf.lambda_values.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] > -1e-9);
        }
    }

    #[test]
    fn subcritical_rate_has_unique_zero_at_origin() {
        let params = ModelParams::new(0.8, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let z_grid: Vec<f64> = (0..41).map(|i| -0.6 + 0.03 * i as f64).collect();
        let rf = rate_function(&params, &dist, &z_grid).unwrap();
        assert_eq!(rf.rate_at_minima.len(), 1);
        assert!(rf.rate_at_minima[0].0.abs() < 1e-9);
        for (&z, &rate) in rf.z_grid.iter().zip(&rf.rate_values) {
            if z.abs() > 0.1 {
                assert!(
                    rate > 1e-4,
                    "rate should grow away from 0: z={z} rate={rate}"
                );
            }
        }
    }

    #[test]
    fn grid_is_clamped_away_from_the_boundary() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let dist = FieldDistribution::constant(0.5).unwrap();
        let rf = rate_function(&params, &dist, &[-0.9999999, 0.0, 0.9999999]).unwrap();
        assert!(rf.z_grid[0] >= -1.0 + 1e-6);
        assert!(rf.z_grid[2] <= 1.0 - 1e-6);
        assert!(rf.rate_values.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn csv_sections_are_present() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let dist = FieldDistribution::uniform();
        let rf = rate_function(&params, &dist, &[0.0, 0.25]).unwrap();
        let csv = rf.to_csv();
        assert!(csv.starts_with("lambda,u,value\n"));
        assert!(csv.contains("\nrate,z,lambda_star,rate\n"));
        assert_eq!(csv.lines().count(), 2 + rf.u_grid.len() + rf.z_grid.len());
    }
}
