//! Shared numeric kernels: compensated summation, stable log-space
//! arithmetic, adaptive quadrature, and truncated Taylor jets.

pub mod jet;
pub mod quad;

/// Kahan-Babuška (neumaier) compensated accumulator. Orbit sums run over up
/// to 10^7 terms of order one; plain summation would lose ~1e-10 absolute,
/// compensation keeps the error near one ulp of the total.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// log(e^a + e^b) without overflow; -inf operands behave as zero mass.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(sum e^{x_i}) over a slice, stable against overflow and empty tails.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::new();
    for &x in xs {
        acc.add((x - hi).exp());
    }
    hi + acc.value().ln()
}

/// Distance from t to the nearest integer.
#[inline]
pub fn dist_to_nearest_int(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// Fractional part reduced into [0, 1).
#[inline]
pub fn frac(t: f64) -> f64 {
    let mut f = t - t.floor();
    // t just below an integer can round up to exactly 1.0.
    if f >= 1.0 {
        f -= 1.0;
    }
    if f < 0.0 {
        f += 1.0;
    }
    f
}

/// Ordinary least squares fit y = a + b x; returns (slope, stderr of slope).
///
/// Used for log-log exponent estimates, where the residual spread is the
/// honest uncertainty statement. Needs at least three points for a stderr.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if n == 2 {
        return Some((slope, f64::INFINITY));
    }
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let se = (ss_res / ((nf - 2.0) * sxx)).sqrt();
    Some((slope, se))
}
