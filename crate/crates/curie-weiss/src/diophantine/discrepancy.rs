//! Star discrepancy: exact in dimension one, bounded from below by a grid
//! scan in higher dimensions, bounded from above by exponential sums.
//!
//! `D*_n = sup_t |#{x_l < t componentwise}/n - vol[0, t)|` over `t` in the
//! unit cube, with strict inequalities in the counting (points sitting on a
//! box edge are outside the box).

use crate::numeric::frac;
use crate::{Error, Result};

/// How a reported discrepancy value was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiscrepancyMethod {
    /// Exact value by the sorted-breakpoint formula (r = 1).
    Exact1d,
    /// Lower bound: the sup restricted to a uniform grid of corners.
    GridLowerBound { resolution: usize },
    /// Upper bound: Erdős-Turán-Koksma from exponential sums.
    EtkUpperBound { m: u64, c_r: f64 },
}

#[derive(Clone, Debug)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub dim: usize,
    pub value: f64,
    pub method: DiscrepancyMethod,
}

impl DiscrepancyReport {
    /// `n, dim, value, method, constants` with floats at 17 significant digits.
    pub fn csv_row(&self) -> String {
        match self.method {
            DiscrepancyMethod::Exact1d => {
                format!("{},{},{:.16e},exact-1d,", self.n, self.dim, self.value)
            }
            DiscrepancyMethod::GridLowerBound { resolution } => format!(
                "{},{},{:.16e},grid-lower-bound,resolution={resolution}",
                self.n, self.dim, self.value
            ),
            DiscrepancyMethod::EtkUpperBound { m, c_r } => format!(
                "{},{},{:.16e},etk-upper-bound,m={m};c_r={c_r}",
                self.n, self.dim, self.value
            ),
        }
    }
}

fn validate_1d(points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in points.iter().enumerate() {
        if !(0.0..1.0).contains(&value) {
            return Err(Error::InvalidPoint { index, value });
        }
    }
    Ok(())
}

/// Exact one-dimensional star discrepancy.
///
/// With the sample sorted, the sup of `|A(t)/n - t|` over all t is attained
/// against one of the order statistics:
/// `D* = max_i max(i/n - x_(i), x_(i) - (i-1)/n)`.
pub fn star_discrepancy_1d(points: &[f64]) -> Result<DiscrepancyReport> {
    validate_1d(points)?;
    let n = points.len();
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let up = (i + 1) as f64 / nf - x;
        let dn = x - i as f64 / nf;
        d = d.max(up).max(dn);
    }
    Ok(DiscrepancyReport {
        n,
        dim: 1,
        value: d,
        method: DiscrepancyMethod::Exact1d,
    })
}

/// Budget knobs for the grid scan.
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    /// Cap on `(resolution + 1)^r` grid corners to visit.
    pub cell_cap: u128,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { cell_cap: 1 << 30 }
    }
}

/// Lower bound on the star discrepancy in dimension r >= 2: the sup over
/// the corner grid `t in {0, 1/R, ..., 1}^r`. Monotone under grid
/// refinement by doubling (coarser grids are subsets of finer ones).
///
/// The scan sweeps the first coordinate, maintaining a histogram over the
/// remaining coordinates that is prefix-summed once per slice, so the work
/// is `O((R+1)^r)` and the memory `O((R+1)^{r-1})`.
pub fn star_discrepancy_grid(
    points: &[Vec<f64>],
    resolution: usize,
    opts: &GridOptions,
) -> Result<DiscrepancyReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = points[0].len();
    if dim < 2 {
        return Err(Error::GridNeedsHigherDimension);
    }
    if resolution < 2 {
        return Err(Error::InvalidDepth { depth: resolution });
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        for (index, &value) in p.iter().enumerate() {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidPoint { index, value });
            }
        }
    }
    let cells = (resolution as u128 + 1).checked_pow(dim as u32);
    match cells {
        Some(c) if c <= opts.cell_cap => {}
        Some(c) => {
            return Err(Error::BudgetExceeded {
                needed: c,
                cap: opts.cell_cap,
            })
        }
        None => {
            return Err(Error::BudgetExceeded {
                needed: u128::MAX,
                cap: opts.cell_cap,
            })
        }
    }

    let r = resolution;
    let n = points.len();
    let nf = n as f64;
    // t-values of the grid, computed once.
    let ts: Vec<f64> = (0..=r).map(|j| j as f64 / r as f64).collect();

    // For each point and each non-swept dimension, the smallest grid index
    // j with x < j/R (strict box counting).
    let side = r + 1;
    let hist_len = side.pow((dim - 1) as u32);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
    let jmins: Vec<Vec<usize>> = points
        .iter()
        .map(|p| p[1..].iter().map(|&x| min_index_above(x, r, &ts)).collect())
        .collect();

    let mut hist = vec![0u32; hist_len];
    let mut prefix = vec![0u32; hist_len];
    let mut cursor = 0usize;
    let mut sup = 0.0f64;
    for j0 in 0..=r {
        let t0 = ts[j0];
        while cursor < n && points[order[cursor]][0] < t0 {
            let jm = &jmins[order[cursor]];
            let mut idx = 0usize;
            for &j in jm {
                idx = idx * side + j;
            }
            hist[idx] += 1;
            cursor += 1;
        }
        if j0 == 0 {
            continue; // volume factor 0 and A = 0: no contribution
        }
        prefix.copy_from_slice(&hist);
        // Prefix sums along each of the dim-1 histogram axes.
        let mut stride = 1usize;
        for _axis in 0..dim - 1 {
            let block = stride * side;
            for start in (0..hist_len).step_by(block) {
                for k in 1..side {
                    let base = start + k * stride;
                    for off in 0..stride {
                        prefix[base + off] += prefix[base + off - stride];
                    }
                }
            }
            stride = block;
        }
        // Visit every corner of this slice.
        sup = sup.max(slice_sup(&prefix, side, dim - 1, t0, &ts, nf));
    }

    Ok(DiscrepancyReport {
        n,
        dim,
        value: sup,
        method: DiscrepancyMethod::GridLowerBound { resolution },
    })
}

/// Smallest grid index j with x < ts[j]; exact against the same floats the
/// sweep compares with.
fn min_index_above(x: f64, r: usize, ts: &[f64]) -> usize {
    let mut j = ((x * r as f64).floor() as usize + 1).min(r);
    while j > 0 && x < ts[j - 1] {
        j -= 1;
    }
    while j <= r && x >= ts[j] {
        j += 1;
    }
    debug_assert!(j <= r, "point {x} not strictly below 1");
    j
}

fn slice_sup(prefix: &[u32], side: usize, axes: usize, t0: f64, ts: &[f64], nf: f64) -> f64 {
    let mut sup = 0.0f64;
    if axes == 1 {
        for (j, &count) in prefix.iter().enumerate() {
            let vol = t0 * ts[j];
            sup = sup.max((count as f64 / nf - vol).abs());
        }
        return sup;
    }
    // Generic odometer over the remaining axes.
    let mut idx = vec![0usize; axes];
    let len = prefix.len();
    for flat in 0..len {
        let mut rem = flat;
        let mut vol = t0;
        for slot in idx.iter_mut().rev() {
            *slot = rem % side;
            rem /= side;
            vol *= ts[*slot];
        }
        sup = sup.max((prefix[flat] as f64 / nf - vol).abs());
    }
    sup
}

/// `r(h) = prod max(1, |h_i|)`, the weight in the Erdős-Turán-Koksma sum.
pub fn r_of(h: &[i64]) -> u64 {
    h.iter().map(|&c| (c.unsigned_abs()).max(1)).product()
}

/// Constants for the Erdős-Turán-Koksma bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct EtkOptions {
    /// Override the built-in constant `C_r = 2 (3/2)^r` (known valid for
    /// r <= 3; higher dimensions must supply their own).
    pub c_r: Option<f64>,
}

fn builtin_etk_constant(dim: usize) -> Option<f64> {
    // 2 * (3/2)^r: 3, 4.5, 6.75. Any valid constant keeps the bound an
    // upper bound; these are the standard small-dimension values.
    match dim {
        1 => Some(3.0),
        2 => Some(4.5),
        3 => Some(6.75),
        _ => None,
    }
}

/// Erdős-Turán-Koksma upper bound
/// `D*_n <= C_r (1/m + sum_{0 < r(h), |h|_inf <= m} |S_n(h)| / (n r(h)))`
/// with `S_n(h) = sum_l exp(2 pi i <h, x_l>)` computed directly.
///
/// `h = 0` contributes the trivial sum `n` and is excluded; conjugate pairs
/// `h, -h` have equal moduli, so only a half box is enumerated and doubled.
pub fn etk_bound(points: &[Vec<f64>], m: u64, opts: &EtkOptions) -> Result<DiscrepancyReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if m == 0 {
        return Err(Error::InvalidDepth { depth: 0 });
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        for (index, &value) in p.iter().enumerate() {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidPoint { index, value });
            }
        }
    }
    let c_r = opts
        .c_r
        .or_else(|| builtin_etk_constant(dim))
        .ok_or(Error::MissingEtkConstant { dim })?;

    let n = points.len();
    let nf = n as f64;
    let mut sum = 0.0f64;
    let mut h = vec![0i64; dim];
    let mi = m as i64;
    // Enumerate the half box: skip h = 0, take each +/- pair once.
    'outer: loop {
        // advance odometer over [-m, m]^dim
        let mut d = dim;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            if h[d] < mi {
                h[d] += 1;
                for slot in h.iter_mut().skip(d + 1) {
                    *slot = -mi;
                }
                break;
            }
        }
        // Half-box filter: first nonzero component positive.
        match h.iter().find(|&&c| c != 0) {
            None => continue,
            Some(&c) if c < 0 => continue,
            _ => {}
        }
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for p in points {
            let mut dot = 0.0f64;
            for (hc, &x) in h.iter().zip(p) {
                dot += *hc as f64 * x;
            }
            let (s, c) = (std::f64::consts::TAU * frac(dot)).sin_cos();
            re += c;
            im += s;
        }
        let modulus = re.hypot(im) / nf;
        sum += 2.0 * modulus / r_of(&h) as f64;
    }

    Ok(DiscrepancyReport {
        n,
        dim,
        value: c_r * (1.0 / m as f64 + sum),
        method: DiscrepancyMethod::EtkUpperBound { m, c_r },
    })
}
