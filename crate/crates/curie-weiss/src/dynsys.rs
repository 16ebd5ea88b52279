//! Irrational rotations of the torus and the field sequences they drive.
//!
//! The dynamical system is `T(x) = x + alpha mod 1` componentwise on the
//! r-torus. Site `i` of the spin chain sees the field `p_i = f(T^i x)`, so
//! everything downstream (free energy, magnetization law) is a deterministic
//! function of `(alpha, x, f)`.
//!
//! Orbit points are computed as `frac(x + i * alpha)` with the product
//! `i * alpha` split exactly into high and low parts (one multiply plus an
//! FMA residual), so there is no accumulated drift: the point for index `i`
//! is the same whether or not indices below it were ever evaluated.

use crate::numeric::{frac, ls_slope, quad, CompensatedSum};
use crate::{Error, Result};

/// Fractional part of the golden ratio, `(sqrt(5) - 1) / 2`. The canonical
/// badly-approximable rotation number: all continued-fraction quotients 1.
pub fn golden_ratio_frac() -> f64 {
    (5.0f64.sqrt() - 1.0) / 2.0
}

/// Fractional part of sqrt(2): all continued-fraction quotients 2.
pub fn sqrt2_frac() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// Rotation of the r-torus by a fixed angle vector, each component in (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct TorusRotation {
    alpha: Vec<f64>,
}

impl TorusRotation {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, &value) in alpha.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidAngle { index, value });
            }
        }
        Ok(TorusRotation { alpha })
    }

    /// One-dimensional rotation by the golden ratio's fractional part.
    pub fn golden() -> Self {
        TorusRotation {
            alpha: vec![golden_ratio_frac()],
        }
    }

    /// One-dimensional rotation by sqrt(2) - 1.
    pub fn sqrt2() -> Self {
        TorusRotation {
            alpha: vec![sqrt2_frac()],
        }
    }

    pub fn dimension(&self) -> usize {
        self.alpha.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.alpha
    }

    /// `T^i x`, computed independently of every other index.
    ///
    /// `i * alpha` is split into rounded product + exact FMA residual, the
    /// fractional part of the rounded product is extracted exactly, and the
    /// pieces are recombined with a single final reduction into [0, 1).
    pub fn orbit_point(&self, x: &[f64], i: u64) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut out = Vec::with_capacity(self.alpha.len());
        for (&a, &x0) in self.alpha.iter().zip(x) {
            out.push(rotate_component(x0, a, i));
        }
        Ok(out)
    }

    /// The orbit `(T^1 x, ..., T^n x)`, row-major `n x r`.
    pub fn orbit(&self, x: &[f64], n: usize) -> Result<Orbit> {
        self.check_point(x)?;
        let r = self.alpha.len();
        let mut data = Vec::with_capacity(n * r);
        for i in 1..=n as u64 {
            for (&a, &x0) in self.alpha.iter().zip(x) {
                data.push(rotate_component(x0, a, i));
            }
        }
        Ok(Orbit { dim: r, data })
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                got: x.len(),
            });
        }
        for (index, &value) in x.iter().enumerate() {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidPoint { index, value });
            }
        }
        Ok(())
    }
}

/// frac(x0 + i * a) with the product split exactly (hi = rounded product,
/// lo = FMA residual), so precision is limited only by the representation of
/// `a` itself, not by the size of `i`.
#[inline]
fn rotate_component(x0: f64, a: f64, i: u64) -> f64 {
    let n = i as f64;
    let hi = n * a;
    let lo = n.mul_add(a, -hi);
    // hi - floor(hi) is exact; lo and x0 are each below 1 in magnitude.
    let f = (hi - hi.floor()) + lo + x0;
    frac(f)
}

/// A finite orbit, dense row-major storage.
#[derive(Clone, Debug)]
pub struct Orbit {
    dim: usize,
    data: Vec<f64>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// i-th point, zero-based (the orbit starts at `T^1 x`).
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// First coordinates only; the common case for one-dimensional systems.
    pub fn first_coordinates(&self) -> Vec<f64> {
        self.points().map(|p| p[0]).collect()
    }
}

/// The external-field profile `f`: a map from the torus into [0, 1].
///
/// All built-in kinds depend on the first coordinate only, so their integral
/// against the uniform measure reduces to a one-dimensional integral with a
/// closed form. The table kind is piecewise constant on a uniform grid of
/// [0, 1); its exact mean and total variation are derived from the values,
/// and an optional declared integral can be attached for cross-checking
/// externally produced tables.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldFunction {
    /// `f(x) = x_1`. Integral 1/2, variation 1.
    Identity,
    /// `f == c`. Integral c, variation 0.
    Constant(f64),
    /// `f(x) = lambda` on `x_1 < 1/2`, else `1 - lambda`: the balanced
    /// two-point field. Integral 1/2, variation |1 - 2 lambda|.
    TwoPoint { lambda: f64 },
    /// Piecewise constant on `[j/M, (j+1)/M)`.
    Table {
        values: Vec<f64>,
        declared_integral: Option<f64>,
    },
}

impl FieldFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidFieldParameter {
                name: "c",
                value: c,
            });
        }
        Ok(FieldFunction::Constant(c))
    }

    pub fn two_point(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidFieldParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(FieldFunction::TwoPoint { lambda })
    }

    /// Rejects values outside [0, 1] up front; a corrupt table must not make
    /// it into any downstream probability.
    pub fn table(values: Vec<f64>, declared_integral: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::FieldValueOutOfRange { index, value });
            }
        }
        Ok(FieldFunction::Table {
            values,
            declared_integral,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x0 = x[0];
        match self {
            FieldFunction::Identity => x0,
            FieldFunction::Constant(c) => *c,
            FieldFunction::TwoPoint { lambda } => {
                if x0 < 0.5 {
                    *lambda
                } else {
                    1.0 - *lambda
                }
            }
            FieldFunction::Table { values, .. } => {
                let m = values.len();
                let mut idx = (x0 * m as f64) as usize;
                if idx >= m {
                    idx = m - 1;
                }
                values[idx]
            }
        }
    }

    /// The integral against the uniform measure: the declared value when one
    /// was attached, otherwise the exact closed form.
    pub fn integral(&self) -> f64 {
        match self {
            FieldFunction::Table {
                declared_integral: Some(v),
                ..
            } => *v,
            _ => self.exact_integral(),
        }
    }

    /// Closed-form integral, ignoring any declaration.
    pub fn exact_integral(&self) -> f64 {
        match self {
            FieldFunction::Identity => 0.5,
            FieldFunction::Constant(c) => *c,
            FieldFunction::TwoPoint { .. } => 0.5,
            FieldFunction::Table { values, .. } => {
                let mut acc = CompensatedSum::new();
                for &v in values {
                    acc.add(v);
                }
                acc.value() / values.len() as f64
            }
        }
    }

    /// Integral recomputed by adaptive quadrature over the first coordinate
    /// (every kind depends on `x_1` alone). Table cells are integrated one by
    /// one so the jumps never meet a quadrature panel.
    pub fn quadrature_integral(&self, abs_tol: f64) -> Result<f64> {
        match self {
            FieldFunction::Table { values, .. } => {
                let m = values.len() as f64;
                let mut total = CompensatedSum::new();
                for (j, _) in values.iter().enumerate() {
                    let a = j as f64 / m;
                    let b = (j as f64 + 1.0) / m;
                    total.add(quad::integrate(|x| self.eval(&[x]), a, b, abs_tol / m)?);
                }
                Ok(total.value())
            }
            FieldFunction::TwoPoint { .. } => {
                let left = quad::integrate(|x| self.eval(&[x]), 0.0, 0.5, abs_tol / 2.0)?;
                let right = quad::integrate(|x| self.eval(&[x]), 0.5, 1.0, abs_tol / 2.0)?;
                Ok(left + right)
            }
            _ => quad::integrate(|x| self.eval(&[x]), 0.0, 1.0, abs_tol),
        }
    }

    /// Total variation over [0, 1] (first coordinate): the constant that
    /// enters the Denjoy-Koksma and Hlawka-Zaremba bounds.
    pub fn variation(&self) -> f64 {
        match self {
            FieldFunction::Identity => 1.0,
            FieldFunction::Constant(_) => 0.0,
            FieldFunction::TwoPoint { lambda } => (1.0 - 2.0 * lambda).abs(),
            FieldFunction::Table { values, .. } => {
                let mut v = 0.0;
                for w in values.windows(2) {
                    v += (w[1] - w[0]).abs();
                }
                v
            }
        }
    }

    /// Error if a declared integral disagrees with quadrature beyond `tol`.
    pub fn check_integral_consistency(&self, tol: f64) -> Result<()> {
        if let FieldFunction::Table {
            declared_integral: Some(declared),
            ..
        } = self
        {
            let computed = self.quadrature_integral(tol.min(1e-10))?;
            if (declared - computed).abs() > tol {
                return Err(Error::IntegralMismatch {
                    declared: *declared,
                    computed,
                });
            }
        }
        Ok(())
    }
}

/// The field values `p_i = f(T^i x)`, i = 1..n, with the triple that
/// produced them. Evaluating a longer sequence from the same triple extends
/// this one exactly (orbit points are index-independent).
#[derive(Clone, Debug)]
pub struct FieldSequence {
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

/// What generated a field sequence.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub system: TorusRotation,
    pub field: FieldFunction,
    pub start: Vec<f64>,
}

impl FieldSequence {
    /// Evaluate `f` along the orbit of `x`.
    pub fn along_orbit(
        system: &TorusRotation,
        field: &FieldFunction,
        x: &[f64],
        n: usize,
    ) -> Result<Self> {
        let orbit = system.orbit(x, n)?;
        let values = orbit.points().map(|p| field.eval(p)).collect();
        Ok(FieldSequence {
            values,
            provenance: Some(Provenance {
                system: system.clone(),
                field: field.clone(),
                start: x.to_vec(),
            }),
        })
    }

    /// A constant field `p_i == p` (the classical homogeneous model).
    pub fn homogeneous(p: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::FieldValueOutOfRange { index: 0, value: p });
        }
        Ok(FieldSequence {
            values: vec![p; n],
            provenance: None,
        })
    }

    /// Adopt externally computed values (validated into [0, 1]).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::FieldValueOutOfRange { index, value });
            }
        }
        Ok(FieldSequence {
            values,
            provenance: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        acc.value() / self.values.len() as f64
    }
}

/// Running deviations `d_n = sum_{i<=n} (h(T^i x) - integral(h))` sampled on
/// a schedule, with a log-log exponent fit over the schedule's upper half.
#[derive(Clone, Debug)]
pub struct ErgodicDeviationTrace {
    pub ns: Vec<usize>,
    pub deviations: Vec<f64>,
    /// Least-squares slope of log|d_n| vs log n and its standard error;
    /// `None` when too few usable points remain.
    pub alpha_hat: Option<(f64, f64)>,
    /// All sampled deviations were below 1e-12 (constant-like h).
    pub degenerate: bool,
}

/// Deviations of Birkhoff sums from the space average along a schedule of
/// horizons. The integral is the declared/closed-form one, cross-checked
/// against quadrature when a declaration is present.
pub fn ergodic_deviation(
    h: &FieldFunction,
    system: &TorusRotation,
    x: &[f64],
    schedule: &[usize],
) -> Result<ErgodicDeviationTrace> {
    if schedule.is_empty() || schedule[0] == 0 {
        return Err(Error::InvalidSchedule);
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule);
    }
    h.check_integral_consistency(1e-8)?;
    let integral = h.integral();

    let n_max = *schedule.last().expect("nonempty schedule");
    let mut acc = CompensatedSum::new();
    let mut deviations = Vec::with_capacity(schedule.len());
    let mut next = 0usize;
    for i in 1..=n_max as u64 {
        let p = system.orbit_point(x, i)?;
        acc.add(h.eval(&p) - integral);
        if next < schedule.len() && schedule[next] == i as usize {
            deviations.push(acc.value());
            next += 1;
        }
    }

    const FLOOR: f64 = 1e-12;
    let degenerate = deviations.iter().all(|d| d.abs() < FLOOR);
    // Fit over the upper half of the schedule, skipping near-zero values
    // whose logs are pure noise.
    let start = schedule.len() / 2;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in start..schedule.len() {
        if deviations[k].abs() >= FLOOR {
            xs.push((schedule[k] as f64).ln());
            ys.push(deviations[k].abs().ln());
        }
    }
    let alpha_hat = if degenerate { None } else { ls_slope(&xs, &ys) };

    Ok(ErgodicDeviationTrace {
        ns: schedule.to_vec(),
        deviations,
        alpha_hat,
        degenerate,
    })
}
