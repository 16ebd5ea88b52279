//! The analytic core: the per-site log-moment function `L`, its integral
//! `Lambda` against the field distribution, the finite-n and limiting free
//! energies, minima classification, critical temperature, and the large
//! deviation rate function.
//!
//! Everything is built from one scalar function,
//! `L(phi, s) = log(phi e^s + (1 - phi) e^{-s})`,
//! evaluated in a form stable for large `|s|`, together with its truncated
//! Taylor expansions (jets) for derivatives up to order 12. Integrals
//! against an atomic field distribution are exact weighted sums; against the
//! uniform distribution they go through adaptive quadrature, including
//! coefficientwise quadrature of jets.

mod minima;
mod rate;

pub use minima::{
    critical_beta, find_minima, hypothesis_h, spontaneous_magnetization, FreeEnergyReport, HStatus,
    HWitness, MinimumRecord, Phase,
};
pub use rate::{lambda_star, rate_function, RateFunction};

use crate::dynsys::{FieldFunction, FieldSequence};
use crate::numeric::jet::Jet;
use crate::numeric::{quad, CompensatedSum};
use crate::{Error, Result};

/// Inverse temperature and coupling constant, both strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    beta: f64,
    coupling: f64,
}

impl ModelParams {
    pub fn new(beta: f64, coupling: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::InvalidParams { beta, coupling });
        }
        Ok(ModelParams { beta, coupling })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// The product `beta * J`, the only combination the free energy sees.
    pub fn theta(&self) -> f64 {
        self.beta * self.coupling
    }
}

/// A point mass of the field distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Moments of the field distribution that drive the phase structure:
/// `a = E[4 phi (1 - phi)]`, `i2 = E[(2 phi - 1)^2]`, `i4 = E[(2 phi - 1)^4]`.
/// The identity `a = 1 - i2` holds pointwise and is used to derive `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub a: f64,
    pub i2: f64,
    pub i4: f64,
}

#[derive(Clone, Debug)]
enum Repr {
    Uniform,
    Atomic(Vec<Atom>),
}

/// Distribution of the field value `phi = f(y)` under the invariant measure:
/// either the uniform density on [0, 1] or a finite atomic measure
/// (including quadrature-sampled pushforwards of arbitrary fields).
#[derive(Clone, Debug)]
pub struct FieldDistribution {
    repr: Repr,
    moments: Moments,
}

/// Absolute tolerance for quadrature against the uniform distribution.
const QUAD_TOL: f64 = 1e-12;
/// Coefficientwise tolerance for jet quadrature.
const JET_QUAD_TOL: f64 = 1e-12;

impl FieldDistribution {
    pub fn uniform() -> Self {
        FieldDistribution {
            repr: Repr::Uniform,
            moments: Moments {
                mean: 0.5,
                a: 2.0 / 3.0,
                i2: 1.0 / 3.0,
                i4: 0.2,
            },
        }
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut total = CompensatedSum::new();
        for atom in &atoms {
            if !(0.0..=1.0).contains(&atom.location) || !atom.location.is_finite() {
                return Err(Error::AtomOutOfRange {
                    value: atom.location,
                });
            }
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(Error::WeightsNotNormalized { sum: atom.weight });
            }
            total.add(atom.weight);
        }
        let sum = total.value();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(Error::WeightsNotNormalized { sum });
        }
        let moments = atomic_moments(&atoms);
        Ok(FieldDistribution {
            repr: Repr::Atomic(atoms),
            moments,
        })
    }

    /// The one-atom distribution of a constant field.
    pub fn constant(p: f64) -> Result<Self> {
        Self::atomic(vec![Atom {
            location: p,
            weight: 1.0,
        }])
    }

    /// `1/2 (delta_lambda + delta_{1-lambda})`.
    pub fn two_point(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidFieldParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Self::atomic(vec![
            Atom {
                location: lambda,
                weight: 0.5,
            },
            Atom {
                location: 1.0 - lambda,
                weight: 0.5,
            },
        ])
    }

    /// Exact pushforward of the uniform measure on the torus under the
    /// field: every built-in field kind has one.
    pub fn of_field(field: &FieldFunction) -> Result<Self> {
        match field {
            FieldFunction::Identity => Ok(Self::uniform()),
            FieldFunction::Constant(c) => Self::constant(*c),
            FieldFunction::TwoPoint { lambda } => Self::two_point(*lambda),
            FieldFunction::Table { values, .. } => {
                let w = 1.0 / values.len() as f64;
                Self::atomic(
                    values
                        .iter()
                        .map(|&v| Atom {
                            location: v,
                            weight: w,
                        })
                        .collect(),
                )
            }
        }
    }

    /// Midpoint-sampled pushforward on `cells` equal cells — a controlled
    /// atomic approximation for cross-checking arbitrary fields.
    pub fn sampled(field: &FieldFunction, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidDepth { depth: 0 });
        }
        let w = 1.0 / cells as f64;
        Self::atomic(
            (0..cells)
                .map(|j| Atom {
                    location: field.eval(&[(j as f64 + 0.5) * w]),
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn a(&self) -> f64 {
        self.moments.a
    }

    pub fn i2(&self) -> f64 {
        self.moments.i2
    }

    pub fn i4(&self) -> f64 {
        self.moments.i4
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.repr, Repr::Uniform)
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.repr {
            Repr::Uniform => None,
            Repr::Atomic(atoms) => Some(atoms),
        }
    }

    /// Whether the representation is invariant under `phi -> 1 - phi`:
    /// true for the uniform density, and for atomic measures whose atoms
    /// pair up (locations summing to 1, equal weights, to within an ulp).
    /// This is a statement about the stored representation, so it certifies
    /// evenness of `Lambda` exactly, not merely on a test grid.
    pub fn symmetric_exact(&self) -> bool {
        const TOL: f64 = 1e-14;
        match &self.repr {
            Repr::Uniform => true,
            Repr::Atomic(atoms) => {
                let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
                let mut sorted = atoms.clone();
                sorted.sort_by(|x, y| x.location.total_cmp(&y.location));
                for atom in sorted {
                    match merged.last_mut() {
                        Some((loc, w)) if (atom.location - *loc).abs() <= TOL => *w += atom.weight,
                        _ => merged.push((atom.location, atom.weight)),
                    }
                }
                let mut i = 0;
                let mut j = merged.len() - 1;
                while i < j {
                    let (li, wi) = merged[i];
                    let (lj, wj) = merged[j];
                    if (li + lj - 1.0).abs() > TOL || (wi - wj).abs() > TOL {
                        return false;
                    }
                    i += 1;
                    j -= 1;
                }
                if i == j {
                    (merged[i].0 - 0.5).abs() <= TOL
                } else {
                    true
                }
            }
        }
    }

    /// All field mass sits on {0, 1}: the per-site law is deterministic and
    /// the cumulant function degenerates to an affine map.
    pub fn is_flat(&self) -> bool {
        match &self.repr {
            Repr::Uniform => false,
            Repr::Atomic(atoms) => atoms
                .iter()
                .all(|atom| atom.location == 0.0 || atom.location == 1.0),
        }
    }
}

fn atomic_moments(atoms: &[Atom]) -> Moments {
    let mut mean = CompensatedSum::new();
    let mut i2 = CompensatedSum::new();
    let mut i4 = CompensatedSum::new();
    for atom in atoms {
        let g = 2.0 * atom.location - 1.0;
        mean.add(atom.weight * atom.location);
        i2.add(atom.weight * g * g);
        i4.add(atom.weight * g * g * g * g);
    }
    let i2 = i2.value();
    Moments {
        mean: mean.value(),
        a: 1.0 - i2,
        i2,
        i4: i4.value(),
    }
}

/// `L(phi, s) = log(phi e^s + (1 - phi) e^{-s})`, stable for any `s`:
/// written as `|s| + log(phi e^{s - |s|} + (1 - phi) e^{-s - |s|})`, where
/// one exponent is zero and the other nonpositive.
pub fn l_value(phi: f64, s: f64) -> f64 {
    if phi == 0.0 {
        return -s;
    }
    if phi == 1.0 {
        return s;
    }
    let a = s.abs();
    let w = phi * (s - a).exp() + (1.0 - phi) * (-s - a).exp();
    a + w.ln()
}

/// `dL/ds = (t + g) / (1 + g t)` with `t = tanh s`, `g = 2 phi - 1`.
pub fn l_prime(phi: f64, s: f64) -> f64 {
    let t = s.tanh();
    let g = 2.0 * phi - 1.0;
    (t + g) / (1.0 + g * t)
}

/// Taylor jet of `s -> L(phi, s)` at `s`, up to `order`.
pub fn l_jet(phi: f64, s: f64, order: usize) -> Jet {
    if phi == 0.0 {
        return Jet::variable(s, order).neg();
    }
    if phi == 1.0 {
        return Jet::variable(s, order);
    }
    let a = s.abs();
    let plus = Jet::variable(s - a, order).exp().scale(phi);
    let minus = Jet::variable(s + a, order).neg().exp().scale(1.0 - phi);
    plus.add(&minus).ln().add_scalar(a)
}

/// `Lambda(u) = integral of L(phi, u) over the field distribution`.
pub fn lambda_value(dist: &FieldDistribution, u: f64) -> Result<f64> {
    match dist.atoms() {
        Some(atoms) => {
            let mut acc = CompensatedSum::new();
            for atom in atoms {
                acc.add(atom.weight * l_value(atom.location, u));
            }
            Ok(acc.value())
        }
        None => quad::integrate(|phi| l_value(phi, u), 0.0, 1.0, QUAD_TOL),
    }
}

/// `Lambda'(u)`, via the closed-form derivative of `L`.
pub fn lambda_prime(dist: &FieldDistribution, u: f64) -> Result<f64> {
    match dist.atoms() {
        Some(atoms) => {
            let mut acc = CompensatedSum::new();
            for atom in atoms {
                acc.add(atom.weight * l_prime(atom.location, u));
            }
            Ok(acc.value())
        }
        None => quad::integrate(|phi| l_prime(phi, u), 0.0, 1.0, QUAD_TOL),
    }
}

/// Taylor jet of `Lambda` at `u`, up to `order`; atomic distributions sum
/// exactly, the uniform one integrates the jet coefficientwise.
pub fn lambda_jet(dist: &FieldDistribution, u: f64, order: usize) -> Result<Jet> {
    match dist.atoms() {
        Some(atoms) => {
            let mut acc = Jet::constant(0.0, order);
            for atom in atoms {
                acc = acc.add(&l_jet(atom.location, u, order).scale(atom.weight));
            }
            Ok(acc)
        }
        None => quad::integrate(|phi| l_jet(phi, u, order), 0.0, 1.0, JET_QUAD_TOL),
    }
}

/// Limiting free energy `G(s) = (theta/2) s^2 - Lambda(theta s)`.
pub fn g_limit_value(params: &ModelParams, dist: &FieldDistribution, s: f64) -> Result<f64> {
    let theta = params.theta();
    Ok(0.5 * theta * s * s - lambda_value(dist, theta * s)?)
}

/// `G'(s) = theta (s - Lambda'(theta s))`.
pub fn g_limit_prime(params: &ModelParams, dist: &FieldDistribution, s: f64) -> Result<f64> {
    let theta = params.theta();
    Ok(theta * (s - lambda_prime(dist, theta * s)?))
}

/// Taylor jet of `G` at `s`, up to `order`.
pub fn g_limit_jet(
    params: &ModelParams,
    dist: &FieldDistribution,
    s: f64,
    order: usize,
) -> Result<Jet> {
    let theta = params.theta();
    let lam = lambda_jet(dist, theta * s, order)?.compose_linear(theta);
    let v = Jet::variable(s, order);
    Ok(v.mul(&v).scale(0.5 * theta).sub(&lam))
}

/// Finite-n free energy
/// `G_n(s) = (theta/2) s^2 - (1/n) sum_i L(p_i, theta s)`.
pub fn g_n_value(params: &ModelParams, field: &FieldSequence, s: f64) -> Result<f64> {
    if field.is_empty() {
        return Err(Error::EmptyInput);
    }
    let theta = params.theta();
    let u = theta * s;
    let mut acc = CompensatedSum::new();
    for &p in field.values() {
        acc.add(l_value(p, u));
    }
    Ok(0.5 * theta * s * s - acc.value() / field.len() as f64)
}

/// Taylor jet of `G_n` at `s`, up to `order`.
pub fn g_n_jet(params: &ModelParams, field: &FieldSequence, s: f64, order: usize) -> Result<Jet> {
    if field.is_empty() {
        return Err(Error::EmptyInput);
    }
    let theta = params.theta();
    let u = theta * s;
    let mut acc = Jet::constant(0.0, order);
    for &p in field.values() {
        acc = acc.add(&l_jet(p, u, order));
    }
    let lam = acc.scale(1.0 / field.len() as f64).compose_linear(theta);
    let v = Jet::variable(s, order);
    Ok(v.mul(&v).scale(0.5 * theta).sub(&lam))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_l_matches_closed_forms() {
        for &s in &[-3.0, -0.4, 0.0, 0.7, 2.5] {
            assert!((l_value(0.5, s) - s.cosh().ln()).abs() < 1e-14);
            assert!((l_value(1.0, s) - s).abs() < 1e-15);
            assert!((l_value(0.0, s) + s).abs() < 1e-15);
        }
        // Stability far outside the naive range of exp.
        assert!((l_value(0.3, 500.0) - (500.0 + 0.3f64.ln())).abs() < 1e-12);
        assert!((l_value(0.3, -500.0) - (500.0 + 0.7f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn l_derivative_identity_holds() {
        // dL/ds = (t+g)/(1+gt) and d2L/ds2 = 1 - (dL/ds)^2.
        for &phi in &[0.05, 0.3, 0.5, 0.9] {
            for &s in &[-2.0, -0.3, 0.0, 0.51, 1.9] {
                let jet = l_jet(phi, s, 4);
                let d1 = jet.derivative(1);
                assert!((d1 - l_prime(phi, s)).abs() < 1e-12, "phi={phi} s={s}");
                let d2 = jet.derivative(2);
                assert!((d2 - (1.0 - d1 * d1)).abs() < 1e-11, "phi={phi} s={s}");
            }
        }
    }

    #[test]
    fn degenerate_atoms_have_linear_jets() {
        let jet = l_jet(1.0, 0.3, 6);
        assert!((jet.value() - 0.3).abs() < 1e-15);
        assert!((jet.derivative(1) - 1.0).abs() < 1e-15);
        for k in 2..=6 {
            assert_eq!(jet.derivative(k), 0.0);
        }
    }

    #[test]
    fn uniform_moments_are_exact() {
        let d = FieldDistribution::uniform();
        let m = d.moments();
        assert_eq!(m.mean, 0.5);
        assert_eq!(m.a, 2.0 / 3.0);
        assert_eq!(m.i2, 1.0 / 3.0);
        assert_eq!(m.i4, 0.2);
    }

    #[test]
    fn two_point_moments() {
        let d = FieldDistribution::two_point(0.1).unwrap();
        let m = d.moments();
        assert!((m.mean - 0.5).abs() < 1e-15);
        assert!((m.i2 - 0.64).abs() < 1e-15);
        assert!((m.i4 - 0.4096).abs() < 1e-15);
        assert!((m.a - 0.36).abs() < 1e-15);
    }

    #[test]
    fn atomic_validation_rejects_bad_input() {
        assert!(FieldDistribution::atomic(vec![]).is_err());
        assert!(FieldDistribution::atomic(vec![Atom {
            location: 1.2,
            weight: 1.0
        }])
        .is_err());
        assert!(FieldDistribution::atomic(vec![Atom {
            location: 0.5,
            weight: 0.7
        }])
        .is_err());
        assert!(FieldDistribution::atomic(vec![
            Atom {
                location: 0.5,
                weight: 0.5
            },
            Atom {
                location: 0.5,
                weight: -0.5
            }
        ])
        .is_err());
    }

    #[test]
    fn symmetry_detection() {
        assert!(FieldDistribution::uniform().symmetric_exact());
        assert!(FieldDistribution::two_point(0.1).unwrap().symmetric_exact());
        assert!(FieldDistribution::constant(0.5).unwrap().symmetric_exact());
        let skew = FieldDistribution::atomic(vec![
            Atom {
                location: 0.8,
                weight: 0.25,
            },
            Atom {
                location: 0.4,
                weight: 0.75,
            },
        ])
        .unwrap();
        assert!((skew.mean() - 0.5).abs() < 1e-15);
        assert!(!skew.symmetric_exact());
    }

    #[test]
    fn lambda_uniform_matches_closed_form() {
        let d = FieldDistribution::uniform();
        for &u in &[0.1f64, 0.5, 1.0, 3.0, 10.0] {
            let closed = u / u.tanh() - 1.0;
            let got = lambda_value(&d, u).unwrap();
            assert!((got - closed).abs() < 1e-9, "u={u}: {got} vs {closed}");
            let neg = lambda_value(&d, -u).unwrap();
            assert!((neg - closed).abs() < 1e-9, "evenness at {u}");
        }
    }

    #[test]
    fn lambda_two_point_matches_closed_form() {
        let lam = 0.1f64;
        let g = 2.0 * lam - 1.0;
        let d = FieldDistribution::two_point(lam).unwrap();
        for &u in &[0.2f64, 0.9, 2.3] {
            let t = u.tanh();
            let closed = u.cosh().ln() + 0.5 * (1.0 - g * g * t * t).ln();
            assert!((lambda_value(&d, u).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn g_limit_uniform_closed_form_and_zero_at_origin() {
        let params = ModelParams::new(1.5, 1.0).unwrap();
        let uniform = FieldDistribution::uniform();
        for &s in &[0.4, 1.1, 2.0] {
            let u = params.theta() * s;
            let expect = 0.5 * params.theta() * s * s - (u / u.tanh() - 1.0);
            assert!((g_limit_value(&params, &uniform, s).unwrap() - expect).abs() < 1e-9);
        }
        for dist in [
            FieldDistribution::uniform(),
            FieldDistribution::two_point(0.3).unwrap(),
            FieldDistribution::constant(0.8).unwrap(),
        ] {
            assert!(g_limit_value(&params, &dist, 0.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn g_n_constant_half_field_is_log_cosh() {
        let params = ModelParams::new(2.0, 1.0).unwrap();
        let field = FieldSequence::homogeneous(0.5, 17).unwrap();
        for &s in &[0.2, 0.9575, 1.4] {
            let u = params.theta() * s;
            let expect = 0.5 * params.theta() * s * s - u.cosh().ln();
            assert!((g_n_value(&params, &field, s).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn g_n_single_site_example() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let field = FieldSequence::from_values(vec![0.3]).unwrap();
        let expect = 0.5 - (0.3 * 1.0f64.exp() + 0.7 * (-1.0f64).exp()).ln();
        assert!((g_n_value(&params, &field, 1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn g_jets_agree_with_values_and_primes() {
        let params = ModelParams::new(1.3, 1.2).unwrap();
        for dist in [
            FieldDistribution::uniform(),
            FieldDistribution::two_point(0.2).unwrap(),
        ] {
            for &s in &[-1.1, 0.0, 0.63] {
                let jet = g_limit_jet(&params, &dist, s, 3).unwrap();
                assert!((jet.value() - g_limit_value(&params, &dist, s).unwrap()).abs() < 1e-10);
                assert!(
                    (jet.derivative(1) - g_limit_prime(&params, &dist, s).unwrap()).abs() < 1e-9
                );
            }
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sampled_pushforward_approximates_exact_moments() {
        let f = FieldFunction::Identity;
        let exact = FieldDistribution::of_field(&f).unwrap();
        let sampled = FieldDistribution::sampled(&f, 4000).unwrap();
        assert!((sampled.a() - exact.a()).abs() < 1e-7);
        assert!((sampled.i4() - exact.i4()).abs() < 1e-7);
    }

    #[test]
    fn flat_detection() {
        let flat = FieldDistribution::atomic(vec![
            Atom {
                location: 0.0,
                weight: 0.5,
            },
            Atom {
                location: 1.0,
                weight: 0.5,
            },
        ])
        .unwrap();
        assert!(flat.is_flat());
        assert!(flat.a() == 0.0);
        assert!(!FieldDistribution::uniform().is_flat());
        assert!(!FieldDistribution::constant(0.3).unwrap().is_flat());
    }
}
