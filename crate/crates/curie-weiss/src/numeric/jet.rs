//! Truncated Taylor jets: derivatives of composite scalar functions without
//! finite differencing.
//!
//! A jet stores the Taylor coefficients `c_k = f^(k)(x0) / k!` of a function
//! around an expansion point, truncated at a fixed order. Arithmetic on jets
//! propagates coefficients exactly (up to rounding), so the k-th derivative
//! of any expression built from `+`, `*`, `exp`, `ln` is available to full
//! working precision. The recurrences are the classical ones:
//!
//! ```text
//! w = exp(u):  w_0 = exp(u_0),  k w_k = sum_{j=1..k} j u_j w_{k-j}
//! w = ln(u):   w_0 = ln(u_0),   w_k = (u_k - (1/k) sum_{j=1..k-1} j w_j u_{k-j}) / u_0
//! ```
//!
//! The classification of free-energy minima needs derivatives through order
//! 12, hence the fixed capacity.

use crate::numeric::quad::QuadValue;

/// Highest derivative order any caller may request.
pub const MAX_ORDER: usize = 12;

const LEN: usize = MAX_ORDER + 1;

/// Taylor coefficients `c[0..=order]` of a function at an expansion point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    c: [f64; LEN],
    order: usize,
}

impl Jet {
    /// Jet of the constant function `v`.
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c, order }
    }

    /// Jet of the identity evaluated at `v`: value `v`, slope 1.
    pub fn variable(v: f64, order: usize) -> Self {
        let mut jet = Jet::constant(v, order);
        if order >= 1 {
            jet.c[1] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, k: usize) -> f64 {
        assert!(k <= self.order);
        self.c[k]
    }

    /// k-th derivative: `c_k * k!`.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order);
        self.c[k] * factorial(k)
    }

    pub fn neg(&self) -> Jet {
        let mut out = *self;
        for c in &mut out.c[..=self.order] {
            *c = -*c;
        }
        out
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(0.0, order);
        for k in 0..=order {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.add(&rhs.neg())
    }

    pub fn add_scalar(&self, v: f64) -> Jet {
        let mut out = *self;
        out.c[0] += v;
        out
    }

    pub fn scale(&self, v: f64) -> Jet {
        let mut out = *self;
        for c in &mut out.c[..=self.order] {
            *c *= v;
        }
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(0.0, order);
        for i in 0..=order {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..=(order - i) {
                out.c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let mut out = Jet::constant(0.0, self.order);
        out.c[0] = self.c[0].exp();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * out.c[k - j];
            }
            out.c[k] = acc / k as f64;
        }
        out
    }

    /// Requires a strictly positive value part.
    pub fn ln(&self) -> Jet {
        debug_assert!(self.c[0] > 0.0, "ln of nonpositive jet value {}", self.c[0]);
        let mut out = Jet::constant(0.0, self.order);
        out.c[0] = self.c[0].ln();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * out.c[j] * self.c[k - j];
            }
            out.c[k] = (self.c[k] - acc / k as f64) / self.c[0];
        }
        out
    }

    /// Reexpand through the affine substitution `t = b * s`: the jet of
    /// `g(s) = f(b s)` at `s0` given the jet of `f` at `b * s0`. Coefficient
    /// `k` picks up `b^k`.
    pub fn compose_linear(&self, b: f64) -> Jet {
        let mut out = *self;
        let mut p = 1.0;
        for k in 1..=self.order {
            p *= b;
            out.c[k] *= p;
        }
        out
    }
}

impl QuadValue for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(0.0, self.order)
    }
    fn scaled_add(&mut self, w: f64, v: &Self) {
        debug_assert_eq!(self.order, v.order);
        for k in 0..=self.order {
            self.c[k] += w * v.c[k];
        }
    }
    fn error_metric(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for k in 0..=self.order.min(other.order) {
            m = m.max((self.c[k] - other.c[k]).abs());
        }
        m
    }
}

/// Exact factorials through 12! (all representable in f64).
pub fn factorial(k: usize) -> f64 {
    const TABLE: [f64; LEN] = [
        1.0,
        1.0,
        2.0,
        6.0,
        24.0,
        120.0,
        720.0,
        5040.0,
        40320.0,
        362880.0,
        3628800.0,
        39916800.0,
        479001600.0,
    ];
    TABLE[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64, msg: &str) {
        assert!(
            (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            "{msg}: {a} vs {b}"
        );
    }

    #[test]
    fn exp_jet_matches_closed_form() {
        // f(s) = exp(a s): f^(k)(s0) = a^k exp(a s0).
        let (a, s0) = (0.7, 0.3);
        let jet = Jet::variable(s0, 8).scale(a).exp();
        for k in 0..=8 {
            let exact = a.powi(k as i32) * (a * s0).exp();
            assert_close(jet.derivative(k), exact, 1e-14, "exp derivative");
        }
    }

    #[test]
    fn ln_of_exp_recovers_identity_coefficients() {
        let jet = Jet::variable(1.3, MAX_ORDER).exp().ln();
        assert_close(jet.value(), 1.3, 1e-15, "value");
        assert_close(jet.coeff(1), 1.0, 1e-15, "slope");
        for k in 2..=MAX_ORDER {
            assert!(jet.coeff(k).abs() < 1e-15, "coeff {k} = {}", jet.coeff(k));
        }
    }

    #[test]
    fn product_rule_holds() {
        // (u * u)' at order coefficients against square closed form for
        // u = exp(s): u^2 = exp(2s).
        let u = Jet::variable(0.4, 10).exp();
        let sq = u.mul(&u);
        let direct = Jet::variable(0.4, 10).scale(2.0).exp();
        for k in 0..=10 {
            assert_close(sq.coeff(k), direct.coeff(k), 1e-13, "square coeff");
        }
    }

    #[test]
    fn log_cosh_derivatives_match_recursive_tanh_polynomials() {
        // d/ds log cosh s = tanh s, and tanh' = 1 - tanh^2: derivatives are
        // polynomials in t = tanh(s0), generated exactly below.
        let s0 = 0.83;
        let jet = {
            // log cosh s = -s0... build as ln(0.5 e^s + 0.5 e^{-s}) shifted.
            let s = Jet::variable(s0, MAX_ORDER);
            let shift = s0.abs();
            let up = s.add_scalar(-shift).exp().scale(0.5);
            let dn = s.neg().add_scalar(-shift).exp().scale(0.5);
            up.add(&dn).ln().add_scalar(shift)
        };
        // poly[k] = coefficients (in t) of the k-th derivative of log cosh.
        let mut poly: Vec<Vec<f64>> = vec![vec![0.0], vec![0.0, 1.0]]; // 0th unused, 1st = t
        for k in 2..=MAX_ORDER {
            let prev = &poly[k - 1];
            // differentiate: sum a_j t^j -> sum a_j j t^{j-1} (1 - t^2)
            let mut next = vec![0.0; prev.len() + 1];
            for (j, &aj) in prev.iter().enumerate().skip(1) {
                next[j - 1] += aj * j as f64;
                next[j + 1] -= aj * j as f64;
            }
            poly.push(next);
        }
        let t = s0.tanh();
        for k in 1..=MAX_ORDER {
            let exact: f64 = poly[k]
                .iter()
                .enumerate()
                .map(|(j, &aj)| aj * t.powi(j as i32))
                .sum();
            assert_close(jet.derivative(k), exact, 1e-11, &format!("order {k}"));
        }
    }
}
