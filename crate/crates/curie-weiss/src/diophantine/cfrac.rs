//! Continued fractions with exact convergents.
//!
//! Three input classes, one exactness guarantee each:
//!
//! * rationals expand by the Euclidean algorithm and terminate;
//! * quadratic irrationals `(p + sqrt(d)) / q` expand by the classical
//!   integer recurrence `P' = aQ - P`, `Q' = (D - P'^2)/Q`, which never
//!   touches floating point and runs to any depth;
//! * floats are treated as the exact dyadic rationals they are, expanded by
//!   the Euclidean algorithm, with a precision horizon: once a convergent
//!   denominator passes 1e7 the approximation error `~1/q^2` is below the
//!   float's own distance to the real it stands for, so the remaining
//!   quotients say nothing about that real, and asking for more is an error.
//!
//! Convergents follow `p_k = a_k p_{k-1} + p_{k-2}` (same for q) in big
//! integers, so `|alpha - p_k/q_k| < 1/q_k^2` can be checked exactly by
//! cross-multiplication — including for surds, via sign-aware comparison of
//! `u + v sqrt(D)` against integers.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Convergent denominator above which float expansion stops: beyond it the
/// convergent error `~1/q^2` is under 1e-14, smaller than the float's own
/// distance to the real it stands for.
const FLOAT_DENOM_HORIZON: f64 = 1e7;

/// `(p + sqrt(d)) / q` with integer entries, `d` positive and not a square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub p: i64,
    pub d: u64,
    pub q: i64,
}

impl QuadraticSurd {
    /// Fractional part of the golden ratio: `(-1 + sqrt(5)) / 2`.
    pub fn golden() -> Self {
        QuadraticSurd { p: -1, d: 5, q: 2 }
    }

    /// `sqrt(2) - 1`.
    pub fn sqrt2_minus_one() -> Self {
        QuadraticSurd { p: -1, d: 2, q: 1 }
    }

    pub fn value(&self) -> f64 {
        (self.p as f64 + (self.d as f64).sqrt()) / self.q as f64
    }
}

/// How the expanded number is known exactly (used for exact inequality
/// checks; floats are exact dyadic rationals).
#[derive(Clone, Debug)]
enum AlphaExact {
    Rational { num: BigInt, den: BigInt },
    Quadratic(QuadraticSurd),
}

/// A continued-fraction expansion `[a0; a1, a2, ...]` with exact convergents.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for k = 0..quotients.len(), index-aligned with quotients.
    convergents: Vec<(BigInt, BigInt)>,
    terminated: bool,
    alpha_f64: f64,
    exact: AlphaExact,
}

impl ContinuedFraction {
    /// Expansion of the golden ratio's fractional part: all quotients 1,
    /// Fibonacci denominators.
    pub fn golden(depth: usize) -> Result<Self> {
        Self::from_quadratic(QuadraticSurd::golden(), depth)
    }

    /// Expansion of sqrt(2) - 1: all quotients 2, Pell denominators.
    pub fn sqrt2_minus_one(depth: usize) -> Result<Self> {
        Self::from_quadratic(QuadraticSurd::sqrt2_minus_one(), depth)
    }

    /// Exact expansion of a rational in (0, 1); terminates on its own.
    pub fn from_rational(num: i64, den: i64, depth: usize) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num <= 0 || num >= den {
            return Err(Error::InvalidPoint {
                index: 0,
                value: num as f64 / den as f64,
            });
        }
        let num = BigInt::from(num);
        let den = BigInt::from(den);
        Self::expand_rational(num, den, depth, false)
    }

    /// Expansion of the exact dyadic rational a float denotes, stopping at
    /// the precision horizon.
    pub fn from_f64(x: f64, depth: usize) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) || !x.is_finite() {
            return Err(Error::InvalidPoint { index: 0, value: x });
        }
        let (num, den) = dyadic_of_f64(x);
        Self::expand_rational(num, den, depth, true)
    }

    /// Exact expansion of a quadratic irrational in (0, 1); any depth.
    pub fn from_quadratic(surd: QuadraticSurd, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidDepth { depth });
        }
        if surd.q == 0 {
            return Err(Error::ZeroDenominator);
        }
        if surd.d == 0 || is_perfect_square(surd.d) {
            return Err(Error::PerfectSquare(surd.d));
        }
        // Require the value in (0, 1), checked exactly:
        // (p + sqrt(d))/q > 0 and < 1.
        let (p, d, q) = (surd.p as i128, surd.d as i128, surd.q as i128);
        if q < 0 {
            return Err(Error::InvalidSurd {
                reason: "denominator must be positive",
            });
        }
        // sqrt(d) > -p  and  sqrt(d) < q - p
        if !sqrt_gt(d, -p) || !sqrt_lt(d, q - p) {
            return Err(Error::InvalidSurd {
                reason: "value must lie strictly inside (0, 1)",
            });
        }

        // Normalize so Q divides D - P^2 (multiply through by |Q|).
        let (mut pp, mut dd, mut qq) = (p, d, q);
        if (dd - pp * pp).rem_euclid(qq) != 0 {
            pp = pp.checked_mul(qq).ok_or(Error::Overflow)?;
            dd = dd.checked_mul(qq * qq).ok_or(Error::Overflow)?;
            qq = qq.checked_mul(qq).ok_or(Error::Overflow)?;
        }

        let mut quotients = Vec::with_capacity(depth + 1);
        quotients.push(BigInt::zero()); // a0 = floor(x) = 0 on (0, 1)
        let (mut pk, mut qk) = (pp, qq);
        // First step off a0: x1 = 1/x.
        for _ in 0..depth {
            // x_k = (P + sqrt(D)) / Q, iterate P,Q after extracting floor.
            // Invert first: a_{k+1} = floor(1/(x_k - a_k)). The recurrence
            // below folds both steps: P' = aQ - P with a = previous floor.
            let a_prev = big_to_i128(quotients.last().expect("nonempty"))?;
            let p_next = a_prev
                .checked_mul(qk)
                .ok_or(Error::Overflow)?
                .checked_sub(pk)
                .ok_or(Error::Overflow)?;
            let q_next_num = dd
                .checked_sub(p_next.checked_mul(p_next).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
            if q_next_num % qk != 0 {
                return Err(Error::InvalidSurd {
                    reason: "internal: divisibility invariant broken",
                });
            }
            let q_next = q_next_num / qk;
            if q_next == 0 {
                return Err(Error::InvalidSurd {
                    reason: "internal: zero denominator in iteration",
                });
            }
            let a = floor_surd(p_next, dd, q_next)?;
            quotients.push(BigInt::from(a));
            pk = p_next;
            qk = q_next;
        }

        let alpha_f64 = surd.value();
        Ok(Self::finish(
            quotients,
            false,
            alpha_f64,
            AlphaExact::Quadratic(surd),
        ))
    }

    fn expand_rational(num: BigInt, den: BigInt, depth: usize, horizon: bool) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidDepth { depth });
        }
        let alpha_f64 = ratio_f64(&num, &den);
        let exact = AlphaExact::Rational {
            num: num.clone(),
            den: den.clone(),
        };
        let mut quotients = vec![BigInt::zero()];
        let (mut n, mut d) = (num, den); // current fractional part n/d, in (0,1)
        let mut terminated = false;
        // Approximate denominators alongside, for the horizon check.
        let (mut q_prev, mut q_cur) = (0.0f64, 1.0f64);
        for _ in 0..depth {
            if n.is_zero() {
                terminated = true;
                break;
            }
            // 1/(n/d) = d/n = a + rem/n
            let (a, rem) = num_integer_div_rem(&d, &n);
            let a_f = a.to_f64().unwrap_or(f64::INFINITY);
            quotients.push(a);
            d = n;
            n = rem;
            let q_next = a_f * q_cur + q_prev;
            q_prev = q_cur;
            q_cur = q_next;
            let terms = quotients.len() - 1;
            if horizon && q_cur > FLOAT_DENOM_HORIZON && terms < depth {
                return Err(Error::PrecisionExhausted { terms });
            }
        }
        if n.is_zero() {
            terminated = true;
        }
        Ok(Self::finish(quotients, terminated, alpha_f64, exact))
    }

    fn finish(quotients: Vec<BigInt>, terminated: bool, alpha_f64: f64, exact: AlphaExact) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::zero());
        let (mut p, mut q) = (quotients[0].clone(), BigInt::from(1));
        convergents.push((p.clone(), q.clone()));
        for a in &quotients[1..] {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = p;
            q_prev = q;
            p = p_next;
            q = q_next;
            convergents.push((p.clone(), q.clone()));
        }
        ContinuedFraction {
            quotients,
            convergents,
            terminated,
            alpha_f64,
            exact,
        }
    }

    /// Partial quotients `[a0; a1, ...]` actually computed.
    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// `(p_k, q_k)` pairs, index-aligned with the quotients.
    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    /// True when the expansion ended on its own (rational input).
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_f64
    }

    /// Denominators that fit in u64, in order (drops any that overflow).
    pub fn denominators_u64(&self) -> Vec<u64> {
        self.convergents
            .iter()
            .filter_map(|(_, q)| q.to_u64())
            .collect()
    }

    pub fn denominator(&self, k: usize) -> Result<u64> {
        let (_, q) = self.convergents.get(k).ok_or(Error::ConvergentOutOfRange {
            index: k,
            available: self.convergents.len(),
        })?;
        q.to_u64().ok_or(Error::Overflow)
    }

    /// Exact check of `|alpha - p_k/q_k| < 1/q_k^2` by cross-multiplication
    /// in big integers. For the final convergent of a terminated expansion
    /// the difference is exactly zero, which passes.
    pub fn convergent_inequality_holds(&self, k: usize) -> Result<bool> {
        let (p, q) = self.convergents.get(k).ok_or(Error::ConvergentOutOfRange {
            index: k,
            available: self.convergents.len(),
        })?;
        match &self.exact {
            AlphaExact::Rational { num, den } => {
                // |num/den - p/q| < 1/q^2  <=>  |num q - p den| * q < den
                let diff = (num * q - p * den).abs();
                Ok(diff * q < *den)
            }
            AlphaExact::Quadratic(surd) => {
                // alpha - p/q = ((P q - p Q) + q sqrt(D)) / (Q q), Q > 0:
                // |...| < 1/q^2  <=>  |u + v sqrt(D)| < Q
                // with u = (P q - p Q) q, v = q^2.
                let pp = BigInt::from(surd.p);
                let qq = BigInt::from(surd.q);
                let dd = BigInt::from(surd.d);
                let u = (&pp * q - p * &qq) * q;
                let v = q * q;
                Ok(abs_lin_sqrt_lt(&u, &v, &dd, &qq))
            }
        }
    }

    /// Exact check for every computed convergent at once.
    pub fn all_convergent_inequalities_hold(&self) -> bool {
        (0..self.convergents.len()).all(|k| self.convergent_inequality_holds(k).unwrap_or(false))
    }
}

/// |u + v sqrt(d)| < w, all big integers, v >= 0, d > 0 nonsquare, w > 0.
fn abs_lin_sqrt_lt(u: &BigInt, v: &BigInt, d: &BigInt, w: &BigInt) -> bool {
    // u + v sqrt(d) < w  <=>  v sqrt(d) < w - u
    let upper = {
        let rhs = w - u;
        if rhs.is_negative() || rhs.is_zero() {
            false
        } else {
            v * v * d < &rhs * &rhs
        }
    };
    // u + v sqrt(d) > -w  <=>  v sqrt(d) > -w - u
    let lower = {
        let rhs = -w - u;
        if rhs.is_negative() {
            true
        } else {
            v * v * d > &rhs * &rhs
        }
    };
    upper && lower
}

/// floor((P + sqrt(D)) / Q) in exact integer arithmetic, either sign of Q.
/// Start from the float estimate and correct with exact predicates.
fn floor_surd(p: i128, d: i128, q: i128) -> Result<i128> {
    let est = ((p as f64) + (d as f64).sqrt()) / (q as f64);
    let mut a = est.floor() as i128;
    // x >= a+1 means a is too small; x < a means too big.
    let mut guard = 0;
    while surd_ge(p, d, q, a + 1) {
        a += 1;
        guard += 1;
        if guard > 64 {
            return Err(Error::Overflow);
        }
    }
    while !surd_ge(p, d, q, a) {
        a -= 1;
        guard += 1;
        if guard > 64 {
            return Err(Error::Overflow);
        }
    }
    Ok(a)
}

/// (p + sqrt(d)) / q >= m, exactly. d > 0 and not a perfect square.
fn surd_ge(p: i128, d: i128, q: i128, m: i128) -> bool {
    // q > 0: p + sqrt(d) >= m q  <=>  sqrt(d) >= m q - p
    // q < 0: p + sqrt(d) <= m q  <=>  sqrt(d) <= m q - p
    let rhs = m * q - p;
    if q > 0 {
        sqrt_ge(d, rhs)
    } else {
        sqrt_le(d, rhs)
    }
}

/// sqrt(d) >= m for nonsquare d (so equality never occurs).
fn sqrt_ge(d: i128, m: i128) -> bool {
    if m <= 0 {
        true
    } else {
        d >= m * m
    }
}

fn sqrt_gt(d: i128, m: i128) -> bool {
    if m < 0 {
        true
    } else {
        d > m * m
    }
}

fn sqrt_le(d: i128, m: i128) -> bool {
    !sqrt_gt(d, m)
}

fn sqrt_lt(d: i128, m: i128) -> bool {
    !sqrt_ge(d, m)
}

fn is_perfect_square(d: u64) -> bool {
    let r = (d as f64).sqrt().round() as u64;
    for c in r.saturating_sub(1)..=r + 1 {
        if c * c == d {
            return true;
        }
    }
    false
}

/// The exact rational a finite positive f64 denotes.
fn dyadic_of_f64(x: f64) -> (BigInt, BigInt) {
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    let (mut num, mut shift) = if exponent == 0 {
        (BigInt::from(mantissa), 1074)
    } else {
        (BigInt::from(mantissa | (1u64 << 52)), 1075 - exponent)
    };
    // Reduce the power of two by the mantissa's trailing zeros.
    while shift > 0 && (&num % 2) == BigInt::zero() {
        num /= 2;
        shift -= 1;
    }
    (num, BigInt::from(1) << shift.max(0) as usize)
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    // Good to a few ulps for the magnitudes seen here; only used for the
    // horizon check and the display value.
    match (num.to_f64(), den.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        _ => f64::NAN,
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let q = a / b;
    let r = a - &q * b;
    (q, r)
}

fn big_to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128().ok_or(Error::Overflow)
}
