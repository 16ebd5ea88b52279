//! Curie-Weiss model with a dynamical external field.
//!
//! A mean-field spin system of `n` sites where site `i` feels an external
//! field `p_i = f(T^i x)` driven by an irrational rotation `T` of the torus.
//! The crate computes, exactly where possible and with controlled numerics
//! otherwise:
//!
//! * orbits, field sequences, and ergodic-average diagnostics ([`dynsys`]);
//! * continued fractions, star discrepancy, and the classical bounds
//!   (Denjoy-Koksma, Erdős-Turán-Koksma, Hlawka-Zaremba) that control how
//!   fast orbit averages converge ([`diophantine`]);
//! * the free-energy landscape `G`, its minima with their degeneracy type and
//!   strength, the critical inverse temperature, and the large-deviation rate
//!   function ([`freeenergy`]);
//! * the exact finite-`n` law of the magnetization under the Gibbs measure,
//!   its scaling limits, and a seeded Metropolis cross-check
//!   ([`distribution`]).
//!
//! All probability-mass arithmetic runs in log space; all integrals are
//! either exact finite sums or adaptive Gauss-Kronrod quadrature with an
//! absolute tolerance of 1e-10 or tighter.

pub mod diophantine;
pub mod distribution;
pub mod dynsys;
mod error;
pub mod freeenergy;
pub mod numeric;

pub use error::{Error, Result};
