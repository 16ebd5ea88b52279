//! Diophantine toolkit: continued fractions, star discrepancy, and the
//! classical inequalities tying the two together.
//!
//! Convergents are exact big integers; the inequality `|alpha - p_k/q_k| <
//! 1/q_k^2` is verified in exact arithmetic for rational, dyadic-float, and
//! quadratic-irrational inputs alike. Discrepancy comes in three flavors:
//! the exact one-dimensional value, a grid lower bound for r >= 2, and the
//! Erdős-Turán-Koksma upper bound from exponential sums.

mod bounds;
mod cfrac;
mod discrepancy;
mod eta;

pub use bounds::{
    denjoy_koksma_check, denjoy_koksma_ladder, hlawka_zaremba_bound, quadrature_error, DkReport,
};
pub use cfrac::{ContinuedFraction, QuadraticSurd};
pub use discrepancy::{
    etk_bound, r_of, star_discrepancy_1d, star_discrepancy_grid, DiscrepancyMethod,
    DiscrepancyReport, EtkOptions, GridOptions,
};
pub use eta::{type_eta_estimate, DiophantineType, EtaOptions};
