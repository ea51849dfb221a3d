//! Independent oracles used by the test suites.
//!
//! Everything here deliberately takes a different algorithmic route from
//! the code it validates: cyclic alternating projections instead of the
//! KKT active-set search, sorted closed-form water-filling instead of the
//! dual solver, central finite differences instead of analytic gradients.

pub mod dykstra;
pub mod finite_diff;
pub mod stats;
pub mod waterfill;
