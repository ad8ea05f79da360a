//! Wells domination between even apriori measures of ferromagnetic
//! generalized Ising models.
//!
//! The crate computes domination integrals, the `T₋`/`T₊` thresholds that
//! sandwich a measure between two Bernoulli laws, exact canonical-bound
//! certificates for the D-vector and spin-S families, the majorization
//! constructions behind the spin-S inequality, and exact-enumeration checks
//! of correlation inequalities on small Gibbs systems.

pub mod arith;
pub mod error;
pub mod families;
pub mod gibbs;
pub mod majorization;
pub mod measures;
pub mod quadrature;
pub mod temperature;
pub mod wells;

pub use error::{Error, Result};
