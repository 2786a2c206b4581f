//! Truncated (possibly ramified) Laurent series over the rationals, the
//! noncommutative `w`/`theta` operator algebra used by the de Rham solver,
//! and the formal Bessel-product expansions with their `gamma` constants.

mod bessel_series;
mod laurent;
mod theta_op;

pub use bessel_series::{bessel_product_series, gamma_constant, gamma_prime_constant};
pub use laurent::RamifiedLaurentSeries;
pub use theta_op::ThetaOperator;
