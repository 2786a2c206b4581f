//! Exact arithmetic foundation: big rationals, Bernoulli numbers,
//! combinatorial coefficients, and exact linear algebra.

mod bernoulli;
mod comb;
mod matrix;

pub use bernoulli::bernoulli;
pub use comb::{binomial, c_coeff, double_factorial, factorial, theta_coeff, theta_tilde};
pub use matrix::ExactMatrix;

/// Arbitrary-precision exact fraction, always reduced with positive
/// denominator (GMP-backed). The coefficient field of every exact matrix
/// and series in this crate.
pub type Rational = rug::Rational;

/// Arbitrary-precision integer.
pub type Integer = rug::Integer;

/// Rational from an `i64`.
pub fn rat(n: i64) -> Rational {
    Rational::from(n)
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::from((n, d))
}

/// Renders a rational as `num/den`, or `num` alone when the denominator is
/// one. This is the serialization format used in all JSON output.
pub fn rational_string(q: &Rational) -> String {
    // rug's Display already produces exactly this format.
    q.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_reduced() {
        let q = ratio(6, -4);
        assert_eq!(q, ratio(-3, 2));
        assert_eq!(rational_string(&q), "-3/2");
        assert_eq!(rational_string(&rat(7)), "7");
    }
}
