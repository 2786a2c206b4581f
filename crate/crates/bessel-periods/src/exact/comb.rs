//! Factorials, binomials and the combinatorial coefficient families used by
//! the Betti-side computations.

use rug::Complete;

use super::{bernoulli, rat, Integer, Rational};
use crate::{Error, Result};

/// `m!` as a rational, with the convention that `m! = 1` for `m <= 0`.
pub fn factorial(m: i64) -> Rational {
    if m <= 0 {
        return rat(1);
    }
    Rational::from(Integer::factorial(m as u32).complete())
}

/// `m!!` as a rational, with the convention that `m!! = 1` for `m <= 0`.
pub fn double_factorial(m: i64) -> Rational {
    if m <= 0 {
        return rat(1);
    }
    let mut acc = Integer::from(1);
    let mut v = m;
    while v > 0 {
        acc *= v;
        v -= 2;
    }
    Rational::from(acc)
}

/// Binomial coefficient `C(n, k)`, zero when `k < 0`, `n < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return rat(0);
    }
    Rational::from(Integer::binomial_u(n as u32, k as u32).complete())
}

/// `C_n(a) = (-1)^{a-1}/(n a) * C(n, a)`, the coefficients closing the
/// twisted chains `c_0^a x e_0^{i-1} e_1^{k-i+1}` into cycles.
pub fn c_coeff(n: u64, a: u64) -> Result<Rational> {
    if a < 1 || a > n {
        return Err(Error::IndexRange(format!(
            "c_coeff requires 1 <= a <= n, got n = {}, a = {}",
            n, a
        )));
    }
    let sign = if (a - 1) % 2 == 0 { 1 } else { -1 };
    Ok(binomial(n as i64, a as i64) * Rational::from((sign, n as i64 * a as i64)))
}

/// `theta_m(r) = C(m, r) B_r / m`, the coefficients closing the geometric
/// rapid-decay chains; defined for `0 <= r < m`.
pub fn theta_coeff(m: u64, r: u64) -> Result<Rational> {
    if m < 1 || r >= m {
        return Err(Error::IndexRange(format!(
            "theta_coeff requires 0 <= r < m, got m = {}, r = {}",
            m, r
        )));
    }
    Ok(binomial(m as i64, r as i64) * bernoulli(r) / rat(m as i64))
}

/// `theta~_m = -B_m/m`.
pub fn theta_tilde(m: u64) -> Rational {
    assert!(m >= 1);
    -bernoulli(m) / rat(m as i64)
}
