//! Formal asymptotic expansion of `2^k (I_0 K_0)^{k/2}` in `w = 1/z` and the
//! `gamma_{k,i}` constants read off from it.
//!
//! With `z = t^2/4`, the product expansion
//! `I_0(t) K_0(t) ~ (1/2t) sum_n ((2n-1)!!)^3 / (2^{3n} n!) t^{-2n}`
//! becomes `2^k (I_0 K_0)^{k/2} = w^{k/4} F(w)` with
//! `F(w) = (sum_n ((2n-1)!!)^3 / (2^{5n} n!) w^n)^{k/2}`.

use crate::exact::{double_factorial, factorial, rat, Rational};
use crate::series::RamifiedLaurentSeries;
use crate::{Error, Result};

/// The base series `sum_n ((2n-1)!!)^3 / (2^{5n} n!) w^n` truncated after
/// `order` terms (ramification 1).
fn base_series(order: i64) -> RamifiedLaurentSeries {
    let mut s = RamifiedLaurentSeries::zero(1, order);
    let mut pow32 = rat(1); // 2^{5n}
    for n in 0..order {
        if n > 0 {
            pow32 *= rat(32);
        }
        let df = double_factorial(2 * n - 1);
        let c = df.clone() * df.clone() * df / (pow32.clone() * factorial(n));
        s.set_coeff(n, c);
    }
    s
}

/// `w^{k/4} F(w)` with `F = base^{k/2}`, truncated after `order` terms of
/// `F`. Ramification 1 when `4 | k`, ramification 2 when `k = 2 mod 4`
/// (half-integer leading exponent). Rejects odd `k`.
pub fn bessel_product_series(k: u32, order: i64) -> Result<RamifiedLaurentSeries> {
    if k % 2 != 0 || k == 0 {
        return Err(Error::IndexRange(format!(
            "bessel_product_series requires even k >= 2, got {}",
            k
        )));
    }
    if order < 1 {
        return Err(Error::IndexRange("order must be >= 1".into()));
    }
    let f = base_series(order).pow(k / 2);
    if k % 4 == 0 {
        Ok(f.shift(k as i64 / 4))
    } else {
        // leading exponent k/4 is a half-integer
        Ok(f.promote().shift(k as i64 / 2))
    }
}

/// The residue constant `gamma_{k,i}`: for `4 | k` the coefficient of `w^i`
/// in `2^k (I_0 K_0)^{k/2}`; zero for `i < k/4` and, by convention, zero for
/// all `i` when `k` is not a multiple of 4.
pub fn gamma_constant(k: u32, i: i64) -> Rational {
    if k == 0 || k % 4 != 0 {
        return rat(0);
    }
    if i < k as i64 / 4 {
        return rat(0);
    }
    let order = i - k as i64 / 4 + 1;
    let s = bessel_product_series(k, order).expect("even k");
    s.coeff_w(i).expect("coefficient within truncation")
}

/// `gamma'_{k,idx}` for `k = 2 mod 4`: the coefficient of `w^idx` in the
/// ramification-2 expansion, where `idx` is the half-integer `num2/2` and
/// must lie in `k/4 + N`.
pub fn gamma_prime_constant(k: u32, idx_num2: i64) -> Result<Rational> {
    if k % 4 != 2 {
        return Err(Error::IndexRange(format!(
            "gamma_prime_constant requires k = 2 mod 4, got {}",
            k
        )));
    }
    let lead2 = k as i64 / 2; // 2 * (k/4)
    if idx_num2 < lead2 || (idx_num2 - lead2) % 2 != 0 {
        return Err(Error::IndexRange(format!(
            "index {}/2 not in k/4 + N for k = {}",
            idx_num2, k
        )));
    }
    let order = (idx_num2 - lead2) / 2 + 1;
    let s = bessel_product_series(k, order)?;
    s.coeff(idx_num2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn leading_gamma_is_one() {
        for k in [4u32, 8, 12, 16, 20] {
            assert_eq!(gamma_constant(k, k as i64 / 4), rat(1), "k = {}", k);
        }
    }

    #[test]
    fn displayed_gamma_values() {
        // gamma_{k,1+k/4} = k/2^6, gamma_{k,2+k/4} = k(k+52)/2^13,
        // gamma_{k,3+k/4} = k(k^2+156k+13184)/(2^19*3)
        for k in [4u32, 8, 12, 16, 20] {
            let kq = rat(k as i64);
            let q = k as i64 / 4;
            assert_eq!(gamma_constant(k, 1 + q), kq.clone() / rat(64));
            assert_eq!(
                gamma_constant(k, 2 + q),
                kq.clone() * rat(k as i64 + 52) / rat(8192)
            );
            assert_eq!(
                gamma_constant(k, 3 + q),
                kq.clone() * (kq.clone() * kq.clone() + rat(156) * kq + rat(13184))
                    / (rat(3) << 19)
            );
        }
        assert_eq!(gamma_constant(8, 3), ratio(1, 8));
        assert_eq!(gamma_constant(12, 4), ratio(3, 16));
    }

    #[test]
    fn gamma_vanishes_below_quarter_and_off_multiples_of_four() {
        assert_eq!(gamma_constant(8, 1), rat(0));
        assert_eq!(gamma_constant(8, 0), rat(0));
        assert_eq!(gamma_constant(8, -2), rat(0));
        assert_eq!(gamma_constant(6, 2), rat(0));
        assert_eq!(gamma_constant(10, 3), rat(0));
    }

    #[test]
    fn gamma_positivity() {
        for k in [8u32, 12, 16, 20] {
            let q = k as i64 / 4;
            for i in q..=(q + 6) {
                assert!(gamma_constant(k, i) > 0, "gamma_{{{},{}}}", k, i);
            }
        }
    }

    #[test]
    fn gamma_prime_values() {
        // leading coefficients are 1
        assert_eq!(gamma_prime_constant(6, 3).unwrap(), rat(1));
        assert_eq!(gamma_prime_constant(10, 5).unwrap(), rat(1));
        // gamma'_{6, 5/2}: coefficient of w in F = base^3 is 3 * (1/32)
        assert_eq!(gamma_prime_constant(6, 5).unwrap(), ratio(3, 32));
        assert!(gamma_prime_constant(6, 2).is_err());
        assert!(gamma_prime_constant(8, 5).is_err());
    }

    #[test]
    fn series_ramification() {
        assert_eq!(bessel_product_series(8, 4).unwrap().ram(), 1);
        assert_eq!(bessel_product_series(6, 4).unwrap().ram(), 2);
        assert!(bessel_product_series(7, 4).is_err());
    }
}
