//! Bernoulli numbers under the `x/(e^x - 1)` convention (`B_1 = -1/2`),
//! memoized behind a lock for concurrent use.

use std::sync::RwLock;

use super::{binomial, rat, Rational};

static CACHE: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

/// The `n`-th Bernoulli number `B_n`, i.e. `n!` times the `n`-th coefficient
/// of `x/(e^x - 1)`.
///
/// Computed by the recursion `sum_{r=0}^{m} C(m+1, r) B_r = 0` (`m >= 1`)
/// seeded with `B_0 = 1`; all values are cached.
pub fn bernoulli(n: u64) -> Rational {
    let n = n as usize;
    {
        let cache = CACHE.read().unwrap();
        if let Some(b) = cache.get(n) {
            return b.clone();
        }
    }
    let mut cache = CACHE.write().unwrap();
    if cache.is_empty() {
        cache.push(rat(1));
    }
    while cache.len() <= n {
        let m = cache.len(); // next index to fill
        if m >= 3 && m % 2 == 1 {
            cache.push(rat(0));
            continue;
        }
        let mut sum = Rational::new();
        for (r, br) in cache.iter().enumerate() {
            sum += binomial(m as i64 + 1, r as i64) * br;
        }
        sum /= rat(-(m as i64 + 1));
        cache.push(sum);
    }
    cache[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    /// Independent oracle: expand x/(e^x - 1) by long division of power
    /// series with exact rational coefficients, up to order `n`.
    fn bernoulli_by_series(n: usize) -> Vec<Rational> {
        // denominator series: (e^x - 1)/x = sum_{j>=0} x^j/(j+1)!
        let mut den = Vec::with_capacity(n + 1);
        let mut fact = rat(1);
        for j in 0..=n {
            fact *= rat(j as i64 + 1);
            den.push(Rational::from(1) / fact.clone());
        }
        // quotient q with q * den = 1
        let mut q: Vec<Rational> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = if m == 0 { rat(1) } else { rat(0) };
            for j in 1..=m {
                acc -= den[j].clone() * &q[m - j];
            }
            q.push(acc / den[0].clone());
        }
        // B_m = m! * q_m
        let mut fact = rat(1);
        q.into_iter()
            .enumerate()
            .map(|(m, c)| {
                if m > 0 {
                    fact *= rat(m as i64);
                }
                c * fact.clone()
            })
            .collect()
    }

    #[test]
    fn first_values() {
        assert_eq!(bernoulli(0), rat(1));
        assert_eq!(bernoulli(1), ratio(-1, 2));
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(3), rat(0));
        assert_eq!(bernoulli(4), ratio(-1, 30));
        assert_eq!(bernoulli(12), ratio(-691, 2730));
    }

    #[test]
    fn matches_generating_series_oracle() {
        let oracle = bernoulli_by_series(24);
        for (n, expected) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli(n as u64), expected, "B_{}", n);
        }
    }

    #[test]
    fn recursion_identity_holds() {
        // sum_{r=0}^{m} C(m+1, r) B_r = 0 for all m >= 1
        for m in 1..=200u64 {
            let mut sum = Rational::new();
            for r in 0..=m {
                sum += binomial(m as i64 + 1, r as i64) * bernoulli(r);
            }
            assert_eq!(sum, rat(0), "m = {}", m);
        }
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for m in 1..=40 {
            assert_eq!(bernoulli(2 * m + 1), rat(0));
        }
    }
}
