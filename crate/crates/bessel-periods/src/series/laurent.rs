//! Truncated Laurent series in `w^{1/e}` for `e` in `{1, 2}`.
//!
//! A series stores a map from the integer `n` to the coefficient of
//! `w^{n/ram}` together with a truncation bound: coefficients at exponents
//! `>= trunc/ram` are unknown. Requesting one is an error, never a silent
//! zero. Binary operations propagate the tightest valid bound and promote
//! ramification as needed.

use std::collections::BTreeMap;

use rug::Complete;

use crate::exact::Rational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedLaurentSeries {
    ram: u8,
    coeffs: BTreeMap<i64, Rational>,
    trunc: i64,
}

impl RamifiedLaurentSeries {
    /// The zero series known up to (excluding) `w^{trunc/ram}`.
    pub fn zero(ram: u8, trunc: i64) -> Self {
        assert!(ram == 1 || ram == 2, "ramification must be 1 or 2");
        Self {
            ram,
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    /// The monomial `c * w^{n/ram}`, known up to `w^{trunc/ram}`.
    pub fn monomial(ram: u8, n: i64, c: Rational, trunc: i64) -> Self {
        let mut s = Self::zero(ram, trunc);
        s.set_coeff(n, c);
        s
    }

    pub fn ram(&self) -> u8 {
        self.ram
    }

    /// Truncation bound in units of `w^{1/ram}`.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Valuation in units of `w^{1/ram}`: the lowest exponent with nonzero
    /// coefficient, or `trunc` for a (known-)zero series.
    pub fn valuation(&self) -> i64 {
        self.coeffs
            .iter()
            .find(|(_, c)| **c != 0)
            .map(|(n, _)| *n)
            .unwrap_or(self.trunc)
    }

    /// Coefficient of `w^{n/ram}`. Exponents at or beyond the truncation
    /// bound are an error.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n >= self.trunc {
            return Err(Error::Truncated {
                num: n,
                trunc: self.trunc,
                ram: self.ram,
            });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_default())
    }

    /// Coefficient of the integer power `w^e`.
    pub fn coeff_w(&self, e: i64) -> Result<Rational> {
        self.coeff(e * self.ram as i64)
    }

    pub fn set_coeff(&mut self, n: i64, c: Rational) {
        assert!(n < self.trunc, "coefficient beyond truncation");
        if c == 0 {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    /// Known nonzero terms as `(n, coeff)` with exponent `w^{n/ram}`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    /// Reinterpret in ramification 2 (exponent keys double).
    pub fn promote(&self) -> Self {
        match self.ram {
            2 => self.clone(),
            _ => Self {
                ram: 2,
                coeffs: self.coeffs.iter().map(|(n, c)| (2 * n, c.clone())).collect(),
                trunc: 2 * self.trunc,
            },
        }
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        match (a.ram, b.ram) {
            (1, 2) => (a.promote(), b.clone()),
            (2, 1) => (a.clone(), b.promote()),
            _ => (a.clone(), b.clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let trunc = a.trunc.min(b.trunc);
        let mut out = Self::zero(a.ram, trunc);
        for (n, c) in a.coeffs.iter().chain(b.coeffs.iter()) {
            if *n < trunc {
                let cur = out.coeffs.entry(*n).or_default();
                *cur += c;
            }
        }
        out.coeffs.retain(|_, c| *c != 0);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            ram: self.ram,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| (*n, (-c).complete()))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero(self.ram, self.trunc);
        }
        Self {
            ram: self.ram,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, v)| (*n, (v * c).complete()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// Shift by `w^{n/ram}` (in the units of this series).
    pub fn shift(&self, n: i64) -> Self {
        Self {
            ram: self.ram,
            coeffs: self.coeffs.iter().map(|(m, c)| (m + n, c.clone())).collect(),
            trunc: self.trunc + n,
        }
    }

    /// Product, with the truncation propagated conservatively:
    /// the result is valid below `min(a.trunc + val(b), b.trunc + val(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let trunc = (a.trunc + b.valuation()).min(b.trunc + a.valuation());
        let mut out = Self::zero(a.ram, trunc);
        for (n, cn) in &a.coeffs {
            for (m, cm) in &b.coeffs {
                let e = n + m;
                if e < trunc {
                    let cur = out.coeffs.entry(e).or_default();
                    *cur += (cn * cm).complete();
                }
            }
        }
        out.coeffs.retain(|_, c| *c != 0);
        out
    }

    /// Integer power by repeated multiplication; `pow(s, 0)` is `1` known to
    /// the operand's truncation bound.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::monomial(self.ram, 0, Rational::from(1), self.trunc);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The Euler derivative `w d/dw`: each coefficient of `w^{n/ram}` is
    /// scaled by `n/ram`; exponents are unchanged.
    pub fn euler_derivative(&self) -> Self {
        Self {
            ram: self.ram,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| (*n, c * Rational::from((*n, self.ram as i64))))
                .filter(|(_, c)| *c != 0)
                .collect(),
            trunc: self.trunc,
        }
    }
}

impl std::fmt::Display for RamifiedLaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if self.ram == 1 {
                write!(f, "({})w^{}", c, n)?;
            } else {
                write!(f, "({})w^{}/2", c, n)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(w^{}/{})", self.trunc, self.ram)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use proptest::prelude::*;

    fn poly(coeffs: &[(i64, i64)], trunc: i64) -> RamifiedLaurentSeries {
        let mut s = RamifiedLaurentSeries::zero(1, trunc);
        for &(n, c) in coeffs {
            s.set_coeff(n, rat(c));
        }
        s
    }

    #[test]
    fn mul_truncates() {
        // (1 + w)(1 - w) at truncation w^3 is 1 - w^2
        let a = poly(&[(0, 1), (1, 1)], 3);
        let b = poly(&[(0, 1), (1, -1)], 3);
        let p = a.mul(&b);
        assert_eq!(p.coeff(0).unwrap(), rat(1));
        assert_eq!(p.coeff(1).unwrap(), rat(0));
        assert_eq!(p.coeff(2).unwrap(), rat(-1));
        assert_eq!(p.trunc(), 3);
    }

    #[test]
    fn pow_square() {
        let a = poly(&[(0, 1), (1, 1)], 5);
        let sq = a.pow(2);
        assert_eq!(sq.coeff(0).unwrap(), rat(1));
        assert_eq!(sq.coeff(1).unwrap(), rat(2));
        assert_eq!(sq.coeff(2).unwrap(), rat(1));
    }

    #[test]
    fn trunc_contract_is_min() {
        let a = poly(&[(0, 1)], 5);
        let b = poly(&[(0, 1)], 3);
        assert_eq!(a.mul(&b).trunc(), 3);
        assert_eq!(a.add(&b).trunc(), 3);
    }

    #[test]
    fn trunc_gains_from_valuation() {
        // multiplying by w^2 extends the window by 2
        let a = poly(&[(2, 1)], 9);
        let b = poly(&[(0, 1), (1, 5)], 4);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 6);
        assert_eq!(p.coeff(3).unwrap(), rat(5));
    }

    #[test]
    fn coeff_beyond_truncation_errors() {
        let a = poly(&[(0, 1)], 3);
        assert!(a.coeff(2).is_ok());
        assert!(matches!(a.coeff(3), Err(Error::Truncated { .. })));
        assert!(matches!(a.coeff(7), Err(Error::Truncated { .. })));
    }

    #[test]
    fn promotion_mixes_ramifications() {
        let a = poly(&[(1, 3)], 4); // 3w, ram 1
        let half = RamifiedLaurentSeries::monomial(2, 1, ratio(1, 2), 8); // w^{1/2}/2
        let p = a.mul(&half);
        assert_eq!(p.ram(), 2);
        assert_eq!(p.coeff(3).unwrap(), ratio(3, 2)); // (3/2) w^{3/2}
    }

    fn small_poly() -> impl Strategy<Value = RamifiedLaurentSeries> {
        proptest::collection::vec((-6i64..8, -9i64..9), 0..6).prop_map(|terms| {
            let mut s = RamifiedLaurentSeries::zero(1, 30);
            for (n, c) in terms {
                let cur = s.coeff(n).unwrap() + rat(c);
                s.set_coeff(n, cur);
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// With truncation beyond all degrees involved, series arithmetic is
        /// plain Laurent polynomial arithmetic.
        #[test]
        fn ring_axioms_within_window(a in small_poly(), b in small_poly(), c in small_poly()) {
            let left = a.mul(&b.add(&c));
            let right = a.mul(&b).add(&a.mul(&c));
            let bound = left.trunc().min(right.trunc());
            for n in -15..bound {
                prop_assert_eq!(left.coeff(n).unwrap(), right.coeff(n).unwrap());
            }
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            for n in -15..ab.trunc().min(ba.trunc()) {
                prop_assert_eq!(ab.coeff(n).unwrap(), ba.coeff(n).unwrap());
            }
        }
    }
}
