//! Normal-ordered operators `sum c_{p,q} w^p theta^q` with `theta = w^2 d/dw`.
//!
//! The commutation rule is `theta . w^p = w^p theta + p w^{p+1}`; products
//! are kept normal ordered (all `w` to the left of all `theta`). A monomial
//! `w^p theta^q` is homogeneous of order `p + q`: it maps `w^l` to a multiple
//! of `w^{l+p+q}`.

use std::collections::BTreeMap;

use rug::Complete;

use crate::exact::{rat, Rational};
use crate::series::RamifiedLaurentSeries;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ThetaOperator {
    /// `(p, q) -> c` meaning `c w^p theta^q`.
    terms: BTreeMap<(u32, u32), Rational>,
}

impl ThetaOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, rat(1))
    }

    pub fn theta() -> Self {
        Self::monomial(0, 1, rat(1))
    }

    pub fn w() -> Self {
        Self::monomial(1, 0, rat(1))
    }

    pub fn monomial(p: u32, q: u32, c: Rational) -> Self {
        let mut op = Self::zero();
        op.add_term(p, q, c);
        op
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, p: u32, q: u32, c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry((p, q)).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&(p, q));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((p, q), c) in &other.terms {
            out.add_term(*p, *q, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((p, q), c) in &other.terms {
            out.add_term(*p, *q, (-c).complete());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, (v * c).complete()))
                .collect(),
        }
    }

    /// Left-composition with `theta`: each `c w^p theta^q` becomes
    /// `c w^p theta^{q+1} + c p w^{p+1} theta^q`.
    fn theta_compose(&self) -> Self {
        let mut out = Self::zero();
        for ((p, q), c) in &self.terms {
            out.add_term(*p, q + 1, c.clone());
            if *p > 0 {
                out.add_term(p + 1, *q, (c * &rat(*p as i64)).complete());
            }
        }
        out
    }

    /// Left-multiplication by `w^p`.
    fn w_shift(&self, p: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|((tp, tq), c)| ((tp + p, *tq), c.clone()))
                .collect(),
        }
    }

    /// Composition `self . other` in normal-ordered form.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((p, q), c) in &self.terms {
            // c w^p theta^q . other
            let mut part = other.clone();
            for _ in 0..*q {
                part = part.theta_compose();
            }
            part = part.w_shift(*p).scale(c);
            out = out.add(&part);
        }
        out
    }

    /// The homogeneous component of order `l`: the sum of terms with
    /// `p + q = l`. Summing over all `l` recovers the operator.
    pub fn component(&self, l: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((p, q), _)| p + q == l)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Smallest `p + q` over the terms; `None` for the zero operator.
    pub fn min_order(&self) -> Option<u32> {
        self.terms.keys().map(|(p, q)| p + q).min()
    }

    /// Largest `p + q` over the terms; `None` for the zero operator.
    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().map(|(p, q)| p + q).max()
    }

    /// The scalar by which the order-`m` component acts on `w^l`:
    /// `component(m)(w^l) = symbol(m, l) w^{l+m}`, using
    /// `theta^q(w^l) = l (l+1) ... (l+q-1) w^{l+q}`.
    pub fn symbol(&self, m: u32, l: i64) -> Rational {
        let mut acc = Rational::new();
        for ((p, q), c) in &self.terms {
            if p + q != m {
                continue;
            }
            let mut rising = rat(1);
            for t in 0..*q {
                rising *= rat(l + t as i64);
            }
            acc += (c * &rising).complete();
        }
        acc
    }

    /// Applies the operator to an unramified series. The result is valid
    /// below `s.trunc() + min_order`.
    pub fn apply(&self, s: &RamifiedLaurentSeries) -> Result<RamifiedLaurentSeries> {
        if s.ram() != 1 {
            return Err(Error::RamifiedOperand);
        }
        let min_order = self.min_order().unwrap_or(0) as i64;
        let trunc = s.trunc() + min_order;
        let mut out = RamifiedLaurentSeries::zero(1, trunc);
        for ((p, q), c) in &self.terms {
            let shift = (p + q) as i64;
            for (l, coeff) in s.terms() {
                let e = l + shift;
                if e >= trunc {
                    continue;
                }
                let mut rising = c.clone();
                for t in 0..*q {
                    rising *= rat(l + t as i64);
                }
                if rising != 0 {
                    let cur = out.coeff(e).unwrap() + rising * coeff;
                    out.set_coeff(e, cur);
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Display for ThetaOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((p, q), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            if *p > 0 {
                write!(f, "w^{}", p)?;
            }
            if *q > 0 {
                write!(f, "th^{}", q)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use proptest::prelude::*;

    fn w_monomial(l: i64) -> RamifiedLaurentSeries {
        RamifiedLaurentSeries::monomial(1, l, rat(1), l + 40)
    }

    #[test]
    fn theta_action_on_monomials() {
        // theta(w^l) = l w^{l+1}
        for l in [-4i64, -1, 0, 1, 2, 7] {
            let out = ThetaOperator::theta().apply(&w_monomial(l)).unwrap();
            assert_eq!(out.coeff(l + 1).unwrap(), rat(l));
        }
        // theta^2(w^2) = 2*3 w^4
        let th2 = ThetaOperator::monomial(0, 2, rat(1));
        let out = th2.apply(&w_monomial(2)).unwrap();
        assert_eq!(out.coeff(4).unwrap(), rat(6));
    }

    #[test]
    fn w_power_acts_by_shift() {
        let op = ThetaOperator::monomial(3, 0, ratio(5, 2));
        let s = {
            let mut s = RamifiedLaurentSeries::zero(1, 6);
            s.set_coeff(-1, rat(2));
            s.set_coeff(4, rat(7));
            s
        };
        let out = op.apply(&s).unwrap();
        assert_eq!(out.coeff(2).unwrap(), rat(5));
        assert_eq!(out.coeff(7).unwrap(), ratio(35, 2));
        assert_eq!(out.trunc(), 9);
    }

    #[test]
    fn commutation_theta_w() {
        // theta . w = w theta + w^2, checked on monomials w^l, l = 0..5
        let lhs = ThetaOperator::theta().mul(&ThetaOperator::w());
        let rhs = ThetaOperator::monomial(1, 1, rat(1)).add(&ThetaOperator::monomial(2, 0, rat(1)));
        assert_eq!(lhs, rhs);
        for l in 0..=5i64 {
            let a = lhs.apply(&w_monomial(l)).unwrap();
            let b = rhs.apply(&w_monomial(l)).unwrap();
            for n in l..a.trunc().min(b.trunc()) {
                assert_eq!(a.coeff(n).unwrap(), b.coeff(n).unwrap());
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let a = ThetaOperator::monomial(2, 3, ratio(-7, 5)).add(&ThetaOperator::theta());
        assert_eq!(a.mul(&ThetaOperator::one()), a);
        assert_eq!(ThetaOperator::one().mul(&a), a);
    }

    #[test]
    fn associativity_on_generators() {
        // (theta . w) . w = theta . (w . w)
        let t = ThetaOperator::theta();
        let w = ThetaOperator::w();
        let left = t.mul(&w).mul(&w);
        let right = t.mul(&w.mul(&w));
        assert_eq!(left, right);
    }

    #[test]
    fn component_grading() {
        let r = ThetaOperator::theta().add(&ThetaOperator::monomial(2, 0, rat(1)));
        assert_eq!(r.component(1), ThetaOperator::theta());
        assert_eq!(r.component(2), ThetaOperator::monomial(2, 0, rat(1)));
        assert!(r.component(3).is_zero());
        assert_eq!(r.component(1).add(&r.component(2)), r);
    }

    fn small_op() -> impl Strategy<Value = ThetaOperator> {
        proptest::collection::vec((0u32..3, 0u32..3, -5i64..6), 0..4).prop_map(|terms| {
            let mut op = ThetaOperator::zero();
            for (p, q, c) in terms {
                op.add_term(p, q, rat(c));
            }
            op
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Module action: (A.B)(s) = A(B(s)).
        #[test]
        fn mul_is_composition(a in small_op(), b in small_op(), l in -3i64..4) {
            let s = w_monomial(l);
            let via_product = a.mul(&b).apply(&s).unwrap();
            let via_nested = a.apply(&b.apply(&s).unwrap()).unwrap();
            let bound = via_product.trunc().min(via_nested.trunc());
            for n in (l - 1)..bound {
                prop_assert_eq!(via_product.coeff(n).unwrap(), via_nested.coeff(n).unwrap());
            }
        }

        /// Homogeneity: component(m) maps w^l to a pure monomial w^{l+m}.
        #[test]
        fn components_are_homogeneous(a in small_op(), l in -3i64..4) {
            for m in 0..=6u32 {
                let comp = a.component(m);
                if comp.is_zero() { continue; }
                let out = comp.apply(&w_monomial(l)).unwrap();
                for (n, c) in out.terms() {
                    if *c != 0 {
                        prop_assert_eq!(n, l + m as i64);
                    }
                }
                // and the action scalar matches the symbol
                let sym = a.symbol(m, l);
                prop_assert_eq!(out.coeff(l + m as i64).unwrap(), sym);
            }
        }
    }
}
