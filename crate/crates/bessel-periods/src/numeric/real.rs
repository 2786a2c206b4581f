//! Arbitrary-precision reals and complexes (MPFR-backed) with the shared
//! constants pi and Euler gamma cached per precision.

use std::collections::HashMap;
use std::sync::RwLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::exact::Rational;

/// Arbitrary-precision float; the precision in bits travels with the value
/// and is never silently downgraded by this crate's code.
pub type BigReal = Float;

/// Bits needed for `digits` decimal digits, with a fixed safety slack.
pub fn bits_for_digits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

static CONSTS: RwLock<Option<HashMap<(u8, u32), Float>>> = RwLock::new(None);

fn cached_const(which: u8, prec: u32) -> Float {
    {
        let guard = CONSTS.read().unwrap();
        if let Some(map) = guard.as_ref() {
            if let Some(v) = map.get(&(which, prec)) {
                return v.clone();
            }
        }
    }
    let value = match which {
        0 => Float::with_val(prec, Constant::Pi),
        _ => Float::with_val(prec, Constant::Euler),
    };
    let mut guard = CONSTS.write().unwrap();
    guard
        .get_or_insert_with(HashMap::new)
        .insert((which, prec), value.clone());
    value
}

/// Pi at `prec` bits (cached).
pub fn pi(prec: u32) -> BigReal {
    cached_const(0, prec)
}

/// The Euler-Mascheroni constant at `prec` bits (cached).
pub fn euler_gamma(prec: u32) -> BigReal {
    cached_const(1, prec)
}

/// Exact-to-float conversion at `prec` bits.
pub fn from_rational(q: &Rational, prec: u32) -> BigReal {
    Float::with_val(prec, q)
}

/// Scientific-notation decimal string with `digits` significant digits.
pub fn to_sci_string(x: &BigReal, digits: u32) -> String {
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
}

/// Parses a decimal string at `prec` bits.
pub fn parse_real(s: &str, prec: u32) -> Option<BigReal> {
    Float::parse(s).ok().map(|v| Float::with_val(prec, v))
}

/// `|x - y|` as a float at the smaller of the two precisions.
pub fn abs_diff(x: &BigReal, y: &BigReal) -> BigReal {
    let prec = x.prec().min(y.prec());
    Float::with_val(prec, x - y).abs()
}

/// `10^{-e}` at `prec` bits.
pub fn pow10(e: i32, prec: u32) -> BigReal {
    Float::with_val(prec, 10).pow(e)
}

/// Complex number as a pair of equal-precision reals.
#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn from_real(re: BigReal) -> Self {
        let prec = re.prec();
        Self::new(re, Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec().min(other.prec());
        Self::new(
            Float::with_val(prec, &self.re + &other.re),
            Float::with_val(prec, &self.im + &other.im),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let prec = self.prec().min(other.prec());
        Self::new(
            Float::with_val(prec, &self.re - &other.re),
            Float::with_val(prec, &self.im - &other.im),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec().min(other.prec());
        let re = Float::with_val(prec, &self.re * &other.re)
            - Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.re * &other.im)
            + Float::with_val(prec, &self.im * &other.re);
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn scale(&self, c: &BigReal) -> Self {
        let prec = self.prec();
        Self::new(
            Float::with_val(prec, &self.re * c),
            Float::with_val(prec, &self.im * c),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.re.clone(), -self.im.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = self.prec().min(other.prec());
        let den = Float::with_val(prec, other.re.clone().square() + other.im.clone().square());
        let num = self.mul(&other.conj());
        Self::new(num.re / &den, num.im / &den)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn abs(&self) -> BigReal {
        let prec = self.prec();
        Float::with_val(prec, self.re.clone().square() + self.im.clone().square()).sqrt()
    }

    /// `i^a` times `self`, for any integer `a`.
    pub fn mul_i_power(&self, a: i64) -> Self {
        match a.rem_euclid(4) {
            0 => self.clone(),
            1 => Self::new(-self.im.clone(), self.re.clone()),
            2 => self.neg(),
            _ => Self::new(self.im.clone(), -self.re.clone()),
        }
    }
}
