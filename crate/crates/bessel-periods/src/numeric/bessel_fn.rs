//! Modified Bessel functions `I_0`, `K_0` (and `I_1`, `K_1` for the
//! Wronskian checks) at arbitrary precision.
//!
//! Small arguments use the ascending series; the `K` companion series
//! cancels against the log term roughly like `e^{-2t}` against `e^{t}`, so
//! the working precision is raised by about `2t/ln 2` bits there. Beyond the
//! branch point `t* ~ (prec/2) ln 2` the divergent asymptotic expansions are
//! summed to their optimal truncation, whose error `~ e^{-2t}` is then below
//! the target precision. The scaled variants `e^{-t} I` and `e^{t} K` are
//! what the asymptotic branch natively produces; the tail quadratures use
//! them to avoid overflow.

use rug::Float;

use super::real::{euler_gamma, pi, BigReal};
use crate::{Error, Result};

const MAX_TERMS: u32 = 2_000_000;

/// Branch point between the ascending series and the asymptotic expansion.
fn branch_point(prec: u32) -> f64 {
    0.3466 * (prec as f64 + 40.0) + 2.0
}

fn check_positive(t: &BigReal) -> Result<()> {
    if !(t.is_finite() && t.is_sign_positive() && !t.is_zero()) {
        return Err(Error::DivergentMoment(format!(
            "Bessel functions require t > 0, got {}",
            t
        )));
    }
    Ok(())
}

/// Ascending series for `I_nu` (`nu` in `{0, 1}`) at working precision `wp`.
fn i_series(nu: u32, t: &BigReal, wp: u32) -> BigReal {
    let half_t = Float::with_val(wp, t) >> 1u32;
    let q = half_t.clone().square(); // t^2/4
    // term_0: 1 for nu=0, t/2 for nu=1
    let mut term = if nu == 0 {
        Float::with_val(wp, 1)
    } else {
        half_t
    };
    let mut sum = term.clone();
    let tf = t.to_f64();
    let mut n = 1u32;
    while n < MAX_TERMS {
        // term_n = term_{n-1} * q / (n (n + nu))
        term *= &q;
        term /= Float::with_val(wp, n as u64 * (n as u64 + nu as u64));
        sum += &term;
        if term.clone().abs() < sum.clone().abs() >> wp && (n as f64) > tf / 2.0 {
            break;
        }
        n += 1;
    }
    sum
}

/// Ascending series for `K_0` and `K_1` at working precision `wp`
/// (includes the `log(t/2)` and `gamma` parts).
fn k_series(nu: u32, t: &BigReal, wp: u32) -> BigReal {
    let half_t = Float::with_val(wp, t) >> 1u32;
    let log_half_t = half_t.clone().ln();
    let gamma = euler_gamma(wp);
    let q = Float::with_val(wp, t).square() >> 2u32; // t^2/4
    let tf = t.to_f64();

    if nu == 0 {
        // K_0 = -(log(t/2) + gamma) I_0 + sum_{n>=1} H_n q^n/(n!)^2
        let mut term = Float::with_val(wp, 1); // q^n/(n!)^2 at n = 0
        let mut h = Float::new(wp); // harmonic number H_n
        let mut sum = Float::new(wp);
        let mut i0_sum = Float::with_val(wp, 1);
        let mut n = 1u32;
        while n < MAX_TERMS {
            term *= &q;
            term /= Float::with_val(wp, (n as u64) * (n as u64));
            h += Float::with_val(wp, n).recip();
            i0_sum += &term;
            let add = Float::with_val(wp, &term * &h);
            sum += &add;
            if add.abs() < i0_sum.clone().abs() >> wp && (n as f64) > tf / 2.0 {
                break;
            }
            n += 1;
        }
        -(log_half_t + gamma) * i0_sum + sum
    } else {
        // K_1 = log(t/2) I_1 + 1/t
        //       - (t/4) sum_{n>=0} (H_n + H_{n+1} - 2 gamma + 2 gamma) ...
        // with psi(n+1) = -gamma + H_n:
        // K_1 = log(t/2) I_1 + 1/t - (t/4) sum (2 H_n + 1/(n+1) - 2 gamma)
        //       q^n / (n! (n+1)!)
        let i1 = i_series(1, t, wp);
        let mut term = Float::with_val(wp, 1); // q^n/(n!(n+1)!)
        let mut h = Float::new(wp);
        let mut sum = Float::new(wp);
        let mut n = 0u32;
        while n < MAX_TERMS {
            if n > 0 {
                term *= &q;
                term /= Float::with_val(wp, (n as u64) * (n as u64 + 1));
                h += Float::with_val(wp, n).recip();
            }
            // psi(n+1) + psi(n+2) = -2 gamma + 2 H_n + 1/(n+1)
            let digamma_pair = Float::with_val(wp, &h + &h)
                + Float::with_val(wp, n + 1).recip()
                - Float::with_val(wp, &gamma + &gamma);
            let add = Float::with_val(wp, &term * &digamma_pair);
            sum += &add;
            if add.abs() < (Float::with_val(wp, 1) >> wp) && (n as f64) > tf / 2.0 && n > 2 {
                break;
            }
            n += 1;
        }
        let quarter_t = Float::with_val(wp, t) >> 2u32;
        log_half_t * i1 + Float::with_val(wp, t).recip() - quarter_t * sum
    }
}

/// Asymptotic bracket `sum_n s^n a_n(nu) / t^n` at optimal truncation, with
/// `a_n(nu) = prod_{m<=n} (4 nu^2 - (2m-1)^2)/(8m)` and `s = -1` for `I`,
/// `s = +1` for `K`. Returns an error if the optimal truncation cannot reach
/// the requested precision (the branch point prevents this).
fn asym_bracket(nu: u32, s: i32, t: &BigReal, wp: u32, target_bits: u32) -> Result<BigReal> {
    let fournu2 = 4 * (nu * nu) as i64;
    let mut term = Float::with_val(wp, 1);
    let mut sum = term.clone();
    let mut prev_abs = Float::with_val(wp, 1);
    let mut n: i64 = 1;
    loop {
        let num = Float::with_val(wp, fournu2 - (2 * n - 1) * (2 * n - 1));
        let den = Float::with_val(wp, 8 * n) * t;
        term *= num / den;
        if s < 0 {
            term = -term;
        }
        let abs = term.clone().abs();
        if abs > prev_abs {
            // divergence point reached: error is about the size of the last
            // added term
            if prev_abs > Float::with_val(wp, Float::i_exp(1, -(target_bits as i32))) {
                return Err(Error::Internal(format!(
                    "asymptotic series cannot reach target precision at t = {}",
                    t
                )));
            }
            break;
        }
        sum += &term;
        if abs < Float::with_val(wp, Float::i_exp(1, -(target_bits as i32) - 8)) {
            break;
        }
        prev_abs = abs;
        n += 1;
        if n > 4 * (wp as i64) {
            return Err(Error::Internal("asymptotic series stalled".into()));
        }
    }
    Ok(sum)
}

fn scaled_prefactor_i(t: &BigReal, wp: u32) -> BigReal {
    // 1/sqrt(2 pi t)
    (Float::with_val(wp, 2) * pi(wp) * t).sqrt().recip()
}

fn scaled_prefactor_k(t: &BigReal, wp: u32) -> BigReal {
    // sqrt(pi/(2t))
    (pi(wp) / (Float::with_val(wp, 2) * t)).sqrt()
}

fn eval(nu: u32, kind_k: bool, scaled: bool, t: &BigReal, prec: u32) -> Result<BigReal> {
    check_positive(t)?;
    let tf = t.to_f64();
    if tf <= branch_point(prec) {
        // series branch; K needs guard bits against the e^{2t} cancellation
        let guard = if kind_k { (2.9 * tf) as u32 + 32 } else { 32 };
        let wp = prec + guard;
        let mut v = if kind_k {
            k_series(nu, t, wp)
        } else {
            i_series(nu, t, wp)
        };
        if scaled {
            let e = Float::with_val(wp, t).exp();
            if kind_k {
                v *= e;
            } else {
                v /= e;
            }
        }
        Ok(Float::with_val(prec, v))
    } else {
        let wp = prec + 32;
        let mut v = if kind_k {
            scaled_prefactor_k(t, wp) * asym_bracket(nu, 1, t, wp, prec + 8)?
        } else {
            scaled_prefactor_i(t, wp) * asym_bracket(nu, -1, t, wp, prec + 8)?
        };
        if !scaled {
            let e = Float::with_val(wp, t).exp();
            if kind_k {
                v /= e;
            } else {
                v *= e;
            }
        }
        Ok(Float::with_val(prec, v))
    }
}

/// `I_0(t)` to `prec` bits, `t > 0`.
pub fn i0(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(0, false, false, t, prec)
}

/// `K_0(t)` to `prec` bits, `t > 0`.
pub fn k0(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(0, true, false, t, prec)
}

/// `I_1(t)` to `prec` bits, `t > 0`.
pub fn i1(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(1, false, false, t, prec)
}

/// `K_1(t)` to `prec` bits, `t > 0`.
pub fn k1(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(1, true, false, t, prec)
}

/// `e^{-t} I_0(t)`: bounded for all `t`, used by tail quadratures.
pub fn i0_scaled(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(0, false, true, t, prec)
}

/// `e^{t} K_0(t)`: bounded away from 0, used by tail quadratures.
pub fn k0_scaled(t: &BigReal, prec: u32) -> Result<BigReal> {
    eval(0, true, true, t, prec)
}
