//! Double-exponential quadrature at arbitrary precision: tanh-sinh on a
//! finite interval (absorbs endpoint singularities) and exp-sinh on
//! `[a, infinity)` for exponentially decaying integrands.
//!
//! Both run the trapezoidal sum at step `h`, halving `h` per level and
//! reusing previous nodes, until two consecutive levels agree to the target
//! tolerance. Node recursion along a level stops once several consecutive
//! terms are negligible against the running sum.

use rug::Float;

use super::real::BigReal;
use crate::{Error, Result};

const MAX_LEVELS: u32 = 12;
const NEGLIGIBLE_RUN: u32 = 3;

struct LevelState {
    /// Running sum of `w * f` over all nodes seen so far (h-independent).
    acc: Float,
    /// Largest `|w * f|` encountered, for the negligibility threshold.
    max_term: Float,
}

fn half_pi(wp: u32) -> Float {
    let mut v = super::real::pi(wp);
    v >>= 1;
    v
}

/// Integrates `f` over `(a, b)` with the tanh-sinh transform
/// `x = (a+b)/2 + (b-a)/2 tanh((pi/2) sinh u)`. Nodes approach the
/// endpoints as offsets, never reaching them.
pub fn tanh_sinh<F>(f: F, a: &BigReal, b: &BigReal, wp: u32, tol: &BigReal) -> Result<BigReal>
where
    F: Fn(&BigReal) -> BigReal,
{
    let hp = half_pi(wp);
    let width = Float::with_val(wp, b - a);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) - 8));
    // beyond this |u| the offset from the endpoint underflows the precision
    let u_cap = (((wp + 32) as f64) * std::f64::consts::LN_2 / std::f64::consts::PI).asinh() + 0.5;

    let eval_pair = |state: &mut LevelState, u: &Float| -> Result<bool> {
        // p = exp(-2g), g = (pi/2) sinh u; both symmetric nodes share it
        let g = Float::with_val(wp, u.sinh_ref()) * &hp;
        let p = Float::with_val(wp, (-Float::with_val(wp, &g + &g)).exp());
        let one_plus_p = Float::with_val(wp, 1 + &p);
        let delta = Float::with_val(wp, &width * &p) / &one_plus_p;
        // w = (pi/2) cosh(u) (b-a)/2 sech^2(g), sech^2 = 4p/(1+p)^2
        let sech2 = Float::with_val(wp, 4) * &p / one_plus_p.square();
        let w = Float::with_val(wp, u.cosh_ref()) * &hp * &width * sech2 / Float::with_val(wp, 2);
        let x_lo = Float::with_val(wp, a + &delta);
        let x_hi = Float::with_val(wp, b - &delta);
        let mut term = Float::with_val(wp, f(&x_lo) + f(&x_hi));
        term *= &w;
        if term.is_nan() {
            return Err(Error::Internal("NaN in tanh-sinh integrand".into()));
        }
        let negligible = term.clone().abs()
            <= Float::with_val(wp, &state.max_term * &eps).max(&Float::with_val(wp, &eps * &eps));
        if term.clone().abs() > state.max_term {
            state.max_term = term.clone().abs();
        }
        state.acc += term;
        Ok(negligible)
    };

    // center node u = 0: w = (pi/2)(b-a)/2, x = midpoint
    let mut state = LevelState {
        acc: Float::new(wp),
        max_term: Float::new(wp),
    };
    {
        let mid = Float::with_val(wp, a + b) / Float::with_val(wp, 2);
        let w0 = Float::with_val(wp, &hp * &width) / Float::with_val(wp, 2);
        let t0 = Float::with_val(wp, f(&mid)) * w0;
        if t0.is_nan() {
            return Err(Error::Internal("NaN in tanh-sinh integrand".into()));
        }
        state.max_term = t0.clone().abs();
        state.acc = t0;
    }

    let mut h = Float::with_val(wp, 1);
    // level 0: integer nodes
    let mut n = 1u64;
    let mut run = 0u32;
    loop {
        let u = Float::with_val(wp, n);
        if u.to_f64() > u_cap {
            break;
        }
        let negligible = eval_pair(&mut state, &u)?;
        run = if negligible { run + 1 } else { 0 };
        if run >= NEGLIGIBLE_RUN {
            break;
        }
        n += 1;
    }
    let mut prev = Float::with_val(wp, &state.acc * &h);

    for _level in 1..=MAX_LEVELS {
        h >>= 1;
        // new nodes at odd multiples of h
        let mut m = 1u64;
        let mut run = 0u32;
        loop {
            let u = Float::with_val(wp, &h * &Float::with_val(wp, m));
            if u.to_f64() > u_cap {
                break;
            }
            let negligible = eval_pair(&mut state, &u)?;
            run = if negligible { run + 1 } else { 0 };
            if run >= NEGLIGIBLE_RUN {
                break;
            }
            m += 2;
        }
        let current = Float::with_val(wp, &state.acc * &h);
        let diff = Float::with_val(wp, &current - &prev).abs();
        let scale = current.clone().abs().max(&Float::with_val(wp, 1e-300));
        if diff <= Float::with_val(wp, tol * &scale) {
            return Ok(current);
        }
        prev = current;
    }
    Err(Error::Internal(
        "tanh-sinh failed to converge within level budget".into(),
    ))
}

/// Integrates `f` over `(a, infinity)` with the exp-sinh transform
/// `x = a + exp((pi/2) sinh u)`; suited to integrands with (at least)
/// exponential decay.
pub fn exp_sinh<F>(f: F, a: &BigReal, wp: u32, tol: &BigReal) -> Result<BigReal>
where
    F: Fn(&BigReal) -> BigReal,
{
    let hp = half_pi(wp);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) - 8));
    let u_cap = 8.0f64;

    let eval_one = |state: &mut LevelState, u: &Float| -> Result<bool> {
        let g = Float::with_val(wp, u.sinh_ref()) * &hp;
        let eg = Float::with_val(wp, g.exp_ref());
        let x = Float::with_val(wp, a + &eg);
        let w = Float::with_val(wp, u.cosh_ref()) * &hp * &eg;
        let mut term = f(&x);
        term *= &w;
        if term.is_nan() {
            return Err(Error::Internal("NaN in exp-sinh integrand".into()));
        }
        let negligible = term.clone().abs()
            <= Float::with_val(wp, &state.max_term * &eps).max(&Float::with_val(wp, &eps * &eps));
        if term.clone().abs() > state.max_term {
            state.max_term = term.clone().abs();
        }
        state.acc += term;
        Ok(negligible)
    };

    let mut state = LevelState {
        acc: Float::new(wp),
        max_term: Float::new(wp),
    };
    // u = 0: x = a + 1, w = pi/2
    {
        let x = Float::with_val(wp, a + 1u32);
        let t0 = Float::with_val(wp, f(&x)) * &hp;
        if t0.is_nan() {
            return Err(Error::Internal("NaN in exp-sinh integrand".into()));
        }
        state.max_term = t0.clone().abs();
        state.acc = t0;
    }

    let mut h = Float::with_val(wp, 1);
    for dir in [1i32, -1] {
        let mut n = 1u64;
        let mut run = 0u32;
        loop {
            let u = Float::with_val(wp, n as i64 * dir as i64);
            if u.to_f64().abs() > u_cap {
                break;
            }
            let negligible = eval_one(&mut state, &u)?;
            run = if negligible { run + 1 } else { 0 };
            if run >= NEGLIGIBLE_RUN {
                break;
            }
            n += 1;
        }
    }
    let mut prev = Float::with_val(wp, &state.acc * &h);

    for _level in 1..=MAX_LEVELS {
        h >>= 1;
        for dir in [1i32, -1] {
            let mut m = 1u64;
            let mut run = 0u32;
            loop {
                let u = Float::with_val(wp, &h * &Float::with_val(wp, m as i64 * dir as i64));
                if u.to_f64().abs() > u_cap {
                    break;
                }
                let negligible = eval_one(&mut state, &u)?;
                run = if negligible { run + 1 } else { 0 };
                if run >= NEGLIGIBLE_RUN {
                    break;
                }
                m += 2;
            }
        }
        let current = Float::with_val(wp, &state.acc * &h);
        let diff = Float::with_val(wp, &current - &prev).abs();
        let scale = current.clone().abs().max(&Float::with_val(wp, 1e-300));
        if diff <= Float::with_val(wp, tol * &scale) {
            return Ok(current);
        }
        prev = current;
    }
    Err(Error::Internal(
        "exp-sinh failed to converge within level budget".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::real::{pi, pow10};

    fn wp() -> u32 {
        256
    }

    #[test]
    fn polynomial_on_unit_interval() {
        // int_0^1 x^2 dx = 1/3
        let tol = pow10(60, wp()).recip();
        let a = Float::new(wp());
        let b = Float::with_val(wp(), 1);
        let v = tanh_sinh(|x| x.clone().square(), &a, &b, wp(), &tol).unwrap();
        let exact = Float::with_val(wp(), 1) / Float::with_val(wp(), 3);
        assert!(Float::with_val(wp(), &v - &exact).abs() < pow10(58, wp()).recip());
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 log(x)^2 dx = 2
        let tol = pow10(55, wp()).recip();
        let a = Float::new(wp());
        let b = Float::with_val(wp(), 1);
        let v = tanh_sinh(|x| x.clone().ln().square(), &a, &b, wp(), &tol).unwrap();
        assert!(Float::with_val(wp(), &v - 2u32).abs() < pow10(50, wp()).recip());
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // int_0^1 1/sqrt(x) dx = 2
        let tol = pow10(55, wp()).recip();
        let a = Float::new(wp());
        let b = Float::with_val(wp(), 1);
        let v = tanh_sinh(|x| x.clone().sqrt().recip(), &a, &b, wp(), &tol).unwrap();
        assert!(Float::with_val(wp(), &v - 2u32).abs() < pow10(50, wp()).recip());
    }

    #[test]
    fn exponential_tail() {
        // int_1^inf exp(-t) dt = 1/e
        let tol = pow10(60, wp()).recip();
        let a = Float::with_val(wp(), 1);
        let v = exp_sinh(|x| (-x.clone()).exp(), &a, wp(), &tol).unwrap();
        let exact = Float::with_val(wp(), -1).exp();
        assert!(Float::with_val(wp(), &v - &exact).abs() < pow10(55, wp()).recip());
    }

    #[test]
    fn gaussian_like_tail() {
        // int_0^inf t exp(-t^2) dt = 1/2
        let tol = pow10(60, wp()).recip();
        let a = Float::new(wp());
        let v = exp_sinh(
            |x| x.clone() * (-x.clone().square()).exp(),
            &a,
            wp(),
            &tol,
        )
        .unwrap();
        assert!(
            Float::with_val(wp(), &v - &Float::with_val(wp(), 0.5)).abs()
                < pow10(55, wp()).recip()
        );
    }

    #[test]
    fn log_power_times_t() {
        // int_0^1 t log(t/2)^3 dt: exact antiderivative check
        // I = -(3/8) [ln 2 (ln2 (2 ln2/3 ... )) ]: compute via series instead:
        // substitute u = log(t/2): I = int_{-inf}^{ln(1/2)} u^3 e^{2u} 4 du... simpler:
        // d/dt [ t^2/2 L^3 - 3/4 t^2 L^2 + 3/4 t^2 L - 3/8 t^2 ] = t L^3 with L = log(t/2)
        let tol = pow10(60, wp()).recip();
        let a = Float::new(wp());
        let b = Float::with_val(wp(), 1);
        let f = |x: &Float| {
            let l = Float::with_val(wp(), x / &Float::with_val(wp(), 2)).ln();
            x.clone() * l.clone() * l.clone() * l
        };
        let v = tanh_sinh(f, &a, &b, wp(), &tol).unwrap();
        let l = Float::with_val(wp(), 0.5).ln();
        let exact = l.clone() * l.clone() * l.clone() / Float::with_val(wp(), 2)
            - Float::with_val(wp(), 0.75) * l.clone() * l.clone()
            + Float::with_val(wp(), 0.75) * l
            - Float::with_val(wp(), 0.375);
        assert!(Float::with_val(wp(), &v - &exact).abs() < pow10(55, wp()).recip());
    }

    #[test]
    fn pi_from_circle() {
        // int_0^1 4 sqrt(1-x^2) dx = pi
        let tol = pow10(60, wp()).recip();
        let a = Float::new(wp());
        let b = Float::with_val(wp(), 1);
        let v = tanh_sinh(
            |x| {
                let s = Float::with_val(wp(), 1 - x.clone().square());
                Float::with_val(wp(), 4) * s.sqrt()
            },
            &a,
            &b,
            wp(),
            &tol,
        )
        .unwrap();
        assert!(Float::with_val(wp(), &v - &pi(wp())).abs() < pow10(55, wp()).recip());
    }
}
