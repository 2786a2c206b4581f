//! Bessel moments: the convergent family
//! `M_k(i, c) = int_0^inf I_0^i K_0^{k-i} t^c dt`, the moments regularized
//! at zero (`lim G_{k,i}`, for the `dt/t` column of the full period matrix)
//! and at infinity (`lim H_{k,j}`, for the divergent `(I_0 K_0)^{k/2}`
//! tails), and the compactly-supported combination.
//!
//! All functions return plain real numbers; the `(-1)^{k-i} 2^{k-c} (pi i)^i`
//! normalization prefactors live in the `periods` module. Results are
//! memoized in-process and optionally persisted through the disk cache.

use std::collections::HashMap;
use std::sync::RwLock;

use rug::ops::Pow;
use rug::Float;

use super::bessel_fn::{i0, i0_scaled, k0, k0_scaled};
use super::cache::{now_timestamp, MomentCache, MomentKey, MomentKind, MomentRecord};
use super::quad::{exp_sinh, tanh_sinh};
use super::real::{bits_for_digits, euler_gamma, parse_real, pow10, to_sci_string, BigReal};
use crate::exact::{double_factorial, factorial, rat, Rational};
use crate::series::{gamma_constant, RamifiedLaurentSeries};
use crate::{Error, Result};

/// Extra decimal digits carried through every quadrature.
const GUARD_DIGITS: u32 = 12;

type MemoKey = (u8, u32, u32, i32);

static MEMO: RwLock<Option<HashMap<MemoKey, (Float, u32)>>> = RwLock::new(None);
static DISK: RwLock<Option<MomentCache>> = RwLock::new(None);

/// Installs a persistent cache consulted by all moment evaluations (the CLI
/// wires this from `--cache-dir` / `BESSEL_LAB_CACHE`).
pub fn set_disk_cache(cache: Option<MomentCache>) {
    *DISK.write().unwrap() = cache;
}

fn memo_key(kind: MomentKind, k: u32, i: u32, c: i32) -> MemoKey {
    (kind as u8, k, i, c)
}

fn memo_get(key: &MemoKey, digits: u32) -> Option<BigReal> {
    let guard = MEMO.read().unwrap();
    let map = guard.as_ref()?;
    let (value, cert) = map.get(key)?;
    if *cert >= digits {
        Some(Float::with_val(bits_for_digits(digits), value))
    } else {
        None
    }
}

fn memo_put(key: MemoKey, value: &BigReal, digits: u32) {
    let mut guard = MEMO.write().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    match map.get(&key) {
        Some((_, cert)) if *cert >= digits => {}
        _ => {
            map.insert(key, (value.clone(), digits));
        }
    }
}

fn disk_get(kind: MomentKind, k: u32, i: u32, c: i32, digits: u32) -> Option<BigReal> {
    let guard = DISK.read().unwrap();
    let cache = guard.as_ref()?;
    let rec = cache.get(kind, k, i, c, digits)?;
    parse_real(&rec.value, bits_for_digits(digits))
}

fn disk_put(kind: MomentKind, k: u32, i: u32, c: i32, digits: u32, value: &BigReal) {
    let guard = DISK.read().unwrap();
    if let Some(cache) = guard.as_ref() {
        let rec = MomentRecord {
            key: MomentKey {
                kind,
                k,
                i,
                c,
                digits,
            },
            value: to_sci_string(value, digits),
            certified_digits: digits,
            created: now_timestamp(),
        };
        if let Err(e) = cache.put(&rec) {
            eprintln!("warning: moment cache write failed: {}", e);
        }
    }
}

/// Memoizing wrapper shared by all moment kinds.
fn cached<F>(kind: MomentKind, k: u32, i: u32, c: i32, digits: u32, compute: F) -> Result<BigReal>
where
    F: FnOnce() -> Result<BigReal>,
{
    let key = memo_key(kind, k, i, c);
    if let Some(v) = memo_get(&key, digits) {
        return Ok(v);
    }
    if let Some(v) = disk_get(kind, k, i, c, digits) {
        memo_put(key, &v, digits);
        return Ok(v);
    }
    let v = compute()?;
    memo_put(key, &v, digits);
    disk_put(kind, k, i, c, digits, &v);
    Ok(Float::with_val(bits_for_digits(digits), &v))
}

fn validate_ikm(k: u32, i: u32, c: i32) -> Result<()> {
    if k == 0 || i > k {
        return Err(Error::IndexRange(format!("ikm: need 0 <= i <= k, got i = {}, k = {}", i, k)));
    }
    if c < 0 {
        return Err(Error::IndexRange("ikm: need c >= 0 (see ikm_reg_minus1 for c = -1)".into()));
    }
    if 2 * i > k {
        return Err(Error::DivergentMoment(format!(
            "I_0^{} K_0^{} grows like e^{{{}t}}",
            i,
            k - i,
            2 * i - k
        )));
    }
    if 2 * i == k && c >= k as i32 / 2 - 1 {
        return Err(Error::DivergentMoment(format!(
            "(I_0 K_0)^{} t^{} decays too slowly; use ikm_reg_half",
            i, c
        )));
    }
    Ok(())
}

/// `M_k(i, c) = int_0^inf I_0(t)^i K_0(t)^{k-i} t^c dt` to about `digits`
/// decimal digits, splitting the range at `cut`.
pub fn ikm_with_cut(k: u32, i: u32, c: i32, digits: u32, cut: u32) -> Result<BigReal> {
    validate_ikm(k, i, c)?;
    assert!(cut >= 1);
    let wp = bits_for_digits(digits + GUARD_DIGITS);
    let tol = pow10(digits as i32 + 6, wp).recip();

    let head = {
        let f = |t: &BigReal| -> BigReal {
            let vi = i0(t, wp).expect("t > 0");
            let vk = k0(t, wp).expect("t > 0");
            let mut prod = Float::with_val(wp, vi.pow(i));
            prod *= Float::with_val(wp, vk.pow(k - i));
            prod * Float::with_val(wp, t.pow(c))
        };
        let a = Float::new(wp);
        let b = Float::with_val(wp, cut);
        tanh_sinh(f, &a, &b, wp, &tol)?
    };

    let tail = if 2 * i < k {
        // exponential decay e^{-(k-2i)t}: scaled evaluation avoids overflow
        let decay = (k - 2 * i) as i64;
        let f = move |t: &BigReal| -> BigReal {
            let vi = i0_scaled(t, wp).expect("t > 0");
            let vk = k0_scaled(t, wp).expect("t > 0");
            let mut prod = Float::with_val(wp, vi.pow(i));
            prod *= Float::with_val(wp, vk.pow(k - i));
            prod *= Float::with_val(wp, -decay * t.clone()).exp();
            prod * Float::with_val(wp, t.pow(c))
        };
        let a = Float::with_val(wp, cut);
        exp_sinh(f, &a, wp, &tol)?
    } else {
        // i = k/2: polynomial decay t^{c - k/2}; substitute t = 1/u
        let f = move |u: &BigReal| -> BigReal {
            let t = u.clone().recip();
            let vi = i0_scaled(&t, wp).expect("t > 0");
            let vk = k0_scaled(&t, wp).expect("t > 0");
            let prod = Float::with_val(wp, (vi * vk).pow(i));
            prod * Float::with_val(wp, t.pow(c + 2))
        };
        let a = Float::new(wp);
        let b = Float::with_val(wp, cut).recip();
        tanh_sinh(f, &a, &b, wp, &tol)?
    };

    Ok(Float::with_val(bits_for_digits(digits), head + tail))
}

/// `M_k(i, c)` with the default range split, memoized.
pub fn ikm(k: u32, i: u32, c: i32, digits: u32) -> Result<BigReal> {
    validate_ikm(k, i, c)?;
    cached(MomentKind::Ikm, k, i, c, digits, || {
        ikm_with_cut(k, i, c, digits, 1)
    })
}

/// The regularized moment at zero
/// `lim_{e -> 0+} [ int_e^inf I_0^i K_0^{k-i} dt/t
///                  + (-1)^{k-i}/(k-i+1) (gamma + log(e/2))^{k-i+1} ]`,
/// computed by subtracting the exact log-power singular part on `(0, 1]`.
pub fn ikm_reg_minus1(k: u32, i: u32, digits: u32) -> Result<BigReal> {
    let kp = crate::k_prime(k);
    if i < 1 || i > kp {
        return Err(Error::IndexRange(format!(
            "ikm_reg_minus1: need 1 <= i <= k' = {}, got {}",
            kp, i
        )));
    }
    cached(MomentKind::IkmRegMinus1, k, i, -1, digits, || {
        // the subtraction loses ~digits more, so double the working precision
        let wp = bits_for_digits(2 * digits + 2 * GUARD_DIGITS);
        let out = bits_for_digits(digits);
        let tol = pow10(digits as i32 + 6, wp).recip();
        let m = (k - i) as i64; // K_0 power
        let sign = if m % 2 == 0 { 1f64 } else { -1f64 };

        // (0, 1]: [I^i K^{k-i} - (-1)^{k-i} (gamma + log(t/2))^{k-i}] / t
        let head = {
            let gamma = euler_gamma(wp);
            let f = move |t: &BigReal| -> BigReal {
                let vi = i0(t, wp).expect("t > 0");
                let vk = k0(t, wp).expect("t > 0");
                let mut prod = Float::with_val(wp, vi.pow(i));
                prod *= Float::with_val(wp, vk.pow(k - i));
                let lg = Float::with_val(wp, &gamma + &(t.clone() / 2u32).ln());
                let sub = Float::with_val(wp, sign) * lg.pow(m as u32);
                (prod - sub) / t.clone()
            };
            let a = Float::new(wp);
            let b = Float::with_val(wp, 1);
            tanh_sinh(f, &a, &b, wp, &tol)?
        };

        // exact antiderivative at t = 1:
        // (-1)^{k-i} (gamma + log(1/2))^{k-i+1}/(k-i+1)
        let boundary = {
            let lg = Float::with_val(wp, euler_gamma(wp) + Float::with_val(wp, 0.5).ln());
            Float::with_val(wp, sign) * lg.pow((m + 1) as u32) / Float::with_val(wp, m + 1)
        };

        // [1, inf): convergent since i <= k' (decay e^{-(k-2i)t})
        let tail = {
            let decay = (k - 2 * i) as i64;
            let f = move |t: &BigReal| -> BigReal {
                let vi = i0_scaled(t, wp).expect("t > 0");
                let vk = k0_scaled(t, wp).expect("t > 0");
                let mut prod = Float::with_val(wp, vi.pow(i));
                prod *= Float::with_val(wp, vk.pow(k - i));
                prod *= Float::with_val(wp, -decay * t.clone()).exp();
                prod / t.clone()
            };
            let a = Float::with_val(wp, 1);
            exp_sinh(f, &a, wp, &tol)?
        };

        Ok(Float::with_val(out, head + boundary + tail))
    })
}

/// The asymptotic expansion of `(I_0 K_0)^{k/2}` as exact coefficients of
/// `t^{-k/2 - 2m}`: `(I_0 K_0)^{k/2} ~ 2^{-k/2} sum_m phi_m t^{-k/2-2m}`.
fn product_tail_coeffs(k: u32, terms: i64) -> Vec<Rational> {
    // Phi(y) = (sum_n ((2n-1)!!)^3/(2^{3n} n!) y^n)^{k/2}, y = 1/t^2
    let mut base = RamifiedLaurentSeries::zero(1, terms);
    let mut pow8 = rat(1);
    for n in 0..terms {
        if n > 0 {
            pow8 *= rat(8);
        }
        let df = double_factorial(2 * n - 1);
        base.set_coeff(n, df.clone() * df.clone() * df / (pow8.clone() * factorial(n)));
    }
    let phi = base.pow(k / 2);
    (0..terms).map(|m| phi.coeff(m).expect("within truncation")).collect()
}

/// The regularized moment at infinity `lim H_{k,j}` for even `k` and
/// `j > floor(k/4)`: the finite part of `int (I_0 K_0)^{k/2} t^{2j-1} dt`
/// after removing the non-decaying asymptotic terms (and, for `4 | k`, the
/// `gamma_{k,j}` multiple of `t^{k/2-1}` that makes the finite part
/// well defined).
pub fn ikm_reg_half(k: u32, j: u32, digits: u32) -> Result<BigReal> {
    if k % 2 != 0 || k < 6 {
        return Err(Error::IndexRange(format!(
            "ikm_reg_half requires even k >= 6, got {}",
            k
        )));
    }
    let kp = crate::k_prime(k);
    if j <= k / 4 || j > kp {
        return Err(Error::IndexRange(format!(
            "ikm_reg_half: need k/4 < j <= k' = {}, got j = {} (use ikm below the divergent range)",
            kp, j
        )));
    }
    cached(MomentKind::IkmRegHalf, k, k / 2, 2 * j as i32 - 1, digits, || {
        ikm_reg_half_at(k, j, digits, 0.0)
    })
}

/// Worker with an adjustable cut shift (the two-cut agreement is the
/// self-check for this regularization).
pub fn ikm_reg_half_at(k: u32, j: u32, digits: u32, t0_shift: f64) -> Result<BigReal> {
    let half = k as i64 / 2;
    let jj = j as i64;
    // gamma correction only for 4 | k (integer exponents produce a t^{-1}
    // tail term that the definition cancels with gamma_{k,j} t^{k/2-1})
    let gamma_corr: Rational = if k % 4 == 0 {
        gamma_constant(k, jj) * (Rational::from(1) << (2 * j)) / (Rational::from(1) << (k / 2))
    } else {
        rat(0)
    };

    // cut T0: the optimal-truncation error of the tail series is ~e^{-2T0}
    let mut t0 = 1.1513 * (digits as f64 + 10.0);
    for _ in 0..4 {
        let power = (2 * jj - 1 - half).max(1) as f64;
        t0 = 0.5 * ((digits as f64 + 10.0) * std::f64::consts::LN_10 + power * t0.ln()) + 8.0;
    }
    let t0 = (t0 + t0_shift).ceil();

    // exact asymptotic coefficient map of g = P t^{2j-1} - corr P t^{k/2-1}:
    // exponent -> rational coefficient
    let n_terms = (t0 as i64) + 8;
    let phi = product_tail_coeffs(k, n_terms);
    let two_pow_half = Rational::from(1) << (k / 2);
    let coeff_at = |m: i64, from_corr: bool| -> (i64, Rational) {
        let base = phi[m as usize].clone() / &two_pow_half;
        if from_corr {
            (-1 - 2 * m, -base * gamma_corr.clone())
        } else {
            (2 * jj - 1 - half - 2 * m, base)
        }
    };
    let mut asym: HashMap<i64, Rational> = HashMap::new();
    for m in 0..n_terms {
        for from_corr in [false, true] {
            if from_corr && gamma_corr == 0 {
                continue;
            }
            let (e, c) = coeff_at(m, from_corr);
            *asym.entry(e).or_default() += c;
        }
    }
    // polynomial part p(t): exponents >= 0; the t^{-1} coefficient must
    // vanish identically
    if let Some(c) = asym.get(&-1) {
        if *c != 0 {
            return Err(Error::Internal(format!(
                "uncancelled t^-1 tail term in ikm_reg_half(k = {}, j = {})",
                k, j
            )));
        }
    }
    let poly: Vec<(i64, Rational)> = {
        let mut v: Vec<_> = asym
            .iter()
            .filter(|(e, c)| **e >= 0 && **c != 0)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        v.sort_by_key(|(e, _)| *e);
        v
    };

    // working precision: the subtraction g - p cancels to ~t^{-2} while the
    // pieces grow like t0^{2j-1-k/2} (plus the rational coefficient sizes)
    let growth_bits = {
        let e_max = (2 * jj - 1 - half).max(0) as f64;
        (e_max * t0.ln() / std::f64::consts::LN_2).ceil() as u32 + 24
    };
    let wp = bits_for_digits(digits + GUARD_DIGITS) + growth_bits;
    let out = bits_for_digits(digits);
    let tol = pow10(digits as i32 + 6, wp).recip();

    let poly_f: Vec<(i64, Float)> = poly
        .iter()
        .map(|(e, c)| (*e, Float::with_val(wp, c)))
        .collect();
    let gamma_corr_f = Float::with_val(wp, &gamma_corr);

    let g_minus_p = move |t: &BigReal| -> BigReal {
        let vi = i0_scaled(t, wp).expect("t > 0");
        let vk = k0_scaled(t, wp).expect("t > 0");
        let p_half = Float::with_val(wp, (vi * vk).pow(k / 2));
        let mut val = p_half.clone() * Float::with_val(wp, t.pow((2 * jj - 1) as u32));
        if gamma_corr_f != 0 {
            val -= p_half * &gamma_corr_f * Float::with_val(wp, t.pow((half - 1) as u32));
        }
        for (e, c) in &poly_f {
            val -= Float::with_val(wp, c * &Float::with_val(wp, t.pow(*e as u32)));
        }
        val
    };

    // int_0^1 + int_1^T0 of g - p
    let zero = Float::new(wp);
    let one = Float::with_val(wp, 1);
    let t0_f = Float::with_val(wp, t0);
    let part1 = tanh_sinh(&g_minus_p, &zero, &one, wp, &tol)?;
    let part2 = tanh_sinh(&g_minus_p, &one, &t0_f, wp, &tol)?;

    // exact tail sum over the decaying exponents e <= -2 (actually -3 or
    // even -2 depending on parity): int_T0^inf t^e dt = -T0^{e+1}/(e+1),
    // truncated at the smallest term
    let mut tail = Float::new(wp);
    let mut entries: Vec<(i64, Rational)> = asym
        .into_iter()
        .filter(|(e, c)| *e < -1 && *c != 0)
        .collect();
    entries.sort_by_key(|(e, _)| -*e); // decreasing exponent = increasing decay
    let mut prev_mag = Float::with_val(wp, f64::INFINITY);
    let tiny = pow10(digits as i32 + 10, wp).recip();
    for (e, c) in entries {
        let term = -Float::with_val(wp, &c) * t0_f.clone().pow((e + 1) as i32)
            / Float::with_val(wp, e + 1);
        let mag = term.clone().abs();
        if mag > prev_mag && mag > tiny {
            // divergence reached before the tolerance: T0 was too small
            return Err(Error::Internal(format!(
                "asymptotic tail truncation failed at k = {}, j = {} (T0 = {})",
                k, j, t0
            )));
        }
        tail += term;
        if mag < tiny {
            break;
        }
        prev_mag = mag;
    }

    Ok(Float::with_val(out, part1 + part2 + tail))
}

/// The real combination behind the compactly supported moment:
/// `IKM^cp_k(i, 2j-1) = (-1)^{k-i} 2^{k-2j+1} (pi i)^i * ikm_cp_real(k,i,j)`.
/// Dispatches to the regularized tail for `i = k/2` above the convergence
/// range, and applies the exact `gamma_{k,j}` correction when `4 | k`.
pub fn ikm_cp_real(k: u32, i: u32, j: u32, digits: u32) -> Result<BigReal> {
    if k % 2 != 0 {
        return Err(Error::IndexRange(
            "compactly supported moments are defined for even k".into(),
        ));
    }
    let c = 2 * j as i32 - 1;
    if i == k / 2 && j > k / 4 {
        return ikm_reg_half(k, j, digits);
    }
    if k % 4 == 0 {
        cached(MomentKind::IkmCp, k, i, c, digits, || {
            let out = bits_for_digits(digits);
            let gamma = gamma_constant(k, j as i64);
            let base = ikm(k, i, c, digits + 2)?;
            if gamma == 0 {
                return Ok(Float::with_val(out, base));
            }
            let kp = crate::k_prime(k) as i32;
            // IKM(i,2j-1) - gamma_{k,j} IKM(i,k') with the 2-power prefactors
            // 2^{k-2j+1} and 2^{k-k'} factored down to the real parts
            let corr = ikm(k, i, kp, digits + 2)?;
            let scale = Float::with_val(out, &gamma)
                * Float::with_val(out, 2).pow(2 * j as i32 - 1 - kp);
            Ok(Float::with_val(out, base - scale * corr))
        })
    } else {
        ikm(k, i, c, digits)
    }
}
