//! Machine-checkable certificates: quadratic relations between period,
//! de Rham and Betti matrices, determinant identities, sum rules, the
//! Broadhurst-Roberts normalization, and the regularized-moment examples.
//!
//! Every check emits a [`VerificationReport`] whose `residual` is the
//! relative max-norm defect (literally zero for exact checks) and whose
//! tolerance is `10^{-(digits-10)}`: ten guard digits absorb quadrature
//! certification slack.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::betti::{bfull_matrix, bmid_matrix, det_bmid_closed_form};
use crate::derham::{det_sfull_closed_form, det_smid_closed_form, sfull_matrix, smid_matrix};
use crate::exact::{binomial, factorial, Rational};
use crate::numeric::moments::{ikm, ikm_cp_real, ikm_reg_minus1};
use crate::numeric::real::{bits_for_digits, pi, to_sci_string, BigComplex, BigReal};
use crate::periods::{
    br_matrices, pfull_rdmod, pmid_matrix, pmodrd_matrix, ComplexMatrix, PhasedReal,
};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub k: u32,
    pub digits: u32,
    /// Relative max-norm residual as a decimal string ("0" for exact checks).
    pub residual: String,
    pub passed: bool,
    pub details: BTreeMap<String, String>,
}

impl VerificationReport {
    fn exact(name: &str, k: u32, digits: u32, passed: bool) -> Self {
        Self {
            name: name.into(),
            k,
            digits,
            residual: "0".into(),
            passed,
            details: BTreeMap::new(),
        }
    }

    fn numeric(name: &str, k: u32, digits: u32, residual: &BigReal) -> Self {
        Self {
            name: name.into(),
            k,
            digits,
            residual: to_sci_string(residual, 3),
            passed: residual_ok(residual, digits),
            details: BTreeMap::new(),
        }
    }

    fn with_detail(mut self, key: &str, value: impl Into<String>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }
}

/// Pass criterion: relative residual below `10^{-(digits-10)}`.
fn residual_ok(residual: &BigReal, digits: u32) -> bool {
    let prec = residual.prec();
    let tol = Float::with_val(prec, 10).pow(-(digits as i32) + 10);
    *residual <= tol
}

/// `(-2 pi i)^{k+1}` as an exact-phase entry.
fn minus_two_pi_i_pow(k: u32, digits: u32) -> BigComplex {
    let prec = bits_for_digits(digits);
    let mut mag = Float::with_val(prec, Float::i_exp(1, k as i32 + 1));
    if (k + 1) % 2 == 1 {
        mag = -mag;
    }
    PhasedReal::new(mag, k as i64 + 1).to_complex()
}

/// Relative max-norm of `lhs - rhs` against `rhs`.
fn relative_residual(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<BigReal> {
    let diff = lhs.sub(rhs)?;
    let denom = rhs.max_abs();
    let num = diff.max_abs();
    Ok(num / denom)
}

/// The middle quadratic relation
/// `P_k^mid (S_k^mid)^{-1} tP_k^mid = (-2 pi i)^{k+1} B_k^mid`.
pub fn verify_quadratic(k: u32, digits: u32) -> Result<VerificationReport> {
    let smid = smid_matrix(k)?;
    if smid.is_empty() {
        return Ok(
            VerificationReport::exact("quadratic_mid", k, digits, true)
                .with_detail("note", "empty middle cohomology; vacuous"),
        );
    }
    let s_inv = ComplexMatrix::from_exact(&smid.invert()?, digits);
    let p = pmid_matrix(k, digits)?.to_complex();
    let lhs = p.matmul(&s_inv)?.matmul(&p.transpose())?;
    let rhs = ComplexMatrix::from_exact(&bmid_matrix(k)?, digits)
        .scale(&minus_two_pi_i_pow(k, digits));
    let residual = relative_residual(&lhs, &rhs)?;
    Ok(VerificationReport::numeric("quadratic_mid", k, digits, &residual))
}

/// The full quadratic relation
/// `P_k^{rd,mod} (S_k)^{-1} t(P_k^{mod,rd}) = (-2 pi i)^{k+1} B_k^{rd,mod}`,
/// which exercises both regularized moment families.
pub fn verify_full_quadratic(k: u32, digits: u32) -> Result<VerificationReport> {
    let s_inv = ComplexMatrix::from_exact(&sfull_matrix(k)?.invert()?, digits);
    let p_rd = pfull_rdmod(k, digits)?.to_complex();
    let p_mod = pmodrd_matrix(k, digits)?.to_complex();
    let lhs = p_rd.matmul(&s_inv)?.matmul(&p_mod.transpose())?;
    let rhs = ComplexMatrix::from_exact(&bfull_matrix(k)?, digits)
        .scale(&minus_two_pi_i_pow(k, digits));
    let residual = relative_residual(&lhs, &rhs)?;
    Ok(VerificationReport::numeric("quadratic_full", k, digits, &residual))
}

/// Exact determinant identities for `S_k^mid`, `S_k`, `B_k^mid`; for
/// `k = 8` also the numeric evaluation `det A = 5 pi^4 / (2^11 * 3)` with
/// its positivity statement.
pub fn verify_det_identities(k: u32, digits: u32) -> Result<VerificationReport> {
    let det_smid = smid_matrix(k)?.det()?;
    let det_sfull = sfull_matrix(k)?.det()?;
    let det_bmid = bmid_matrix(k)?.det()?;
    let smid_ok = det_smid == det_smid_closed_form(k);
    let sfull_ok = det_sfull == det_sfull_closed_form(k);
    let bmid_ok = det_bmid == det_bmid_closed_form(k);
    let mut report = VerificationReport::exact("det_identities", k, digits, smid_ok && sfull_ok && bmid_ok)
        .with_detail("det_smid", det_smid.to_string())
        .with_detail("det_sfull", det_sfull.to_string())
        .with_detail("det_bmid", det_bmid.to_string());
    if k == 8 {
        // det A for the k = 8 example block matrix
        let m = |i: u32, c: i32| ikm(8, i, c, digits);
        let col2 = |i: u32| -> Result<BigReal> {
            let prec = bits_for_digits(digits);
            Ok(Float::with_val(prec, 2 * m(i, 5)?) - m(i, 3)?)
        };
        let det_a = m(2, 1)? * col2(3)? - m(3, 1)? * col2(2)?;
        let prec = det_a.prec();
        let expect = Float::with_val(prec, 5) * pi(prec).pow(4u32)
            / Float::with_val(prec, 2048 * 3);
        let residual = Float::with_val(prec, &det_a - &expect).abs() / expect.clone();
        let ok = residual_ok(&residual, digits) && det_a.is_sign_positive();
        report.passed = report.passed && ok;
        report = report
            .with_detail("det_A", to_sci_string(&det_a, digits.min(30)))
            .with_detail("det_A_residual", to_sci_string(&residual, 3))
            .with_detail("det_A_positive", det_a.is_sign_positive().to_string());
    }
    Ok(report)
}

/// Valid sum-rule column indices `j` for even `k`.
pub fn sum_rule_range(k: u32) -> Result<Vec<u32>> {
    if k % 2 != 0 || k < 6 {
        return Err(Error::IndexRange(format!(
            "sum rules require even k >= 6, got {}",
            k
        )));
    }
    let kpp = (k - 1) / 4;
    Ok(if k % 4 == 0 {
        (1..=2 * kpp + 1).filter(|&j| j != k / 4).collect()
    } else {
        (1..=2 * kpp).collect()
    })
}

/// The sum rules
/// `sum_i C(k/2, 2i+1) IKM^cp_k(2i+1, 2j-1) = 0`, checked for every valid
/// `j` after factoring out the common phase: the real statement is
/// `sum_i C(k/2, 2i+1) (-pi^2)^i R(2i+1, j) = 0`.
pub fn verify_sum_rules(k: u32, digits: u32) -> Result<VerificationReport> {
    let range = sum_rule_range(k)?;
    let prec = bits_for_digits(digits);
    let kpp = (k - 1) / 4;
    let minus_pi_sq = -pi(prec).square();
    let mut worst = Float::new(prec);
    let mut details = BTreeMap::new();
    for &j in &range {
        let mut sum = Float::new(prec);
        let mut largest = Float::new(prec);
        for i in 0..=kpp {
            let coeff = binomial(k as i64 / 2, 2 * i as i64 + 1);
            let term = Float::with_val(prec, &minus_pi_sq).pow(i)
                * crate::numeric::real::from_rational(&coeff, prec)
                * ikm_cp_real(k, 2 * i + 1, j, digits)?;
            if term.clone().abs() > largest {
                largest = term.clone().abs();
            }
            sum += term;
        }
        let rel = sum.abs() / largest;
        details.insert(format!("j={}", j), to_sci_string(&rel, 3));
        if rel > worst {
            worst = rel;
        }
    }
    let mut report = VerificationReport::numeric("sum_rules", k, digits, &worst);
    report.details = details;
    Ok(report)
}

/// The Broadhurst-Roberts normalized relation
/// `P^BR D_k tP^BR = B^BR` (primed throughout when `4 | k`), plus the exact
/// integrality of `k! (S_k^mid)^{-1}`.
pub fn verify_br(k: u32, digits: u32) -> Result<VerificationReport> {
    if smid_matrix(k)?.is_empty() {
        return Ok(
            VerificationReport::exact("broadhurst_roberts", k, digits, true)
                .with_detail("note", "empty middle cohomology; vacuous"),
        );
    }
    let (p_br, b_br, d) = br_matrices(k, digits)?;
    let d_c = ComplexMatrix::from_exact(&d, digits);
    let lhs = p_br.matmul(&d_c)?.matmul(&p_br.transpose())?;
    let residual = relative_residual(&lhs, &b_br)?;
    let mut report = VerificationReport::numeric("broadhurst_roberts", k, digits, &residual);
    if k <= 22 {
        let integral = smid_matrix(k)?
            .invert()?
            .scale(&factorial(k as i64))
            .is_integral();
        report.passed = report.passed && integral;
        report = report.with_detail("k_factorial_smid_inverse_integral", integral.to_string());
    }
    Ok(report)
}

/// The two displayed regularized-moment identities: for `k = 3` the product
/// identity and for `k = 4` the value `pi^4/120`.
pub fn verify_reg_examples(digits: u32) -> Result<VerificationReport> {
    let prec = bits_for_digits(digits);
    // k = 3: lim G_{3,1} = (3/2) int K_0^3 t dt * int I_0 K_0^2 t dt
    let lhs3 = ikm_reg_minus1(3, 1, digits)?;
    let rhs3 = Float::with_val(prec, 1.5) * ikm(3, 0, 1, digits)? * ikm(3, 1, 1, digits)?;
    let res3 = Float::with_val(prec, &lhs3 - &rhs3).abs() / rhs3.clone().abs();
    // k = 4: lim G_{4,1} = pi^4/120
    let lhs4 = ikm_reg_minus1(4, 1, digits)?;
    let rhs4 = pi(prec).pow(4u32) / Float::with_val(prec, 120);
    let res4 = Float::with_val(prec, &lhs4 - &rhs4).abs() / rhs4.clone().abs();
    let worst = if res3 > res4 { res3.clone() } else { res4.clone() };
    Ok(VerificationReport::numeric("reg_examples", 4, digits, &worst)
        .with_detail("k3_product_identity_residual", to_sci_string(&res3, 3))
        .with_detail("k4_pi4_over_120_residual", to_sci_string(&res4, 3)))
}

/// Best rational approximation `p/q` with `q <= max_den` by continued
/// fractions, accepted only when it matches `x` to the certified accuracy
/// `10^{-(certified_digits - 5)}`.
pub fn rational_recognize(x: &BigReal, max_den: u64, certified_digits: u32) -> Option<Rational> {
    use rug::Integer;
    let prec = x.prec();
    if !x.is_finite() {
        return None;
    }
    let tol = {
        let t = Float::with_val(prec, 10).pow(-(certified_digits as i32) + 5);
        let scale = Float::with_val(prec, x).abs().max(&Float::with_val(prec, 1));
        t * scale
    };
    // convergents p/q of the continued fraction expansion
    let mut p_prev = Integer::from(1);
    let mut q_prev = Integer::from(0);
    let mut p = x.to_integer_round(rug::float::Round::Down)?.0;
    let mut q = Integer::from(1);
    let mut frac = Float::with_val(prec, x - &Float::with_val(prec, &p));
    for _ in 0..(2 * certified_digits + 32) {
        let cand = Rational::from((p.clone(), q.clone()));
        let err = Float::with_val(prec, x - &Float::with_val(prec, &cand)).abs();
        if err <= tol {
            return Some(cand);
        }
        if frac.is_zero() {
            return None;
        }
        frac = frac.recip();
        let a = frac.to_integer_round(rug::float::Round::Down)?.0;
        frac -= Float::with_val(prec, &a);
        let p_next = Integer::from(&a * &p) + &p_prev;
        let q_next = Integer::from(&a * &q) + &q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        if q > max_den {
            return None;
        }
    }
    None
}

/// All verifications applicable to one `k`, ordered by name.
pub fn verify_all_for_k(k: u32, digits: u32) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    if k >= 3 {
        out.push(verify_br(k, digits)?);
        out.push(verify_det_identities(k, digits)?);
    }
    out.push(verify_full_quadratic(k, digits)?);
    out.push(verify_quadratic(k, digits)?);
    if k == 3 || k == 4 {
        out.push(verify_reg_examples(digits)?);
    }
    if k % 2 == 0 && k >= 6 {
        out.push(verify_sum_rules(k, digits)?);
    }
    out.sort_by_key(|r| (r.name.clone(), r.k));
    Ok(out)
}
