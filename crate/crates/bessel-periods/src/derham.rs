//! Exact middle and full de Rham intersection matrices of `Sym^k Kl_2`,
//! computed by solving the connection equation at infinity coefficient by
//! coefficient.
//!
//! The unknown `mu_{0,i}(w)` satisfies the scalar equation
//!
//! `(theta Q_k - w Q_{k-1})(mu_{0,i}) = -(theta P_k - w P_{k-1})(w^{1-i})`
//!
//! with `P_a`, `Q_a` built by the recursion
//! `R_a = (1/a) theta R_{a-1} - ((k+2-a)/a) w R_{a-2}` from the seeds
//! `P_0 = 0, P_1 = 1, P_2 = theta/2` and `Q_0 = 1, Q_1 = theta`. Once
//! `mu_{0,i}` is known, `mu_{k,i} = P_k(source) + Q_k(mu_{0,i})` delivers the
//! matrix entries. For `4 | k` and `i > k/4` the equation is solvable only
//! after replacing the source `w^{1-i}` by `w^{1-i} - gamma_{k,i} w^{1-k/4}`;
//! the obstruction at the exponent `-k/4` determines `gamma_{k,i}` and the
//! free coefficient there is normalized to zero.

use rug::ops::Pow;
use rug::Complete;

use crate::exact::{double_factorial, factorial, rat, ExactMatrix, Rational};
use crate::series::{gamma_constant, RamifiedLaurentSeries, ThetaOperator};
use crate::{k_prime, mid_index_set, Error, Result};

/// Solution data for one index `i` in `[[1, k']]`.
#[derive(Clone, Debug)]
pub struct DeRhamSolution {
    pub k: u32,
    pub i: u32,
    /// `mu_{0,i}(w)`.
    pub mu0: RamifiedLaurentSeries,
    /// `mu_{k,i}(w)`.
    pub muk: RamifiedLaurentSeries,
    /// The constant determined by the solvability constraint: nonzero only
    /// when `4 | k` and `i > k/4`.
    pub gamma_used: Rational,
}

/// Middle and full de Rham intersection matrices for one `k`.
#[derive(Clone, Debug)]
pub struct SMatrices {
    pub k: u32,
    pub s_mid: ExactMatrix,
    pub s_full: ExactMatrix,
}

/// The operator families `P_0..P_k` and `Q_0..Q_k`.
pub fn build_pq(k: u32) -> (Vec<ThetaOperator>, Vec<ThetaOperator>) {
    assert!(k >= 1);
    let n = k as usize;
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    p.push(ThetaOperator::zero());
    if n >= 1 {
        p.push(ThetaOperator::one());
    }
    if n >= 2 {
        p.push(ThetaOperator::theta().scale(&Rational::from((1, 2))));
    }
    q.push(ThetaOperator::one());
    if n >= 1 {
        q.push(ThetaOperator::theta());
    }
    let step = |prev: &ThetaOperator, prev2: &ThetaOperator, a: i64| -> ThetaOperator {
        let t1 = ThetaOperator::theta()
            .mul(prev)
            .scale(&Rational::from((1, a)));
        let t2 = ThetaOperator::w()
            .mul(prev2)
            .scale(&Rational::from((k as i64 + 2 - a, a)));
        t1.sub(&t2)
    };
    for a in 3..=n {
        let next = step(&p[a - 1], &p[a - 2], a as i64);
        p.push(next);
    }
    for a in 2..=n {
        let next = step(&q[a - 1], &q[a - 2], a as i64);
        q.push(next);
    }
    (p, q)
}

/// Laurent polynomial map of a finite set of exact coefficients, used for
/// the right-hand sides of the solver.
fn apply_to_monomial(op: &ThetaOperator, exponent: i64, trunc: i64) -> RamifiedLaurentSeries {
    let m = RamifiedLaurentSeries::monomial(1, exponent, rat(1), trunc);
    op.apply(&m).expect("unramified operand")
}

/// Solves the connection equation at infinity for the index `i`, producing
/// `mu_{0,i}` and `mu_{k,i}` with the latter known through `w^{needed_order}`.
pub fn solve_at_infinity(k: u32, i: u32, needed_order: i64) -> Result<DeRhamSolution> {
    let kp = k_prime(k);
    if i < 1 || i > kp || (k % 4 == 0 && i == k / 4) {
        return Err(Error::IndexRange(format!(
            "solve_at_infinity: i = {} not in [[1,{}]] for k = {}",
            i, kp, k
        )));
    }
    let (p_ops, q_ops) = build_pq(k);
    let theta = ThetaOperator::theta();
    let w = ThetaOperator::w();
    let l_op = theta.mul(&q_ops[k as usize]).sub(&w.mul(&q_ops[k as usize - 1]));
    let p_op = theta.mul(&p_ops[k as usize]).sub(&w.mul(&p_ops[k as usize - 1]));

    let m0 = l_op.min_order().expect("L is nonzero") as i64;
    let m_max = l_op.max_order().unwrap() as i64;
    let q_min = q_ops[k as usize].min_order().unwrap() as i64;
    debug_assert_eq!(q_min, kp as i64 + 1);

    // mu_{k,i} through w^{needed_order} needs mu_{0,i} through
    // w^{needed_order - q_min}; generous bound for the polynomial data.
    let l_max = needed_order - q_min;
    let wide = needed_order + 2 * k as i64 + 10;

    let rhs_base = apply_to_monomial(&p_op, 1 - i as i64, wide).neg();
    let gamma_mode = k % 4 == 0 && i > k / 4;
    let rhs_gamma = if gamma_mode {
        Some(apply_to_monomial(&p_op, 1 - k as i64 / 4, wide))
    } else {
        None
    };

    let s_min = rhs_base.valuation();
    let s_max = l_max + m0;
    let mut mu0 = RamifiedLaurentSeries::zero(1, l_max + 1);
    let mut gamma: Option<Rational> = None;

    for s in s_min..=s_max {
        let l = s - m0;
        // contributions of already-known coefficients through the higher
        // homogeneous components of L
        let mut known = Rational::new();
        for m in (m0 + 1)..=m_max {
            let lower = s - m;
            if lower >= mu0.trunc() {
                continue;
            }
            let sym = l_op.symbol(m as u32, lower);
            if sym != 0 {
                known += sym * mu0.coeff(lower)?;
            }
        }
        let mut rhs = rhs_base.coeff(s)?;
        if let (Some(g), Some(rg)) = (&gamma, &rhs_gamma) {
            rhs += g.clone() * rg.coeff(s)?;
        }
        let lead = l_op.symbol(m0 as u32, l);
        if lead != 0 {
            mu0.set_coeff(l, (rhs - known) / lead);
        } else if gamma_mode && gamma.is_none() && l == -(k as i64) / 4 {
            // the degree of freedom: solve for gamma, normalize the free
            // coefficient of mu_{0,i} at this exponent to zero
            let rg = rhs_gamma.as_ref().unwrap().coeff(s)?;
            if rg == 0 {
                return Err(Error::Internal(format!(
                    "gamma source term vanishes at k = {}, i = {}",
                    k, i
                )));
            }
            gamma = Some((known - rhs) / rg);
            mu0.set_coeff(l, rat(0));
        } else {
            return Err(Error::Internal(format!(
                "leading symbol vanishes at k = {}, i = {}, exponent {}",
                k, i, l
            )));
        }
    }

    let gamma_used = gamma.unwrap_or_default();
    // mu_{k,i} = P_k(source) + Q_k(mu_{0,i})
    let mut source_image = apply_to_monomial(&p_ops[k as usize], 1 - i as i64, wide);
    if gamma_mode {
        let corr = apply_to_monomial(&p_ops[k as usize], 1 - k as i64 / 4, wide);
        source_image = source_image.sub(&corr.scale(&gamma_used));
    }
    let muk = source_image.add(&q_ops[k as usize].apply(&mu0)?);
    debug_assert!(muk.trunc() > needed_order);

    Ok(DeRhamSolution {
        k,
        i,
        mu0,
        muk,
        gamma_used,
    })
}

/// Both intersection matrices for `k`.
pub fn s_matrices(k: u32) -> Result<SMatrices> {
    Ok(SMatrices {
        k,
        s_mid: smid_matrix(k)?,
        s_full: sfull_matrix(k)?,
    })
}

/// For `4 | k`: the pairing series `G_b = <m_flat, u_b>_alg` of the formal
/// horizontal section against the monomial basis, `b = 0..=k`, derived from
/// `G_0 = 2^k (I_0 K_0)^{k/2}` by flatness:
/// `G_{b+1} = [-w dG_b/dw - (b/w) G_{b-1}]/(k - b)`.
pub fn flat_pairing_series(k: u32, order: i64) -> Result<Vec<RamifiedLaurentSeries>> {
    if k % 4 != 0 {
        return Err(Error::IndexRange(
            "flat_pairing_series requires 4 | k".into(),
        ));
    }
    let mut g = Vec::with_capacity(k as usize + 1);
    g.push(crate::series::bessel_product_series(k, order)?);
    for b in 0..k as usize {
        let mut next = g[b].euler_derivative().neg();
        if b >= 1 {
            next = next.sub(&g[b - 1].shift(-1).scale(&rat(b as i64)));
        }
        g.push(next.scale(&(Rational::from(1) / rat(k as i64 - b as i64))));
    }
    Ok(g)
}

/// For `4 | k` and `i > k/4`: the offset `c_i` between this crate's solution
/// normalization (zero free coefficient of `mu_{0,i}` at `w^{-k/4}`) and the
/// one under which the regularized periods are computed (the pairing
/// `<m_flat, m_i>` has no constant term); that solution is
/// `m_i - c_i m_flat`.
pub fn flat_gauge_offset(k: u32, i: u32) -> Result<Rational> {
    if k % 4 != 0 || i <= k / 4 || i > k_prime(k) {
        return Ok(rat(0));
    }
    let kp = k_prime(k) as i64;
    let sol = solve_at_infinity(k, i, k as i64)?;
    let (p_ops, q_ops) = build_pq(k);
    let g = flat_pairing_series(k, k as i64 + kp + 6)?;
    let wide = 3 * k as i64 + 10;

    // constant term of sum_b mu_{b,i} G_b
    let mut c0 = rat(0);
    for b in 0..=k as usize {
        let mut mu_b = apply_to_monomial(&p_ops[b], 1 - i as i64, wide);
        let corr = apply_to_monomial(&p_ops[b], 1 - k as i64 / 4, wide);
        mu_b = mu_b.sub(&corr.scale(&sol.gamma_used));
        mu_b = mu_b.add(&q_ops[b].apply(&sol.mu0)?);
        for (n, c) in mu_b.terms() {
            if *c == 0 {
                continue;
            }
            if -n >= g[b].trunc() {
                return Err(Error::Internal(format!(
                    "flat pairing series too short at k = {}, i = {}, b = {}",
                    k, i, b
                )));
            }
            c0 += (c * &g[b].coeff(-n)?).complete();
        }
    }
    // divide by <m_flat, m_flat>_alg = 2^k / C(k, k/2) (k = 0 mod 4)
    Ok(c0 * crate::exact::binomial(k as i64, k as i64 / 2) / (Rational::from(1) << k))
}

/// The middle de Rham intersection matrix `S_k^mid`, indexed by
/// `[[1, k']] x [[1, k']]`. Empty (0x0) when the middle cohomology vanishes
/// (`k <= 2`, and `k = 4`).
pub fn smid_matrix(k: u32) -> Result<ExactMatrix> {
    let idx = mid_index_set(k);
    let n = idx.len();
    if n == 0 {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    let kp = k_prime(k) as i64;
    let sign = if k % 2 == 0 { rat(-1) } else { rat(1) }; // (-1)^{k+1}
    let sols: Vec<DeRhamSolution> = idx
        .iter()
        .map(|&i| solve_at_infinity(k, i, kp))
        .collect::<Result<_>>()?;
    let mut m = ExactMatrix::zeros(n, n);
    for (r, sol) in sols.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            let mut entry = sol.muk.coeff_w(j as i64)?;
            if k % 4 == 0 && sol.i > k / 4 && j > k / 4 {
                entry -= gamma_constant(k, j as i64) * sol.muk.coeff_w(k as i64 / 4)?;
            }
            m[(r, c)] = (&sign * &entry).complete();
        }
    }
    Ok(m)
}

/// The full matrix `S_k` on the bases `B_{k,c} (x) B_k`, indexed by
/// `{0, ..., k'}` in order (the index `k/4` is present when `4 | k`).
///
/// For `4 | k` the rows `i > k/4` are expressed in the no-constant-term
/// solution normalization (see [`flat_gauge_offset`]) so that the matrix
/// is the honest pairing matrix compatible with the regularized entries of
/// `P_k^{mod,rd}`; determinants and the middle block are unaffected by this
/// choice.
pub fn sfull_matrix(k: u32) -> Result<ExactMatrix> {
    if k < 1 {
        return Err(Error::IndexRange("sfull_matrix requires k >= 1".into()));
    }
    let kp = k_prime(k);
    let n = kp as usize + 1;
    let mut m = ExactMatrix::zeros(n, n);
    m[(0, 0)] = rat(1);
    if kp == 0 {
        return Ok(m);
    }
    let sign = if k % 2 == 0 { rat(-1) } else { rat(1) }; // (-1)^{k+1}
    let quarter = if k % 4 == 0 { Some(k / 4) } else { None };
    for i in 1..=kp {
        if quarter == Some(i) {
            // row of the formal horizontal section: -coefficients of
            // 2^k (I_0 K_0)^{k/2} = w^{k/4}(1 + sum gamma_{k,k/4+n} w^n)
            let q = k as i64 / 4;
            for j in 1..=kp as i64 {
                m[(i as usize, j as usize)] = if j < q {
                    rat(0)
                } else if j == q {
                    rat(-1)
                } else {
                    -gamma_constant(k, j)
                };
            }
        } else {
            // raw pairing row (-1)^{k+1} mu_{k,i,j}, shifted to the
            // no-constant-term gauge by the row of the horizontal section
            let sol = solve_at_infinity(k, i, kp as i64)?;
            let offset = flat_gauge_offset(k, i)?;
            let q = k as i64 / 4;
            for j in 1..=kp as i64 {
                let mut entry = (&sign * &sol.muk.coeff_w(j)?).complete();
                if k % 4 == 0 && offset != 0 {
                    // subtract c_i times the flat row (0,..,-1,-gamma,..)
                    if j == q {
                        entry += &offset;
                    } else if j > q {
                        entry += (&offset * &gamma_constant(k, j)).complete();
                    }
                }
                m[(i as usize, j as usize)] = entry;
            }
        }
    }
    Ok(m)
}

/// The anti-diagonal entry of `S_k^mid` on the row of (paper) index `i`.
pub fn antidiagonal_closed_form(k: u32, i: u32) -> Rational {
    let kp = k_prime(k) as i64;
    if k % 2 == 1 {
        let num = factorial(kp);
        let mut val = num / double_factorial(k as i64);
        val *= Rational::from((-2, 1)).pow(kp as u32);
        val
    } else {
        let sign = if (kp + 1) % 2 == 0 { 1 } else { -1 };
        let mut denom = Rational::from(1) << kp as u32;
        denom *= rat(kp + 1 - 2 * i as i64);
        denom *= factorial(kp + 1);
        rat(sign) * double_factorial(k as i64 - 1) / denom
    }
}

/// Checks lower-right triangularity (entries `(i,j)` vanish for
/// `i + j <= k'`) and the anti-diagonal closed forms; returns `true` when
/// all hold, or an error naming the first offending `(k, i, j)`.
pub fn smid_antidiagonal_check(k: u32) -> Result<bool> {
    let m = smid_matrix(k)?;
    let idx = mid_index_set(k);
    let kp = k_prime(k);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            if i + j <= kp && m[(r, c)] != 0 {
                return Err(Error::Internal(format!(
                    "triangularity violated at k = {}, (i, j) = ({}, {})",
                    k, i, j
                )));
            }
            if i + j == kp + 1 && m[(r, c)] != antidiagonal_closed_form(k, i) {
                return Err(Error::Internal(format!(
                    "anti-diagonal mismatch at k = {}, (i, j) = ({}, {})",
                    k, i, j
                )));
            }
        }
    }
    Ok(true)
}

/// Closed form of `det S_k^mid`.
pub fn det_smid_closed_form(k: u32) -> Rational {
    let kp = k_prime(k) as i64;
    if k % 2 == 1 {
        let base = (Rational::from(1) << kp as u32) * factorial(kp) / double_factorial(k as i64);
        let sign = if (kp * (kp + 1) / 2) % 2 == 0 { 1 } else { -1 };
        rat(sign) * base.pow(kp as u32)
    } else if k % 4 == 2 {
        let num = double_factorial(k as i64 - 1).pow(kp as u32);
        let den = ((Rational::from(1) << kp as u32) * factorial(kp + 1)).pow(kp as u32)
            * double_factorial(kp - 1).pow(2);
        num / den
    } else {
        let kpp = (kp - 1) / 2; // k'' with k = 4k'' + 4
        let base = double_factorial(k as i64 - 1) / ((Rational::from(1) << (kp as u32 + 1)) * factorial(kp + 1));
        base.pow(kp as u32 - 1) / factorial(kpp).pow(2)
    }
}

/// Determinant of `S_k^mid`, asserted against the closed form.
pub fn det_smid(k: u32) -> Result<Rational> {
    let det = smid_matrix(k)?.det()?;
    let expected = det_smid_closed_form(k);
    if det != expected {
        return Err(Error::Internal(format!(
            "det S_{}^mid = {} differs from closed form {}",
            k, det, expected
        )));
    }
    Ok(det)
}

/// Closed form of `det S_k` (the full matrix): equal to `det S_k^mid`
/// except for `4 | k`, where it is `-det S_k^mid`.
pub fn det_sfull_closed_form(k: u32) -> Rational {
    if k % 4 == 0 {
        -det_smid_closed_form(k)
    } else {
        det_smid_closed_form(k)
    }
}
