//! Period matrices of `Sym^k Kl_2` over the exact bases: the middle matrix
//! `P_k^mid`, the full rapid-decay/moderate matrix `P_k^{rd,mod}` and its
//! transposed-variance companion `P_k^{mod,rd}`, the Broadhurst-Roberts
//! normalized matrices with the exact `D_k`, and the critical-value
//! determinants of the `L`-function table.
//!
//! Entries are assembled as [`PhasedReal`] — a real magnitude times an exact
//! power of `pi i` — and complexified only for matrix algebra, so phase
//! parity statements stay exact.

use rug::ops::Pow;
use rug::Float;

use crate::derham::smid_matrix;
use crate::exact::{binomial, factorial, rat, ExactMatrix, Rational};
use crate::numeric::moments::{ikm, ikm_reg_half, ikm_reg_minus1};
use crate::numeric::real::{bits_for_digits, from_rational, pi, BigComplex, BigReal};
use crate::series::gamma_constant;
use crate::{k_prime, mid_index_set, Error, Result};

/// A real magnitude times `(pi i)^{pi_i_power}`.
#[derive(Clone, Debug)]
pub struct PhasedReal {
    pub magnitude: BigReal,
    pub pi_i_power: i64,
}

impl PhasedReal {
    pub fn zero(prec: u32) -> Self {
        Self {
            magnitude: Float::new(prec),
            pi_i_power: 0,
        }
    }

    pub fn new(magnitude: BigReal, pi_i_power: i64) -> Self {
        Self {
            magnitude,
            pi_i_power,
        }
    }

    /// Exact-phase complexification: `magnitude * pi^a * i^a`.
    pub fn to_complex(&self) -> BigComplex {
        let prec = self.magnitude.prec();
        let scaled = if self.pi_i_power == 0 {
            self.magnitude.clone()
        } else {
            let p = Float::with_val(prec, pi(prec).pow(self.pi_i_power as i32));
            self.magnitude.clone() * p
        };
        BigComplex::from_real(scaled).mul_i_power(self.pi_i_power)
    }
}

/// Matrix of [`PhasedReal`] entries (row major).
#[derive(Clone, Debug)]
pub struct PhasedMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<PhasedReal>,
    pub digits: u32,
}

impl PhasedMatrix {
    fn from_fn(
        rows: usize,
        cols: usize,
        digits: u32,
        mut f: impl FnMut(usize, usize) -> Result<PhasedReal>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
            digits,
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> &PhasedReal {
        &self.entries[i * self.cols + j]
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.to_complex()).collect(),
            digits: self.digits,
        }
    }
}

/// Dense complex matrix at uniform precision.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigComplex>,
    pub digits: u32,
}

impl ComplexMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        digits: u32,
        mut f: impl FnMut(usize, usize) -> BigComplex,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
            digits,
        }
    }

    pub fn from_exact(m: &ExactMatrix, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        Self::from_fn(m.rows(), m.cols(), digits, |i, j| {
            BigComplex::from_real(from_rational(&m[(i, j)], prec))
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigComplex {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.digits, |i, j| {
            self.entry(j, i).clone()
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prec = bits_for_digits(self.digits);
        Ok(Self::from_fn(
            self.rows,
            other.cols,
            self.digits.min(other.digits),
            |i, j| {
                let mut acc = BigComplex::zero(prec);
                for t in 0..self.cols {
                    acc = acc.add(&self.entry(i, t).mul(other.entry(t, j)));
                }
                acc
            },
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("matrix difference".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, self.digits, |i, j| {
            self.entry(i, j).sub(other.entry(i, j))
        }))
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        Self::from_fn(self.rows, self.cols, self.digits, |i, j| {
            self.entry(i, j).mul(c)
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> BigReal {
        let prec = bits_for_digits(self.digits);
        let mut best = Float::new(prec);
        for e in &self.entries {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Result<BigComplex> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let prec = bits_for_digits(self.digits);
        if n == 0 {
            return Ok(BigComplex::from_real(Float::with_val(prec, 1)));
        }
        let mut m: Vec<BigComplex> = self.entries.clone();
        let mut det = BigComplex::from_real(Float::with_val(prec, 1));
        for p in 0..n {
            let mut pivot = p;
            let mut best = m[p * n + p].abs();
            for r in (p + 1)..n {
                let a = m[r * n + p].abs();
                if a > best {
                    best = a;
                    pivot = r;
                }
            }
            if best.is_zero() {
                return Ok(BigComplex::zero(prec));
            }
            if pivot != p {
                for c in 0..n {
                    m.swap(p * n + c, pivot * n + c);
                }
                det = det.neg();
            }
            det = det.mul(&m[p * n + p]);
            for r in (p + 1)..n {
                let f = m[r * n + p].div(&m[p * n + p]);
                for c in p..n {
                    let sub = f.mul(&m[p * n + c]);
                    m[r * n + c] = m[r * n + c].sub(&sub);
                }
            }
        }
        Ok(det)
    }
}

/// `2^e` as a float.
fn two_pow(e: i32, prec: u32) -> BigReal {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// `(-1)^{k-i} 2^{k+1-2j} M_k(i, 2j-1) [- gamma_{k,j} 2^{k-k'} M_k(i, k')]`
/// as a phased entry with phase `i`.
fn middle_entry(k: u32, i: u32, j: u32, digits: u32) -> Result<PhasedReal> {
    let prec = bits_for_digits(digits);
    let kp = k_prime(k) as i32;
    let mut mag = two_pow(k as i32 + 1 - 2 * j as i32, prec) * ikm(k, i, 2 * j as i32 - 1, digits)?;
    if k % 4 == 0 {
        let gamma = gamma_constant(k, j as i64);
        if gamma != 0 {
            let corr = two_pow(k as i32 - kp, prec)
                * ikm(k, i, kp, digits)?
                * from_rational(&gamma, prec);
            mag -= corr;
        }
    }
    if (k - i) % 2 == 1 {
        mag = -mag;
    }
    Ok(PhasedReal::new(mag, i as i64))
}

/// Warms the moment memo in parallel so matrix assembly reuses the results
/// (independent evaluations farm out to the rayon pool).
fn prefetch_moments(jobs: &[(u32, u32, i32)], digits: u32) {
    use rayon::prelude::*;
    if jobs.len() > 1 {
        jobs.par_iter().for_each(|&(k, i, c)| {
            let _ = ikm(k, i, c, digits);
        });
    }
}

/// The middle period matrix `P_k^mid` over `[[1,k']]^2`: entries
/// `IKM_k(i, 2j-1)` for `k` not a multiple of 4; for `4 | k` the row index
/// shifts across `k/4` and the columns carry the `gamma_{k,j}` correction.
pub fn pmid_matrix(k: u32, digits: u32) -> Result<PhasedMatrix> {
    let idx = mid_index_set(k);
    let n = idx.len();
    let kp = k_prime(k) as i32;
    let mut jobs = Vec::new();
    for &i in &idx {
        let i_eff = if k % 4 == 0 && i < k / 4 { i + 1 } else { i };
        for &j in &idx {
            jobs.push((k, i_eff, 2 * j as i32 - 1));
            if k % 4 == 0 && gamma_constant(k, j as i64) != 0 {
                jobs.push((k, i_eff, kp));
            }
        }
    }
    prefetch_moments(&jobs, digits);
    PhasedMatrix::from_fn(n, n, digits, |r, c| {
        let (i, j) = (idx[r], idx[c]);
        let i_eff = if k % 4 == 0 && i < k / 4 { i + 1 } else { i };
        middle_entry(k, i_eff, j, digits)
    })
}

/// The full period matrix `P_k^{rd,mod}` on `(alpha_i) x (omega_j)`,
/// `0 <= i, j <= k'`: row 0 is `(2 pi i)^{k+1} e_0`, column 0 holds the
/// regularized moments `IKM^reg_k(i, -1)`, and the interior is
/// `IKM_k(i, 2j-1)` (no gamma corrections here).
pub fn pfull_rdmod(k: u32, digits: u32) -> Result<PhasedMatrix> {
    if k < 1 {
        return Err(Error::IndexRange("pfull_rdmod requires k >= 1".into()));
    }
    let prec = bits_for_digits(digits);
    let kp = k_prime(k) as usize;
    PhasedMatrix::from_fn(kp + 1, kp + 1, digits, |i, j| {
        if i == 0 {
            if j == 0 {
                Ok(PhasedReal::new(two_pow(k as i32 + 1, prec), k as i64 + 1))
            } else {
                Ok(PhasedReal::zero(prec))
            }
        } else if j == 0 {
            let mut mag = two_pow(k as i32 + 1, prec) * ikm_reg_minus1(k, i as u32, digits)?;
            if (k - i as u32) % 2 == 1 {
                mag = -mag;
            }
            Ok(PhasedReal::new(mag, i as i64))
        } else {
            let mut mag = two_pow(k as i32 + 1 - 2 * j as i32, prec)
                * ikm(k, i as u32, 2 * j as i32 - 1, digits)?;
            if (k - i as u32) % 2 == 1 {
                mag = -mag;
            }
            Ok(PhasedReal::new(mag, i as i64))
        }
    })
}

/// Row indices of `P_k^{mod,rd}`: `0..k'` generically, and
/// `{0, 2, 3, ..., k/2}` when `4 | k` (the moderate-growth basis omits
/// `beta_1`).
pub fn pmodrd_row_indices(k: u32) -> Vec<u32> {
    let kp = k_prime(k);
    if k % 4 == 0 {
        std::iter::once(0).chain(2..=k / 2).collect()
    } else {
        (0..=kp).collect()
    }
}

/// The moderate/rapid-decay period matrix `P_k^{mod,rd}` on
/// `(beta_i) x B_{k,c}`.
pub fn pmodrd_matrix(k: u32, digits: u32) -> Result<PhasedMatrix> {
    if k < 1 {
        return Err(Error::IndexRange("pmodrd_matrix requires k >= 1".into()));
    }
    let prec = bits_for_digits(digits);
    let kp = k_prime(k);
    let rows = pmodrd_row_indices(k);
    PhasedMatrix::from_fn(rows.len(), kp as usize + 1, digits, |r, jj| {
        let i = rows[r];
        let j = jj as u32;
        if j == 0 {
            // (-1)^k delta_{i,0}
            if i == 0 {
                let sign: i32 = if k % 2 == 0 { 1 } else { -1 };
                Ok(PhasedReal::new(Float::with_val(prec, sign), 0))
            } else {
                Ok(PhasedReal::zero(prec))
            }
        } else if k % 4 == 0 && j == k / 4 {
            // -(2 pi i)^{k/2} 2^{k/2} C(k, k/2)^{-1} delta_{i, k/2}
            if i == k / 2 {
                let mag = -two_pow(k as i32, prec)
                    / from_rational(&binomial(k as i64, k as i64 / 2), prec);
                Ok(PhasedReal::new(mag, k as i64 / 2))
            } else {
                Ok(PhasedReal::zero(prec))
            }
        } else if k % 2 == 0 && i == k / 2 && j > k / 4 {
            // regularized tail: IKM^reg_k(k/2, 2j-1) =
            // sign * 2^{k-2j+1} (pi i)^{k/2} lim H, sign = +1 for 4 | k and
            // -1 for k = 2 mod 4 (both equal (-1)^{k-i} here)
            let mut mag = two_pow(k as i32 + 1 - 2 * j as i32, prec) * ikm_reg_half(k, j, digits)?;
            if (k / 2) % 2 == 1 {
                mag = -mag;
            }
            Ok(PhasedReal::new(mag, k as i64 / 2))
        } else {
            // IKM_k(i, 2j-1) - gamma_{k,j} IKM_k(i, k') (gamma = 0 unless 4|k)
            middle_entry(k, i, j, digits)
        }
    })
}

/// `T_{k'} = diag(-4, (-4)^2, ...)` over the given index list.
fn t_matrix(indices: &[u32]) -> ExactMatrix {
    let n = indices.len();
    ExactMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Rational::from(-4).pow(indices[r])
        } else {
            rat(0)
        }
    })
}

/// `R_{k'} = antidiag(i, i^2, ...)`: position `(r, n-1-r)` holds
/// `i^{indices[r]}`. Returns the complex matrix.
fn r_matrix(indices: &[u32], digits: u32) -> ComplexMatrix {
    let n = indices.len();
    let prec = bits_for_digits(digits);
    ComplexMatrix::from_fn(n, n, digits, |r, c| {
        if r + c == n - 1 {
            BigComplex::from_real(Float::with_val(prec, 1)).mul_i_power(indices[r] as i64)
        } else {
            BigComplex::zero(prec)
        }
    })
}

/// The Broadhurst-Roberts normalized matrices and the exact `D_k`:
/// `P^BR = (-2 sqrt(pi))^{-(k+1)} R* P^mid T`,
/// `B^BR = -(i^{+-(k+1)} k!/2^{k+1}) R* B^mid R`, and
/// `D_k = (-1)^k k! (T S^mid T)^{-1}` — primed (index `k/4` deleted
/// throughout) when `4 | k`.
pub fn br_matrices(k: u32, digits: u32) -> Result<(ComplexMatrix, ComplexMatrix, ExactMatrix)> {
    if k < 3 {
        return Err(Error::IndexRange("br_matrices requires k >= 3".into()));
    }
    let prec = bits_for_digits(digits);
    let idx = mid_index_set(k);

    let t = t_matrix(&idx);
    let r = r_matrix(&idx, digits);
    // the left factor is the transpose of R (of R' in the primed case: the
    // transposed form is the one the quadratic relation closes under for
    // every k, and coincides with the untransposed one up to sign when the
    // reduced index set is short)
    let left = r.transpose();

    let pmid = pmid_matrix(k, digits)?.to_complex();
    let bmid = ComplexMatrix::from_exact(&crate::betti::bmid_matrix(k)?, digits);
    let t_c = ComplexMatrix::from_exact(&t, digits);

    // P^BR = (-2 sqrt(pi))^{-(k+1)} tR . P^mid . T
    let p_br = {
        let scale = Float::with_val(prec, -2) * pi(prec).sqrt();
        let scale = BigComplex::from_real(scale.pow(-(k as i32) - 1));
        left.matmul(&pmid)?.matmul(&t_c)?.scale(&scale)
    };

    // B^BR = -(i^{k+1} k!/2^{k+1}) tR . B^mid . R
    let b_br = {
        let mag = from_rational(&(factorial(k as i64) / (Rational::from(1) << (k + 1))), prec);
        let scale = BigComplex::from_real(-mag).mul_i_power(k as i64 + 1);
        left.matmul(&bmid)?.matmul(&r)?.scale(&scale)
    };

    // D_k = (-1)^k k! (T S^mid T)^{-1}, exact
    let d = {
        let smid = smid_matrix(k)?;
        let tst = t.matmul(&smid)?.matmul(&t)?;
        let mut scale = factorial(k as i64);
        if k % 2 == 1 {
            scale = -scale;
        }
        tst.invert()?.scale(&scale)
    };

    Ok((p_br, b_br, d))
}

/// One critical integer with its predicted period-side value
/// `c_n = pi^{pi_power} * determinant`.
#[derive(Clone, Debug)]
pub struct CriticalValue {
    pub n: i64,
    pub pi_power: i64,
    pub determinant: BigReal,
    pub c_n: BigReal,
}

/// The period side of the critical-value table for one `k`.
#[derive(Clone, Debug)]
pub struct DeligneReport {
    pub k: u32,
    /// Which determinant feeds each value: "D_{k,k-2}", "D_{k,k-3}",
    /// "D'_{k,k-2}" or "D'_{k,k-3}".
    pub entries: Vec<(CriticalValue, &'static str)>,
}

/// Determinant of the real moment matrix with `I_0`-powers `2i-1` (odd
/// kind) or `2i` (even kind), `t`-exponents `2j-1`, of the given size.
fn moment_determinant(k: u32, odd_powers: bool, size: usize, digits: u32) -> Result<BigReal> {
    let prec = bits_for_digits(digits);
    if size == 0 {
        return Ok(Float::with_val(prec, 1));
    }
    let mut jobs = Vec::new();
    for i in 1..=size {
        let power = if odd_powers { 2 * i as u32 - 1 } else { 2 * i as u32 };
        for j in 1..=size {
            jobs.push((k, power, 2 * j as i32 - 1));
        }
    }
    prefetch_moments(&jobs, digits);
    let mut rows: Vec<Vec<Float>> = Vec::with_capacity(size);
    for i in 1..=size {
        let power = if odd_powers { 2 * i as u32 - 1 } else { 2 * i as u32 };
        let mut row = Vec::with_capacity(size);
        for j in 1..=size {
            row.push(ikm(k, power, 2 * j as i32 - 1, digits)?);
        }
        rows.push(row);
    }
    // real Gaussian elimination with partial pivoting
    let n = size;
    let mut det = Float::with_val(prec, 1);
    for p in 0..n {
        let mut pivot = p;
        let mut best = rows[p][p].clone().abs();
        for r in (p + 1)..n {
            let a = rows[r][p].clone().abs();
            if a > best {
                best = a;
                pivot = r;
            }
        }
        if best.is_zero() {
            return Ok(Float::new(prec));
        }
        if pivot != p {
            rows.swap(p, pivot);
            det = -det;
        }
        det *= &rows[p][p];
        for r in (p + 1)..n {
            let f = Float::with_val(prec, &rows[r][p] / &rows[p][p]);
            for c in p..n {
                let sub = Float::with_val(prec, &f * &rows[p][c]);
                rows[r][c] -= sub;
            }
        }
    }
    Ok(det)
}

/// `D_{k,k-2}` (odd `I_0` powers, size `floor((k+1)/4)`), primed variant
/// drops the last row and column.
pub fn deligne_det_km2(k: u32, primed: bool, digits: u32) -> Result<BigReal> {
    let size = ((k + 1) / 4) as usize - usize::from(primed);
    moment_determinant(k, true, size, digits)
}

/// `D_{k,k-3}` (even `I_0` powers, size `floor(k/4)`), primed variant drops
/// the last row and column.
pub fn deligne_det_km3(k: u32, primed: bool, digits: u32) -> Result<BigReal> {
    let size = (k / 4) as usize - usize::from(primed);
    moment_determinant(k, false, size, digits)
}

/// The period-side values `c_n` of the critical-value table for `k`.
pub fn deligne_report(k: u32, digits: u32) -> Result<DeligneReport> {
    if k < 3 {
        return Err(Error::IndexRange("deligne_report requires k >= 3".into()));
    }
    let prec = bits_for_digits(digits);
    let make = |n: i64, pi_power: i64, det: BigReal, label: &'static str| {
        let c_n = Float::with_val(prec, pi(prec).pow(pi_power as i32)) * &det;
        (
            CriticalValue {
                n,
                pi_power,
                determinant: det,
                c_n,
            },
            label,
        )
    };
    let mut entries = Vec::new();
    if k == 3 {
        let d = deligne_det_km2(3, false, digits)?;
        for a in 0..=3i64 {
            entries.push(make(2 - 2 * a, 0, Float::with_val(prec, 1), "1"));
            entries.push(make(2 * a + 3, 2 * a, d.clone(), "D_{k,k-2}"));
        }
    } else {
        let r = (k as i64 - 1) / 4; // k = 4r+1, 4r+2, 4r+3 or 4r+4
        match k % 4 {
            1 => {
                let d2 = deligne_det_km2(k, false, digits)?;
                let d3 = deligne_det_km3(k, false, digits)?;
                entries.push(make(2 * r + 1, -r * (r + 1), d2, "D_{k,k-2}"));
                entries.push(make(2 * r + 2, -r * (r - 1), d3, "D_{k,k-3}"));
            }
            2 => {
                let d2 = deligne_det_km2(k, false, digits)?;
                let d3 = deligne_det_km3(k, false, digits)?;
                entries.push(make(2 * r + 1, -r * (r + 1), d3.clone(), "D_{k,k-3}"));
                entries.push(make(2 * r + 2, -r * (r + 1), d2, "D_{k,k-2}"));
                entries.push(make(2 * r + 3, -r * (r - 1), d3, "D_{k,k-3}"));
            }
            3 => {
                let d2 = deligne_det_km2(k, false, digits)?;
                let d3 = deligne_det_km3(k, false, digits)?;
                entries.push(make(2 * r + 2, -r * (r + 1), d3, "D_{k,k-3}"));
                entries.push(make(2 * r + 3, -r * (r + 1), d2, "D_{k,k-2}"));
            }
            _ => {
                let d2 = deligne_det_km2(k, true, digits)?;
                let d3 = deligne_det_km3(k, true, digits)?;
                entries.push(make(2 * r + 1, -r * (r + 3), d3.clone(), "D'_{k,k-3}"));
                entries.push(make(2 * r + 2, -r * (r + 3), d2.clone(), "D'_{k,k-2}"));
                entries.push(make(2 * r + 3, -r * (r + 1), d3.clone(), "D'_{k,k-3}"));
                entries.push(make(2 * r + 4, -r * (r + 1), d2, "D'_{k,k-2}"));
                entries.push(make(2 * r + 5, -r * (r - 1), d3, "D'_{k,k-3}"));
            }
        }
    }
    Ok(DeligneReport { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::real::{abs_diff, pow10};

    #[test]
    fn pmid_k3_is_4pii_times_moment() {
        let digits = 40;
        let p = pmid_matrix(3, digits).unwrap();
        assert_eq!((p.rows, p.cols), (1, 1));
        let e = p.entry(0, 0);
        assert_eq!(e.pi_i_power, 1);
        let m = ikm(3, 1, 1, digits).unwrap();
        let prec = m.prec();
        let expect = Float::with_val(prec, 4) * m;
        assert!(abs_diff(&e.magnitude, &expect) < pow10(35, prec).recip());
    }

    #[test]
    fn pmid_row_phases() {
        // row i carries (pi i)^i for k not 0 mod 4; shifted rows otherwise
        let p = pmid_matrix(6, 25).unwrap();
        for r in 0..p.rows {
            for c in 0..p.cols {
                assert_eq!(p.entry(r, c).pi_i_power, r as i64 + 1);
            }
        }
        let p = pmid_matrix(8, 25).unwrap();
        assert_eq!(p.entry(0, 0).pi_i_power, 2); // i = 1 shifts to 2
        assert_eq!(p.entry(1, 0).pi_i_power, 3);
    }

    #[test]
    fn pmid_k8_matches_example_factorization() {
        // P_8^mid = diag((pi i)^2, -(pi i)^3) A diag(2^7, 2^2) with
        // A = [[M(2,1), 2M(2,5)-M(2,3)], [M(3,1), 2M(3,5)-M(3,3)]]
        let digits = 35;
        let p = pmid_matrix(8, digits).unwrap();
        let m = |i: u32, c: i32| ikm(8, i, c, digits).unwrap();
        let prec = bits_for_digits(digits);
        let two = |e: i32| Float::with_val(prec, Float::i_exp(1, e));
        let a = |r: usize, c: usize| -> Float {
            let i = r as u32 + 2;
            if c == 0 {
                m(i, 1)
            } else {
                Float::with_val(prec, 2 * m(i, 5)) - m(i, 3)
            }
        };
        let tol = pow10(digits as i32 - 5, prec).recip();
        for r in 0..2 {
            for c in 0..2 {
                let sign = if r == 0 { 1 } else { -1 };
                let col_scale = if c == 0 { two(7) } else { two(2) };
                let expect = Float::with_val(prec, sign) * a(r, c) * col_scale;
                let got = &p.entry(r, c).magnitude;
                assert!(
                    abs_diff(got, &expect) / expect.clone().abs() < tol,
                    "entry ({}, {})",
                    r,
                    c
                );
            }
        }
    }

    #[test]
    fn pfull_structure() {
        let digits = 30;
        let p = pfull_rdmod(5, digits).unwrap();
        let e = p.entry(0, 0);
        assert_eq!(e.pi_i_power, 6);
        assert_eq!(e.magnitude.to_f64(), 64.0); // 2^{k+1}
        assert!(p.entry(0, 1).magnitude.is_zero());
        assert!(p.entry(0, 2).magnitude.is_zero());
        // interior matches pmid for k not 0 mod 4
        let mid = pmid_matrix(5, digits).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let a = p.entry(r + 1, c + 1);
                let b = mid.entry(r, c);
                assert_eq!(a.pi_i_power, b.pi_i_power);
                assert!(abs_diff(&a.magnitude, &b.magnitude) < pow10(25, a.magnitude.prec()).recip());
            }
        }
    }

    #[test]
    fn pmodrd_structure() {
        let digits = 25;
        // k = 5: rows 0..k', (i,0) = (-1)^k delta
        let p = pmodrd_matrix(5, digits).unwrap();
        assert_eq!(p.entry(0, 0).magnitude.to_f64(), -1.0);
        assert!(p.entry(1, 0).magnitude.is_zero());
        assert!(p.entry(2, 0).magnitude.is_zero());

        // k = 8: rows {0, 2, 3, 4}
        assert_eq!(pmodrd_row_indices(8), vec![0, 2, 3, 4]);
        let p = pmodrd_matrix(8, digits).unwrap();
        assert_eq!(p.entry(0, 0).magnitude.to_f64(), 1.0);
        // (k/2, k/4): -(2 pi i)^4 2^4 / C(8,4) = -2^8/70 (pi i)^4
        let e = p.entry(3, 2);
        assert_eq!(e.pi_i_power, 4);
        assert!((e.magnitude.to_f64() - (-256.0 / 70.0)).abs() < 1e-12);
        // other rows have zero in the k/4 column
        assert!(p.entry(0, 2).magnitude.is_zero());
        assert!(p.entry(1, 2).magnitude.is_zero());
        // (k/2, j < k/4) is the plain convergent moment with phase k/2
        let e = p.entry(3, 1);
        assert_eq!(e.pi_i_power, 4);
        let expect = Float::with_val(e.magnitude.prec(), Float::i_exp(1, 7))
            * ikm(8, 4, 1, digits).unwrap();
        assert!(abs_diff(&e.magnitude, &expect) < pow10(20, e.magnitude.prec()).recip());
    }

    #[test]
    fn d3_is_nine_sixteenths() {
        let (_, _, d) = br_matrices(3, 20).unwrap();
        assert_eq!(d[(0, 0)], Rational::from((9, 16)));
    }

    #[test]
    fn d_matches_published_tables() {
        // the exact D_k reproduce the independently published
        // Broadhurst-Roberts matrices for k = 5, 6, 7 and the primed k = 8
        let (_, _, d5) = br_matrices(5, 20).unwrap();
        assert_eq!(
            d5,
            ExactMatrix::from_ratios(&[vec![(13, 8), (225, 64)], vec![(225, 64), (0, 1)]])
        );
        let (_, _, d6) = br_matrices(6, 20).unwrap();
        assert_eq!(
            d6,
            ExactMatrix::from_ratios(&[vec![(0, 1), (-18, 1)], vec![(18, 1), (0, 1)]])
        );
        let (_, _, d7) = br_matrices(7, 20).unwrap();
        assert_eq!(
            d7,
            ExactMatrix::from_ratios(&[
                vec![(51, 16), (2589, 32), (11025, 256)],
                vec![(2589, 32), (11025, 256), (0, 1)],
                vec![(11025, 256), (0, 1), (0, 1)],
            ])
        );
        let (_, _, d8) = br_matrices(8, 20).unwrap();
        assert_eq!(
            d8,
            ExactMatrix::from_ratios(&[vec![(0, 1), (-576, 1)], vec![(576, 1), (0, 1)]])
        );
    }

    #[test]
    fn d_symmetry() {
        // D_k is (-1)^{k+1}-symmetric (congruent image of (S^mid)^{-1})
        for k in [5u32, 6, 7, 8] {
            let (_, _, d) = br_matrices(k, 20).unwrap();
            let sign = if k % 2 == 0 { -1 } else { 1 };
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    assert_eq!(d[(r, c)], rat(sign) * d[(c, r)].clone(), "k = {}", k);
                }
            }
        }
    }

    #[test]
    fn t_matrix_values() {
        let t = t_matrix(&[1, 2]);
        assert_eq!(t[(0, 0)], Rational::from(-4));
        assert_eq!(t[(1, 1)], Rational::from(16));
        assert_eq!(t[(0, 1)], rat(0));
    }

    #[test]
    fn deligne_k3_row() {
        let digits = 30;
        let rep = deligne_report(3, digits).unwrap();
        // c_{2a+3} = pi^{2a} D_{3,1} with D_{3,1} = int I0 K0^2 t dt
        let d = ikm(3, 1, 1, digits).unwrap();
        for (cv, label) in &rep.entries {
            if *label == "D_{k,k-2}" {
                assert_eq!((cv.n - 3) % 2, 0);
                let a = (cv.n - 3) / 2;
                assert_eq!(cv.pi_power, 2 * a);
                assert!(abs_diff(&cv.determinant, &d) < pow10(25, d.prec()).recip());
            } else {
                assert_eq!(cv.c_n.to_f64(), 1.0);
            }
        }
    }

    #[test]
    fn deligne_table_shapes() {
        for (k, count) in [(5u32, 2usize), (6, 3), (7, 2), (8, 5), (9, 2)] {
            let rep = deligne_report(k, 20).unwrap();
            assert_eq!(rep.entries.len(), count, "k = {}", k);
        }
        // k = 7: first true determinant (2x2) must be nonzero
        let rep = deligne_report(7, 25).unwrap();
        for (cv, _) in &rep.entries {
            assert!(!cv.determinant.is_zero());
        }
    }

    #[test]
    fn deligne_pi_powers_per_residue_class() {
        // k = 4r+3 with r = 1: c_{2r+2} = pi^{-r(r+1)} D_{k,k-3},
        // c_{2r+3} = pi^{-r(r+1)} D_{k,k-2}
        let rep = deligne_report(7, 20).unwrap();
        let by_n = |n: i64| rep.entries.iter().find(|(cv, _)| cv.n == n).unwrap();
        assert_eq!(by_n(4).0.pi_power, -2);
        assert_eq!(by_n(4).1, "D_{k,k-3}");
        assert_eq!(by_n(5).0.pi_power, -2);
        assert_eq!(by_n(5).1, "D_{k,k-2}");

        // k = 4r+1 with r = 2: c_{2r+1} = pi^{-r(r+1)} D_{k,k-2},
        // c_{2r+2} = pi^{-r(r-1)} D_{k,k-3}
        let rep = deligne_report(9, 20).unwrap();
        let by_n = |n: i64| rep.entries.iter().find(|(cv, _)| cv.n == n).unwrap();
        assert_eq!(by_n(5).0.pi_power, -6);
        assert_eq!(by_n(5).1, "D_{k,k-2}");
        assert_eq!(by_n(6).0.pi_power, -2);
        assert_eq!(by_n(6).1, "D_{k,k-3}");

        // k = 4r+4 with r = 1 (k = 8): five critical values with powers
        // -r(r+3), -r(r+3), -r(r+1), -r(r+1), -r(r-1)
        let rep = deligne_report(8, 20).unwrap();
        let powers: Vec<i64> = rep.entries.iter().map(|(cv, _)| cv.pi_power).collect();
        assert_eq!(powers, vec![-4, -4, -2, -2, 0]);
        let ns: Vec<i64> = rep.entries.iter().map(|(cv, _)| cv.n).collect();
        assert_eq!(ns, vec![3, 4, 5, 6, 7]);
    }
}
