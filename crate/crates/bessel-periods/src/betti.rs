//! Exact Betti intersection matrices `B_k` and `B_k^mid` from Bernoulli
//! numbers, and the Bernoulli Hankel determinant identities backing their
//! invertibility.

use rug::ops::Pow;

use crate::exact::{bernoulli, binomial, factorial, rat, ExactMatrix, Rational};
use crate::{k_prime, Error, Result};

/// The pairing `<alpha_i, beta_j>` for `1 <= i <= k'`, `0 <= j <= floor(k/2)`:
/// `(-1)^{k-i} (k-i)!(k-j)!/k! * B_{k-i-j+1}/(k-i-j+1)!`.
pub fn bpairing_entry(k: u32, i: u32, j: u32) -> Result<Rational> {
    let kp = k_prime(k);
    if i < 1 || i > kp || j > k / 2 {
        return Err(Error::IndexRange(format!(
            "bpairing_entry: need 1 <= i <= {} and 0 <= j <= {}, got ({}, {})",
            kp,
            k / 2,
            i,
            j
        )));
    }
    let (k, i, j) = (k as i64, i as i64, j as i64);
    let b_index = k - i - j + 1;
    debug_assert!(b_index >= 2);
    let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
    Ok(rat(sign) * factorial(k - i) * factorial(k - j) / factorial(k)
        * bernoulli(b_index as u64)
        / factorial(b_index))
}

/// `<alpha_0, beta_j> = -delta_{0,j}`.
pub fn bpairing_row0(j: u32) -> Rational {
    if j == 0 {
        rat(-1)
    } else {
        rat(0)
    }
}

/// The middle Betti matrix `B_k^mid` over `[[1,k']]^2`: the full
/// `(<alpha_i, beta_j>)_{1<=i,j<=k'}` when `k` is not a multiple of 4, and
/// the shifted matrix — equivalently `(<alpha_i, beta_j>)_{2<=i,j<=k'}` —
/// when it is.
pub fn bmid_matrix(k: u32) -> Result<ExactMatrix> {
    let kp = k_prime(k);
    if kp == 0 {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    let lo = if k % 4 == 0 { 2 } else { 1 };
    if lo > kp {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    let n = (kp - lo + 1) as usize;
    let mut m = ExactMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = bpairing_entry(k, lo + r as u32, lo + c as u32)?;
        }
    }
    Ok(m)
}

/// The matrix `B_k` of the determinant proposition: `1 <= i,j <= k'` for
/// `k` not a multiple of 4, and `1 <= i <= k'`, `2 <= j <= k/2` when `4 | k`.
pub fn braw_matrix(k: u32) -> Result<ExactMatrix> {
    let kp = k_prime(k) as usize;
    let mut m = ExactMatrix::zeros(kp, kp);
    for r in 0..kp {
        for c in 0..kp {
            let j = if k % 4 == 0 { c as u32 + 2 } else { c as u32 + 1 };
            m[(r, c)] = bpairing_entry(k, r as u32 + 1, j)?;
        }
    }
    Ok(m)
}

/// Closed form of `det B_k` (the determinant proposition), with two
/// corrections forced by direct computation: for `k = 2 mod 4` the product
/// starts at `a = 2` (the displayed bound `a = 1` contradicts the
/// proposition's own proof), and for `4 | k` the value carries an extra
/// factor `-1` (checked against direct determinants for all `4 | k <= 20`).
pub fn det_braw_closed_form(k: u32) -> Rational {
    let kp = k_prime(k) as i64;
    let k = k as i64;
    let (sign, inv) = if k % 2 == 1 {
        let mut prod = factorial(k);
        for a in 1..=kp {
            prod *= binomial(k, a);
        }
        (1, prod)
    } else if k % 4 == 2 {
        let mut prod = factorial(k) * rat(kp + 1);
        for a in 2..=kp {
            prod *= binomial(k, a);
        }
        (1, prod)
    } else {
        let mut prod = factorial(k);
        for a in 2..=kp {
            prod *= binomial(k, a);
        }
        (-1, prod)
    };
    rat(sign) / inv
}

/// Closed form of `det B_k^mid`: `det B_k` when `k` is not a multiple of 4,
/// and `[(k/4) (k'!)^2 prod_{a=2}^{k'} C(k,a)]^{-1}` when it is.
pub fn det_bmid_closed_form(k: u32) -> Rational {
    if k % 4 != 0 {
        return det_braw_closed_form(k);
    }
    let kp = k_prime(k) as i64;
    let k = k as i64;
    let mut prod = rat(k / 4) * factorial(kp).pow(2u32);
    for a in 2..=kp {
        prod *= binomial(k, a);
    }
    Rational::from(1) / prod
}

/// Which Bernoulli Hankel matrix: entries `B_{i+j}/(i+j)!` (`Shift0`) or
/// `B_{i+j+1}/(i+j+1)!` (`Shift1`), both over `1 <= i,j <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HankelShift {
    Shift0,
    Shift1,
}

/// The Hankel matrix itself.
pub fn bernoulli_hankel_matrix(kind: HankelShift, n: usize) -> ExactMatrix {
    let off = match kind {
        HankelShift::Shift0 => 0,
        HankelShift::Shift1 => 1,
    };
    ExactMatrix::from_fn(n, n, |i, j| {
        let s = (i + j + 2 + off) as i64;
        bernoulli(s as u64) / factorial(s)
    })
}

/// Closed form of the Hankel determinant.
pub fn bernoulli_hankel_closed_form(kind: HankelShift, n: usize) -> Rational {
    let n = n as i64;
    let mut odd_prod = rat(1); // 3!! 5!! ... (2n+1)!!
    let mut df = rat(1);
    for a in 1..=n {
        df *= rat(2 * a + 1);
        odd_prod *= df.clone();
    }
    match kind {
        HankelShift::Shift0 => {
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            rat(sign) * df / ((Rational::from(1) << (n * (n + 1)) as u32) * odd_prod.clone() * odd_prod)
        }
        HankelShift::Shift1 => {
            if n % 2 == 1 {
                rat(0)
            } else {
                let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
                rat(sign) / ((Rational::from(1) << (n * (n + 2)) as u32) * odd_prod.clone() * odd_prod)
            }
        }
    }
}

/// Computes the `n x n` Hankel determinant directly and asserts the closed
/// form, returning the value.
pub fn bernoulli_hankel_det(kind: HankelShift, n: usize) -> Result<Rational> {
    if n < 1 {
        return Err(Error::IndexRange("hankel determinant needs n >= 1".into()));
    }
    let det = bernoulli_hankel_matrix(kind, n).det()?;
    let expected = bernoulli_hankel_closed_form(kind, n);
    if det != expected {
        return Err(Error::Internal(format!(
            "Hankel determinant ({:?}, n = {}): {} differs from closed form {}",
            kind, n, det, expected
        )));
    }
    Ok(det)
}

/// `Delta_n = (B_{2a+2b-2}/(2a+2b-2)!)_{1<=a,b<=n}` and its companion
/// `Theta_n = (B_{2a+2b}/(2a+2b)!)_{1<=a,b<=n}`.
pub fn delta_matrix(n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |a, b| {
        let s = (2 * (a + 1) + 2 * (b + 1) - 2) as i64;
        bernoulli(s as u64) / factorial(s)
    })
}

pub fn theta_matrix(n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |a, b| {
        let s = (2 * (a + 1) + 2 * (b + 1)) as i64;
        bernoulli(s as u64) / factorial(s)
    })
}

/// `det Delta_n = 1/(2^{2n^2} 3!! 5!! ... (4n-1)!!)`.
pub fn delta_det_closed_form(n: usize) -> Rational {
    let n = n as i64;
    let mut prod = Rational::from(1) << (2 * n * n) as u32;
    let mut df = rat(1);
    for m in 1..=(2 * n) {
        df *= rat(2 * m - 1);
        if m >= 2 {
            prod *= df.clone();
        }
    }
    Rational::from(1) / prod
}

/// `det Theta_n = (-1)^n/(2^{2n(n+1)} 3!! 5!! ... (4n+1)!!)`.
pub fn theta_det_closed_form(n: usize) -> Rational {
    let n = n as i64;
    let mut prod = Rational::from(1) << (2 * n * (n + 1)) as u32;
    let mut df = rat(1);
    for m in 1..=(2 * n + 1) {
        df *= rat(2 * m - 1);
        if m >= 2 {
            prod *= df.clone();
        }
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    rat(sign) / prod
}

/// The full Betti pairing matrix `B_k^{rd,mod}` on the bases
/// `(alpha_i)_{0<=i<=k'}` and the moderate-growth basis `(beta_j)` —
/// `j = 0..k'` when `k` is not a multiple of 4, and `j in {0, 2, ..., k/2}`
/// when it is.
pub fn bfull_matrix(k: u32) -> Result<ExactMatrix> {
    let kp = k_prime(k) as usize;
    let cols: Vec<u32> = if k % 4 == 0 {
        std::iter::once(0)
            .chain(2..=(k / 2))
            .collect()
    } else {
        (0..=kp as u32).collect()
    };
    let mut m = ExactMatrix::zeros(kp + 1, cols.len());
    for (c, &j) in cols.iter().enumerate() {
        m[(0, c)] = bpairing_row0(j);
        for i in 1..=kp {
            m[(i, c)] = bpairing_entry(k, i as u32, j)?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::mid_index_set;

    #[test]
    fn entry_examples() {
        // k=5: (-1)^4 (4!4!/5!) B_4/4! = -1/150
        assert_eq!(bpairing_entry(5, 1, 1).unwrap(), ratio(-1, 150));
        // k=3: (2!2!/3!) B_2/2! = 1/18
        assert_eq!(bpairing_entry(3, 1, 1).unwrap(), ratio(1, 18));
        // odd Bernoulli index vanishes: k-i-j+1 = 3
        assert_eq!(bpairing_entry(7, 2, 3).unwrap(), rat(0));
        assert!(bpairing_entry(5, 3, 1).is_err());
        assert!(bpairing_entry(5, 1, 3).is_err());
    }

    #[test]
    fn bmid_examples() {
        assert_eq!(bmid_matrix(3).unwrap(), ExactMatrix::from_ratios(&[vec![(1, 18)]]));

        let b6 = bmid_matrix(6).unwrap();
        assert_eq!(b6[(0, 0)], rat(0));
        assert_eq!(b6[(0, 1)], ratio(1, 180));
        assert_eq!(b6[(1, 0)], ratio(-1, 180));
        assert_eq!(b6[(1, 1)], rat(0));

        // k=8: the shifted matrix equals the submatrix 2 <= i,j <= 3
        let b8 = bmid_matrix(8).unwrap();
        assert_eq!(b8.rows(), 2);
        for (r, &i) in [2u32, 3].iter().enumerate() {
            for (c, &j) in [2u32, 3].iter().enumerate() {
                assert_eq!(b8[(r, c)], bpairing_entry(8, i, j).unwrap());
            }
        }
        assert_eq!(b8[(0, 1)], ratio(-1, 336));
    }

    #[test]
    fn bmid_determinants_match_closed_forms() {
        for k in 3..=24u32 {
            let det = bmid_matrix(k).unwrap().det().unwrap();
            assert_eq!(det, det_bmid_closed_form(k), "k = {}", k);
            assert!(det != 0, "B_{}^mid must be invertible", k);
        }
        // spot values
        assert_eq!(det_bmid_closed_form(5), ratio(1, 6000));
        assert_eq!(det_bmid_closed_form(6), ratio(1, 32400));
        assert_eq!(det_bmid_closed_form(8), ratio(1, 112896));
    }

    #[test]
    fn braw_determinants_match_closed_forms() {
        for k in 3..=20u32 {
            let det = braw_matrix(k).unwrap().det().unwrap();
            assert_eq!(det, det_braw_closed_form(k), "k = {}", k);
        }
    }

    #[test]
    fn hankel_determinants() {
        assert_eq!(
            bernoulli_hankel_det(HankelShift::Shift0, 1).unwrap(),
            ratio(1, 12)
        );
        assert_eq!(bernoulli_hankel_det(HankelShift::Shift1, 1).unwrap(), rat(0));
        // shift1, n=2: -1/(2^8 (3*15)^2)
        assert_eq!(
            bernoulli_hankel_det(HankelShift::Shift1, 2).unwrap(),
            ratio(-1, 256 * 45 * 45)
        );
        for n in 1..=6 {
            bernoulli_hankel_det(HankelShift::Shift0, n).unwrap();
            bernoulli_hankel_det(HankelShift::Shift1, n).unwrap();
        }
    }

    #[test]
    fn delta_theta_determinants() {
        for n in 1..=6 {
            assert_eq!(delta_matrix(n).det().unwrap(), delta_det_closed_form(n));
            assert_eq!(theta_matrix(n).det().unwrap(), theta_det_closed_form(n));
        }
    }

    #[test]
    fn factorizes_through_hankel() {
        // For odd k, k! D_-^{-1} B_k D_+^{-1} has constant anti-diagonals
        // (it is the Bernoulli Hankel matrix up to index reversal), where
        // D_± = diag((±1)^{k-1}(k-1)!, ..., (±1)^{k'+1}(k'+1)!).
        for k in [3u32, 5, 7, 9, 11, 13] {
            let kp = k_prime(k) as usize;
            let b = braw_matrix(k).unwrap();
            let scaled = ExactMatrix::from_fn(kp, kp, |r, c| {
                let mi = k as i64 - 1 - r as i64; // k - i for i = r+1
                let mj = k as i64 - 1 - c as i64;
                let si = if mi % 2 == 0 { 1 } else { -1 };
                let entry = b[(r, c)].clone() * factorial(k as i64);
                entry / (rat(si) * factorial(mi)) / factorial(mj)
            });
            for r in 0..kp {
                for c in 0..kp {
                    if r + 1 < kp && c >= 1 {
                        assert_eq!(scaled[(r, c)], scaled[(r + 1, c - 1)], "k = {}", k);
                    }
                }
            }
            // and the anti-diagonals carry B_{i+j}/(i+j)! after reversal
            let h = bernoulli_hankel_matrix(HankelShift::Shift0, kp);
            for r in 0..kp {
                for c in 0..kp {
                    assert_eq!(scaled[(r, c)], h[(kp - 1 - r, kp - 1 - c)]);
                }
            }
        }
    }

    #[test]
    fn bfull_shapes_and_row0() {
        for k in 3..=12u32 {
            let m = bfull_matrix(k).unwrap();
            let kp = k_prime(k) as usize;
            assert_eq!(m.rows(), kp + 1);
            assert_eq!(m.cols(), kp + 1);
            assert_eq!(m[(0, 0)], rat(-1));
            for c in 1..m.cols() {
                assert_eq!(m[(0, c)], rat(0));
            }
        }
    }

    #[test]
    fn mid_matches_full_for_shifted_indices() {
        // the middle matrix sits inside the full pairing at the shifted rows
        for k in [8u32, 12] {
            let mid = bmid_matrix(k).unwrap();
            let idx = mid_index_set(k);
            assert_eq!(mid.rows(), idx.len());
        }
    }
}
