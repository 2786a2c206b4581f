//! Structural invariants of the period matrices that need the numeric
//! pipeline: invertibility of `P_k^mid`, agreement between the middle matrix
//! and the interior of the full one, and internal consistency of the
//! critical-value table.

use rug::ops::Pow;
use rug::Float;

use bessel_periods::numeric::real::{abs_diff, bits_for_digits, pi, pow10};
use bessel_periods::periods::{deligne_report, pfull_rdmod, pmid_matrix};

#[test]
fn pmid_is_invertible_through_k12() {
    let digits = 30;
    for k in 3..=12u32 {
        let p = pmid_matrix(k, digits).unwrap();
        if p.rows == 0 {
            continue;
        }
        let det = p.to_complex().det().unwrap();
        let bound = pow10(digits as i32 / 2, bits_for_digits(digits)).recip();
        assert!(
            det.abs() > bound,
            "det P_{}^mid too small: {:e}",
            k,
            det.abs().to_f64()
        );
    }
}

#[test]
fn pmid_is_interior_of_pfull_off_multiples_of_four() {
    let digits = 30;
    for k in [3u32, 5, 6, 7, 9, 10] {
        let mid = pmid_matrix(k, digits).unwrap();
        let full = pfull_rdmod(k, digits).unwrap();
        for r in 0..mid.rows {
            for c in 0..mid.cols {
                let a = mid.entry(r, c);
                let b = full.entry(r + 1, c + 1);
                assert_eq!(a.pi_i_power, b.pi_i_power);
                assert!(
                    abs_diff(&a.magnitude, &b.magnitude)
                        < pow10(digits as i32 - 3, a.magnitude.prec()).recip(),
                    "k = {}, entry ({}, {})",
                    k,
                    r,
                    c
                );
            }
        }
    }
}

#[test]
fn deligne_internal_consistency() {
    // c_n ratios across n equal the table's pi-powers times determinant
    // ratios (and entries sharing a determinant differ by pure pi-powers)
    let digits = 30;
    for k in [5u32, 6, 7, 8] {
        let rep = deligne_report(k, digits).unwrap();
        let prec = bits_for_digits(digits);
        for (a, la) in &rep.entries {
            for (b, lb) in &rep.entries {
                let lhs = Float::with_val(prec, &a.c_n / &b.c_n);
                let rhs = Float::with_val(prec, pi(prec).pow((a.pi_power - b.pi_power) as i32))
                    * Float::with_val(prec, &a.determinant / &b.determinant);
                assert!(
                    abs_diff(&lhs, &rhs) / rhs.clone().abs()
                        < pow10(digits as i32 - 5, prec).recip(),
                    "k = {}: {} vs {}",
                    k,
                    la,
                    lb
                );
            }
        }
        // and every determinant is a nonzero real number
        for (cv, _) in &rep.entries {
            assert!(cv.determinant.is_finite());
            assert!(!cv.determinant.is_zero());
        }
    }
}
