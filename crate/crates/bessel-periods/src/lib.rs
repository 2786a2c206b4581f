//! Exact and high-precision period computations for symmetric powers of the
//! Kloosterman connection.
//!
//! The crate computes, for each integer `k >= 1`:
//!
//! - the exact de Rham intersection matrices `S_k^mid` and `S_k` by solving
//!   the connection equation at infinity coefficient by coefficient
//!   ([`derham`]),
//! - the exact Betti intersection matrices `B_k^mid` and `B_k` from Bernoulli
//!   numbers ([`betti`]),
//! - modified Bessel functions and all Bessel moments (convergent,
//!   regularized at 0, regularized at infinity) to arbitrary precision
//!   ([`numeric`]),
//! - the period matrices `P_k^mid`, `P_k^{rd,mod}`, `P_k^{mod,rd}`, the
//!   Broadhurst-Roberts normalized matrices and the critical-value
//!   determinants ([`periods`]),
//! - machine-checkable certificates for the quadratic relations, sum rules
//!   and determinant identities tying all of the above together
//!   ([`verifier`]).
//!
//! Exact arithmetic is over GMP rationals ([`exact`]); floating point is
//! MPFR with explicit precision ([`numeric::real`]).

pub mod betti;
pub mod derham;
pub mod error;
pub mod exact;
pub mod numeric;
pub mod periods;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
pub use exact::{ExactMatrix, Rational};
pub use numeric::real::{BigComplex, BigReal};

/// `k' = floor((k-1)/2)`, the generic rank of middle cohomology.
pub fn k_prime(k: u32) -> u32 {
    (k.saturating_sub(1)) / 2
}

/// The middle index set `[[1, k']]`: `{1, ..., k'}`, minus `{k/4}` when
/// `4 | k`.
pub fn mid_index_set(k: u32) -> Vec<u32> {
    let kp = k_prime(k);
    (1..=kp).filter(|&i| !(k % 4 == 0 && i == k / 4)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_prime_values() {
        assert_eq!(k_prime(1), 0);
        assert_eq!(k_prime(2), 0);
        assert_eq!(k_prime(3), 1);
        assert_eq!(k_prime(4), 1);
        assert_eq!(k_prime(5), 2);
        assert_eq!(k_prime(6), 2);
        assert_eq!(k_prime(8), 3);
        assert_eq!(k_prime(13), 6);
    }

    #[test]
    fn mid_index_set_drops_quarter() {
        assert_eq!(mid_index_set(5), vec![1, 2]);
        assert_eq!(mid_index_set(6), vec![1, 2]);
        assert_eq!(mid_index_set(8), vec![1, 3]);
        assert_eq!(mid_index_set(12), vec![1, 2, 4, 5]);
        assert!(mid_index_set(1).is_empty());
        assert!(mid_index_set(4).is_empty());
    }
}
