//! Arbitrary-precision numerics: MPFR-backed reals, double-exponential
//! quadrature, modified Bessel functions, the Bessel moment families, and
//! the persistent moment cache.

pub mod bessel_fn;
pub mod cache;
pub mod moments;
pub mod quad;
pub mod real;
