//! Exact arithmetic kernel: big integers and rationals, polynomials over Z,
//! Q and F_p, integer matrices (HNF/SNF) and rational lattices (LLL,
//! Fincke–Pohst).

pub mod fp;
pub mod int;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod zfactor;

pub use num_bigint::BigInt;

/// Reduced fraction with positive denominator.
pub type BigRat = num_rational::BigRational;

pub use lattice::{lll_reduce, short_vectors, LatticeBasis, ShortVector};
pub use matrix::{hnf_mod, IntMatrix};
pub use poly::{IntPoly, RatPoly};

/// Row-style Hermite normal form with its unimodular transform.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    m.hnf()
}

/// Elementary divisors in divisibility order.
pub fn snf(m: &IntMatrix) -> Vec<BigInt> {
    m.snf()
}
