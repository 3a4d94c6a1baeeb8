//! Number fields, maximal orders and embeddings.

mod element;
mod embed;
mod field;
mod order;

pub use element::FieldElement;
pub use embed::{Ball, ComplexBall, EmbeddingData, MAX_PRECISION};
pub use field::{build_field, compositum, Compositum, NumberField};
pub use order::{MaximalOrder, OrderBasis};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::FractionalIdeal;
use crate::kernel::int::floor_root;
use crate::kernel::lattice::LatticeBasis;
use crate::kernel::matrix::rat_det;
use crate::kernel::BigRat;

/// `|d_K|^(1/n)` enclosed in `[lo, lo + 10^-digits)` with `lo` exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDiscriminant {
    pub digits: u32,
    /// `floor(|d|^(1/n) * 10^digits)`.
    pub scaled_floor: BigInt,
}

impl RootDiscriminant {
    pub fn lower(&self) -> BigRat {
        BigRat::new(self.scaled_floor.clone(), BigInt::from(10).pow(self.digits))
    }

    pub fn upper(&self) -> BigRat {
        BigRat::new(&self.scaled_floor + 1, BigInt::from(10).pow(self.digits))
    }

    pub fn value(&self) -> f64 {
        self.scaled_floor.to_f64().unwrap_or(f64::INFINITY) / 10f64.powi(self.digits as i32)
    }
}

/// Root discriminant from the exact discriminant, via an integer n-th root.
pub fn root_discriminant(disc: &BigInt, degree: usize, digits: u32) -> RootDiscriminant {
    let scaled = disc.abs() * BigInt::from(10).pow(digits * degree as u32);
    RootDiscriminant { digits, scaled_floor: floor_root(&scaled, degree as u32) }
}

/// The ideal's Z-basis as a lattice under the T2 form of `order`. The form
/// is rounded to `prec` bits; the covolume check `det = |d_K| N(I)^2` is
/// retried at doubled precision when the rounding is too coarse.
pub fn minkowski_lattice(order: &MaximalOrder, ideal: &FractionalIdeal, prec: u32) -> Result<LatticeBasis> {
    let rows: Vec<Vec<BigRat>> =
        ideal.basis_rows().into_iter().map(|r| r.into_iter().map(|x| BigRat::new(x, ideal.den().clone())).collect()).collect();
    let abs_disc = BigRat::from_integer(order.disc().abs());
    let mut bits = prec;
    loop {
        let form = order.embeddings(bits)?.t2_gram().to_vec();
        let det = rat_det(&form);
        let tol = BigRat::new(BigInt::one(), BigInt::one() << (bits / 2).max(8));
        if ((&det / &abs_disc) - BigRat::one()).abs() < tol {
            return Ok(LatticeBasis::with_form(rows, form));
        }
        if bits >= MAX_PRECISION {
            return Err(Error::Precision(bits));
        }
        bits *= 2;
    }
}

impl MaximalOrder {
    pub fn root_discriminant(&self) -> RootDiscriminant {
        root_discriminant(self.disc(), self.degree(), 6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_discriminant_bounds() {
        let rd = root_discriminant(&BigInt::from(-108), 3, 6);
        // 108^(1/3) = 4.762203...
        assert_eq!(rd.scaled_floor, BigInt::from(4_762_203));
        assert!(rd.lower() < rd.upper());
    }
}
