use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::kernel::BigRat;

/// A field element in coordinates of the integral basis of its maximal
/// order. Arithmetic lives on [`super::MaximalOrder`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    coords: Vec<BigRat>,
}

impl FieldElement {
    pub fn new(coords: Vec<BigRat>) -> Self {
        FieldElement { coords }
    }

    pub fn from_int_coords(c: &[BigInt]) -> Self {
        FieldElement { coords: c.iter().cloned().map(BigRat::from_integer).collect() }
    }

    pub fn coords(&self) -> &[BigRat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates when the element lies in the maximal order.
    pub fn int_coords(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.to_integer()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        FieldElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FieldElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        FieldElement { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &BigRat) -> Self {
        FieldElement { coords: self.coords.iter().map(|a| a * k).collect() }
    }
}
