//! Fractional ideals of a maximal order, prime decomposition and
//! valuations.

mod prime;

pub(crate) use prime::valuation_bounded;
pub use prime::{factor_ideal, factor_prime, valuation, valuation_of, PrimeIdeal};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::lattice::LatticeBasis;
use crate::kernel::matrix::hnf_mod;
use crate::kernel::{BigRat, IntMatrix};
use crate::numfield::{FieldElement, MaximalOrder};

/// `(1/den) * L`, where `L` is the lattice spanned by the rows of an upper
/// triangular Hermite normal form in integral-basis coordinates.
/// Representations are canonical, so derived equality is ideal equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FractionalIdeal {
    den: BigInt,
    hnf: IntMatrix,
}

impl FractionalIdeal {
    fn normalized(hnf: IntMatrix, den: BigInt) -> Self {
        let g = hnf.entries().iter().fold(den.clone(), |acc, x| acc.gcd(x));
        if g.is_one() {
            return FractionalIdeal { den, hnf };
        }
        let rows = hnf.to_rows().into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect();
        FractionalIdeal { den: den / &g, hnf: IntMatrix::from_rows(rows) }
    }

    pub fn unit(n: usize) -> Self {
        FractionalIdeal { den: BigInt::one(), hnf: IntMatrix::identity(n) }
    }

    /// The O-module generated by integral elements, given a positive multiple
    /// `d` of the index of the resulting ideal in O.
    pub fn from_generators(order: &MaximalOrder, gens: &[Vec<BigInt>], d: &BigInt) -> Self {
        let n = order.degree();
        let mut zgens = Vec::with_capacity(gens.len() * n + n);
        for g in gens {
            for i in 0..n {
                zgens.push(order.mul_int(g, &order.unit_vector(i)));
            }
        }
        for i in 0..n {
            zgens.push(order.unit_vector(i).into_iter().map(|x| x * d).collect());
        }
        FractionalIdeal { den: BigInt::one(), hnf: hnf_mod(&zgens, n, d) }
    }

    /// Integral ideal from Z-generators in integral-basis coordinates.
    pub fn from_z_generators(n: usize, gens: &[Vec<BigInt>], d: &BigInt) -> Self {
        FractionalIdeal { den: BigInt::one(), hnf: hnf_mod(gens, n, d) }
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn hnf(&self) -> &IntMatrix {
        &self.hnf
    }

    pub fn degree(&self) -> usize {
        self.hnf.nrows()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Index of the numerator lattice in O.
    fn lattice_det(&self) -> BigInt {
        (0..self.degree()).map(|i| self.hnf[(i, i)].clone()).product()
    }

    pub fn norm(&self) -> BigRat {
        BigRat::new(self.lattice_det(), self.den.pow(self.degree() as u32))
    }

    /// Z-basis elements.
    pub fn basis(&self) -> Vec<FieldElement> {
        let d = BigRat::from_integer(self.den.clone());
        self.hnf.to_rows().iter().map(|r| FieldElement::from_int_coords(r).scale(&(BigRat::one() / &d))).collect()
    }

    /// Integral Z-basis rows (numerators).
    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.hnf.to_rows()
    }

    /// Coefficients of `x` in the Z-basis, when `x` lies in the ideal.
    pub fn coordinates(&self, x: &FieldElement) -> Option<Vec<BigInt>> {
        let n = self.degree();
        let d = BigRat::from_integer(self.den.clone());
        let v: Vec<BigRat> = x.coords().iter().map(|c| c * &d).collect();
        if !v.iter().all(|c| c.is_integer()) {
            return None;
        }
        let mut rest: Vec<BigInt> = v.iter().map(|c| c.to_integer()).collect();
        let mut y = vec![BigInt::zero(); n];
        for j in 0..n {
            let (q, r) = rest[j].div_rem(&self.hnf[(j, j)]);
            if !r.is_zero() {
                return None;
            }
            for k in j..n {
                rest[k] -= &q * &self.hnf[(j, k)];
            }
            y[j] = q;
        }
        Some(y)
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn mul(&self, order: &MaximalOrder, other: &Self) -> Self {
        let n = self.degree();
        let a = self.hnf.to_rows();
        let b = other.hnf.to_rows();
        let mut gens = Vec::with_capacity(n * n);
        for x in &a {
            for y in &b {
                gens.push(order.mul_int(x, y));
            }
        }
        let d = self.lattice_det() * other.lattice_det();
        Self::normalized(hnf_mod(&gens, n, &d), &self.den * &other.den)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree();
        let l = self.den.lcm(&other.den);
        let (sa, sb) = (&l / &self.den, &l / &other.den);
        let mut gens: Vec<Vec<BigInt>> = self.hnf.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * &sa).collect()).collect();
        gens.extend(other.hnf.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * &sb).collect()));
        let d = (self.lattice_det() * sa.pow(n as u32)).gcd(&(other.lattice_det() * sb.pow(n as u32)));
        Self::normalized(hnf_mod(&gens, n, &d), l)
    }

    pub fn pow(&self, order: &MaximalOrder, mut k: u32) -> Self {
        let mut acc = Self::unit(self.degree());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(order, &base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(order, &base);
            }
        }
        acc
    }

    /// `q * self` for a nonzero rational `q`.
    pub fn scale(&self, q: &BigRat) -> Self {
        let rows = self.hnf.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * q.numer().abs()).collect()).collect();
        Self::normalized(IntMatrix::from_rows(rows), &self.den * q.denom())
    }

    /// Lattice of the ideal under the T2 form of the order.
    pub fn lattice(&self, order: &MaximalOrder, prec: u32) -> Result<LatticeBasis> {
        crate::numfield::minkowski_lattice(order, self, prec)
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.hnf.to_rows().iter().map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
        if self.den.is_one() {
            write!(f, "[{}]", rows.join(", "))
        } else {
            write!(f, "(1/{}) [{}]", self.den, rows.join(", "))
        }
    }
}

/// The principal ideal `x O` of a nonzero element.
pub fn element_ideal(order: &MaximalOrder, x: &FieldElement) -> Result<FractionalIdeal> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let d = x.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let y: Vec<BigInt> = x.coords().iter().map(|c| (c * BigRat::from_integer(d.clone())).to_integer()).collect();
    let m = order.mult_matrix_int(&y);
    let nrm = m.det().abs();
    Ok(FractionalIdeal::normalized(hnf_mod(&m.to_rows(), order.degree(), &nrm), d))
}

pub fn ideal_mul(order: &MaximalOrder, a: &FractionalIdeal, b: &FractionalIdeal) -> FractionalIdeal {
    a.mul(order, b)
}

pub fn ideal_norm(a: &FractionalIdeal) -> BigRat {
    a.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::IntPoly;
    use crate::numfield::{build_field, NumberField};

    #[test]
    fn gaussian_split_prime() {
        let o = MaximalOrder::compute(&build_field(&IntPoly::from_i64s(&[1, 0, 1])).unwrap()).unwrap();
        let ps = factor_prime(&o, &BigInt::from(5)).unwrap();
        assert_eq!(ps.len(), 2);
        let prod = ps[0].ideal.mul(&o, &ps[1].ideal);
        assert_eq!(prod, element_ideal(&o, &o.from_integer(&BigInt::from(5))).unwrap());
        assert_ne!(ps[0].ideal, ps[1].ideal);
    }

    #[test]
    fn norms_multiply_and_membership() {
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(10)).unwrap()).unwrap();
        let x = o.generator();
        let a = element_ideal(&o, &x).unwrap();
        assert_eq!(a.norm(), BigRat::from_integer(10.into()));
        let b = element_ideal(&o, &o.from_integer(&BigInt::from(3))).unwrap();
        assert_eq!(a.mul(&o, &b).norm(), a.norm() * b.norm());
        assert!(a.contains(&o.mul(&x, &x)));
        assert!(!a.contains(&o.one()));
        let s = a.add(&b);
        assert!(s.norm() == BigRat::one());
        let inv = element_ideal(&o, &o.inverse(&x).unwrap()).unwrap();
        assert_eq!(a.mul(&o, &inv), FractionalIdeal::unit(3));
    }
}
