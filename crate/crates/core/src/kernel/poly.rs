//! Dense univariate polynomials over the integers and the rationals.
//!
//! Coefficients are stored little-endian: `coeffs[i]` multiplies `x^i`.
//! Both types keep the invariant that the last stored coefficient is
//! nonzero, so the zero polynomial has no coefficients at all.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::BigRat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPoly { coeffs }
    }

    /// `x^3 - m`.
    pub fn pure_cubic(m: &BigInt) -> Self {
        Self::new(vec![-m.clone(), BigInt::zero(), BigInt::zero(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rat(&self, x: &BigRat) -> BigRat {
        self.coeffs.iter().rev().fold(BigRat::zero(), |acc, c| acc * x + BigRat::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Division by a monic polynomial.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "div_rem_monic needs a monic divisor");
        let d = divisor.degree();
        if self.coeffs.len() <= d {
            return (IntPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            quot[i - d] = c.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - d + j] -= &c * dc;
            }
        }
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// Exact quotient over Z, `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &IntPoly) -> Option<IntPoly> {
        if divisor.is_zero() {
            return None;
        }
        let (q, r) = self.to_rat().div_rem(&divisor.to_rat());
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRat::from_integer(c.clone())).collect())
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, other: &IntPoly) -> BigInt {
        let (m, n) = (self.degree(), other.degree());
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        if m == 0 {
            return num_traits::pow(self.leading(), n);
        }
        if n == 0 {
            return num_traits::pow(other.leading(), m);
        }
        let size = m + n;
        let mut s = IntMatrix::zeros(size, size);
        for r in 0..n {
            for (i, c) in self.coeffs.iter().rev().enumerate() {
                s[(r, r + i)] = c.clone();
            }
        }
        for r in 0..m {
            for (i, c) in other.coeffs.iter().rev().enumerate() {
                s[(n + r, r + i)] = c.clone();
            }
        }
        s.det()
    }

    /// `disc(f) = (-1)^(n(n-1)/2) res(f, f') / lc(f)`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        let r = self.resultant(&self.derivative());
        let r = r / self.leading();
        if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }

    /// Number of distinct real roots, by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let f = self.to_rat();
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let k = seq.len();
            if seq[k - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[k - 2].div_rem(&seq[k - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        let sign_changes = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let sgn = |c: &BigRat| -> i8 {
            if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            }
        };
        let at_pos: Vec<i8> = seq.iter().map(|p| sgn(&p.leading())).collect();
        let at_neg: Vec<i8> = seq
            .iter()
            .map(|p| {
                let s = sgn(&p.leading());
                if p.degree() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        sign_changes(at_neg) - sign_changes(at_pos)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Polynomial with rational coefficients; used for Euclidean arithmetic
/// (gcds, Sturm sequences) and for elements of `Q[x]/(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRat {
        self.coeffs.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigRat::from_integer(BigInt::from(i))).collect())
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let d = divisor.degree();
        if self.coeffs.len() <= d {
            return (RatPoly::zero(), self.clone());
        }
        let lc_inv = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRat::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] * &lc_inv;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - d + j] -= &c * dc;
            }
            quot[i - d] = c;
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().recip();
        RatPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    /// Integer polynomial when every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPoly::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }
}

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants_of_defining_polynomials() {
        assert_eq!(IntPoly::from_i64s(&[1, 1, 1]).discriminant(), BigInt::from(-3));
        assert_eq!(IntPoly::pure_cubic(&BigInt::from(2)).discriminant(), BigInt::from(-108));
        assert_eq!(IntPoly::pure_cubic(&BigInt::from(79)).discriminant(), BigInt::from(-27 * 79 * 79));
        assert_eq!(IntPoly::from_i64s(&[5, 0, 1]).discriminant(), BigInt::from(-20));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(IntPoly::from_i64s(&[1, 1, 1]).count_real_roots(), 0);
        assert_eq!(IntPoly::pure_cubic(&BigInt::from(79)).count_real_roots(), 1);
        assert_eq!(IntPoly::from_i64s(&[-1, 0, 1]).count_real_roots(), 2);
        // (x-1)(x-2)(x-3)
        assert_eq!(IntPoly::from_i64s(&[-6, 11, -6, 1]).count_real_roots(), 3);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(IntPoly::pure_cubic(&BigInt::from(79)).to_string(), "x^3 - 79");
        assert_eq!(IntPoly::from_i64s(&[1, 1, 1]).to_string(), "x^2 + x + 1");
        assert_eq!(IntPoly::from_i64s(&[0, -2, 0, 1]).to_string(), "x^3 - 2x");
    }

    #[test]
    fn exact_division() {
        let f = IntPoly::from_i64s(&[-6, 11, -6, 1]);
        let g = IntPoly::from_i64s(&[-1, 1]);
        assert_eq!(f.exact_div(&g), Some(IntPoly::from_i64s(&[6, -5, 1])));
        assert_eq!(f.exact_div(&IntPoly::from_i64s(&[1, 1])), None);
        assert_eq!(f.exact_div(&IntPoly::from_i64s(&[-2, 2])), None);
    }
}
