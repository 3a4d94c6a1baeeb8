use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::matrix::rat_inverse;
use crate::kernel::zfactor::irreducibility_witness;
use crate::kernel::{BigRat, IntMatrix, IntPoly};

use super::order::OrderBasis;

/// `Q[x]/(f)` for a monic irreducible integer polynomial `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    poly: IntPoly,
    r1: usize,
    r2: usize,
    /// A known order, larger than `Z[x]`, to seed the maximal order
    /// computation (e.g. `Z[a, b]` for a compositum).
    suborder: Option<OrderBasis>,
    /// Known prime divisors of the discriminant, used as factoring hints.
    prime_hints: Vec<BigInt>,
}

impl NumberField {
    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// `(r1, r2)`: real embeddings and pairs of complex embeddings.
    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    pub fn suborder(&self) -> Option<&OrderBasis> {
        self.suborder.as_ref()
    }

    pub fn prime_hints(&self) -> &[BigInt] {
        &self.prime_hints
    }

    pub fn with_prime_hints(mut self, hints: impl IntoIterator<Item = BigInt>) -> Self {
        for h in hints {
            if !self.prime_hints.contains(&h) {
                self.prime_hints.push(h);
            }
        }
        self.prime_hints.sort();
        self
    }

    /// `Q(m^(1/3))`, defined by `x^3 - m`.
    pub fn pure_cubic(m: &BigInt) -> Result<Self> {
        Ok(build_field(&IntPoly::pure_cubic(m))?.with_prime_hints(hint_primes(m)))
    }

    /// `Q(ω, m^(1/3))` as the compositum of `x^2 + x + 1` and `x^3 - m`.
    pub fn sextic(m: &BigInt) -> Result<Compositum> {
        let c = compositum(&IntPoly::from_i64s(&[1, 1, 1]), &IntPoly::pure_cubic(m))?;
        Ok(Compositum { field: c.field.with_prime_hints(hint_primes(m)), ..c })
    }

    /// `Q(ω)`.
    pub fn eisenstein() -> Self {
        build_field(&IntPoly::from_i64s(&[1, 1, 1])).expect("x^2+x+1 is irreducible")
    }
}

fn hint_primes(m: &BigInt) -> Vec<BigInt> {
    crate::kernel::int::factor(m, &[]).into_iter().map(|(p, _)| p).chain([BigInt::from(2), BigInt::from(3)]).collect()
}

/// Checks `f` (monic, irreducible) and computes the signature by Sturm
/// sequences.
pub fn build_field(f: &IntPoly) -> Result<NumberField> {
    if !f.is_monic() || f.degree() == 0 {
        return Err(Error::NotMonic(f.to_string()));
    }
    if let Err(factor) = irreducibility_witness(f) {
        return Err(Error::Reducible { poly: f.to_string(), factor: factor.to_string() });
    }
    let r1 = f.count_real_roots();
    let r2 = (f.degree() - r1) / 2;
    Ok(NumberField { poly: f.clone(), r1, r2, suborder: None, prime_hints: Vec::new() })
}

/// Compositum `Q(a, b)` of two fields with a primitive element `a + c b`.
#[derive(Clone, Debug)]
pub struct Compositum {
    pub field: NumberField,
    /// The weight `c` in the primitive element `a + c b`.
    pub weight: i64,
    /// Power-basis coordinates of `a` (a root of the first polynomial).
    pub first: Vec<BigRat>,
    /// Power-basis coordinates of `b` (a root of the second polynomial).
    pub second: Vec<BigRat>,
}

/// Elements of `Q[a, b]/(f(a), g(b))` as `n1 x n2` coefficient grids.
struct Tensor<'a> {
    f: &'a IntPoly,
    g: &'a IntPoly,
}

impl Tensor<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.f.degree(), self.g.degree())
    }

    fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let (n1, n2) = self.dims();
        let (w1, w2) = (2 * n1 - 1, 2 * n2 - 1);
        let mut prod = vec![BigInt::zero(); w1 * w2];
        for i1 in 0..n1 {
            for j1 in 0..n2 {
                let a = &x[i1 * n2 + j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..n1 {
                    for j2 in 0..n2 {
                        let b = &y[i2 * n2 + j2];
                        if !b.is_zero() {
                            prod[(i1 + i2) * w2 + j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        // reduce b-degree using g, then a-degree using f
        for i in 0..w1 {
            for j in (n2..w2).rev() {
                let c = std::mem::take(&mut prod[i * w2 + j]);
                if c.is_zero() {
                    continue;
                }
                for (k, gk) in self.g.coeffs().iter().enumerate().take(n2) {
                    prod[i * w2 + j - n2 + k] -= &c * gk;
                }
            }
        }
        for i in (n1..w1).rev() {
            for j in 0..n2 {
                let c = std::mem::take(&mut prod[i * w2 + j]);
                if c.is_zero() {
                    continue;
                }
                for (k, fk) in self.f.coeffs().iter().enumerate().take(n1) {
                    prod[(i - n1 + k) * w2 + j] -= &c * fk;
                }
            }
        }
        let mut out = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                out.push(prod[i * w2 + j].clone());
            }
        }
        out
    }

    fn unit(&self, i: usize, j: usize) -> Vec<BigInt> {
        let (n1, n2) = self.dims();
        let mut v = vec![BigInt::zero(); n1 * n2];
        v[i * n2 + j] = BigInt::one();
        v
    }
}

/// Builds `Q(a, b)` for roots `a` of `f` and `b` of `g`, trying `a + c b`
/// for `c = 1, 2, 3, ...` until the element has full degree `n1 n2`.
/// The resulting field carries the order `Z[a, b]` as a seed for the
/// maximal order computation.
pub fn compositum(f: &IntPoly, g: &IntPoly) -> Result<Compositum> {
    for p in [f, g] {
        if !p.is_monic() || p.degree() == 0 {
            return Err(Error::NotMonic(p.to_string()));
        }
    }
    let t = Tensor { f, g };
    let (n1, n2) = t.dims();
    let n = n1 * n2;
    for c in 1..=32i64 {
        let a = if n1 > 1 { t.unit(1, 0) } else { t.unit(0, 0).iter().map(|x| -x * f.coeff(0)).collect() };
        let b = if n2 > 1 { t.unit(0, 1) } else { t.unit(0, 0).iter().map(|x| -x * g.coeff(0)).collect() };
        let theta: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y * c).collect();
        let mut powers = vec![t.unit(0, 0)];
        for _ in 0..n {
            let next = t.mul(powers.last().unwrap(), &theta);
            powers.push(next);
        }
        let p = IntMatrix::from_rows(powers[..n].to_vec());
        if p.det().is_zero() {
            continue;
        }
        let p_rat: Vec<Vec<BigRat>> = p.to_rows().into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect();
        let p_inv = rat_inverse(&p_rat).expect("nonsingular");
        let top: Vec<BigRat> = powers[n].iter().cloned().map(BigRat::from_integer).collect();
        let coeffs = crate::kernel::matrix::rat_vec_mul(&top, &p_inv);
        let mut poly: Vec<BigInt> = coeffs.iter().map(|q| -q.to_integer()).collect();
        debug_assert!(coeffs.iter().all(|q| q.is_integer()));
        poly.push(BigInt::one());
        let field = build_field(&IntPoly::new(poly))?;
        let first = crate::kernel::matrix::rat_vec_mul(&a.iter().cloned().map(BigRat::from_integer).collect::<Vec<_>>(), &p_inv);
        let second = crate::kernel::matrix::rat_vec_mul(&b.iter().cloned().map(BigRat::from_integer).collect::<Vec<_>>(), &p_inv);
        let suborder = OrderBasis::from_rational_rows(&p_inv);
        let mut field = field;
        field.suborder = Some(suborder);
        return Ok(Compositum { field, weight: c, first, second });
    }
    Err(Error::InvalidInput("no primitive element a + c b with c <= 32".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures_of_basic_fields() {
        assert_eq!(build_field(&IntPoly::from_i64s(&[1, 1, 1])).unwrap().signature(), (0, 1));
        assert_eq!(NumberField::pure_cubic(&79.into()).unwrap().signature(), (1, 1));
        let err = build_field(&IntPoly::pure_cubic(&BigInt::from(27))).unwrap_err();
        assert!(matches!(err, Error::Reducible { .. }));
        assert_eq!(build_field(&IntPoly::from_i64s(&[3, 1])).unwrap().signature(), (1, 0));
        assert!(matches!(build_field(&IntPoly::from_i64s(&[1, 0, 2])), Err(Error::NotMonic(_))));
    }

    #[test]
    fn sextic_compositum() {
        let c = NumberField::sextic(&BigInt::from(7663)).unwrap();
        assert_eq!(c.field.degree(), 6);
        assert_eq!(c.field.signature(), (0, 3));
        assert_eq!(c.weight, 1);
        // b^3 = 7663 and a^2 + a + 1 = 0 inside Q[x]/(f)
        let f = c.field.poly().to_rat();
        let as_poly = |v: &[BigRat]| crate::kernel::RatPoly::new(v.to_vec());
        let b = as_poly(&c.second);
        let b3 = b.mul(&b).mul(&b).div_rem(&f).1;
        assert_eq!(b3, crate::kernel::RatPoly::new(vec![BigRat::from_integer(7663.into())]));
        let a = as_poly(&c.first);
        let a2 = a.mul(&a).div_rem(&f).1;
        let s = a2.coeffs().len().max(a.coeffs().len()).max(1);
        let sum: Vec<BigRat> = (0..s).map(|i| a2.coeff(i) + a.coeff(i) + if i == 0 { BigRat::one() } else { BigRat::zero() }).collect();
        assert!(crate::kernel::RatPoly::new(sum).is_zero());
    }
}
