use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::fp;
use crate::kernel::int::{is_prime, mod_u64};
use crate::kernel::BigRat;
use crate::numfield::{FieldElement, MaximalOrder};

use super::FractionalIdeal;

/// A prime ideal `p = (p, pi)` above a rational prime `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: BigInt,
    /// Ramification index.
    pub e: u32,
    /// Residue degree.
    pub f: u32,
    pub ideal: FractionalIdeal,
    /// Second generator `pi`, in integral-basis coordinates.
    pub generator: Vec<BigInt>,
    /// `tau` with `tau * p^-1` of valuation -1 here and integral elsewhere.
    pub anti_uniformizer: Vec<BigInt>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        self.p.pow(self.f)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm().cmp(&other.norm()).then_with(|| self.ideal.cmp(&other.ideal))
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let g: Vec<String> = self.generator.iter().map(|x| x.to_string()).collect();
        write!(f, "({}, [{}]) e={} f={}", self.p, g.join(", "), self.e, self.f)
    }
}

/// F_p-subspace of `O / pO` in reduced row-echelon form.
#[derive(Clone, Debug)]
struct Subspace {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn span(mut rows: Vec<Vec<u64>>, p: u64) -> Self {
        let pivots = fp::row_reduce(&mut rows, p);
        Subspace { rows, pivots }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` modulo the subspace.
    fn reduce(&self, v: &[u64], p: u64) -> Vec<u64> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let k = v[c];
            if k != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + p - (k as u128 * *r as u128 % p as u128) as u64) % p;
                }
            }
        }
        v
    }

    fn free_columns(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|c| !self.pivots.contains(c)).collect()
    }
}

fn unit(n: usize, i: usize) -> Vec<u64> {
    (0..n).map(|k| u64::from(k == i)).collect()
}

fn lift(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn reduce_vec(v: &[BigInt], p: u64) -> Vec<u64> {
    v.iter().map(|x| mod_u64(x, p)).collect()
}

/// p-radical of `O`, i.e. the nilradical of `O / pO`.
fn radical(order: &MaximalOrder, p: u64) -> Subspace {
    let n = order.degree();
    let mut e: u128 = p as u128;
    while e < n as u128 {
        e *= p as u128;
    }
    let frob: Vec<Vec<u64>> = (0..n).map(|i| order.pow_mod_p(&unit(n, i), e, p)).collect();
    Subspace::span(fp::left_kernel(&frob, p), p)
}

/// Splits the ideal `i` (given modulo p, with `O / i` reduced) into the
/// maximal ideals containing it.
fn split(order: &MaximalOrder, i: Subspace, p: u64, out: &mut Vec<Subspace>) {
    let n = order.degree();
    let free = i.free_columns(n);
    // Berlekamp subalgebra {x : x^p = x} of O / i
    let rows: Vec<Vec<u64>> = free
        .iter()
        .map(|&c| {
            let x = unit(n, c);
            let xp = i.reduce(&order.pow_mod_p(&x, p as u128, p), p);
            let d = fp::sub(&xp, &x, p);
            let mut d = d;
            d.resize(n, 0);
            free.iter().map(|&k| d[k]).collect()
        })
        .collect();
    let ker = fp::left_kernel(&rows, p);
    if ker.len() <= 1 {
        out.push(i);
        return;
    }
    let embed = |v: &[u64]| {
        let mut x = vec![0u64; n];
        for (&c, &a) in free.iter().zip(v) {
            x[c] = a;
        }
        x
    };
    let one = i.reduce(&unit(n, 0), p);
    let x = ker
        .iter()
        .map(|v| embed(v))
        .find(|x| {
            let mut pair = vec![one.clone(), x.clone()];
            fp::row_reduce(&mut pair, p).len() == 2
        })
        .expect("Berlekamp algebra has a non-scalar element");
    // minimal polynomial of x in O / i
    let mut powers = vec![one.clone()];
    let minpoly = loop {
        let next = i.reduce(&order.mul_mod_p(powers.last().unwrap(), &x, p), p);
        let mut m: Vec<Vec<u64>> = powers.clone();
        m.push(next.clone());
        let dep = fp::left_kernel(&m, p);
        if let Some(c) = dep.first() {
            break fp::monic(c, p);
        }
        powers.push(next);
    };
    for r in fp::roots(&minpoly, p) {
        let mut shifted = x.clone();
        shifted[0] = (shifted[0] + p - r) % p;
        let shifted = i.reduce(&shifted, p);
        let mut gens = i.rows.clone();
        for k in 0..n {
            gens.push(order.mul_mod_p(&shifted, &unit(n, k), p));
        }
        split(order, Subspace::span(gens, p), p, out);
    }
}

fn ideal_from_subspace(order: &MaximalOrder, s: &Subspace, p: u64) -> FractionalIdeal {
    let n = order.degree();
    let pb = BigInt::from(p);
    let mut gens: Vec<Vec<BigInt>> = s.rows.iter().map(|r| lift(r)).collect();
    for i in 0..n {
        gens.push(order.unit_vector(i).into_iter().map(|x| x * &pb).collect());
    }
    FractionalIdeal::from_z_generators(n, &gens, &pb.pow(n as u32))
}

/// `tau` spanning `p P^-1 / pO`: nonzero `x` with `x P ⊆ pO`.
fn anti_uniformizer(order: &MaximalOrder, s: &Subspace, p: u64) -> Vec<BigInt> {
    let n = order.degree();
    let m: Vec<Vec<u64>> = (0..n).map(|i| s.rows.iter().flat_map(|b| order.mul_mod_p(&unit(n, i), b, p)).collect()).collect();
    let ker = fp::left_kernel(&m, p);
    lift(&ker[0])
}

fn v_p(x: &BigInt, p: &BigInt) -> u32 {
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Valuation at `P` of a nonzero integral element.
pub fn valuation(order: &MaximalOrder, prime: &PrimeIdeal, x: &[BigInt]) -> u32 {
    valuation_bounded(order, prime, x, u32::MAX)
}

pub(crate) fn valuation_bounded(order: &MaximalOrder, prime: &PrimeIdeal, x: &[BigInt], cap: u32) -> u32 {
    assert!(x.iter().any(|c| !c.is_zero()), "valuation of zero");
    let mut x = x.to_vec();
    let mut v = 0;
    while v < cap {
        let y = order.mul_int(&x, &prime.anti_uniformizer);
        if !y.iter().all(|c| c.is_multiple_of(&prime.p)) {
            break;
        }
        x = y.into_iter().map(|c| c / &prime.p).collect();
        v += 1;
    }
    v
}

/// Valuation at `P` of a nonzero field element.
pub fn valuation_of(order: &MaximalOrder, prime: &PrimeIdeal, x: &FieldElement) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let d = x.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let y: Vec<BigInt> = x.coords().iter().map(|c| (c * BigRat::from_integer(d.clone())).to_integer()).collect();
    Ok(valuation(order, prime, &y) as i64 - (prime.e * v_p(&d, &prime.p)) as i64)
}

/// Searches `pi` in `P` with `v_p(N(pi)) = f`, so that `P = (p, pi)`.
fn two_element(order: &MaximalOrder, ideal: &FractionalIdeal, p: &BigInt, f: u32) -> Option<Vec<BigInt>> {
    let n = order.degree();
    let rows = ideal.basis_rows();
    let ok = |x: &[BigInt]| x.iter().any(|c| !c.is_zero()) && v_p(&order.norm_int(x), p) == f;
    for r in &rows {
        if ok(r) {
            return Some(r.clone());
        }
        let shifted: Vec<BigInt> = r.iter().enumerate().map(|(k, c)| if k == 0 { c + p } else { c.clone() }).collect();
        if ok(&shifted) {
            return Some(shifted);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p.to_u64().unwrap_or(0));
    let span = p.to_i64().map_or(3, |q| q.min(4));
    for _ in 0..5000 {
        let mut x = vec![BigInt::zero(); n];
        for r in &rows {
            let c = BigInt::from(rng.gen_range(-span..=span));
            for (xk, rk) in x.iter_mut().zip(r) {
                *xk += &c * rk;
            }
        }
        if ok(&x) {
            return Some(x);
        }
    }
    None
}

/// Prime ideals above a rational prime `p`, sorted by norm and then by HNF.
/// Uses Dedekind-Kummer when `p` does not divide `[O : Z[x]]`, and the
/// splitting of `O / rad(pO)` otherwise.
pub fn factor_prime(order: &MaximalOrder, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if !p.is_positive() || !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let pu = p.to_u64().ok_or_else(|| Error::InvalidInput(format!("prime {p} exceeds 64 bits")))?;
    let n = order.degree();
    let mut subspaces = Vec::new();
    let mut kummer: Vec<(Vec<BigInt>, u32)> = Vec::new();
    if !order.index_divisible_by(p) {
        let theta = order.generator().int_coords().expect("x is integral");
        let theta_p = reduce_vec(&theta, pu);
        for (g, e) in fp::factor(&fp::from_ints(order.field().poly().coeffs(), pu), pu) {
            // g(theta) mod p by Horner
            let mut acc = vec![0u64; n];
            for &c in g.iter().rev() {
                acc = order.mul_mod_p(&acc, &theta_p, pu);
                acc[0] = (acc[0] + c) % pu;
            }
            let mut gens = vec![acc.clone()];
            for k in 1..n {
                gens.push(order.mul_mod_p(&acc, &unit(n, k), pu));
            }
            subspaces.push(Subspace::span(gens, pu));
            kummer.push((lift(&acc), e));
        }
    } else {
        split(order, radical(order, pu), pu, &mut subspaces);
    }
    let mut out = Vec::with_capacity(subspaces.len());
    for (idx, s) in subspaces.iter().enumerate() {
        let f = (n - s.dim()) as u32;
        let ideal = ideal_from_subspace(order, s, pu);
        let tau = anti_uniformizer(order, s, pu);
        let mut prime = PrimeIdeal { p: p.clone(), e: 0, f, ideal, generator: Vec::new(), anti_uniformizer: tau };
        prime.e = valuation(order, &prime, &order.from_integer(p).int_coords().unwrap());
        if let Some((_, e)) = kummer.get(idx) {
            if *e != prime.e {
                return Err(Error::Inconsistent(format!("ramification mismatch above {p}")));
            }
        }
        prime.generator = match two_element(order, &prime.ideal, p, f) {
            Some(g) => g,
            None => kummer.get(idx).map(|(g, _)| g.clone()).ok_or_else(|| Error::Inconsistent(format!("no two-element form above {p}")))?,
        };
        out.push(prime);
    }
    let total: u32 = out.iter().map(|q| q.e * q.f).sum();
    if total as usize != n {
        return Err(Error::Inconsistent(format!("sum of e*f above {p} is {total}, expected {n}")));
    }
    out.sort();
    Ok(out)
}

/// Factorization of a nonzero integral ideal over all primes dividing its
/// norm. `primes` supplies cached decompositions (looked up by `p`).
pub fn factor_ideal(
    order: &MaximalOrder,
    a: &FractionalIdeal,
    primes: &dyn Fn(&BigInt) -> Result<Vec<PrimeIdeal>>,
) -> Result<Vec<(PrimeIdeal, u32)>> {
    if !a.is_integral() {
        return Err(Error::InvalidInput("factor_ideal needs an integral ideal".into()));
    }
    let norm = a.norm().to_integer();
    let mut out = Vec::new();
    for (p, _) in crate::kernel::int::factor(&norm, &[]) {
        for q in primes(&p)? {
            let v = a.basis_rows().iter().filter(|r| r.iter().any(|c| !c.is_zero())).map(|r| valuation(order, &q, r)).min().unwrap_or(0);
            if v > 0 {
                out.push((q, v));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::element_ideal;
    use crate::numfield::NumberField;

    fn check_product(order: &MaximalOrder, ps: &[PrimeIdeal], p: &BigInt) {
        let mut acc = FractionalIdeal::unit(order.degree());
        for q in ps {
            acc = acc.mul(order, &q.ideal.pow(order, q.e));
        }
        assert_eq!(acc, element_ideal(order, &order.from_integer(p)).unwrap());
        for q in ps {
            let two = FractionalIdeal::from_generators(
                order,
                &[order.from_integer(p).int_coords().unwrap(), q.generator.clone()],
                &p.pow(order.degree() as u32),
            );
            assert_eq!(two, q.ideal, "two-element form");
        }
    }

    #[test]
    fn pure_cubic_three_totally_ramified() {
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(79)).unwrap()).unwrap();
        let ps = factor_prime(&o, &BigInt::from(3)).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].e, ps[0].f), (3, 1));
        check_product(&o, &ps, &BigInt::from(3));
    }

    #[test]
    fn eisenstein_five_inert() {
        let o = MaximalOrder::compute(&NumberField::eisenstein()).unwrap();
        let ps = factor_prime(&o, &BigInt::from(5)).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].e, ps[0].f), (1, 2));
    }

    #[test]
    fn index_divisor_two_in_sextic() {
        let c = NumberField::sextic(&BigInt::from(79)).unwrap();
        let o = MaximalOrder::compute(&c.field).unwrap();
        for p in [2, 3, 5, 7, 79, 97] {
            let p = BigInt::from(p);
            let ps = factor_prime(&o, &p).unwrap();
            check_product(&o, &ps, &p);
        }
        assert_eq!(factor_prime(&o, &BigInt::from(97)).unwrap().len(), 6);
    }

    #[test]
    fn ten_with_index_three() {
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(10)).unwrap()).unwrap();
        for p in [2, 3, 5, 7] {
            let p = BigInt::from(p);
            let ps = factor_prime(&o, &p).unwrap();
            check_product(&o, &ps, &p);
        }
        // 10 = 1 mod 9: 3 = P^2 Q
        let ps = factor_prime(&o, &BigInt::from(3)).unwrap();
        let mut ef: Vec<(u32, u32)> = ps.iter().map(|q| (q.e, q.f)).collect();
        ef.sort();
        assert_eq!(ef, vec![(1, 1), (2, 1)]);
    }
}
