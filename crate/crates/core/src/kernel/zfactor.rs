//! Factorization of monic integer polynomials (Zassenhaus: factor modulo a
//! small prime, Hensel-lift, recombine).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::fp;
use super::int::{primes_up_to, symmetric_mod};
use super::poly::IntPoly;

fn to_int_poly(f: &[u64]) -> IntPoly {
    IntPoly::new(f.iter().map(|&c| BigInt::from(c)).collect())
}

fn reduce_mod(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn sym_reduce(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| symmetric_mod(c, m)).collect())
}

/// One linear Hensel step sequence: lifts a coprime monic factorization
/// `f = g * h (mod p)` to `f = g * h (mod p^k)`.
fn hensel_lift(f: &IntPoly, g: &[u64], h: &[u64], p: u64, k: u32) -> (IntPoly, IntPoly) {
    // s*g + t*h = 1 mod p
    let (s, t) = fp_bezout(g, h, p);
    let pb = BigInt::from(p);
    let mut g_l = to_int_poly(g);
    let mut h_l = to_int_poly(h);
    let mut modulus = pb.clone();
    for _ in 1..k {
        let diff = f - &(&g_l * &h_l);
        let e: Vec<BigInt> = diff.coeffs().iter().map(|c| c / &modulus).collect();
        let e = fp::from_ints(&e, p);
        let dg = fp::rem(&fp::mul(&e, &t, p), g, p);
        let dh = fp::rem(&fp::mul(&e, &s, p), h, p);
        g_l = &g_l + &to_int_poly(&dg).scale(&modulus);
        h_l = &h_l + &to_int_poly(&dh).scale(&modulus);
        modulus *= &pb;
        g_l = reduce_mod(&g_l, &modulus);
        h_l = reduce_mod(&h_l, &modulus);
    }
    (g_l, h_l)
}

fn fp_bezout(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    // extended Euclid over F_p[x]
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![1], vec![]);
    let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp::div_rem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let ns = fp::sub(&s0, &fp::mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, ns);
        let nt = fp::sub(&t0, &fp::mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, nt);
    }
    assert_eq!(r0.len(), 1, "factors are not coprime mod {p}");
    let inv = super::int::inv_mod_u64(r0[0], p);
    (fp::scale(&s0, inv, p), fp::scale(&t0, inv, p))
}

/// Factors a monic squarefree polynomial of degree >= 1 into monic
/// irreducible factors over Z, sorted by (degree, coefficients).
fn zassenhaus(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.degree();
    if n <= 1 {
        return vec![f.clone()];
    }
    let disc_free = |p: u64| {
        let fp_ = fp::from_ints(f.coeffs(), p);
        fp::gcd(&fp_, &fp::derivative(&fp_, p), p).len() == 1
    };
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    for p in primes_up_to(2000) {
        if !disc_free(p) {
            continue;
        }
        let fs: Vec<Vec<u64>> = fp::factor(&fp::from_ints(f.coeffs(), p), p).into_iter().map(|(g, _)| g).collect();
        if fs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        tried += 1;
        if tried >= 6 {
            break;
        }
    }
    let (p, mod_factors) = best.expect("no good prime below 2000");
    // Mignotte-style bound on factor coefficients.
    let norm1: BigInt = f.coeffs().iter().map(|c| c.abs()).sum();
    let bound = (BigInt::one() << (n + 1)) * norm1;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    // Lift factors one at a time.
    let mut lifted = Vec::new();
    let mut rest = f.clone();
    for i in 0..mod_factors.len() - 1 {
        let g = &mod_factors[i];
        let h_mod = mod_factors[i + 1..].iter().fold(vec![1u64], |acc, x| fp::mul(&acc, x, p));
        let (gl, hl) = hensel_lift(&rest, g, &h_mod, p, k);
        lifted.push(gl);
        rest = hl;
    }
    lifted.push(rest);

    // Recombination.
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut target = f.clone();
    let mut factors = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in subsets(remaining.len(), size) {
            let idx: Vec<usize> = subset.iter().map(|&s| remaining[s]).collect();
            let prod = idx.iter().fold(IntPoly::constant(BigInt::one()), |acc, &i| reduce_mod(&(&acc * &lifted[i]), &modulus));
            let cand = sym_reduce(&prod, &modulus);
            if let Some(q) = target.exact_div(&cand) {
                factors.push(cand);
                target = q;
                remaining.retain(|r| !idx.contains(r));
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if target.degree() >= 1 {
        factors.push(target);
    }
    factors.sort();
    factors.sort_by_key(|g| g.degree());
    factors
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Factorization of a monic polynomial over Z into monic irreducibles with
/// multiplicities.
pub fn factor_monic(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    assert!(f.is_monic(), "factor_monic needs a monic polynomial");
    let mut out: Vec<(IntPoly, u32)> = Vec::new();
    // Squarefree decomposition over Q; all pieces stay monic with integer
    // coefficients by Gauss's lemma.
    let fr = f.to_rat();
    let mut c = fr.gcd(&fr.derivative());
    let mut w = fr.div_rem(&c).0;
    let mut mult = 1;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0.monic();
        if z.degree() > 0 {
            let zi = z.to_int().expect("monic factor of a monic integer polynomial");
            for g in zassenhaus(&zi) {
                out.push((g, mult));
            }
        }
        mult += 1;
        c = c.div_rem(&y).0;
        w = y;
    }
    out.sort();
    out.sort_by_key(|(g, _)| g.degree());
    out
}

/// `Ok(())` when `f` is irreducible over Q, otherwise a nontrivial factor.
pub fn irreducibility_witness(f: &IntPoly) -> Result<(), IntPoly> {
    let fs = factor_monic(f);
    if fs.len() == 1 && fs[0].1 == 1 {
        Ok(())
    } else {
        Err(fs[0].0.clone())
    }
}
