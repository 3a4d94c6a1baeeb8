//! Polynomials and linear algebra over a prime field `F_p`, `p < 2^63`.
//!
//! A polynomial is a little-endian `Vec<u64>` with no trailing zeros.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::int::{inv_mod_u64, mul_mod_u64};

pub type FpPoly = Vec<u64>;

fn trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn from_ints(coeffs: &[num_bigint::BigInt], p: u64) -> FpPoly {
    trim(coeffs.iter().map(|c| super::int::mod_u64(c, p)).collect())
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let s = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect(),
    )
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                if x >= y {
                    x - y
                } else {
                    x + p - y
                }
            })
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % pp;
        }
    }
    trim(out.into_iter().map(|x| x as u64).collect())
}

pub fn scale(a: &[u64], k: u64, p: u64) -> FpPoly {
    trim(a.iter().map(|&x| mul_mod_u64(x, k, p)).collect())
}

pub fn monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => scale(a, inv_mod_u64(lc, p), p),
    }
}

pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let inv = inv_mod_u64(*b.last().unwrap(), p);
    let mut rem = a.to_vec();
    let mut quot = vec![0u64; a.len() - db];
    for i in (db..rem.len()).rev() {
        if rem[i] == 0 {
            continue;
        }
        let c = mul_mod_u64(rem[i], inv, p);
        quot[i - db] = c;
        for (j, &bc) in b.iter().enumerate() {
            let t = mul_mod_u64(c, bc, p);
            let x = rem[i - db + j];
            rem[i - db + j] = if x >= t { x - t } else { x + p - t };
        }
    }
    (trim(quot), trim(rem))
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    div_rem(a, b, p).1
}

/// Monic gcd.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub fn derivative(a: &[u64], p: u64) -> FpPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod_u64(c, i as u64 % p, p)).collect())
}

/// `base^exp mod modulus`.
pub fn pow_mod(base: &[u64], mut exp: u128, modulus: &[u64], p: u64) -> FpPoly {
    let mut acc: FpPoly = vec![1];
    let mut b = rem(base, modulus, p);
    acc = rem(&acc, modulus, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), modulus, p);
        }
        b = rem(&mul(&b, &b, p), modulus, p);
        exp >>= 1;
    }
    acc
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0u64, |acc, &c| (mul_mod_u64(acc, x, p) + c) % p)
}

/// `a^(1/p)` for a polynomial whose derivative vanishes.
fn pth_root(a: &[u64], p: u64) -> FpPoly {
    // Coefficients are fixed by Frobenius on F_p, so only exponents shrink.
    trim(a.iter().step_by(p as usize).copied().collect())
}

/// Squarefree decomposition of a monic polynomial: pairs `(g, m)` with
/// `a = prod g^m` and each `g` squarefree.
pub fn squarefree_decomposition(a: &[u64], p: u64) -> Vec<(FpPoly, u32)> {
    let a = monic(a, p);
    let mut out = Vec::new();
    if a.len() <= 1 {
        return out;
    }
    let d = derivative(&a, p);
    if d.is_empty() {
        for (g, m) in squarefree_decomposition(&pth_root(&a, p), p) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = gcd(&a, &d, p);
    let mut w = div_rem(&a, &c, p).0;
    let mut i = 1u32;
    while w.len() > 1 {
        let y = gcd(&w, &c, p);
        let z = div_rem(&w, &y, p).0;
        if z.len() > 1 {
            out.push((monic(&z, p), i));
        }
        i += 1;
        w = y;
        c = div_rem(&c, &w, p).0;
    }
    if c.len() > 1 {
        for (g, m) in squarefree_decomposition(&pth_root(&c, p), p) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &[u64], p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x: FpPoly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            let deg = rest.len() - 1;
            out.push((rest.clone(), deg));
            break;
        }
        h = pow_mod(&h, p as u128, &rest, p);
        let g = gcd(&sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            out.push((g.clone(), d));
            rest = div_rem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
        }
    }
    out
}

/// Splits a monic squarefree product of degree-`d` irreducibles.
fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let g = gcd(&a, f, p);
        let candidate = if g.len() > 1 {
            g
        } else if p == 2 {
            // Trace map a + a^2 + ... + a^(2^(d-1)).
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), f, p);
                acc = add(&acc, &t, p);
            }
            gcd(&acc, f, p)
        } else {
            // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            let mut t = a.clone();
            let mut norm = rem(&a, f, p);
            for _ in 1..d {
                t = pow_mod(&t, p as u128, f, p);
                norm = rem(&mul(&norm, &t, p), f, p);
            }
            let b = pow_mod(&norm, ((p - 1) / 2) as u128, f, p);
            gcd(&sub(&b, &[1], p), f, p)
        };
        if candidate.len() > 1 && candidate.len() < f.len() {
            let other = div_rem(f, &candidate, p).0;
            let mut out = equal_degree(&candidate, d, p, rng);
            out.extend(equal_degree(&monic(&other, p), d, p, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by (degree, coefficients from the top down).
pub fn factor(a: &[u64], p: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(a, p) {
        for (h, d) in distinct_degree(&g, p) {
            for irr in equal_degree(&h, d, p, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
    out
}

/// Roots in `F_p`, ascending.
pub fn roots(a: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = factor(a, p).into_iter().filter(|(g, _)| g.len() == 2).map(|(g, _)| (p - g[0]) % p).collect();
    r.sort_unstable();
    r
}

/// Reduced row-echelon form in place; returns the pivot columns.
pub fn row_reduce(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = inv_mod_u64(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul_mod_u64(*x, inv, p);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c] == 0 {
                continue;
            }
            let f = rows[i][c];
            for j in 0..ncols {
                let t = mul_mod_u64(f, rows[r][j], p);
                rows[i][j] = (rows[i][j] + p - t) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of the left kernel `{x : x * m = 0}` of an `r x c` matrix.
pub fn left_kernel(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let r = m.len();
    if r == 0 {
        return Vec::new();
    }
    let c = m[0].len();
    // Right kernel of the transpose.
    let mut t: Vec<Vec<u64>> = (0..c).map(|j| (0..r).map(|i| m[i][j] % p).collect()).collect();
    if c == 0 {
        return (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect();
    }
    let pivots = row_reduce(&mut t, p);
    let free: Vec<usize> = (0..r).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![0u64; r];
            v[fcol] = 1;
            for (row, &pc) in t.iter().zip(&pivots) {
                v[pc] = (p - row[fcol]) % p;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(FpPoly, u32)], p: u64) -> FpPoly {
        let mut acc = vec![1];
        for (g, m) in fs {
            for _ in 0..*m {
                acc = mul(&acc, g, p);
            }
        }
        acc
    }

    #[test]
    fn factors_reproduce_input() {
        let cases: &[(&[u64], u64)] = &[
            (&[1, 1, 1], 5),
            (&[2, 0, 0, 1], 7),
            (&[1, 0, 0, 0, 0, 0, 1], 2),
            (&[3, 1, 4, 1, 5, 9, 2, 6, 1], 13),
            (&[0, 0, 1, 1], 3),
            (&[1, 0, 0, 1], 3),
        ];
        for &(f, p) in cases {
            let fs = factor(f, p);
            assert_eq!(product(&fs, p), monic(f, p), "p={p} f={f:?}");
            for (g, _) in &fs {
                let d = g.len() - 1;
                // irreducible of degree d divides x^(p^d) - x and no smaller
                let x = vec![0, 1];
                let mut h = x.clone();
                for k in 1..=d {
                    h = pow_mod(&h, p as u128, g, p);
                    if k < d && d > 1 {
                        assert!(gcd(&sub(&h, &x, p), g, p).len() == 1);
                    }
                }
                assert!(sub(&h, &x, p).is_empty() || rem(&sub(&h, &x, p), g, p).is_empty());
            }
        }
    }

    #[test]
    fn cyclotomic_splitting_patterns() {
        // x^2+x+1 is inert mod 5, splits mod 7, ramifies mod 3
        assert_eq!(factor(&[1, 1, 1], 5).len(), 1);
        assert_eq!(roots(&[1, 1, 1], 7), vec![2, 4]);
        assert_eq!(factor(&[1, 1, 1], 3), vec![(vec![2, 1], 2)]);
    }

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let k = left_kernel(&m, 7);
        assert_eq!(k.len(), 1);
        for v in &k {
            for j in 0..3 {
                let s: u64 = (0..3).map(|i| v[i] * m[i][j]).sum::<u64>() % 7;
                assert_eq!(s, 0);
            }
        }
    }
}
