//! Integer helpers: primality, factorization, roots and gcd variants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &MR_BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin with the first twelve prime bases; deterministic below
/// 3.3e24 and a strong probable-prime test above.
pub fn is_prime(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the
/// composite `n`.
fn pollard_brent(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factor(out: &mut Vec<(BigInt, u32)>, p: BigInt, e: u32) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        out.push((p, e));
    }
}

fn factor_rec(n: BigInt, out: &mut Vec<(BigInt, u32)>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        push_factor(out, n, 1);
        return;
    }
    if let Some(r) = exact_root(&n, 2) {
        let mut sub = Vec::new();
        factor_rec(r, &mut sub);
        for (p, e) in sub {
            push_factor(out, p, 2 * e);
        }
        return;
    }
    let d = pollard_brent(&n);
    let other = &n / &d;
    factor_rec(d, out);
    factor_rec(other, out);
}

/// Factors `|n|` into primes, sorted ascending. `hints` are candidate prime
/// divisors tried before trial division and Pollard rho.
pub fn factor(n: &BigInt, hints: &[BigInt]) -> Vec<(BigInt, u32)> {
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if m.is_zero() {
        return out;
    }
    let strip = |m: &mut BigInt, p: &BigInt, out: &mut Vec<(BigInt, u32)>| {
        let mut e = 0;
        while (&*m % p).is_zero() {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            push_factor(out, p.clone(), e);
        }
    };
    for h in hints {
        let h = h.abs();
        if h > BigInt::one() && is_prime(&h) {
            strip(&mut m, &h, &mut out);
        }
    }
    for p in primes_up_to(10_000) {
        if m.is_one() {
            break;
        }
        strip(&mut m, &BigInt::from(p), &mut out);
    }
    factor_rec(m, &mut out);
    out.sort();
    out
}

/// `Some(r)` when `n = r^k` for a nonnegative integer `r`.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 1 {
            return exact_root(&-n, k).map(|r| -r);
        }
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

pub fn is_perfect_cube(n: &BigInt) -> bool {
    exact_root(n, 3).is_some()
}

/// Floor of the k-th root of a nonnegative integer.
pub fn floor_root(n: &BigInt, k: u32) -> BigInt {
    assert!(!n.is_negative(), "floor_root of a negative integer");
    n.nth_root(k)
}

/// Extended gcd with `g >= 0` and `a*x + b*y = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let (g, x, _) = ext_gcd(&BigInt::from(a % p), &BigInt::from(p));
    assert!(g.is_one(), "{a} is not invertible mod {p}");
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Reduces `a` into `[0, m)`.
pub fn mod_u64(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Symmetric residue of `a` modulo `m`, in `(-m/2, m/2]`.
pub fn symmetric_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_and_miller_rabin_agree() {
        let sieve = primes_up_to(5000);
        let mr: Vec<u64> = (0..=5000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(&"170141183460469231731687303715884105727".parse().unwrap()));
        assert!(!is_prime(&"170141183460469231731687303715884105729".parse().unwrap()));
    }

    #[test]
    fn factors_mixed_sizes() {
        let n: BigInt = BigInt::from(2u64).pow(5) * 3 * BigInt::from(1_000_003u64).pow(2) * BigInt::from(998_244_353u64);
        let f = factor(&n, &[]);
        assert_eq!(f, vec![(BigInt::from(2), 5), (BigInt::from(3), 1), (BigInt::from(1_000_003), 2), (BigInt::from(998_244_353), 1)]);
        let g = factor(&BigInt::from(-3 * 3 * 79 * 79 * 97i64), &[BigInt::from(79)]);
        assert_eq!(g, vec![(BigInt::from(3), 2), (BigInt::from(79), 2), (BigInt::from(97), 1)]);
    }

    #[test]
    fn roots_and_cubes() {
        assert!(is_perfect_cube(&BigInt::from(-27)));
        assert!(!is_perfect_cube(&BigInt::from(7663)));
        assert_eq!(floor_root(&BigInt::from(1000), 3), BigInt::from(10));
        assert_eq!(floor_root(&BigInt::from(999), 3), BigInt::from(9));
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(4i64, 6i64), (-15, 35), (0, 7), (7, 0), (-3, -9)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let (g, x, y) = ext_gcd(&a, &b);
            assert_eq!(&a * x + &b * y, g);
            assert_eq!(g, a.gcd(&b));
        }
    }
}
