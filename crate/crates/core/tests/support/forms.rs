//! Binary quadratic forms, independent of the library.

#![allow(dead_code)]

/// Number of reduced primitive forms `ax^2 + bxy + cy^2` of discriminant
/// `d < 0`: `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
pub fn reduced_forms(d: i64) -> u64 {
    let gcd = |mut x: i64, mut y: i64| {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x.abs()
    };
    let mut h = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b), c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

pub fn is_fundamental(d: i64) -> bool {
    let squarefree = |n: i64| (2..).take_while(|k| k * k <= n).all(|k| n % (k * k) != 0);
    match d.rem_euclid(4) {
        1 => squarefree(-d),
        0 => {
            let m = -d / 4;
            (m % 4 == 1 || m % 4 == 2) && squarefree(m)
        }
        _ => false,
    }
}
