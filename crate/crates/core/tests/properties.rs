//! Randomized invariants of the exact kernel, orders and ideals.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use s3tower::classgrp::{class_group, is_principal, ClassGroupData, Verdict};
use s3tower::ideal::{element_ideal, factor_prime, FractionalIdeal};
use s3tower::kernel::int::primes_up_to;
use s3tower::kernel::matrix::rat_inverse;
use s3tower::kernel::{short_vectors, BigRat, IntMatrix, LatticeBasis};
use s3tower::numfield::{FieldElement, MaximalOrder, NumberField};

fn orders() -> &'static [Arc<MaximalOrder>] {
    static ORDERS: OnceLock<Vec<Arc<MaximalOrder>>> = OnceLock::new();
    ORDERS.get_or_init(|| {
        let mut v = Vec::new();
        for m in [2, 10, 19, 79] {
            let m = BigInt::from(m);
            v.push(Arc::new(MaximalOrder::compute(&NumberField::pure_cubic(&m).unwrap()).unwrap()));
        }
        for m in [2, 79] {
            let c = NumberField::sextic(&BigInt::from(m)).unwrap();
            v.push(Arc::new(MaximalOrder::compute(&c.field).unwrap()));
        }
        v
    })
}

/// Class groups of `Q(∛79)` and `Q(ω, ∛2)`.
fn class_groups() -> &'static [ClassGroupData] {
    static GROUPS: OnceLock<Vec<ClassGroupData>> = OnceLock::new();
    GROUPS.get_or_init(|| [&orders()[3], &orders()[4]].into_iter().map(|o| class_group(o).unwrap()).collect())
}

fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn element(order: &MaximalOrder, coords: &[i64]) -> Option<FieldElement> {
    let c = int_vec(&coords[..order.degree()]);
    c.iter().any(|x| !x.is_zero()).then(|| FieldElement::from_int_coords(&c))
}

fn random_ideal(order: &MaximalOrder, x: &[i64], y: &[i64]) -> Option<FractionalIdeal> {
    let a = element_ideal(order, &element(order, x)?).ok()?;
    let b = element_ideal(order, &element(order, y)?).ok()?;
    Some(a.add(&b))
}

fn is_canonical_hnf(h: &IntMatrix) -> bool {
    let mut col = 0;
    let mut zero_rows = false;
    for r in 0..h.nrows() {
        let row = h.row(r);
        match row.iter().position(|x| !x.is_zero()) {
            None => zero_rows = true,
            Some(c) => {
                if zero_rows || (r > 0 && c < col) || !row[c].is_positive() {
                    return false;
                }
                if (0..r).any(|i| h[(i, c)].is_negative() || h[(i, c)] >= row[c]) {
                    return false;
                }
                col = c + 1;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn degrees_sum_to_n(k in 0usize..6, pi in 0usize..60) {
        let order = &orders()[k];
        let p = primes_up_to(300)[pi];
        let primes = factor_prime(order, &BigInt::from(p)).unwrap();
        let sum: u32 = primes.iter().map(|q| q.e * q.f).sum();
        prop_assert_eq!(sum as usize, order.degree());
        for q in &primes {
            prop_assert_eq!(q.ideal.norm().to_integer(), BigInt::from(p).pow(q.f));
        }
    }

    #[test]
    fn norm_is_multiplicative(
        k in 0usize..6,
        x in prop::collection::vec(-6i64..=6, 6),
        y in prop::collection::vec(-6i64..=6, 6),
        z in prop::collection::vec(-6i64..=6, 6),
        w in prop::collection::vec(-6i64..=6, 6),
    ) {
        let order = &orders()[k];
        let (Some(a), Some(b)) = (random_ideal(order, &x, &y), random_ideal(order, &z, &w)) else {
            return Ok(());
        };
        prop_assert_eq!(a.mul(order, &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn element_ideal_norm(k in 0usize..6, x in prop::collection::vec(-9i64..=9, 6)) {
        let order = &orders()[k];
        let Some(e) = element(order, &x) else { return Ok(()) };
        let a = element_ideal(order, &e).unwrap();
        prop_assert_eq!(a.norm(), order.norm(&e).abs());
    }

    #[test]
    fn hnf_is_canonical_and_unimodular(
        rows in 1usize..6,
        cols in 1usize..6,
        entries in prop::collection::vec(-20i64..=20, 36),
        ops in prop::collection::vec((0usize..6, 0usize..6, -3i64..=3), 0..12),
    ) {
        let m = IntMatrix::from_rows((0..rows).map(|r| int_vec(&entries[r * 6..r * 6 + cols])).collect());
        let (h, t) = m.hnf();
        prop_assert_eq!(t.mul(&m), h.clone());
        prop_assert_eq!(t.det().abs(), BigInt::from(1));
        prop_assert!(is_canonical_hnf(&h));
        // the form depends only on the row lattice
        let mut u = m.to_rows();
        for (i, j, c) in ops {
            let (i, j) = (i % rows, j % rows);
            if i != j {
                let src = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(&src) {
                    *x += y * c;
                }
            } else {
                u[i].iter_mut().for_each(|x| *x = -x.clone());
            }
        }
        let (h2, _) = IntMatrix::from_rows(u).hnf();
        prop_assert_eq!(h2, h);
    }

    #[test]
    fn short_vectors_match_box_search(
        n in 1usize..=4,
        entries in prop::collection::vec(-5i64..=5, 16),
        bound in 1i64..80,
    ) {
        let rows: Vec<Vec<i64>> = (0..n).map(|r| entries[r * 4..r * 4 + n].to_vec()).collect();
        let basis = LatticeBasis::from_integers(&rows);
        let gram = basis.gram();
        let Some(inv) = rat_inverse(&gram) else { return Ok(()) };
        let b = BigRat::from_integer(BigInt::from(bound));
        let found: BTreeSet<Vec<BigInt>> = short_vectors(&basis, &b).unwrap().into_iter().map(|v| v.coeffs).collect();
        // |x_i|^2 <= bound (G^-1)_ii
        let radius: Vec<i64> = (0..n)
            .map(|i| ((bound as f64) * inv[i][i].to_f64().unwrap()).sqrt().floor() as i64 + 1)
            .collect();
        let mut expected = BTreeSet::new();
        let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
        'outer: loop {
            let first = x.iter().find(|c| **c != 0);
            if first.is_some_and(|c| *c > 0) {
                let q: i64 = (0..n).map(|i| (0..n).map(|j| x[i] * x[j] * gram[i][j].to_integer().to_i64().unwrap()).sum::<i64>()).sum();
                if q <= bound {
                    expected.insert(int_vec(&x));
                }
            }
            for i in 0..n {
                if x[i] < radius[i] {
                    x[i] += 1;
                    continue 'outer;
                }
                x[i] = -radius[i];
            }
            break;
        }
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn principal_ideals_are_recognized(k in 0usize..2, x in prop::collection::vec(-7i64..=7, 6)) {
        let cg = &class_groups()[k];
        let order = cg.order();
        let Some(e) = element(order, &x) else { return Ok(()) };
        let a = element_ideal(order, &e).unwrap();
        let w = is_principal(cg, &a).unwrap();
        prop_assert_eq!(w.verdict, Verdict::Principal);
        let g = w.generator.unwrap();
        prop_assert_eq!(element_ideal(order, &g).unwrap(), a);
        // a generator differs from x by a unit
        prop_assert_eq!(order.norm(&g).abs(), order.norm(&e).abs());
    }
}
