//! Imaginary quadratic class numbers against a reduced-form count that
//! shares no code with the relation engine.

use std::sync::Arc;

use num_bigint::BigInt;
use s3tower::classgrp::{class_group, is_principal, Verdict};
use s3tower::ideal::{element_ideal, factor_prime};
use s3tower::kernel::IntPoly;
use s3tower::numfield::{build_field, MaximalOrder};

#[path = "support/forms.rs"]
mod forms;

use forms::{is_fundamental, reduced_forms};

fn quadratic_order(d: i64) -> Arc<MaximalOrder> {
    let f = if d % 4 == 0 { vec![-d / 4, 0, 1] } else { vec![(1 - d) / 4, -1, 1] };
    Arc::new(MaximalOrder::compute(&build_field(&IntPoly::from_i64s(&f)).unwrap()).unwrap())
}

#[test]
fn oracle_matches_known_values() {
    for (d, h) in [(-3, 1), (-4, 1), (-20, 2), (-23, 3), (-47, 5), (-71, 7), (-163, 1)] {
        assert_eq!(reduced_forms(d), h, "d = {d}");
    }
}

#[test]
fn named_fields() {
    for (d, h) in [(-3, 1), (-4, 1), (-20, 2), (-23, 3)] {
        let order = quadratic_order(d);
        assert_eq!(order.disc(), &BigInt::from(d));
        let cg = class_group(&order).unwrap();
        assert_eq!(cg.class_number, BigInt::from(h), "d = {d}");
        assert_eq!(reduced_forms(d), h);
    }
}

#[test]
fn fundamental_discriminants_down_to_minus_400() {
    for d in (-400..=-3).rev().filter(|&d| is_fundamental(d)) {
        let cg = class_group(&quadratic_order(d)).unwrap();
        assert_eq!(cg.class_number, BigInt::from(reduced_forms(d)), "d = {d}");
    }
}

#[test]
fn principality_follows_the_class() {
    // Q(sqrt -23): primes above 2 have order 3
    let order = quadratic_order(-23);
    let cg = class_group(&order).unwrap();
    let p = factor_prime(&order, &BigInt::from(2)).unwrap().remove(0);
    let mut power = p.ideal.clone();
    for k in 1..=3 {
        let w = is_principal(&cg, &power).unwrap();
        if k < 3 {
            assert_eq!(w.verdict, Verdict::NotPrincipal);
        } else {
            assert_eq!(w.verdict, Verdict::Principal);
            assert_eq!(element_ideal(&order, &w.generator.unwrap()).unwrap(), power);
        }
        power = power.mul(&order, &p.ideal);
    }
}
