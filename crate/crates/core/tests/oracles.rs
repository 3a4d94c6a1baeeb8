//! Congruence-level claims checked exhaustively or against direct
//! computation.

use num_bigint::BigInt;
use s3tower::ideal::factor_prime;
use s3tower::kernel::int::primes_up_to;
use s3tower::numfield::{MaximalOrder, NumberField};
use s3tower::tower::{d3_units, min_class_number, schoof_inequality, select_delta, totally_ramified_at_3, DeltaCase, Mode};

fn units_mod_9() -> Vec<u64> {
    (1..9).filter(|r| r % 3 != 0).collect()
}

fn plus_minus_one(r: u64) -> bool {
    r % 9 == 1 || r % 9 == 8
}

/// Smallest prime `> 3` in the class `r mod 9`, other than `avoid`.
fn prime_in_class(r: u64, avoid: u64) -> u64 {
    primes_up_to(1000).into_iter().find(|&p| p > 3 && p % 9 == r && p != avoid).expect("Dirichlet")
}

#[test]
fn lemma_agrees_with_factorization_below_300() {
    for p in primes_up_to(299).into_iter().filter(|&p| p != 3) {
        let m = BigInt::from(p);
        let predicted = totally_ramified_at_3(&m).unwrap();
        let order = MaximalOrder::compute(&NumberField::pure_cubic(&m).unwrap()).unwrap();
        let threes = factor_prime(&order, &BigInt::from(3)).unwrap();
        let total = threes.len() == 1 && threes[0].e == 3;
        assert_eq!(predicted, total, "p = {p}");
    }
}

#[test]
fn pure_cubic_discriminants() {
    let squarefree = |m: i64| (2..=7).all(|k: i64| m % (k * k) != 0);
    for m in (2..=50).filter(|&m| squarefree(m)) {
        let order = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(m)).unwrap()).unwrap();
        let k = if plus_minus_one(m as u64) { 3 } else { 27 };
        assert_eq!(order.disc(), &BigInt::from(-k * m * m), "m = {m}");
    }
}

#[test]
fn delta_selection_over_all_residue_pairs() {
    for rp in units_mod_9() {
        for rq in units_mod_9() {
            let p = prime_in_class(rp, 0);
            let q = prime_in_class(rq, p);
            let d = select_delta(p, q).unwrap();
            assert_eq!(d.residue_mod_9 as u64, (rp.pow(d.a) * rq.pow(d.b)) % 9);
            let expected = match (plus_minus_one(rp), plus_minus_one(rq)) {
                (false, _) => DeltaCase::I,
                (true, false) => DeltaCase::II,
                (true, true) => DeltaCase::III,
            };
            assert_eq!(d.case, expected, "p = {p}, q = {q}");
            if d.case != DeltaCase::III {
                assert!(!plus_minus_one(d.residue_mod_9 as u64), "p = {p}, q = {q}: δ ≡ ±1");
            }
            if d.case == DeltaCase::I && d.b == 2 {
                assert!(plus_minus_one(rp * rq % 9), "pq² chosen although pq works");
            }
        }
    }
}

#[test]
fn some_power_product_is_plus_minus_one_when_p_is_not() {
    for rp in units_mod_9().into_iter().filter(|&r| !plus_minus_one(r)) {
        for rq in units_mod_9() {
            let set = [rq, rp * rq % 9, rp * rq * rq % 9];
            assert!(set.iter().any(|&g| plus_minus_one(g)), "rp = {rp}, rq = {rq}");
        }
    }
    // outside that case the set can miss ±1 entirely
    let set = [2u64, 2, 4];
    assert!(set.iter().all(|&g| !plus_minus_one(g)));
}

#[test]
fn schoof_exact_matches_floating_point() {
    for mode in [Mode::Unconditional, Mode::Conditional] {
        for h in 1..=1000u64 {
            let c = schoof_inequality(h, mode).unwrap();
            let t = if mode == Mode::Unconditional { 3.0 * h as f64 } else { 0.0 };
            let float = 6.0 * h as f64 >= 3.0 + t + 2.0 * (9.0 * h as f64 + 1.0).sqrt();
            assert_eq!(c.verdict, float, "h = {h}, {mode}");
        }
    }
}

#[test]
fn min_class_number_scan() {
    for (mode, expected) in [(Mode::Unconditional, 6), (Mode::Conditional, 2)] {
        let m = min_class_number(mode);
        assert_eq!(m, expected);
        for h in 1..m {
            assert!(!schoof_inequality(h, mode).unwrap().verdict);
        }
        assert!(schoof_inequality(m, mode).unwrap().verdict);
    }
}

#[test]
fn unit_ranks_of_tower_fields() {
    for h in 1..=50u64 {
        assert_eq!(d3_units(6 * h, 0, 3 * h, true).unwrap(), 3 * h);
        assert_eq!(d3_units(18 * h, 0, 9 * h, true).unwrap(), 9 * h);
        let c = schoof_inequality(h, Mode::Unconditional).unwrap();
        assert_eq!((c.d3_oh, c.d3_ol, c.rho_lower), (3 * h, 9 * h, 6 * h));
    }
    assert!(d3_units(6, 2, 2, false).is_ok());
    assert!(d3_units(6, 2, 1, false).is_err());
    assert!(d3_units(6, 2, 2, true).is_err());
}
