//! One line per acceptance criterion; exits nonzero if any line fails.
//! Runs without the test harness so the lines always reach the output.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use s3tower::classgrp::{class_group, is_principal, Verdict};
use s3tower::ideal::{element_ideal, factor_prime};
use s3tower::kernel::int::primes_up_to;
use s3tower::kernel::matrix::rat_inverse;
use s3tower::kernel::{short_vectors, BigRat, IntMatrix, IntPoly, LatticeBasis};
use s3tower::numfield::{build_field, FieldElement, MaximalOrder, NumberField};
use s3tower::tower::{min_class_number, select_delta, totally_ramified_at_3, BaseField, CertifyOptions, DeltaCase, Mode, TowerCertificate};
use serde_json::Value;

#[path = "../../core/tests/support/forms.rs"]
mod forms;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let line = format!("[{}] {id:>2}. {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn plus_minus_one(r: u64) -> bool {
    r % 9 == 1 || r % 9 == 8
}

fn lemma_oracle() -> (bool, String) {
    let start = Instant::now();
    let primes: Vec<u64> = primes_up_to(299).into_iter().filter(|&p| p != 3).collect();
    let agree = primes
        .iter()
        .filter(|&&p| {
            let predicted = totally_ramified_at_3(&int(p as i64)).unwrap();
            let order = MaximalOrder::compute(&NumberField::pure_cubic(&int(p as i64)).unwrap()).unwrap();
            let threes = factor_prime(&order, &int(3)).unwrap();
            predicted == (threes.len() == 1 && threes[0].e == 3)
        })
        .count();
    let secs = start.elapsed().as_secs_f64();
    (agree == primes.len() && secs < 60.0, format!("{agree}/{} primes agree in {secs:.2} s (limit 60 s)", primes.len()))
}

fn pure_cubic_discriminants() -> (bool, String) {
    let squarefree = |m: i64| (2..=7).all(|k: i64| m % (k * k) != 0);
    let ms: Vec<i64> = (2..=50).filter(|&m| squarefree(m)).collect();
    let bad: Vec<i64> = ms
        .iter()
        .copied()
        .filter(|&m| {
            let order = MaximalOrder::compute(&NumberField::pure_cubic(&int(m)).unwrap()).unwrap();
            let k = if plus_minus_one(m as u64) { 3 } else { 27 };
            order.disc() != &int(-k * m * m)
        })
        .collect();
    (bad.is_empty(), format!("{} squarefree m checked, mismatches {bad:?}", ms.len()))
}

fn run_certify(cache: Option<&Path>) -> (i32, Vec<u8>, f64) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_s3tower"));
    cmd.env_remove("S3TOWER_CACHE_DIR");
    match cache {
        Some(d) => cmd.arg("--cache-dir").arg(d),
        None => cmd.arg("--no-cache"),
    };
    let start = Instant::now();
    let o = cmd.args(["certify", "-p", "79", "-q", "97"]).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), o.stdout, start.elapsed().as_secs_f64())
}

fn check_certificate(body: &[u8]) -> (bool, String) {
    let Ok(v) = serde_json::from_slice::<Value>(body) else { return (false, "output is not JSON".into()) };
    let rd = v["root_discriminant"]["value"].as_f64().unwrap_or(0.0);
    let checks = [
        ("delta", v["delta"]["value"] == 7663),
        ("lhs", v["inequality"]["lhs"] == 72),
        ("rhs", v["inequality"]["rhs"] == "39 + 2*sqrt(109)"),
        ("squared comparison", v["inequality"]["rhs_squared_comparison"] == "(72 - 39)^2 = 1089 >= 4*(108 + 1) = 436"),
        ("verdict", v["inequality"]["verdict"] == true),
        ("rd", (rd - 1400.4).abs() <= 0.1),
        ("h", v["h"] == 12),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let round_trip =
        std::str::from_utf8(body).ok().and_then(|s| TowerCertificate::from_json(s).ok().map(|c| c.to_json() == s)).unwrap_or(false);
    (
        failed.is_empty() && round_trip,
        format!("δ = {}, 72 >= 39 + 2√109 exact, rd = {rd:.6}, JSON round-trip {round_trip}, failed {failed:?}", v["delta"]["value"]),
    )
}

fn small_class_groups() -> (bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, d, h) in [("Q(ω)", -3i64, 1u64), ("Q(i)", -4, 1), ("Q(√-5)", -20, 2), ("Q(√-23)", -23, 3)] {
        let f = if d % 4 == 0 { vec![-d / 4, 0, 1] } else { vec![(1 - d) / 4, -1, 1] };
        let order = Arc::new(MaximalOrder::compute(&build_field(&IntPoly::from_i64s(&f)).unwrap()).unwrap());
        let engine = class_group(&order).map(|c| c.class_number.to_string()).unwrap_or_else(|e| e.to_string());
        let oracle = forms::reduced_forms(d);
        ok &= engine == h.to_string() && oracle == h;
        parts.push(format!("{name} engine {engine} oracle {oracle}"));
    }
    (ok, parts.join(", "))
}

/// Deterministic samples of the randomized property suites.
fn properties() -> (bool, String) {
    let mut failures = Vec::new();
    let orders: Vec<MaximalOrder> = [NumberField::pure_cubic(&int(79)).unwrap(), NumberField::sextic(&int(79)).unwrap().field]
        .iter()
        .map(|f| MaximalOrder::compute(f).unwrap())
        .collect();
    let mut factored = 0;
    for order in &orders {
        for p in primes_up_to(150) {
            let primes = factor_prime(order, &int(p as i64)).unwrap();
            factored += 1;
            if primes.iter().map(|q| (q.e * q.f) as usize).sum::<usize>() != order.degree() {
                failures.push(format!("sum ef at {p}"));
            }
        }
    }
    // N(ab) = N(a) N(b) on ideals (x, y)
    let order = &orders[1];
    let elt = |s: i64| FieldElement::from_int_coords(&(0..6).map(|i| int((s * (i + 3) * 7919) % 11 - 5)).collect::<Vec<_>>());
    let mut ideals = Vec::new();
    for s in 1..7 {
        let a = element_ideal(order, &elt(s)).unwrap().add(&element_ideal(order, &elt(s + 11)).unwrap());
        ideals.push(a);
    }
    for a in &ideals {
        for b in &ideals {
            if a.mul(order, b).norm() != a.norm() * b.norm() {
                failures.push("norm multiplicativity".into());
            }
        }
    }
    // HNF: transform, canonical form under a unimodular change of rows
    let m = IntMatrix::from_i64(&[&[4, 6, -2], &[2, 9, 7], &[-6, 3, 1], &[8, 0, 10]]);
    let (h, t) = m.hnf();
    let u = IntMatrix::from_i64(&[&[1, 2, 0, 0], &[0, 1, 0, -1], &[3, 7, 1, 0], &[0, 0, 0, -1]]);
    let (h2, _) = u.mul(&m).hnf();
    if t.mul(&m) != h || t.det().abs() != int(1) || h2 != h {
        failures.push("hnf".into());
    }
    // short vectors against a coefficient box
    for rows in [
        vec![vec![3i64, 1], vec![1, 4]],
        vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 5]],
        vec![vec![2, 0, 1, 1], vec![1, 3, 0, 1], vec![0, 1, 4, 1], vec![1, 0, 1, 3]],
    ] {
        let basis = LatticeBasis::from_integers(&rows);
        let g = basis.gram();
        let inv = rat_inverse(&g).unwrap();
        let bound = 40i64;
        let found: BTreeSet<Vec<BigInt>> =
            short_vectors(&basis, &BigRat::from_integer(int(bound))).unwrap().into_iter().map(|v| v.coeffs).collect();
        let n = rows.len();
        let r: Vec<i64> = (0..n).map(|i| ((bound as f64) * inv[i][i].to_f64().unwrap()).sqrt() as i64 + 1).collect();
        let mut expected = BTreeSet::new();
        let total: i64 = r.iter().map(|x| 2 * x + 1).product();
        for mut k in 0..total {
            let x: Vec<i64> = r
                .iter()
                .map(|&ri| {
                    let c = k % (2 * ri + 1) - ri;
                    k /= 2 * ri + 1;
                    c
                })
                .collect();
            if x.iter().find(|c| **c != 0).is_some_and(|c| *c > 0) {
                let q: BigInt = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[i][j].to_integer() * x[i] * x[j]).sum();
                if q <= int(bound) {
                    expected.insert(x.iter().map(|&c| int(c)).collect());
                }
            }
        }
        if found != expected {
            failures.push(format!("short vectors in dimension {n}"));
        }
    }
    // (Z/9)* x (Z/9)*
    let units: Vec<u64> = (1..9).filter(|r| r % 3 != 0).collect();
    let prime_in = |r: u64, avoid: u64| primes_up_to(1000).into_iter().find(|&p| p > 3 && p % 9 == r && p != avoid).unwrap();
    for &rp in &units {
        for &rq in &units {
            let p = prime_in(rp, 0);
            let q = prime_in(rq, p);
            let d = select_delta(p, q).unwrap();
            if d.case != DeltaCase::III && plus_minus_one(d.residue_mod_9 as u64) {
                failures.push(format!("δ for residues ({rp}, {rq})"));
            }
            if !plus_minus_one(rp) && ![rq, rp * rq % 9, rp * rq * rq % 9].iter().any(|&g| plus_minus_one(g)) {
                failures.push(format!("set claim for residues ({rp}, {rq})"));
            }
        }
    }
    (failures.is_empty(), format!("{factored} factorizations, 36 ideal products, HNF, 3 lattices, 36 residue pairs; failures {failures:?}"))
}

fn main() {
    let mut report = Report { lines: Vec::new() };

    let (ok, detail) = lemma_oracle();
    report.record(1, "lemma oracle equivalence", ok, detail);

    let (ok, detail) = pure_cubic_discriminants();
    report.record(2, "pure cubic discriminants", ok, detail);

    let start = Instant::now();
    let opts = CertifyOptions::default();
    let base = BaseField::compute(79, &opts);
    let secs = start.elapsed().as_secs_f64();
    match &base {
        Ok(b) => {
            let h = b.class_group.class_number.clone();
            report.record(3, "class number of Q(ω, ∛79)", h == int(12) && secs < 600.0, format!("h = {h} in {secs:.1} s (limit 600 s)"));
        }
        Err(e) => report.record(3, "class number of Q(ω, ∛79)", false, format!("{e}")),
    }

    match &base {
        Ok(b) => {
            let primes = factor_prime(&b.order, &int(97)).unwrap();
            let mut verified = 0;
            for q in &primes {
                let Ok(w) = is_principal(&b.class_group, &q.ideal) else { continue };
                let Some(g) = w.generator.filter(|_| w.verdict == Verdict::Principal) else { continue };
                let norm = b.order.norm(&g).abs();
                if q.f == 1
                    && q.e == 1
                    && element_ideal(&b.order, &g).ok().as_ref() == Some(&q.ideal)
                    && norm == BigRat::from_integer(int(97))
                {
                    verified += 1;
                }
            }
            report.record(
                4,
                "97 splits into principal primes",
                primes.len() == 6 && verified == 6,
                format!("{} primes of degree 1, {verified} with a verified generator of norm ±97", primes.len()),
            );
        }
        Err(e) => report.record(4, "97 splits into principal primes", false, format!("{e}")),
    }

    let cache_a = tempfile::tempdir().unwrap();
    let cache_b = tempfile::tempdir().unwrap();
    let (code, first, secs) = run_certify(Some(cache_a.path()));
    let (ok, detail) = check_certificate(&first);
    report.record(5, "certify -p 79 -q 97", code == 0 && ok, format!("exit {code} in {secs:.1} s, {detail}"));

    let (u, c) = (min_class_number(Mode::Unconditional), min_class_number(Mode::Conditional));
    report.record(6, "inequality thresholds", u == 6 && c == 2, format!("unconditional {u}, conditional {c}"));

    let density = serde_json::from_slice::<Value>(&first).ok().map(|v| v["density"].clone()).unwrap_or_default();
    report.record(7, "density", density == "1/72", format!("{density}"));

    let (ok, detail) = small_class_groups();
    report.record(8, "small class groups", ok, detail);

    let (ok, detail) = properties();
    report.record(9, "property samples", ok, detail);

    let (code_b, second, _) = run_certify(Some(cache_b.path()));
    let (code_w, warm, _) = run_certify(Some(cache_a.path()));
    let same = code_b == 0 && first == second;
    report.record(
        10,
        "determinism",
        same && code_w == 0 && warm == first,
        format!("two cold runs identical: {same}; warm run identical: {}", warm == first),
    );

    let failed = report.lines.iter().filter(|(ok, _)| !ok).count();
    println!("acceptance: {} of {} criteria passed", report.lines.len() - failed, report.lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
