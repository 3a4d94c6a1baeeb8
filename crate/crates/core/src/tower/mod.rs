//! Infinite 3-class field towers for `K = Q(ω, ∛δ)`, `δ = p^a q^b`.
//!
//! Let `F = Q(ω)`, `h` the class number of `F(∛p)` and `H` its Hilbert
//! class field, and let `q` split into principal primes in `F(∛p)`. For a
//! suitable `δ`, `L = H(∛q)` is unramified over `K`, and Schoof's criterion
//! for the cyclic cubic extension `L/H`,
//!
//! ```text
//! rho >= 3 + d_3(O_H^* / (O_H^* ∩ N U_L)) + 2 sqrt(d_3(O_L^*) + 1),
//! ```
//!
//! shows `L`, hence `K`, has an infinite 3-class field tower. Here
//! `rho >= 6h` (the primes of `H` above `q` all ramify), `d_3(O_L^*) = 9h`,
//! and the norm-quotient term is at most `d_3(O_H^*) = 3h`, or `0` when
//! the primes of `H` ramifying in `L` are assumed to split completely in
//! `H(∛O_H^*)`. Neither `H` nor `L` is ever constructed; they only appear
//! through these counts.
//!
//! Every congruence argument at 3 is repeated by factoring 3 in the
//! relevant maximal orders, and any disagreement is an internal error.

mod certificate;

pub use certificate::{
    build_certificate, field_diagram, render_text, search_q, BaseField, CertifyOptions, ComparisonConstants, DeltaSquared,
    InequalityRecord, Outcome, PrincipalWitness, Rejection, RootDiscriminantRecord, SearchReport, TowerCertificate, CERTIFICATE_VERSION,
};

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classgrp::{is_principal, ClassGroupData, Verdict};
use crate::error::{Error, Result};
use crate::ideal::factor_prime;
use crate::kernel::int::{is_perfect_cube, is_prime_u64, pow_mod_u64};
use crate::kernel::BigRat;
use crate::numfield::{MaximalOrder, NumberField};

/// Which hypothesis set the certificate rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Norm-quotient term bounded by `3h`.
    Unconditional,
    /// Assumes the primes of `H` ramifying in `L` split completely in
    /// `H(∛O_H^*)`, so the norm-quotient term vanishes. Never verified.
    Conditional,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Unconditional => "unconditional",
            Mode::Conditional => "conditional",
        })
    }
}

/// `m mod 9 ∉ {1, 8}`: whether 3 is totally ramified in `Q(∛m)`.
pub fn totally_ramified_at_3(m: &BigInt) -> Result<bool> {
    if m.is_zero() || m.is_multiple_of(&BigInt::from(3)) {
        return Err(Error::InvalidInput(format!("{m} is not prime to 3")));
    }
    if is_perfect_cube(m) {
        return Err(Error::InvalidInput(format!("{m} is a perfect cube")));
    }
    Ok(!is_plus_minus_one_mod_9(m))
}

fn is_plus_minus_one_mod_9(m: &BigInt) -> bool {
    let r = m.mod_floor(&BigInt::from(9));
    r == BigInt::from(1) || r == BigInt::from(8)
}

/// Branch of the case analysis that fixed `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaCase {
    /// `p ≢ ±1 (mod 9)`: `δ ∈ {pq, pq²}` with `δ ≢ ±1`, `pq` preferred.
    I,
    /// `p ≡ ±1`, `q ≢ ±1`: `δ = pq`.
    II,
    /// `p ≡ q ≡ ±1`: every choice works; `δ = pq` by convention.
    III,
}

impl std::fmt::Display for DeltaCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DeltaCase::I => "i",
            DeltaCase::II => "ii",
            DeltaCase::III => "iii",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaChoice {
    pub p: u64,
    pub q: u64,
    pub a: u32,
    pub b: u32,
    pub value: BigInt,
    pub residue_mod_9: u32,
    pub case: DeltaCase,
}

fn check_prime_pair(p: u64, q: u64) -> Result<()> {
    for x in [p, q] {
        if !is_prime_u64(x) {
            return Err(Error::InvalidInput(format!("{x} is not prime")));
        }
        if x == 3 {
            return Err(Error::InvalidInput("the prime 3 is excluded".into()));
        }
    }
    if p == q {
        return Err(Error::InvalidInput("p and q must be distinct".into()));
    }
    Ok(())
}

pub fn select_delta(p: u64, q: u64) -> Result<DeltaChoice> {
    check_prime_pair(p, q)?;
    let (bp, bq) = (BigInt::from(p), BigInt::from(q));
    let make = |a: u32, b: u32, case| {
        let value = bp.pow(a) * bq.pow(b);
        let residue_mod_9 = value.mod_floor(&BigInt::from(9)).to_u32().expect("residue");
        DeltaChoice { p, q, a, b, value, residue_mod_9, case }
    };
    let p_special = is_plus_minus_one_mod_9(&bp);
    let q_special = is_plus_minus_one_mod_9(&bq);
    let choice = if !p_special {
        let pq = make(1, 1, DeltaCase::I);
        if is_plus_minus_one_mod_9(&pq.value) {
            make(1, 2, DeltaCase::I)
        } else {
            pq
        }
    } else if !q_special {
        make(1, 1, DeltaCase::II)
    } else {
        make(1, 1, DeltaCase::III)
    };
    if choice.case != DeltaCase::III && is_plus_minus_one_mod_9(&choice.value) {
        return Err(Error::Inconsistent(format!("δ = {} ≡ ±1 (mod 9) in case {}", choice.value, choice.case)));
    }
    Ok(choice)
}

/// `(e, f)` of the primes above `p`, sorted.
pub fn splitting_pattern(order: &MaximalOrder, p: u64) -> Result<Vec<(u32, u32)>> {
    let mut v: Vec<(u32, u32)> = factor_prime(order, &BigInt::from(p))?.iter().map(|q| (q.e, q.f)).collect();
    v.sort();
    Ok(v)
}

fn max_e(pattern: &[(u32, u32)]) -> u32 {
    pattern.iter().map(|x| x.0).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationAt3 {
    pub case: DeltaCase,
    /// `(e, f)` above 3 in `K = F(∛δ)`.
    pub k_pattern: Vec<(u32, u32)>,
    /// `e(K, 3)`: the largest ramification index above 3 in `K`.
    pub e_k: u32,
    /// `(e, f)` above 3 in `F(∛p)`.
    pub f_p_pattern: Vec<(u32, u32)>,
    /// `(e, f)` above 3 in `F(∛q)`.
    pub f_q_pattern: Vec<(u32, u32)>,
    /// `(e, f)` above 3 in `F = Q(ω)`.
    pub f_pattern: Vec<(u32, u32)>,
    /// `E/K` unramified at 3, as implied by the values above.
    pub e_over_k_unramified: bool,
}

/// Checks the congruence lemma against the factorization of 3 in `Q(∛m)`.
fn lemma_cross_check(m: &BigInt) -> Result<Vec<(u32, u32)>> {
    let predicted = totally_ramified_at_3(m)?;
    let order = MaximalOrder::compute(&NumberField::pure_cubic(m)?)?;
    let pattern = splitting_pattern(&order, 3)?;
    let computed = pattern == [(3, 1)];
    if predicted != computed {
        return Err(Error::Inconsistent(format!("3 in Q(∛{m}): congruence predicts {predicted}, factorization gives {pattern:?}")));
    }
    Ok(pattern)
}

fn sextic_order(m: &BigInt) -> Result<MaximalOrder> {
    MaximalOrder::compute(&NumberField::sextic(m)?.field)
}

/// Computes the ramification of 3 in `K`, `F(∛p)`, `F(∛q)` and `F`, and
/// checks it against the congruence predictions for `choice.case`.
pub fn ramification_at_3(choice: &DeltaChoice, base: Option<&MaximalOrder>) -> Result<RamificationAt3> {
    let (bp, bq) = (BigInt::from(choice.p), BigInt::from(choice.q));
    let cubic_p = lemma_cross_check(&bp)?;
    let cubic_q = lemma_cross_check(&bq)?;
    let cubic_d = lemma_cross_check(&choice.value)?;
    let k = sextic_order(&choice.value)?;
    let k_pattern = splitting_pattern(&k, 3)?;
    let f_p_pattern = match base {
        Some(o) => splitting_pattern(o, 3)?,
        None => splitting_pattern(&sextic_order(&bp)?, 3)?,
    };
    let f_q_pattern = splitting_pattern(&sextic_order(&bq)?, 3)?;
    let f_pattern = splitting_pattern(&MaximalOrder::compute(&NumberField::eisenstein())?, 3)?;
    let e_k = max_e(&k_pattern);
    let fail = |what: String| Err(Error::Inconsistent(what));
    if f_pattern != [(2, 1)] {
        return fail(format!("3 in Q(ω) factors as {f_pattern:?}"));
    }
    match choice.case {
        DeltaCase::I | DeltaCase::II => {
            let (name, side) = if choice.case == DeltaCase::I { ("p", &f_p_pattern) } else { ("q", &f_q_pattern) };
            if side.as_slice() != [(6, 1)] {
                return fail(format!("e(F(∛{name}), 3) should be 6, factorization gives {side:?}"));
            }
            if cubic_d != [(3, 1)] || k_pattern != [(6, 1)] {
                return fail(format!("e(K, 3) should be 6, factorization gives {k_pattern:?}"));
            }
        }
        DeltaCase::III => {
            for (m, pat) in [(&bp, &cubic_p), (&bq, &cubic_q)] {
                if !pat.iter().any(|x| x.0 == 1) {
                    return fail(format!("Q(∛{m}) should have an unramified prime above 3, found {pat:?}"));
                }
            }
            if !k_pattern.iter().any(|x| x.0 <= 2) {
                return fail(format!("K should have a prime above 3 with e <= 2, found {k_pattern:?}"));
            }
        }
    }
    // E = K(∛p) with relative discriminant dividing 3^3: unramified at 3
    // iff e(K, 3) already equals e(E, 3), which the checks above establish
    // in cases (i) and (ii); case (iii) rests on the unramified primes.
    Ok(RamificationAt3 { case: choice.case, k_pattern, e_k, f_p_pattern, f_q_pattern, f_pattern, e_over_k_unramified: true })
}

/// 3-rank of the unit group of a field of signature `(r1, r2)`:
/// `r1 + r2 - 1`, plus one when the field contains `ω`.
pub fn d3_units(degree: u64, r1: u64, r2: u64, contains_omega: bool) -> Result<u64> {
    if r1 + 2 * r2 != degree || degree == 0 {
        return Err(Error::InvalidInput(format!("signature ({r1}, {r2}) does not match degree {degree}")));
    }
    if contains_omega && r1 > 0 {
        return Err(Error::InvalidInput("a field containing ω has no real embeddings".into()));
    }
    Ok(r1 + r2 - 1 + contains_omega as u64)
}

/// Schoof's inequality for `L = H(∛q)` over `H`, decided exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchoofCheck {
    pub l: u32,
    pub h: u64,
    pub mode: Mode,
    /// `rho >= 6h`.
    pub rho_lower: u64,
    /// Bound for the norm-quotient term: `3h`, or `0` in conditional mode.
    pub t: u64,
    /// `d_3(O_H^*) = 3h`.
    pub d3_oh: u64,
    /// `d_3(O_L^*) = 9h`.
    pub d3_ol: u64,
    /// `rho_lower - 3 - t`.
    pub difference: i128,
    /// `4 (d3_ol + 1)`, compared with `difference^2`.
    pub four_radicand: u128,
    pub verdict: bool,
}

impl SchoofCheck {
    /// `3 + t + 2 sqrt(d3_ol + 1)` as text.
    pub fn rhs_text(&self) -> String {
        format!("{} + 2*sqrt({})", 3 + self.t, self.d3_ol + 1)
    }
}

pub fn schoof_inequality(h: u64, mode: Mode) -> Result<SchoofCheck> {
    if h == 0 {
        return Err(Error::InvalidInput("class number must be positive".into()));
    }
    // H has degree 6h, is totally complex and contains ω; L likewise with 18h
    let d3_oh = d3_units(6 * h, 0, 3 * h, true)?;
    let d3_ol = d3_units(18 * h, 0, 9 * h, true)?;
    let rho_lower = 6 * h;
    let t = match mode {
        Mode::Unconditional => d3_oh,
        Mode::Conditional => 0,
    };
    let difference = rho_lower as i128 - 3 - t as i128;
    let four_radicand = 4 * (d3_ol as u128 + 1);
    let verdict = difference >= 0 && (difference as u128).pow(2) >= four_radicand;
    Ok(SchoofCheck { l: 3, h, mode, rho_lower, t, d3_oh, d3_ol, difference, four_radicand, verdict })
}

/// Smallest `h` satisfying the inequality.
pub fn min_class_number(mode: Mode) -> u64 {
    (1..).find(|&h| schoof_inequality(h, mode).is_ok_and(|c| c.verdict)).expect("the inequality holds for large h")
}

/// Density `1/(6h)` of primes splitting completely in the Hilbert class
/// field of `F(∛p)`.
pub fn chebotarev_density(h: u64) -> Result<BigRat> {
    if h == 0 {
        return Err(Error::InvalidInput("class number must be positive".into()));
    }
    Ok(BigRat::new(BigInt::from(1), BigInt::from(6 * h)))
}

/// `q ≡ 1 (mod 3)` and `p` a cube mod `q`: necessary for `q` to split
/// completely in `F(∛p)`.
pub fn splitting_prefilter(p: u64, q: u64) -> bool {
    q != 3 && q % 3 == 1 && !p.is_multiple_of(q) && pow_mod_u64(p % q, (q - 1) / 3, q) == 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub q: u64,
    pub prefilter: bool,
    pub splits_completely: bool,
    pub witnesses: Vec<PrincipalWitness>,
    /// Whether every prime above `q` was shown principal.
    pub principal: bool,
}

/// Decides whether `q` splits completely into principal primes of the
/// order underlying `cg`.
pub fn q_splits_principally(p: u64, q: u64, cg: &ClassGroupData) -> Result<SplitReport> {
    let mut report =
        SplitReport { q, prefilter: splitting_prefilter(p, q), splits_completely: false, witnesses: Vec::new(), principal: false };
    if !report.prefilter {
        return Ok(report);
    }
    let order: &Arc<MaximalOrder> = cg.order();
    let primes = factor_prime(order, &BigInt::from(q))?;
    report.splits_completely = primes.len() == order.degree() && primes.iter().all(|x| x.e == 1 && x.f == 1);
    if !report.splits_completely {
        return Err(Error::Inconsistent(format!("{q} passes the splitting pre-filter but does not split completely")));
    }
    // the primes are Galois conjugate, so one test decides; all are tested as a self-check
    let mut non_principal = 0;
    for prime in &primes {
        let w = is_principal(cg, &prime.ideal)?;
        if w.verdict == Verdict::NotPrincipal {
            non_principal += 1;
            continue;
        }
        let g = w.generator.expect("principal verdict carries a generator");
        let coords = g.int_coords().ok_or_else(|| Error::Inconsistent("generator of an integral ideal is not integral".into()))?;
        let norm = order.norm_int(&coords);
        if norm.abs() != BigInt::from(q) {
            return Err(Error::Inconsistent(format!("generator norm {norm} is not ±{q}")));
        }
        report.witnesses.push(PrincipalWitness {
            prime_generator: prime.generator.iter().map(|c| c.to_string()).collect(),
            generator: coords.iter().map(|c| c.to_string()).collect(),
            norm: norm.to_string(),
        });
    }
    if non_principal > 0 && non_principal < primes.len() {
        return Err(Error::Inconsistent(format!("conjugate primes above {q} disagree on principality")));
    }
    report.principal = non_principal == 0;
    if !report.principal {
        report.witnesses.clear();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_examples() {
        assert!(totally_ramified_at_3(&79.into()).unwrap());
        assert!(!totally_ramified_at_3(&17.into()).unwrap());
        assert!(totally_ramified_at_3(&7663.into()).unwrap());
        assert!(totally_ramified_at_3(&6.into()).is_err());
        assert!(totally_ramified_at_3(&8.into()).is_err());
    }

    #[test]
    fn delta_examples() {
        let d = select_delta(79, 97).unwrap();
        assert_eq!((d.value.clone(), d.case), (BigInt::from(7663), DeltaCase::I));
        assert_eq!(d.residue_mod_9, 4);
        let d = select_delta(17, 5).unwrap();
        assert_eq!((d.value.clone(), d.case), (BigInt::from(85), DeltaCase::II));
        let d = select_delta(17, 19).unwrap();
        assert_eq!((d.value.clone(), d.case), (BigInt::from(323), DeltaCase::III));
        assert!(select_delta(3, 5).is_err());
        assert!(select_delta(5, 5).is_err());
        assert!(select_delta(4, 5).is_err());
    }

    #[test]
    fn unit_ranks() {
        assert_eq!(d3_units(2, 0, 1, true).unwrap(), 1);
        for h in 1..=50 {
            assert_eq!(d3_units(6 * h, 0, 3 * h, true).unwrap(), 3 * h);
            assert_eq!(d3_units(18 * h, 0, 9 * h, true).unwrap(), 9 * h);
        }
        assert!(d3_units(6, 1, 1, false).is_err());
    }

    #[test]
    fn schoof_thresholds() {
        assert!(schoof_inequality(6, Mode::Unconditional).unwrap().verdict);
        let c = schoof_inequality(5, Mode::Unconditional).unwrap();
        assert!(!c.verdict);
        assert_eq!((c.difference, c.four_radicand), (12, 184));
        assert!(schoof_inequality(2, Mode::Conditional).unwrap().verdict);
        assert!(!schoof_inequality(1, Mode::Conditional).unwrap().verdict);
        let c = schoof_inequality(12, Mode::Unconditional).unwrap();
        assert!(c.verdict);
        assert_eq!((c.rho_lower, c.rhs_text()), (72, "39 + 2*sqrt(109)".to_string()));
        assert_eq!(min_class_number(Mode::Unconditional), 6);
        assert_eq!(min_class_number(Mode::Conditional), 2);
    }

    #[test]
    fn density_values() {
        assert_eq!(chebotarev_density(12).unwrap(), BigRat::new(1.into(), 72.into()));
        assert_eq!(chebotarev_density(1).unwrap(), BigRat::new(1.into(), 6.into()));
        assert_eq!(chebotarev_density(6).unwrap(), BigRat::new(1.into(), 36.into()));
    }

    #[test]
    fn prefilter_examples() {
        assert!(splitting_prefilter(79, 97));
        assert!(!splitting_prefilter(79, 5));
        assert!(!splitting_prefilter(79, 7));
    }

    #[test]
    fn ramification_for_headline_pair() {
        let r = ramification_at_3(&select_delta(79, 97).unwrap(), None).unwrap();
        assert_eq!(r.e_k, 6);
        assert_eq!(r.f_pattern, vec![(2, 1)]);
    }

    #[test]
    fn ramification_when_both_are_special() {
        let r = ramification_at_3(&select_delta(17, 19).unwrap(), None).unwrap();
        assert!(r.e_k <= 6);
        assert!(r.k_pattern.iter().any(|x| x.0 <= 2));
    }
}
