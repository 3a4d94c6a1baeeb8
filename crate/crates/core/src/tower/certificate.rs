//! Certificate assembly, the q search and the text rendering.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    chebotarev_density, check_prime_pair, min_class_number, q_splits_principally, ramification_at_3, schoof_inequality, select_delta,
    splitting_prefilter, DeltaCase, DeltaChoice, Mode, RamificationAt3,
};
use crate::classgrp::{class_group_with, ClassGroupData, ClassGroupOptions, Saturation};
use crate::error::{Error, Result};
use crate::kernel::int::{factor, primes_up_to};
use crate::kernel::IntPoly;
use crate::numfield::{compositum, MaximalOrder, NumberField};

pub const CERTIFICATE_VERSION: u32 = 1;

/// A generator of one prime above `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalWitness {
    /// Second generator `pi` of the prime `(q, pi)`, integral-basis coordinates.
    pub prime_generator: Vec<String>,
    /// Generator `g` with `(g) = (q, pi)`, integral-basis coordinates.
    pub generator: Vec<String>,
    /// `N(g)`, which is `±q`.
    pub norm: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRecord {
    pub a: u32,
    pub b: u32,
    pub value: u128,
    pub residue_mod_9: u32,
    pub case: DeltaCase,
}

/// The presentation `δ²` and the check that it defines the same field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSquared {
    pub value: u128,
    pub residue_mod_9: u32,
    /// `Q(ω, ∛δ²) = Q(ω, ∛δ)`, checked by an explicit isomorphism.
    pub same_field: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityRecord {
    /// `rho` lower bound.
    pub lhs: u64,
    /// `3 + t + 2 sqrt(9h + 1)`.
    pub rhs: String,
    /// The exact squared comparison that decides the inequality.
    pub rhs_squared_comparison: String,
    pub t: u64,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDiscriminantRecord {
    pub value: f64,
    pub error_bound: f64,
    /// Exact enclosure `[lower, upper]` as decimal strings.
    pub lower: String,
    pub upper: String,
    pub discriminant: String,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub principal_generators: Vec<PrincipalWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseFieldRecord {
    /// Defining polynomial of `F(∛p)`, constant term first.
    pub polynomial: Vec<String>,
    /// Integral basis in power-basis coordinates, rows as rationals.
    pub integral_basis: Vec<Vec<String>>,
    pub discriminant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSearchRecord {
    /// Minkowski bound used for the factor base (exact rational).
    pub factor_base_bound: String,
    pub factor_base_size: usize,
    pub core_size: usize,
    pub core_relations: usize,
    pub rounds: u32,
}

/// Root discriminants quoted for comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConstants {
    /// Lower bound for any field with an infinite tower.
    pub odlyzko: f64,
    /// The same bound under GRH.
    pub odlyzko_grh: f64,
    /// Martinet's field `Q(ζ_11 + ζ_11^-1, √-46)`.
    pub martinet: f64,
    /// Smallest known imaginary quadratic field of 3-rank at least three.
    pub imaginary_quadratic_rank_three: f64,
}

impl Default for ComparisonConstants {
    fn default() -> Self {
        ComparisonConstants { odlyzko: 22.3, odlyzko_grh: 44.6, martinet: 92.4, imaginary_quadratic_rank_three: 1822.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TowerCertificate {
    pub version: u32,
    pub p: u64,
    pub q: u64,
    pub delta: DeltaRecord,
    pub h: u64,
    pub class_group_divisors: Vec<u64>,
    pub rho_lower: u64,
    pub d3_OH_bound: u64,
    pub d3_OL: u64,
    pub inequality: InequalityRecord,
    pub root_discriminant: RootDiscriminantRecord,
    pub ramified_primes: Vec<u64>,
    pub density: String,
    pub mode: Mode,
    /// Unverified hypothesis the certificate depends on, if any.
    pub assumption: Option<String>,
    pub witnesses: Witnesses,
    pub field_diagram_text: String,
    pub delta_squared: DeltaSquared,
    pub ramification_at_3: RamificationAt3,
    pub base_field: BaseFieldRecord,
    pub class_group_search: ClassGroupSearchRecord,
    pub comparison_constants: ComparisonConstants,
}

impl TowerCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("certificate JSON: {e}")))
    }
}

/// A failed hypothesis, named by pipeline stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub p: u64,
    pub q: Option<u64>,
    pub stage: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Certified(Box<TowerCertificate>),
    Rejected(Rejection),
}

#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub class_group: ClassGroupOptions,
}

/// `F(∛p)` with its class group, shared by every `q`.
#[derive(Clone, Debug)]
pub struct BaseField {
    pub p: u64,
    pub order: Arc<MaximalOrder>,
    pub class_group: ClassGroupData,
}

impl BaseField {
    pub fn compute(p: u64, opts: &CertifyOptions) -> Result<Self> {
        if !crate::kernel::int::is_prime_u64(p) || p == 3 {
            return Err(Error::InvalidInput(format!("p = {p} must be a prime other than 3")));
        }
        let order = Arc::new(MaximalOrder::compute(&NumberField::sextic(&BigInt::from(p))?.field)?);
        let class_group = class_group_with(&order, &opts.class_group)?;
        Ok(BaseField { p, order, class_group })
    }

    pub fn h(&self) -> Result<u64> {
        self.class_group.class_number.to_u64().ok_or_else(|| Error::InvalidInput("class number exceeds 64 bits".into()))
    }
}

fn to_u128(x: &BigInt) -> Result<u128> {
    x.to_u128().ok_or_else(|| Error::InvalidInput(format!("{x} exceeds 128 bits")))
}

/// Checks `Q(ω, ∛δ²) = Q(ω, ∛δ)`: inside `K = Q(ω, b)`, `b²` is a cube
/// root of `δ²`, and `ω + c b²` has the defining polynomial of the `δ²`
/// compositum as its characteristic polynomial, so that compositum embeds
/// in `K`; equal degrees make the embedding an isomorphism.
fn check_delta_squared(delta: &BigInt) -> Result<bool> {
    let k = NumberField::sextic(delta)?;
    let order = MaximalOrder::compute(&k.field)?;
    let d2 = delta * delta;
    let k2 = compositum(&IntPoly::from_i64s(&[1, 1, 1]), &IntPoly::pure_cubic(&d2))?;
    let omega = order.from_power_basis(&k.first);
    let b = order.from_power_basis(&k.second);
    let b2 = order.mul(&b, &b);
    if order.pow(&b2, 3) != order.from_integer(&d2) {
        return Ok(false);
    }
    let theta = omega.add(&b2.scale(&BigInt::from(k2.weight).into()));
    let coords = theta.int_coords().ok_or_else(|| Error::Inconsistent("ω + c b² is not integral".into()))?;
    Ok(&order.charpoly_int(&coords) == k2.field.poly())
}

/// Rational primes dividing `disc(K)`.
fn ramified_primes(k: &MaximalOrder, hints: &[BigInt]) -> Vec<u64> {
    let mut v: Vec<u64> = factor(&k.disc().abs(), hints).into_iter().filter_map(|(p, _)| p.to_u64()).collect();
    v.sort();
    v
}

fn reject(p: u64, q: Option<u64>, stage: &str, reason: String) -> Outcome {
    Outcome::Rejected(Rejection { p, q, stage: stage.into(), reason })
}

/// Runs the pipeline for `(p, q)`: class number bound, principal splitting
/// of `q`, choice of `δ`, ramification at 3, Schoof's inequality and the
/// root discriminant of `K = Q(ω, ∛δ)`.
pub fn build_certificate(p: u64, q: u64, mode: Mode, opts: &CertifyOptions) -> Result<Outcome> {
    check_prime_pair(p, q)?;
    let base = BaseField::compute(p, opts)?;
    certify_with_base(&base, q, mode)
}

pub fn certify_with_base(base: &BaseField, q: u64, mode: Mode) -> Result<Outcome> {
    let p = base.p;
    check_prime_pair(p, q)?;
    let h = base.h()?;
    let min_h = min_class_number(mode);
    if h < min_h {
        return Ok(reject(p, Some(q), "class-number", format!("h = {h} < {min_h}")));
    }
    let split = q_splits_principally(p, q, &base.class_group)?;
    if !split.prefilter {
        return Ok(reject(
            p,
            Some(q),
            "splitting-prefilter",
            format!("{q} fails the pre-filter: q ≢ 1 (mod 3) or {p} is not a cube mod {q}"),
        ));
    }
    if !split.principal {
        return Ok(reject(p, Some(q), "principality", format!("a prime above {q} is not principal in Q(ω, ∛{p})")));
    }
    let choice = select_delta(p, q)?;
    let ram = ramification_at_3(&choice, Some(&base.order))?;
    let check = schoof_inequality(h, mode)?;
    if !check.verdict {
        return Ok(reject(p, Some(q), "schoof-inequality", format!("{} < {}", check.rho_lower, check.rhs_text())));
    }
    let k = MaximalOrder::compute(&NumberField::sextic(&choice.value)?.field)?;
    let rd = k.root_discriminant();
    let primes = ramified_primes(&k, &[BigInt::from(2), BigInt::from(3), BigInt::from(p), BigInt::from(q)]);
    let mut expected = vec![3, p, q];
    expected.sort();
    if primes != expected {
        return Err(Error::Inconsistent(format!("K ramifies at {primes:?}, expected {expected:?}")));
    }
    let d2 = &choice.value * &choice.value;
    let same_field = check_delta_squared(&choice.value)?;
    if !same_field {
        return Err(Error::Inconsistent("Q(ω, ∛δ²) and Q(ω, ∛δ) differ".into()));
    }
    let cg = &base.class_group;
    let (rounds, core_relations) = match &cg.status {
        Saturation::Stabilized { rounds, relations, .. } => (*rounds, *relations),
        Saturation::Trivial => (0, 0),
    };
    let basis = base.order.basis().rational_rows();
    let density = chebotarev_density(h)?;
    let cert = TowerCertificate {
        version: CERTIFICATE_VERSION,
        p,
        q,
        delta: DeltaRecord {
            a: choice.a,
            b: choice.b,
            value: to_u128(&choice.value)?,
            residue_mod_9: choice.residue_mod_9,
            case: choice.case,
        },
        h,
        class_group_divisors: cg.divisors.iter().map(|d| d.to_u64().expect("divisor of a 64-bit class number")).collect(),
        rho_lower: check.rho_lower,
        d3_OH_bound: check.d3_oh,
        d3_OL: check.d3_ol,
        inequality: InequalityRecord {
            lhs: check.rho_lower,
            rhs: check.rhs_text(),
            rhs_squared_comparison: format!(
                "({} - {})^2 = {} >= 4*({} + 1) = {}",
                check.rho_lower,
                3 + check.t,
                (check.difference as u128).pow(2),
                check.d3_ol,
                check.four_radicand
            ),
            t: check.t,
            verdict: check.verdict,
        },
        root_discriminant: RootDiscriminantRecord {
            value: rd.value(),
            error_bound: 10f64.powi(-(rd.digits as i32)),
            lower: decimal(&rd.scaled_floor, rd.digits),
            upper: decimal(&(&rd.scaled_floor + 1), rd.digits),
            discriminant: k.disc().to_string(),
            degree: k.degree() as u32,
        },
        ramified_primes: primes,
        density: density.to_string(),
        mode,
        assumption: match mode {
            Mode::Unconditional => None,
            Mode::Conditional => Some("the primes of H ramifying in L = H(∛q) split completely in H(∛O_H^*) (not verified)".into()),
        },
        witnesses: Witnesses { principal_generators: split.witnesses },
        field_diagram_text: field_diagram(p, q, &choice, h),
        delta_squared: DeltaSquared {
            value: to_u128(&d2)?,
            residue_mod_9: (&d2 % 9u32).to_u32().expect("residue"),
            same_field,
            note: "∛δ² = (∛δ)², so both presentations define the same sextic field".into(),
        },
        ramification_at_3: ram,
        base_field: BaseFieldRecord {
            polynomial: base.order.field().poly().coeffs().iter().map(|c| c.to_string()).collect(),
            integral_basis: basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            discriminant: base.order.disc().to_string(),
        },
        class_group_search: ClassGroupSearchRecord {
            factor_base_bound: cg.factor_base.bound.to_string(),
            factor_base_size: cg.factor_base.len(),
            core_size: cg.relations.core,
            core_relations,
            rounds,
        },
        comparison_constants: ComparisonConstants::default(),
    };
    Ok(Outcome::Certified(Box::new(cert)))
}

fn decimal(scaled: &BigInt, digits: u32) -> String {
    let s = format!("{:0>width$}", scaled.to_string(), width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{int}.{frac}")
}

/// The diagram of fields over `F = Q(ω)` with edges listed below it.
pub fn field_diagram(p: u64, q: u64, choice: &DeltaChoice, h: u64) -> String {
    let d = &choice.value;
    let lines = [
        format!("                 L = H(cbrt {q})"),
        "                /               \\".to_string(),
        format!("   H (degree {} over F(cbrt {p}))   E = F(cbrt {p}, cbrt {q})", h),
        "        |                     /        |         \\".to_string(),
        format!("   F(cbrt {p})         K = F(cbrt {d})       F(cbrt {q})"),
        "          \\                   |                 /".to_string(),
        "                         F = Q(omega)".to_string(),
        String::new(),
        format!("edges: F-F(cbrt {p}), F-K, F-F(cbrt {q}), F(cbrt {p})-H, F(cbrt {p})-E, K-E, F(cbrt {q})-E, E-L, H-L"),
        "L/K is unramified: L/E and E/K are unramified".to_string(),
    ];
    lines.join("\n")
}

/// Human-readable rendering of a certificate.
pub fn render_text(c: &TowerCertificate) -> String {
    let mut s = String::new();
    let mut line = |t: String| {
        s.push_str(&t);
        s.push('\n');
    };
    line(format!("Infinite 3-class field tower certificate (version {})", c.version));
    line(format!("  field K        Q(omega, cbrt {})", c.delta.value));
    line(format!("  p, q           {}, {}", c.p, c.q));
    line(format!(
        "  delta          {}^{} * {}^{} = {} (mod 9: {}, case {})",
        c.p, c.delta.a, c.q, c.delta.b, c.delta.value, c.delta.residue_mod_9, c.delta.case
    ));
    line(format!("  h(F(cbrt {}))   {} with class group {:?}", c.p, c.h, c.class_group_divisors));
    line(format!("  mode           {}", c.mode));
    if let Some(a) = &c.assumption {
        line(format!("  assumes        {a}"));
    }
    line(format!(
        "  inequality     {} >= {}: {}",
        c.inequality.lhs,
        c.inequality.rhs,
        if c.inequality.verdict { "holds" } else { "fails" }
    ));
    line(format!("                 {}", c.inequality.rhs_squared_comparison));
    line(format!("  d3(O_H*) <= {}, d3(O_L*) = {}", c.d3_OH_bound, c.d3_OL));
    line(format!("  root disc.     {} (in [{}, {}])", c.root_discriminant.value, c.root_discriminant.lower, c.root_discriminant.upper));
    line(format!("  ramified       {:?}", c.ramified_primes));
    line(format!("  e(K, 3)        {} ({:?})", c.ramification_at_3.e_k, c.ramification_at_3.k_pattern));
    line(format!("  density of q   {}", c.density));
    line(format!("  delta^2        {} (same field: {})", c.delta_squared.value, c.delta_squared.same_field));
    line(format!("  generators above {}:", c.q));
    for w in &c.witnesses.principal_generators {
        line(format!("    ({}) norm {}", w.generator.join(", "), w.norm));
    }
    line(String::new());
    for l in c.field_diagram_text.lines() {
        line(format!("  {l}"));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: u64,
    pub h: u64,
    pub q_max: u64,
    pub mode: Mode,
    /// Primes `q <= q_max` considered (excluding 3 and `p`).
    pub scanned: usize,
    pub prefilter_passed: usize,
    pub certificates: Vec<TowerCertificate>,
    /// Candidates whose principality test was inconclusive.
    pub inconclusive: Vec<u64>,
    /// `hits/scanned`.
    pub observed_rate: String,
    pub predicted_density: String,
    pub rejection: Option<Rejection>,
}

/// Certificates for primes `q <= q_max` in ascending order, at most `count`.
pub fn search_q(base: &BaseField, q_max: u64, count: usize, mode: Mode) -> Result<SearchReport> {
    let h = base.h()?;
    let p = base.p;
    let mut report = SearchReport {
        p,
        h,
        q_max,
        mode,
        scanned: 0,
        prefilter_passed: 0,
        certificates: Vec::new(),
        inconclusive: Vec::new(),
        observed_rate: "0/0".into(),
        predicted_density: chebotarev_density(h)?.to_string(),
        rejection: None,
    };
    let min_h = min_class_number(mode);
    if h < min_h {
        report.rejection = Some(Rejection { p, q: None, stage: "class-number".into(), reason: format!("h = {h} < {min_h}") });
        return Ok(report);
    }
    let candidates: Vec<u64> = primes_up_to(q_max).into_iter().filter(|&q| q != 3 && q != p).collect();
    report.scanned = candidates.len();
    let passing: Vec<u64> = candidates.iter().copied().filter(|&q| splitting_prefilter(p, q)).collect();
    report.prefilter_passed = passing.len();
    let chunk = rayon::current_num_threads().max(1);
    for group in passing.chunks(chunk) {
        if report.certificates.len() >= count {
            break;
        }
        let results: Vec<(u64, Result<Outcome>)> = group.par_iter().map(|&q| (q, certify_with_base(base, q, mode))).collect();
        for (q, r) in results {
            if report.certificates.len() >= count {
                break;
            }
            match r {
                Ok(Outcome::Certified(c)) => report.certificates.push(*c),
                Ok(Outcome::Rejected(_)) => {}
                Err(Error::Inconclusive(msg)) => {
                    log::warn!("q = {q}: {msg}");
                    report.inconclusive.push(q);
                }
                Err(e) => return Err(e),
            }
        }
    }
    report.observed_rate = format!("{}/{}", report.certificates.len(), report.scanned);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&BigInt::from(14004123456u64), 6), "14004.123456");
        assert_eq!(decimal(&BigInt::from(5), 3), "0.005");
    }

    #[test]
    fn delta_squared_is_same_field() {
        assert!(check_delta_squared(&BigInt::from(7663)).unwrap());
        assert!(check_delta_squared(&BigInt::from(10)).unwrap());
    }

    #[test]
    fn small_class_number_is_rejected() {
        match build_certificate(2, 5, Mode::Unconditional, &CertifyOptions::default()).unwrap() {
            Outcome::Rejected(r) => {
                assert_eq!(r.stage, "class-number");
                assert_eq!(r.reason, "h = 1 < 6");
            }
            other => panic!("{other:?}"),
        }
        assert!(build_certificate(3, 5, Mode::Unconditional, &CertifyOptions::default()).is_err());
    }
}
