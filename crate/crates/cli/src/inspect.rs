//! `inspect`: invariants of a single field.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use s3tower::classgrp::{class_group_with, ClassGroupOptions};
use s3tower::ideal::factor_prime;
use s3tower::kernel::IntPoly;
use s3tower::numfield::{build_field, MaximalOrder, NumberField};
use s3tower::tower::totally_ramified_at_3;
use s3tower::Error;

pub enum FieldSpec {
    PureCubic(i64),
    Sextic(i64),
    Poly(Vec<i64>),
}

#[derive(Serialize)]
pub struct PrimeFactor {
    pub e: u32,
    pub f: u32,
}

#[derive(Serialize)]
pub struct LemmaCheck {
    pub m: i64,
    pub residue_mod_9: i64,
    /// `m mod 9 ∉ {1, 8}`.
    pub predicts_total_ramification: bool,
    pub totally_ramified: bool,
    pub agree: bool,
}

#[derive(Serialize)]
pub struct ClassGroupReport {
    pub status: String,
    pub h: Option<String>,
    pub divisors: Vec<String>,
}

#[derive(Serialize)]
pub struct InspectReport {
    pub field: String,
    pub polynomial: Vec<String>,
    pub degree: usize,
    pub signature: (usize, usize),
    pub discriminant: String,
    pub root_discriminant: f64,
    pub root_discriminant_bounds: (String, String),
    /// Integral basis rows in power-basis coordinates.
    pub integral_basis: Vec<Vec<String>>,
    pub basis_denominator: String,
    pub index: String,
    pub factorization_of_3: Vec<PrimeFactor>,
    pub lemma: Option<LemmaCheck>,
    pub class_group: Option<ClassGroupReport>,
}

pub fn inspect(spec: &FieldSpec, with_class_group: bool, opts: &ClassGroupOptions) -> Result<InspectReport, Error> {
    let (name, field, lemma_m, full_e) = match spec {
        FieldSpec::PureCubic(m) => (format!("Q(cbrt {m})"), NumberField::pure_cubic(&BigInt::from(*m))?, Some(*m), 3),
        FieldSpec::Sextic(m) => (format!("Q(omega, cbrt {m})"), NumberField::sextic(&BigInt::from(*m))?.field, Some(*m), 6),
        FieldSpec::Poly(c) => {
            let f = IntPoly::from_i64s(c);
            (format!("Q[x]/({f})"), build_field(&f)?, None, 0)
        }
    };
    let order = Arc::new(MaximalOrder::compute(&field)?);
    let rd = order.root_discriminant();
    let threes = factor_prime(&order, &BigInt::from(3))?;
    let lemma = match lemma_m {
        Some(m) if m % 3 != 0 => totally_ramified_at_3(&BigInt::from(m)).ok().map(|predicted| {
            let total = threes.len() == 1 && threes[0].e == full_e;
            LemmaCheck {
                m,
                residue_mod_9: m.rem_euclid(9),
                predicts_total_ramification: predicted,
                totally_ramified: total,
                agree: predicted == total,
            }
        }),
        _ => None,
    };
    let class_group = with_class_group.then(|| match class_group_with(&order, opts) {
        Ok(cg) => ClassGroupReport {
            status: "ok".into(),
            h: Some(cg.class_number.to_string()),
            divisors: cg.divisors.iter().map(|d| d.to_string()).collect(),
        },
        Err(e) => {
            log::warn!("class group: {e}");
            ClassGroupReport { status: format!("inconclusive: {e}"), h: None, divisors: Vec::new() }
        }
    });
    let basis = order.basis();
    Ok(InspectReport {
        field: name,
        polynomial: field.poly().coeffs().iter().map(|c| c.to_string()).collect(),
        degree: order.degree(),
        signature: field.signature(),
        discriminant: order.disc().to_string(),
        root_discriminant: rd.value(),
        root_discriminant_bounds: (rd.lower().to_string(), rd.upper().to_string()),
        integral_basis: basis.rational_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        basis_denominator: basis.denom.to_string(),
        index: order.index().to_string(),
        factorization_of_3: threes.iter().map(|p| PrimeFactor { e: p.e, f: p.f }).collect(),
        lemma,
        class_group,
    })
}

pub fn render(r: &InspectReport) -> String {
    let mut s = String::new();
    let mut line = |t: String| {
        s.push_str(&t);
        s.push('\n');
    };
    line(format!("field            {}", r.field));
    line(format!("polynomial       [{}] (constant term first)", r.polynomial.join(", ")));
    line(format!("degree           {}", r.degree));
    line(format!("signature        ({}, {})", r.signature.0, r.signature.1));
    line(format!("discriminant     {}", r.discriminant));
    line(format!("root disc.       {:.6}", r.root_discriminant));
    line(format!("index            {}", r.index));
    line(format!("integral basis   (denominator {})", r.basis_denominator));
    for row in &r.integral_basis {
        line(format!("    [{}]", row.join(", ")));
    }
    let threes: Vec<String> = r.factorization_of_3.iter().map(|p| format!("(e={}, f={})", p.e, p.f)).collect();
    line(format!("primes above 3   {}", threes.join(" ")));
    if let Some(l) = &r.lemma {
        line(format!(
            "lemma at 3       m = {} ≡ {} (mod 9): predicts {}, computed {} ({})",
            l.m,
            l.residue_mod_9,
            if l.predicts_total_ramification { "totally ramified" } else { "not totally ramified" },
            if l.totally_ramified { "totally ramified" } else { "not totally ramified" },
            if l.agree { "agree" } else { "DISAGREE" }
        ));
    }
    if let Some(c) = &r.class_group {
        match &c.h {
            Some(h) => line(format!("class group      h = {h}, divisors [{}]", c.divisors.join(", "))),
            None => line(format!("class group      {}", c.status)),
        }
    }
    s
}
