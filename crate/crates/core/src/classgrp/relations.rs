//! Relation search: short elements of ideal lattices whose principal
//! ideals factor over the factor base.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{valuation_bounded, FractionalIdeal};
use crate::kernel::lattice::{lll_reduce, LatticeBasis};
use crate::kernel::BigRat;
use crate::numfield::MaximalOrder;

use super::FactorBase;

/// A principal ideal `(witness) = prod P_i^e_i` over the factor base.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    /// Sparse exponents `(factor-base index, e_i)`, sorted by index.
    pub exponents: Vec<(usize, i64)>,
    /// Integral-basis coordinates of the generating element.
    pub witness: Vec<BigInt>,
}

/// Search parameters. Each stabilization round doubles the enumeration
/// bound, the per-ideal candidate cap and the number of ideals visited.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Factor-base primes of norm up to this bound form the dense core;
    /// `None` picks `max(50, 0.3 ln^2 |d|)`.
    pub core_bound: Option<u64>,
    /// Enumeration radius as a multiple of the shortest reduced vector.
    pub radius_factor: u32,
    /// Candidates examined per ideal.
    pub candidates: usize,
    /// Relations beyond the core size required before the first round ends.
    pub extra_relations: usize,
    /// Rounds allowed before giving up.
    pub max_rounds: u32,
    /// Bits of the T2 form used for reduction and enumeration.
    pub precision: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { core_bound: None, radius_factor: 4, candidates: 48, extra_relations: 24, max_rounds: 6, precision: 64 }
    }
}

/// Relations for the dense core block plus one eliminating relation per
/// non-core prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMatrix {
    pub core: usize,
    /// Relations supported on the core primes, sorted and deduplicated.
    pub core_rows: Vec<Relation>,
    /// `eliminations[k - core]` has exponent 1 at `k` and is otherwise
    /// supported on indices below `k`.
    pub eliminations: Vec<Relation>,
}

/// Factors `(x)` over factor-base primes with index below `limit`.
/// Exact: the norm is fully factored and the valuations at every prime
/// above each rational prime must account for its full exponent.
pub(crate) fn factor_element(order: &MaximalOrder, fb: &FactorBase, x: &[BigInt], limit: usize) -> Option<Vec<(usize, i64)>> {
    if limit == 0 || x.iter().all(Zero::is_zero) {
        return None;
    }
    let norm = order.norm_int(x).abs();
    if norm.is_zero() {
        return None;
    }
    // primes are sorted by norm, not by the rational prime below them
    let max_p = fb.primes[..limit].iter().map(|q| q.p.to_u64()).max()??;
    let mut split: Vec<(u64, u32)> = Vec::new();
    match norm.to_u128() {
        Some(mut n) => {
            for &p in fb.rational_primes() {
                if n == 1 || p > max_p {
                    break;
                }
                let p128 = p as u128;
                let mut e = 0;
                while n % p128 == 0 {
                    n /= p128;
                    e += 1;
                }
                if e > 0 {
                    split.push((p, e));
                }
            }
            if n != 1 {
                return None;
            }
        }
        None => {
            let mut n = norm;
            for &p in fb.rational_primes() {
                if n.is_one() || p > max_p {
                    break;
                }
                let pb = BigInt::from(p);
                let mut e = 0;
                while (&n % &pb).is_zero() {
                    n /= &pb;
                    e += 1;
                }
                if e > 0 {
                    split.push((p, e));
                }
            }
            if !n.is_one() {
                return None;
            }
        }
    }
    let mut out = Vec::new();
    for (p, e) in split {
        let mut left = e;
        for (prime, idx) in fb.decomposition(p) {
            if left == 0 {
                break;
            }
            let v = valuation_bounded(order, prime, x, left / prime.f);
            if v == 0 {
                continue;
            }
            match idx {
                Some(i) if *i < limit => out.push((*i, v as i64)),
                _ => return None,
            }
            left -= v * prime.f;
        }
        if left != 0 {
            log::warn!("valuations above {p} do not account for the norm");
            return None;
        }
    }
    out.sort();
    Some(out)
}

/// Coefficient vectors of short lattice vectors, from a Fincke–Pohst
/// search in floating point over an LLL-reduced basis. This only proposes
/// candidates (every relation is verified exactly), so rounding can at
/// worst change which candidates are proposed; IEEE arithmetic keeps the
/// order deterministic.
pub(crate) fn float_candidates(red: &LatticeBasis, radius_factor: u32, cap: usize) -> Vec<Vec<i64>> {
    let g = red.gram();
    let n = g.len();
    let g00 = g[0][0].clone();
    let gf: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|x| (x / &g00).to_f64().unwrap_or(f64::NAN)).collect()).collect();
    let mut b = vec![0.0f64; n];
    let mut mu = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = gf[i][j];
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = gf[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
    }
    if b.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Vec::new();
    }
    let bound = radius_factor as f64 * (1.0 + 1e-9);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut rem = vec![0.0f64; n + 1];
    rem[n] = bound;
    fn center(mu: &[Vec<f64>], x: &[i64], i: usize) -> f64 {
        -(i + 1..x.len()).map(|j| mu[j][i] * x[j] as f64).sum::<f64>()
    }
    // explicit depth-first search: level i ranges over [lo_i, hi_i]
    let mut hi = vec![0i64; n];
    let mut i = n - 1;
    let set_level = |i: usize, x: &mut [i64], hi: &mut [i64], rem: &[f64]| -> bool {
        let c = center(&mu, x, i);
        let r2 = rem[i + 1] / b[i];
        if r2 < 0.0 {
            return false;
        }
        let r = r2.sqrt();
        x[i] = (c - r).ceil() as i64;
        hi[i] = (c + r).floor() as i64;
        x[i] <= hi[i]
    };
    if !set_level(i, &mut x, &mut hi, &rem) {
        return out;
    }
    loop {
        let c = center(&mu, &x, i);
        let t = x[i] as f64 - c;
        rem[i] = rem[i + 1] - b[i] * t * t;
        if i > 0 && rem[i] >= 0.0 && set_level(i - 1, &mut x, &mut hi, &rem) {
            i -= 1;
            continue;
        }
        if i == 0 && rem[0] >= 0.0 {
            if let Some(f) = x.iter().find(|c| **c != 0) {
                if *f > 0 {
                    out.push(x.clone());
                    if out.len() >= cap {
                        return out;
                    }
                }
            }
        }
        // advance, climbing as needed
        loop {
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
            if i == n {
                return out;
            }
        }
    }
}

/// Short elements of an integral ideal, in deterministic enumeration order.
pub(crate) fn short_elements(
    order: &MaximalOrder,
    a: &FractionalIdeal,
    radius_factor: u32,
    cap: usize,
    prec: u32,
) -> Result<Vec<Vec<BigInt>>> {
    let lat = a.lattice(order, prec)?;
    let delta = BigRat::new(99.into(), 100.into());
    let red = lll_reduce(&lat, &delta)?;
    let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(cap + red.rows.len());
    // the reduced basis vectors themselves come first
    for r in &red.rows {
        out.push(r.iter().map(|c| c.to_integer()).collect());
    }
    for c in float_candidates(&red, radius_factor, cap) {
        let coeffs: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
        let v: Vec<BigInt> = red.combine(&coeffs).iter().map(|c| c.to_integer()).collect();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Exponent vectors of the ideals visited by the core search: the unit
/// ideal, each core prime, then products of two core primes (graded order).
fn core_schedule(core: usize) -> Vec<Vec<usize>> {
    let mut s = vec![Vec::new()];
    s.extend((0..core).map(|i| vec![i]));
    for i in 0..core {
        for j in i..core {
            s.push(vec![i, j]);
        }
    }
    s
}

fn schedule_ideal(order: &MaximalOrder, fb: &FactorBase, idx: &[usize]) -> FractionalIdeal {
    idx.iter().fold(FractionalIdeal::unit(order.degree()), |acc, &i| acc.mul(order, &fb.primes[i].ideal))
}

/// Searches core relations over the ideals `schedule[range]`.
pub(crate) fn core_relations(
    order: &MaximalOrder,
    fb: &FactorBase,
    core: usize,
    range: std::ops::Range<usize>,
    radius_factor: u32,
    cap: usize,
    prec: u32,
) -> Result<Vec<Relation>> {
    let schedule = core_schedule(core);
    let range = range.start.min(schedule.len())..range.end.min(schedule.len());
    let found: Vec<Result<Vec<Relation>>> = schedule[range]
        .par_iter()
        .map(|idx| {
            let a = schedule_ideal(order, fb, idx);
            let mut rels = Vec::new();
            for x in short_elements(order, &a, radius_factor, cap, prec)? {
                if let Some(exps) = factor_element(order, fb, &x, core) {
                    if !exps.is_empty() {
                        rels.push(Relation { exponents: exps, witness: x });
                    }
                }
            }
            Ok(rels)
        })
        .collect();
    let mut out = Vec::new();
    for r in found {
        out.extend(r?);
    }
    Ok(out)
}

pub(crate) fn schedule_len(core: usize) -> usize {
    1 + core + core * (core + 1) / 2
}

/// Finds an element of `P_k` whose ideal is `P_k` times primes of smaller
/// index, trying `P_k`, then `P_k P_j` for small core `P_j`, with growing
/// enumeration radius.
pub(crate) fn eliminating_relation(
    order: &MaximalOrder,
    fb: &FactorBase,
    k: usize,
    core: usize,
    budget: &SearchBudget,
) -> Result<Relation> {
    let pk = &fb.primes[k].ideal;
    let mut multipliers = vec![None];
    multipliers.extend((0..core.min(8)).map(Some));
    for step in 0..4u32 {
        for m in &multipliers {
            let a = match m {
                None => pk.clone(),
                Some(j) => pk.mul(order, &fb.primes[*j].ideal),
            };
            let radius = budget.radius_factor << step;
            let cap = budget.candidates << step;
            for x in short_elements(order, &a, radius, cap, budget.precision)? {
                if let Some(exps) = factor_element(order, fb, &x, k + 1) {
                    if exps.last() == Some(&(k, 1)) {
                        return Ok(Relation { exponents: exps, witness: x });
                    }
                }
            }
        }
    }
    Err(Error::Inconclusive(format!("no eliminating relation for factor-base prime {k} within budget")))
}

/// Eliminating relations for all non-core primes, computed in parallel and
/// returned in index order.
pub(crate) fn eliminations(order: &MaximalOrder, fb: &FactorBase, core: usize, budget: &SearchBudget) -> Result<Vec<Relation>> {
    (core..fb.primes.len()).into_par_iter().map(|k| eliminating_relation(order, fb, k, core, budget)).collect()
}

/// Merges relations into a canonical set keyed by exponent vector; the
/// first witness seen for a vector is kept.
pub(crate) fn merge(into: &mut BTreeMap<Vec<(usize, i64)>, Vec<BigInt>>, rels: Vec<Relation>) {
    for r in rels {
        into.entry(r.exponents).or_insert(r.witness);
    }
}

/// Re-verifies a relation by refactoring its witness.
pub(crate) fn verify(order: &MaximalOrder, fb: &FactorBase, r: &Relation, limit: usize) -> bool {
    factor_element(order, fb, &r.witness, limit).as_deref() == Some(&r.exponents[..])
}

pub(crate) fn is_positive_budget(b: &SearchBudget) -> bool {
    b.radius_factor > 0 && b.candidates > 0 && b.max_rounds > 0 && b.precision >= 16 && !b.core_bound.is_some_and(|c| c < 2)
}
