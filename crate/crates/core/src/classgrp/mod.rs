//! Ideal class groups from a Minkowski-bound factor base.
//!
//! Primes of small norm form a dense core. Every other factor-base prime
//! gets one relation expressing it through primes of smaller index, so it
//! can be substituted away; the class group is then the cokernel of the
//! core relation lattice, read off from its Smith normal form. The search
//! stops once that form is unchanged by a round with doubled budget.

mod cache;
mod principal;
mod relations;

pub use cache::{cache_path, load_cached, store_cached};
pub use relations::{Relation, RelationMatrix, SearchBudget};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{element_ideal, factor_prime, valuation, FractionalIdeal, PrimeIdeal};
use crate::kernel::int::{factor, floor_root, primes_up_to};
use crate::kernel::matrix::hnf_mod;
use crate::kernel::{BigRat, IntMatrix};
use crate::numfield::{FieldElement, MaximalOrder};

/// Upper bound for `(n!/n^n) (4/pi)^r2 sqrt|d|`, with `pi` and the square
/// root replaced by rational bounds accurate to about 1e-12.
pub fn minkowski_bound(order: &MaximalOrder) -> BigRat {
    let n = order.degree() as u64;
    let (_, r2) = order.field().signature();
    let scale = BigInt::from(10u64).pow(12);
    let pi_lower = BigRat::new(BigInt::from(3_141_592_653_589u64), BigInt::from(1_000_000_000_000u64));
    let sqrt_upper = BigRat::new(floor_root(&(order.disc().abs() * &scale * &scale), 2) + 1, scale);
    let mut b = BigRat::new(crate::kernel::int::factorial(n), BigInt::from(n).pow(n as u32)) * sqrt_upper;
    for _ in 0..r2 {
        b = b * BigRat::from_integer(4.into()) / &pi_lower;
    }
    b
}

/// All prime ideals of norm at most `bound`, ordered by (norm, ideal).
#[derive(Clone, Debug)]
pub struct FactorBase {
    pub bound: BigRat,
    pub primes: Vec<PrimeIdeal>,
    rational: Vec<u64>,
    /// Full decomposition of each rational prime up to the bound, with the
    /// factor-base index of each prime ideal (if its norm is within bound).
    decompositions: BTreeMap<u64, Vec<(PrimeIdeal, Option<usize>)>>,
}

impl FactorBase {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Rational primes up to the bound, ascending.
    pub fn rational_primes(&self) -> &[u64] {
        &self.rational
    }

    pub fn decomposition(&self, p: u64) -> &[(PrimeIdeal, Option<usize>)] {
        self.decompositions.get(&p).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, prime: &PrimeIdeal) -> Option<usize> {
        let p = prime.p.to_u64()?;
        self.decomposition(p).iter().find(|(q, _)| q.ideal == prime.ideal).and_then(|(_, i)| *i)
    }

    /// Number of primes with norm at most `b`.
    fn count_up_to(&self, b: u64) -> usize {
        self.primes.iter().take_while(|q| q.norm() <= BigInt::from(b)).count()
    }
}

pub fn build_factor_base(order: &MaximalOrder, bound: &BigRat) -> Result<FactorBase> {
    let limit = bound.floor().to_integer().to_u64().unwrap_or(0);
    let rational = primes_up_to(limit);
    let decomposed: Vec<Result<Vec<PrimeIdeal>>> = rational.par_iter().map(|&p| factor_prime(order, &BigInt::from(p))).collect();
    let mut all = Vec::new();
    for (d, &p) in decomposed.into_iter().zip(&rational) {
        for q in d? {
            all.push((p, q));
        }
    }
    let bound_int = BigInt::from(limit);
    let mut primes: Vec<PrimeIdeal> = all.iter().filter(|(_, q)| q.norm() <= bound_int).map(|(_, q)| q.clone()).collect();
    primes.sort();
    let mut decompositions: BTreeMap<u64, Vec<(PrimeIdeal, Option<usize>)>> = BTreeMap::new();
    for (p, q) in all {
        let idx = primes.binary_search(&q).ok();
        decompositions.entry(p).or_default().push((q, idx));
    }
    Ok(FactorBase { bound: bound.clone(), primes, rational, decompositions })
}

/// How the relation search ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Saturation {
    /// Empty factor base: the class group is trivial by the Minkowski bound.
    Trivial,
    /// Full rank and identical Smith forms in the last two rounds.
    Stabilized { rounds: u32, relations: usize, history: Vec<Vec<BigInt>> },
}

#[derive(Clone, Debug)]
pub struct ClassGroupData {
    order: Arc<MaximalOrder>,
    pub factor_base: FactorBase,
    pub relations: RelationMatrix,
    /// Elementary divisors greater than one, `d_1 | d_2 | ...`.
    pub divisors: Vec<BigInt>,
    pub class_number: BigInt,
    /// Generators of the cyclic factors as factor-base exponent vectors.
    pub generators: Vec<Vec<(usize, i64)>>,
    pub status: Saturation,
    /// Class of each factor-base prime in `Z/d_1 x Z/d_2 x ...`.
    class_map: Vec<Vec<BigInt>>,
    budget: SearchBudget,
    solver: OnceLock<Arc<principal::CoreSolver>>,
}

/// Factor-base exponents `A` and elements `(x_j, v_j)` of a decomposed ideal.
type Decomposition = (Vec<BigInt>, Vec<(Vec<BigInt>, i64)>);

/// `prime = (element) * prod P_i^e_i` over the factor base.
struct PrimeRelation {
    element: Option<Vec<BigInt>>,
    exponents: Vec<(usize, i64)>,
}

/// Rank of an integer matrix modulo a large prime (a lower bound for the
/// rank over Q), with the pivot rows used.
fn rank_mod_p(rows: &[Vec<i64>], ncols: usize) -> (usize, Vec<usize>) {
    const P: u64 = (1 << 61) - 1;
    let mut basis: Vec<(Vec<u64>, usize)> = Vec::new();
    let mut pivot_rows = Vec::new();
    let to_fp = |x: i64| x.rem_euclid(P as i64) as u64;
    for (ri, r) in rows.iter().enumerate() {
        let mut v: Vec<u64> = r.iter().map(|&x| to_fp(x)).collect();
        for (b, c) in &basis {
            let k = v[*c];
            if k != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x as u128 + (P - k) as u128 * *y as u128 % P as u128) as u64 % P;
                }
            }
        }
        if let Some(c) = v.iter().position(|&x| x != 0) {
            let inv = crate::kernel::int::inv_mod_u64(v[c], P);
            for x in v.iter_mut() {
                *x = crate::kernel::int::mul_mod_u64(*x, inv, P);
            }
            basis.push((v, c));
            pivot_rows.push(ri);
            if basis.len() == ncols {
                break;
            }
        }
    }
    (basis.len(), pivot_rows)
}

fn dense(rows: &BTreeMap<Vec<(usize, i64)>, Vec<BigInt>>, core: usize) -> Vec<Vec<i64>> {
    rows.keys()
        .map(|e| {
            let mut v = vec![0i64; core];
            for &(i, x) in e {
                v[i] = x;
            }
            v
        })
        .collect()
}

struct Snf {
    divisors: Vec<BigInt>,
    right: IntMatrix,
}

/// Smith form of a full-rank relation lattice: HNF modulo the determinant
/// of an independent square subset, then SNF of the square HNF.
fn relation_snf(rows: &[Vec<i64>], core: usize) -> Option<Snf> {
    let (rank, pivots) = rank_mod_p(rows, core);
    if rank < core {
        return None;
    }
    let square = IntMatrix::from_rows(pivots.iter().map(|&i| rows[i].iter().map(|&x| BigInt::from(x)).collect()).collect());
    let d = square.det().abs();
    let gens: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let h = hnf_mod(&gens, core, &d);
    let s = h.snf_with_transforms();
    Some(Snf { divisors: s.divisors, right: s.right })
}

fn default_core_bound(order: &MaximalOrder) -> u64 {
    let ln = order.disc().abs().to_f64().map_or(f64::MAX, f64::ln);
    (0.3 * ln * ln).max(50.0) as u64
}

#[derive(Clone, Debug, Default)]
pub struct ClassGroupOptions {
    pub budget: SearchBudget,
    /// Directory of the on-disk relation cache; `None` disables it.
    pub cache_dir: Option<PathBuf>,
    /// Factor-base bound override (must be at least the Minkowski bound to
    /// keep the result unconditional).
    pub bound: Option<BigRat>,
}

pub fn class_group(order: &Arc<MaximalOrder>) -> Result<ClassGroupData> {
    class_group_with(order, &ClassGroupOptions::default())
}

pub fn class_group_with(order: &Arc<MaximalOrder>, opts: &ClassGroupOptions) -> Result<ClassGroupData> {
    let budget = &opts.budget;
    if !relations::is_positive_budget(budget) {
        return Err(Error::InvalidInput("search budget must be positive".into()));
    }
    let mk = minkowski_bound(order);
    let bound = match &opts.bound {
        Some(b) if b < &mk => return Err(Error::InvalidInput("factor-base bound below the Minkowski bound".into())),
        Some(b) => b.clone(),
        None => mk,
    };
    let fb = build_factor_base(order, &bound)?;
    if let Some(dir) = &opts.cache_dir {
        match load_cached(dir, order, &fb) {
            Ok(Some(cg)) => {
                log::info!("class group loaded from cache");
                return Ok(cg);
            }
            Ok(None) => {}
            Err(e) => log::warn!("ignoring cache entry: {e}"),
        }
    }
    let cg = compute(order, fb, budget)?;
    if let Some(dir) = &opts.cache_dir {
        if let Err(e) = store_cached(dir, &cg) {
            log::warn!("could not write class group cache: {e}");
        }
    }
    Ok(cg)
}

fn core_size(order: &MaximalOrder, fb: &FactorBase, budget: &SearchBudget) -> usize {
    let b = budget.core_bound.unwrap_or_else(|| default_core_bound(order));
    fb.count_up_to(b).max(1).min(fb.len())
}

fn compute(order: &Arc<MaximalOrder>, fb: FactorBase, budget: &SearchBudget) -> Result<ClassGroupData> {
    if fb.is_empty() {
        let relations = RelationMatrix { core: 0, core_rows: Vec::new(), eliminations: Vec::new() };
        return Ok(ClassGroupData::assemble(order.clone(), fb, relations, None, Saturation::Trivial, budget.clone()));
    }
    let core = core_size(order, &fb, budget);
    log::info!("factor base: {} primes, bound {:.1}, core {}", fb.len(), to_f64(&fb.bound), core);
    let eliminations = relations::eliminations(order, &fb, core, budget)?;
    log::info!("eliminated {} non-core primes", eliminations.len());

    let total = relations::schedule_len(core);
    // fixed batch size keeps the relation set independent of thread count
    let batch = 16;
    let mut rows = BTreeMap::new();
    let mut visited = 0;
    // first round: visit ideals until the core lattice has full rank
    loop {
        if visited >= total {
            break;
        }
        let end = (visited + batch).min(total);
        relations::merge(
            &mut rows,
            relations::core_relations(order, &fb, core, visited..end, budget.radius_factor, budget.candidates, budget.precision)?,
        );
        visited = end;
        if rows.len() >= core + budget.extra_relations && rank_mod_p(&dense(&rows, core), core).0 == core {
            break;
        }
    }
    let mut history: Vec<Vec<BigInt>> = Vec::new();
    let mut last = relation_snf(&dense(&rows, core), core);
    if let Some(s) = &last {
        history.push(s.divisors.clone());
    }
    let mut round = 1;
    let mut stable = false;
    while round < budget.max_rounds {
        let radius = budget.radius_factor << round;
        let cap = budget.candidates << round;
        let upto = (visited << 1).min(total).max(visited);
        relations::merge(&mut rows, relations::core_relations(order, &fb, core, 0..upto, radius, cap, budget.precision)?);
        visited = upto;
        round += 1;
        let next = relation_snf(&dense(&rows, core), core);
        log::info!(
            "round {round}: {} relations, divisors {:?}",
            rows.len(),
            next.as_ref().map(|s| s.divisors.iter().filter(|d| !d.is_one()).cloned().collect::<Vec<_>>())
        );
        if let Some(s) = &next {
            history.push(s.divisors.clone());
        }
        if let (Some(a), Some(b)) = (&last, &next) {
            if a.divisors == b.divisors {
                stable = true;
                last = next;
                break;
            }
        }
        last = next;
    }
    let Some(snf) = last.filter(|_| stable) else {
        return Err(Error::Inconclusive(format!("relation lattice not saturated after {round} rounds")));
    };
    let core_rows: Vec<Relation> = rows.into_iter().map(|(exponents, witness)| Relation { exponents, witness }).collect();
    let relations = RelationMatrix { core, core_rows, eliminations };
    let status = Saturation::Stabilized { rounds: round, relations: relations.core_rows.len(), history };
    Ok(ClassGroupData::assemble(order.clone(), fb, relations, Some(snf), status, budget.clone()))
}

fn to_f64(q: &BigRat) -> f64 {
    q.numer().to_f64().unwrap_or(f64::MAX) / q.denom().to_f64().unwrap_or(1.0)
}

fn reduce_class(v: &mut [BigInt], divisors: &[BigInt]) {
    for (x, d) in v.iter_mut().zip(divisors) {
        *x = x.mod_floor(d);
    }
}

impl ClassGroupData {
    fn assemble(
        order: Arc<MaximalOrder>,
        fb: FactorBase,
        relations: RelationMatrix,
        snf: Option<Snf>,
        status: Saturation,
        budget: SearchBudget,
    ) -> Self {
        let core = relations.core;
        let (divisors, class_map, generators) = match snf {
            None => (Vec::new(), vec![Vec::new(); fb.len()], Vec::new()),
            Some(s) => {
                let keep: Vec<usize> = (0..s.divisors.len()).filter(|&i| !s.divisors[i].is_one()).collect();
                let divisors: Vec<BigInt> = keep.iter().map(|&i| s.divisors[i].clone()).collect();
                let mut class_map: Vec<Vec<BigInt>> = Vec::with_capacity(fb.len());
                for k in 0..core {
                    let mut v: Vec<BigInt> = keep.iter().map(|&i| s.right[(k, i)].clone()).collect();
                    reduce_class(&mut v, &divisors);
                    class_map.push(v);
                }
                for r in &relations.eliminations {
                    let mut v = vec![BigInt::zero(); divisors.len()];
                    for &(j, e) in &r.exponents[..r.exponents.len() - 1] {
                        for (x, c) in v.iter_mut().zip(&class_map[j]) {
                            *x -= c * e;
                        }
                    }
                    reduce_class(&mut v, &divisors);
                    class_map.push(v);
                }
                // generators: rows of V^-1 restricted to the kept columns
                let vinv = crate::kernel::matrix::rat_inverse(
                    &s.right.to_rows().into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect::<Vec<_>>(),
                )
                .expect("unimodular");
                let generators = keep
                    .iter()
                    .map(|&i| {
                        vinv[i]
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(j, c)| (j, c.to_integer().to_i64().expect("small generator exponent")))
                            .collect()
                    })
                    .collect();
                (divisors, class_map, generators)
            }
        };
        let class_number = divisors.iter().fold(BigInt::one(), |a, d| a * d);
        ClassGroupData {
            order,
            factor_base: fb,
            relations,
            divisors,
            class_number,
            generators,
            status,
            class_map,
            budget,
            solver: OnceLock::new(),
        }
    }

    pub fn order(&self) -> &Arc<MaximalOrder> {
        &self.order
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// `v_3` of the class number, and the 3-rank of the group.
    pub fn three_part(&self) -> (u32, usize) {
        let three = BigInt::from(3);
        let mut h = self.class_number.clone();
        let mut v = 0;
        while h.is_multiple_of(&three) {
            h /= &three;
            v += 1;
        }
        (v, self.divisors.iter().filter(|d| d.is_multiple_of(&three)).count())
    }

    /// Class of a factor-base prime.
    pub fn class_of_index(&self, k: usize) -> &[BigInt] {
        &self.class_map[k]
    }

    /// Relates a prime ideal to the factor base. Primes outside it are
    /// divided out of a short element whose cofactor is smooth.
    fn relate_prime(&self, prime: &PrimeIdeal) -> Result<PrimeRelation> {
        if let Some(k) = self.factor_base.index_of(prime) {
            return Ok(PrimeRelation { element: None, exponents: vec![(k, 1)] });
        }
        let order = &*self.order;
        let fb = &self.factor_base;
        for step in 0..4u32 {
            let radius = self.budget.radius_factor << step;
            let cap = self.budget.candidates << step;
            'candidates: for x in relations::short_elements(order, &prime.ideal, radius, cap, self.budget.precision)? {
                if valuation(order, prime, &x) != 1 {
                    continue;
                }
                let cofactor = order.norm_int(&x).abs() / prime.norm();
                let mut rest = cofactor.clone();
                for &p in fb.rational_primes() {
                    let pb = BigInt::from(p);
                    while rest.is_multiple_of(&pb) {
                        rest /= &pb;
                    }
                }
                if !rest.is_one() {
                    continue;
                }
                let mut exponents = Vec::new();
                for (p, _) in factor(&cofactor, &[]) {
                    let p = p.to_u64().expect("factor-base prime");
                    for (q, idx) in fb.decomposition(p) {
                        if q.ideal == prime.ideal {
                            continue;
                        }
                        let v = valuation(order, q, &x);
                        if v == 0 {
                            continue;
                        }
                        match idx {
                            Some(i) => exponents.push((*i, -(v as i64))),
                            None => continue 'candidates,
                        }
                    }
                }
                exponents.sort();
                return Ok(PrimeRelation { element: Some(x), exponents });
            }
        }
        Err(Error::Inconclusive(format!("could not reduce prime above {} onto the factor base", prime.p)))
    }

    /// Class of an arbitrary prime ideal.
    pub fn class_of_prime(&self, prime: &PrimeIdeal) -> Result<Vec<BigInt>> {
        let r = self.relate_prime(prime)?;
        let mut cls = vec![BigInt::zero(); self.divisors.len()];
        for (k, e) in r.exponents {
            for (c, m) in cls.iter_mut().zip(&self.class_map[k]) {
                *c += m * e;
            }
        }
        reduce_class(&mut cls, &self.divisors);
        Ok(cls)
    }

    /// Writes an integral ideal as `prod x_j^v_j * prod P_i^A_i`.
    fn decompose(&self, a: &FractionalIdeal) -> Result<Decomposition> {
        let order = &*self.order;
        let lookup = |p: &BigInt| -> Result<Vec<PrimeIdeal>> {
            match p.to_u64().map(|q| self.factor_base.decomposition(q)) {
                Some(d) if !d.is_empty() => Ok(d.iter().map(|(q, _)| q.clone()).collect()),
                _ => factor_prime(order, p),
            }
        };
        let mut exps = vec![BigInt::zero(); self.factor_base.len()];
        let mut elements = Vec::new();
        for (q, v) in crate::ideal::factor_ideal(order, a, &lookup)? {
            let v = i64::from(v);
            let r = self.relate_prime(&q)?;
            for (k, e) in r.exponents {
                exps[k] += e * v;
            }
            if let Some(x) = r.element {
                elements.push((x, v));
            }
        }
        Ok((exps, elements))
    }

    /// Class of a nonzero integral ideal.
    pub fn class_of(&self, a: &FractionalIdeal) -> Result<Vec<BigInt>> {
        let num = a.scale(&BigRat::from_integer(a.den().clone()));
        let (exps, _) = self.decompose(&num)?;
        let mut cls = vec![BigInt::zero(); self.divisors.len()];
        for (k, e) in exps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            for (c, m) in cls.iter_mut().zip(&self.class_map[k]) {
                *c += m * e;
            }
        }
        reduce_class(&mut cls, &self.divisors);
        Ok(cls)
    }

    fn solver(&self) -> Result<&principal::CoreSolver> {
        if self.solver.get().is_none() {
            let s = principal::CoreSolver::new(&self.order, &self.relations.core_rows, self.relations.core, &self.class_number)?;
            let _ = self.solver.set(Arc::new(s));
        }
        Ok(self.solver.get().expect("initialized"))
    }

    /// Approximate log embedding of a generator of the integral ideal `a`,
    /// or `None` when `a` is not principal.
    fn generator_logs(&self, a: &FractionalIdeal) -> Result<Option<Vec<f64>>> {
        let order = &*self.order;
        let core = self.relations.core;
        let solver = self.solver()?;
        let emb = order.embeddings(64)?;
        let (mut exps, elements) = self.decompose(a)?;
        let mut logs = vec![0.0f64; emb.roots().len()];
        let mut add = |x: &[BigInt], c: &BigInt| {
            let c = c.to_f64().unwrap_or(f64::NAN);
            for (l, v) in logs.iter_mut().zip(emb.log_abs(x)) {
                *l += c * v;
            }
        };
        for (x, v) in &elements {
            add(x, &BigInt::from(*v));
        }
        // P_k = (w) prod_{j<k} P_j^-e_j for each eliminated prime
        for k in (core..exps.len()).rev() {
            let ak = std::mem::take(&mut exps[k]);
            if ak.is_zero() {
                continue;
            }
            let r = &self.relations.eliminations[k - core];
            for &(j, e) in &r.exponents[..r.exponents.len() - 1] {
                exps[j] -= &ak * e;
            }
            add(&r.witness, &ak);
        }
        let Some(core_logs) = solver.solve(&exps[..core]) else { return Ok(None) };
        for (l, c) in logs.iter_mut().zip(core_logs) {
            *l += c;
        }
        let ln_norm = a.norm().to_integer().to_f64().map_or(f64::NAN, f64::ln);
        solver.reduce(&mut logs, ln_norm, order.degree());
        Ok(Some(logs))
    }
}

/// Verdict of a principality test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Principal,
    NotPrincipal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalityWitness {
    pub target: FractionalIdeal,
    pub verdict: Verdict,
    /// Generator with `element_ideal(generator) == target`, when principal.
    pub generator: Option<FieldElement>,
    /// Class coordinates in `Z/d_1 x Z/d_2 x ...`.
    pub class: Option<Vec<BigInt>>,
}

/// Looks for a generator among short elements of an integral ideal.
fn find_generator(order: &MaximalOrder, a: &FractionalIdeal, budget: &SearchBudget, steps: u32) -> Result<Option<Vec<BigInt>>> {
    let target = a.norm().to_integer();
    for step in 0..steps {
        let radius = budget.radius_factor << step;
        let cap = budget.candidates << step;
        for x in relations::short_elements(order, a, radius, cap, budget.precision)? {
            if order.norm_int(&x).abs() == target {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// Decides whether a nonzero fractional ideal is principal.
pub fn is_principal(cg: &ClassGroupData, a: &FractionalIdeal) -> Result<PrincipalityWitness> {
    let order = &**cg.order();
    let den = BigRat::from_integer(a.den().clone());
    let num = a.scale(&den);
    let finish = |x: Vec<BigInt>| -> Result<PrincipalityWitness> {
        let g = FieldElement::from_int_coords(&x).scale(&(BigRat::one() / &den));
        if &element_ideal(order, &g)? != a {
            return Err(Error::Inconsistent("generator does not reproduce the ideal".into()));
        }
        Ok(PrincipalityWitness { target: a.clone(), verdict: Verdict::Principal, generator: Some(g), class: None })
    };
    if let Some(x) = find_generator(order, &num, cg.budget(), 1)? {
        return finish(x);
    }
    let cls = cg.class_of(&num)?;
    if cls.iter().any(|c| !c.is_zero()) {
        return Ok(PrincipalityWitness { target: a.clone(), verdict: Verdict::NotPrincipal, generator: None, class: Some(cls) });
    }
    if cg.relations.core > 0 {
        let Some(logs) = cg.generator_logs(&num)? else {
            return Err(Error::Inconsistent("trivial class outside the relation lattice".into()));
        };
        for step in 0..4u32 {
            if let Some(x) = principal::weighted_search(order, &num, &logs, cg.budget().candidates << (2 * step))? {
                return finish(x);
            }
        }
    }
    match find_generator(order, &num, cg.budget(), 4)? {
        Some(x) => finish(x),
        None => Err(Error::Inconclusive("ideal class is trivial but no generator was found".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::IntPoly;
    use crate::numfield::{build_field, NumberField};

    fn order_of(f: &[i64]) -> Arc<MaximalOrder> {
        Arc::new(MaximalOrder::compute(&build_field(&IntPoly::from_i64s(f)).unwrap()).unwrap())
    }

    #[test]
    fn minkowski_bounds() {
        let b = to_f64(&minkowski_bound(&order_of(&[6, 1, 1])));
        assert!((b - 3.0532).abs() < 1e-3, "{b}");
        let b = to_f64(&minkowski_bound(&order_of(&[1, 1, 1])));
        assert!((b - 1.1027).abs() < 1e-3, "{b}");
    }

    #[test]
    fn quadratic_class_numbers() {
        for (f, h) in [(vec![1, 1, 1], 1), (vec![1, 0, 1], 1), (vec![5, 0, 1], 2), (vec![6, 1, 1], 3)] {
            let cg = class_group(&order_of(&f)).unwrap();
            assert_eq!(cg.class_number, BigInt::from(h), "{f:?}");
        }
    }

    #[test]
    fn pure_cubic_two_is_trivial() {
        let o = Arc::new(MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(2)).unwrap()).unwrap());
        assert_eq!(class_group(&o).unwrap().class_number, BigInt::one());
    }

    #[test]
    fn principality_in_imaginary_quadratic() {
        let o = order_of(&[5, 0, 1]);
        let cg = class_group(&o).unwrap();
        let p2 = &factor_prime(&o, &BigInt::from(2)).unwrap()[0];
        let w = is_principal(&cg, &p2.ideal).unwrap();
        assert_eq!(w.verdict, Verdict::NotPrincipal);
        let sq = p2.ideal.mul(&o, &p2.ideal);
        let w = is_principal(&cg, &sq).unwrap();
        assert_eq!(w.verdict, Verdict::Principal);
        let g = w.generator.unwrap();
        assert_eq!(element_ideal(&o, &g).unwrap(), sq);
    }
}
