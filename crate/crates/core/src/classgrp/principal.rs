//! Generators of principal ideals.
//!
//! When the class of `a` is trivial, its factor-base exponent vector is an
//! integer combination of relations, so `a = (prod w_r^c_r)`. The product
//! is never expanded. Only its logarithmic embedding is formed, reduced by
//! units coming from dependencies among the relations, and used to weight
//! the T2 form so that a generator of `a` becomes one of the shortest
//! vectors of the lattice `a`. Candidates are verified exactly.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ideal::FractionalIdeal;
use crate::kernel::lattice::{lll_reduce, LatticeBasis};
use crate::kernel::matrix::hnf_mod;
use crate::kernel::{BigRat, IntMatrix};
use crate::numfield::{MaximalOrder, MAX_PRECISION};

use super::relations::{float_candidates, Relation};

/// Relations kept beyond a generating set, as a source of units.
const EXTRA_ROWS: usize = 8;

/// A subset of core relations generating the relation lattice, with its
/// Hermite form and transform, and the unit logs of its dependencies.
#[derive(Clone, Debug)]
pub(crate) struct CoreSolver {
    hnf: IntMatrix,
    transform: IntMatrix,
    kernel: Vec<Vec<BigInt>>,
    row_logs: Vec<Vec<f64>>,
    unit_logs: Vec<Vec<f64>>,
    real_places: usize,
}

fn dense_row(exps: &[(usize, i64)], n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    for &(i, e) in exps {
        v[i] = BigInt::from(e);
    }
    v
}

fn lattice_det(rows: &[Vec<BigInt>], n: usize, d: &BigInt) -> BigInt {
    let h = hnf_mod(rows, n, d);
    (0..n).map(|i| h[(i, i)].clone()).product()
}

fn delta() -> BigRat {
    BigRat::new(99.into(), 100.into())
}

fn int_lattice(rows: Vec<Vec<BigInt>>) -> LatticeBasis {
    LatticeBasis::new(rows.into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect())
}

fn int_rows(b: &LatticeBasis) -> Vec<Vec<BigInt>> {
    b.rows.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect()
}

/// `sum c_i v_i` for f64 vectors.
fn combine_logs(coeffs: &[BigInt], logs: &[Vec<f64>], places: usize) -> Vec<f64> {
    let mut out = vec![0.0; places];
    for (c, l) in coeffs.iter().zip(logs) {
        if c.is_zero() {
            continue;
        }
        let c = c.to_f64().unwrap_or(f64::NAN);
        for (o, x) in out.iter_mut().zip(l) {
            *o += c * x;
        }
    }
    out
}

impl CoreSolver {
    /// `class_number` is the determinant of the full relation lattice.
    pub(crate) fn new(order: &MaximalOrder, core_rows: &[Relation], core: usize, class_number: &BigInt) -> Result<Self> {
        let all: Vec<Vec<BigInt>> = core_rows.iter().map(|r| dense_row(&r.exponents, core)).collect();
        let small: Vec<Vec<i64>> = all.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap_or(0)).collect()).collect();
        let (rank, pivots) = super::rank_mod_p(&small, core);
        if rank < core {
            return Err(Error::Inconsistent("core relations do not have full rank".into()));
        }
        let mut chosen = pivots.clone();
        let mut current: Vec<Vec<BigInt>> = pivots.iter().map(|&i| all[i].clone()).collect();
        let d = IntMatrix::from_rows(current.clone()).det().abs();
        let mut det = lattice_det(&current, core, &d);
        let mut extra = 0;
        for (i, row) in all.iter().enumerate() {
            if extra >= EXTRA_ROWS {
                break;
            }
            if chosen.contains(&i) {
                continue;
            }
            current.push(row.clone());
            if &det == class_number {
                chosen.push(i);
                extra += 1;
                continue;
            }
            let next = lattice_det(&current, core, &d);
            if next < det {
                det = next;
                chosen.push(i);
            } else {
                current.pop();
            }
        }
        if &det != class_number {
            return Err(Error::Inconsistent(format!("relation subset has determinant {det}, expected {class_number}")));
        }
        let m = IntMatrix::from_rows(current);
        let (hnf, transform) = m.hnf();
        let kernel: Vec<Vec<BigInt>> = (core..m.nrows()).map(|i| transform.row(i).to_vec()).collect();
        let kernel = if kernel.is_empty() { kernel } else { int_rows(&lll_reduce(&int_lattice(kernel), &delta())?) };
        let emb = order.embeddings(64)?;
        let places = emb.roots().len();
        let row_logs: Vec<Vec<f64>> = chosen.iter().map(|&r| emb.log_abs(&core_rows[r].witness)).collect();
        let unit_logs = kernel.iter().map(|k| combine_logs(k, &row_logs, places)).filter(|u| u.iter().any(|x| x.abs() > 1e-6)).collect();
        Ok(CoreSolver { hnf, transform, kernel, row_logs, unit_logs, real_places: emb.num_real() })
    }

    pub(crate) fn places(&self) -> usize {
        self.row_logs.first().map_or(0, |l| l.len())
    }

    /// Log embedding of a generator of `prod P_i^t_i` (core primes), or
    /// `None` if `t` is not in the relation lattice.
    pub(crate) fn solve(&self, t: &[BigInt]) -> Option<Vec<f64>> {
        let n = t.len();
        let mut rest = t.to_vec();
        let mut y = vec![BigInt::zero(); n];
        for i in 0..n {
            let piv = &self.hnf[(i, i)];
            if !(&rest[i] % piv).is_zero() {
                return None;
            }
            y[i] = &rest[i] / piv;
            for j in i..n {
                let v = &y[i] * &self.hnf[(i, j)];
                rest[j] -= v;
            }
        }
        let k = self.transform.nrows();
        let c: Vec<BigInt> = (0..k).map(|j| (0..n).map(|i| &y[i] * &self.transform[(i, j)]).sum()).collect();
        let c = self.shorten(c);
        Some(combine_logs(&c, &self.row_logs, self.places()))
    }

    /// Reduces `c` modulo the kernel by an embedding of `(c, M)` among the
    /// kernel rows, so that the f64 sum of logs stays accurate.
    fn shorten(&self, c: Vec<BigInt>) -> Vec<BigInt> {
        if self.kernel.is_empty() {
            return c;
        }
        let norm = |v: &[BigInt]| -> BigInt { v.iter().map(|x| x * x).sum::<BigInt>().sqrt() + 1 };
        let m = self.kernel.iter().map(|k| norm(k)).max().unwrap_or_else(|| BigInt::from(1));
        let mut rows: Vec<Vec<BigInt>> = self.kernel.iter().map(|k| k.iter().cloned().chain([BigInt::zero()]).collect()).collect();
        rows.push(c.iter().cloned().chain([m.clone()]).collect());
        let Ok(red) = lll_reduce(&int_lattice(rows), &delta()) else { return c };
        for r in int_rows(&red) {
            let last = r.last().expect("nonempty row");
            if last.abs() == m {
                let sign = last.is_positive();
                return r[..r.len() - 1].iter().map(|x| if sign { x.clone() } else { -x }).collect();
            }
        }
        c
    }

    /// Subtracts integer multiples of the known unit logs from `logs`,
    /// bringing it closer to the balanced vector `ln N / n`.
    pub(crate) fn reduce(&self, logs: &mut [f64], ln_norm: f64, degree: usize) {
        let weight = |s: usize| if s < self.real_places { 1.0 } else { 2.0 };
        let mean = ln_norm / degree as f64;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).enumerate().map(|(s, (x, y))| weight(s) * x * y).sum::<f64>();
        for _ in 0..64 {
            let mut changed = false;
            for u in &self.unit_logs {
                let centered: Vec<f64> = logs.iter().map(|l| l - mean).collect();
                let q = (dot(&centered, u) / dot(u, u)).round();
                if q != 0.0 && q.is_finite() {
                    for (l, x) in logs.iter_mut().zip(u) {
                        *l -= q * x;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Searches a generator of the integral ideal `a` near the log embedding
/// `logs`. Returns its integral-basis coordinates.
pub(crate) fn weighted_search(order: &MaximalOrder, a: &FractionalIdeal, logs: &[f64], cap: usize) -> Result<Option<Vec<BigInt>>> {
    let norm = a.norm().to_integer();
    let mean = norm.to_f64().map_or(f64::NAN, f64::ln) / order.degree() as f64;
    if !mean.is_finite() || logs.iter().any(|l| !l.is_finite()) {
        return Ok(None);
    }
    let shifts: Vec<i64> = logs.iter().map(|l| ((l - mean) / std::f64::consts::LN_2).round() as i64).collect();
    let spread = shifts.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0);
    // coordinates of the generator have about `spread` bits, the form about twice that
    let need = 4 * spread + 128 + 2 * norm.bits();
    let mut prec = 64u32;
    while (prec as u64) < need {
        prec *= 2;
    }
    if prec > MAX_PRECISION {
        return Err(Error::Inconclusive(format!("generator search needs {need} bits of precision")));
    }
    let form = order.embeddings(prec)?.weighted_gram(&shifts);
    let rows: Vec<Vec<BigRat>> = a.basis_rows().into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect();
    let Ok(red) = lll_reduce(&LatticeBasis::with_form(rows, form), &delta()) else { return Ok(None) };
    let target = norm.abs();
    let is_generator = |v: &[BigInt]| v.iter().any(|x| !x.is_zero()) && order.norm_int(v).abs() == target;
    for v in int_rows(&red) {
        if is_generator(&v) {
            return Ok(Some(v));
        }
    }
    for c in float_candidates(&red, 16, cap) {
        let coeffs: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
        let v: Vec<BigInt> = red.combine(&coeffs).iter().map(|x| x.to_integer()).collect();
        if is_generator(&v) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
