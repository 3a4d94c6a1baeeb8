//! Lattices over the rationals: exact LLL reduction and Fincke–Pohst
//! enumeration of short vectors.
//!
//! A [`LatticeBasis`] is a list of row vectors in an ambient space together
//! with an optional positive definite form `Q`; the inner product is
//! `<x, y> = x Q y^T` (the standard dot product when `Q` is absent).
//! Everything here is exact rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::BigRat;
use crate::error::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    pub rows: Vec<Vec<BigRat>>,
    pub form: Option<Vec<Vec<BigRat>>>,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<BigRat>>) -> Self {
        LatticeBasis { rows, form: None }
    }

    pub fn with_form(rows: Vec<Vec<BigRat>>, form: Vec<Vec<BigRat>>) -> Self {
        LatticeBasis { rows, form: Some(form) }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| BigRat::from_integer(x.into())).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn inner(&self, x: &[BigRat], y: &[BigRat]) -> BigRat {
        match &self.form {
            None => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            Some(q) => {
                let mut acc = BigRat::zero();
                for (i, a) in x.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let qy: BigRat = q[i].iter().zip(y).map(|(c, b)| c * b).sum();
                    acc += a * qy;
                }
                acc
            }
        }
    }

    pub fn gram(&self) -> Vec<Vec<BigRat>> {
        let n = self.rows.len();
        let mut g = vec![vec![BigRat::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.inner(&self.rows[i], &self.rows[j]);
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        g
    }

    /// Vector with the given integer coordinates in this basis.
    pub fn combine(&self, coeffs: &[BigInt]) -> Vec<BigRat> {
        let mut out = vec![BigRat::zero(); self.ambient_dim()];
        for (c, row) in coeffs.iter().zip(&self.rows) {
            if c.is_zero() {
                continue;
            }
            let c = BigRat::from_integer(c.clone());
            for (o, x) in out.iter_mut().zip(row) {
                *o += &c * x;
            }
        }
        out
    }

    pub fn scaled(&self, c: &BigRat) -> LatticeBasis {
        LatticeBasis { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(), form: self.form.clone() }
    }
}

/// Gram–Schmidt data from a Gram matrix: squared lengths `b` and the
/// coefficients `mu[i][j]`, `j < i`.
fn gram_schmidt(g: &[Vec<BigRat>]) -> Result<(Vec<BigRat>, Vec<Vec<BigRat>>), KernelError> {
    let n = g.len();
    let mut b = vec![BigRat::zero(); n];
    let mut mu = vec![vec![BigRat::zero(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        if !s.is_positive() {
            return Err(KernelError::DependentBasis);
        }
        b[i] = s;
    }
    Ok((b, mu))
}

/// `x` rounded to the nearest integer, ties toward -infinity.
fn round_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (num * &two - den).div_ceil(&(den * &two))
}

/// LLL reduction with parameter `delta` in (1/4, 1). Works on the Gram
/// matrix scaled to integers, with integral Gram–Schmidt data (the
/// subdeterminants `d_i` and `lambda_ij = d_j mu_ij`), so no rational
/// arithmetic is needed. The result spans the same lattice, is
/// size-reduced and satisfies the Lovász condition for every adjacent pair.
pub fn lll_reduce(basis: &LatticeBasis, delta: &BigRat) -> Result<LatticeBasis, KernelError> {
    let quarter = BigRat::new(1.into(), 4.into());
    if delta <= &quarter || delta >= &BigRat::one() {
        return Err(KernelError::InvalidParameter(format!("LLL delta {delta} outside (1/4, 1)")));
    }
    let n = basis.rows.len();
    if n == 0 {
        return Ok(basis.clone());
    }
    let qg = basis.gram();
    let scale = qg.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut g: Vec<Vec<BigInt>> =
        qg.iter().map(|r| r.iter().map(|x| (x * BigRat::from_integer(scale.clone())).to_integer()).collect()).collect();
    let (da, db) = (delta.numer().clone(), delta.denom().clone());
    // d[i + 1] is the Gram determinant of the first i + 1 vectors; d[0] = 1
    let mut d = vec![BigInt::zero(); n + 1];
    d[0] = BigInt::one();
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    let mut h: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    d[1] = g[0][0].clone();
    if !d[1].is_positive() {
        return Err(KernelError::DependentBasis);
    }

    fn reduce(k: usize, l: usize, d: &[BigInt], lam: &mut [Vec<BigInt>], h: &mut [Vec<BigInt>], g: &mut [Vec<BigInt>]) {
        let n = g.len();
        if (&lam[k][l] * BigInt::from(2)).abs() <= d[l + 1] {
            return;
        }
        let q = round_ratio(&lam[k][l], &d[l + 1]);
        for j in 0..n {
            let v = &q * &h[l][j];
            h[k][j] -= v;
        }
        for j in 0..n {
            let v = &q * &g[l][j];
            g[k][j] -= v;
        }
        for j in 0..n {
            let v = &q * &g[j][l];
            g[j][k] -= v;
        }
        let v = &q * &d[l + 1];
        lam[k][l] -= v;
        for i in 0..l {
            let v = &q * &lam[l][i];
            lam[k][i] -= v;
        }
    }

    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = g[k][j].clone();
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(KernelError::DependentBasis);
                    }
                    d[k + 1] = u;
                }
            }
        }
        reduce(k, k - 1, &d, &mut lam, &mut h, &mut g);
        let l = &lam[k][k - 1];
        if &db * &d[k + 1] * &d[k - 1] < &da * &d[k] * &d[k] - &db * l * l {
            // swap k and k - 1
            h.swap(k, k - 1);
            g.swap(k, k - 1);
            for r in g.iter_mut() {
                r.swap(k, k - 1);
            }
            for j in 0..k - 1 {
                let t = std::mem::take(&mut lam[k][j]);
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let l = lam[k][k - 1].clone();
            let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
            }
            d[k] = b;
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(k, l, &d, &mut lam, &mut h, &mut g);
            }
            k += 1;
        }
    }
    let rows = h.iter().map(|c| basis.combine(c)).collect();
    Ok(LatticeBasis { rows, form: basis.form.clone() })
}

/// `true` when every adjacent pair satisfies the Lovász condition and the
/// basis is size-reduced.
pub fn is_lll_reduced(basis: &LatticeBasis, delta: &BigRat) -> bool {
    let Ok((b, mu)) = gram_schmidt(&basis.gram()) else { return false };
    let half = BigRat::new(1.into(), 2.into());
    for i in 0..b.len() {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 {
            let lhs = &b[i] + &mu[i][i - 1] * &mu[i][i - 1] * &b[i - 1];
            if lhs < delta * &b[i - 1] {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    /// Integer coordinates with respect to the basis rows.
    pub coeffs: Vec<BigInt>,
    /// The vector in ambient coordinates.
    pub vector: Vec<BigRat>,
    /// Squared length under the lattice form.
    pub norm: BigRat,
}

/// Lazy Fincke–Pohst enumeration of the nonzero vectors of squared length
/// at most `bound`, one per `±` pair (first nonzero coefficient positive).
///
/// The depth-first order is deterministic; [`short_vectors`] collects and
/// sorts by (length, coefficients).
pub struct ShortVectors<'a> {
    basis: &'a LatticeBasis,
    n: usize,
    bound: BigRat,
    q_diag: Vec<BigRat>,
    q_off: Vec<Vec<BigRat>>,
    x: Vec<BigInt>,
    upper: Vec<BigInt>,
    remaining: Vec<BigRat>,
    level: usize,
    started: bool,
    done: bool,
}

impl<'a> ShortVectors<'a> {
    pub fn new(basis: &'a LatticeBasis, bound: &BigRat) -> Result<Self, KernelError> {
        if !bound.is_positive() {
            return Err(KernelError::InvalidParameter("enumeration bound must be positive".into()));
        }
        let g = basis.gram();
        let (b, mu) = gram_schmidt(&g)?;
        let n = g.len();
        // Q(x) = sum_i b_i (x_i + sum_{j>i} mu[j][i] x_j)^2
        let q_off: Vec<Vec<BigRat>> =
            (0..n).map(|i| (0..n).map(|j| if j > i { mu[j][i].clone() } else { BigRat::zero() }).collect()).collect();
        Ok(ShortVectors {
            basis,
            n,
            bound: bound.clone(),
            q_diag: b,
            q_off,
            x: vec![BigInt::zero(); n],
            upper: vec![BigInt::zero(); n],
            remaining: vec![BigRat::zero(); n],
            level: n.saturating_sub(1),
            started: false,
            done: n == 0,
        })
    }

    fn center(&self, i: usize) -> BigRat {
        let mut c = BigRat::zero();
        for j in i + 1..self.n {
            if !self.x[j].is_zero() {
                c += &self.q_off[i][j] * BigRat::from_integer(self.x[j].clone());
            }
        }
        c
    }

    /// Sets the range of `x[i]` from the remaining budget; returns false if
    /// empty.
    fn init_level(&mut self, i: usize) -> bool {
        let c = self.center(i);
        let u = -c;
        let s2 = &self.remaining[i] / &self.q_diag[i];
        if s2.is_negative() {
            return false;
        }
        let r = s2.floor().to_integer().sqrt();
        let fits = |x: &BigInt| {
            let d = BigRat::from_integer(x.clone()) - &u;
            &d * &d <= s2
        };
        let mut lo = u.floor().to_integer() - &r - 1;
        let mut hi = u.ceil().to_integer() + &r + 1;
        while lo <= hi && !fits(&lo) {
            lo += 1;
        }
        while hi >= lo && !fits(&hi) {
            hi -= 1;
        }
        if lo > hi {
            return false;
        }
        self.x[i] = lo;
        self.upper[i] = hi;
        true
    }

    fn spent(&self, i: usize) -> BigRat {
        let c = self.center(i);
        let d = BigRat::from_integer(self.x[i].clone()) + c;
        &self.q_diag[i] * &d * &d
    }
}

impl Iterator for ShortVectors<'_> {
    type Item = ShortVector;

    fn next(&mut self) -> Option<ShortVector> {
        if self.done {
            return None;
        }
        let n = self.n;
        // Position at the next leaf with a valid assignment.
        if !self.started {
            self.started = true;
            self.level = n - 1;
            self.remaining[n - 1] = self.bound.clone();
            if !self.init_level(n - 1) {
                self.done = true;
                return None;
            }
        } else {
            // advance from the last leaf
            self.level = 0;
            if !self.advance() {
                self.done = true;
                return None;
            }
        }
        loop {
            // descend
            while self.level > 0 {
                let i = self.level;
                let rest = &self.remaining[i] - self.spent(i);
                self.remaining[i - 1] = rest;
                if self.init_level(i - 1) {
                    self.level -= 1;
                } else if !self.advance() {
                    self.done = true;
                    return None;
                }
            }
            let is_zero = self.x.iter().all(Zero::is_zero);
            let first_positive = self.x.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive());
            if !is_zero && first_positive {
                let norm = &self.bound - &self.remaining[0] + self.spent(0);
                let vector = self.basis.combine(&self.x);
                return Some(ShortVector { coeffs: self.x.clone(), vector, norm });
            }
            if !self.advance() {
                self.done = true;
                return None;
            }
        }
    }
}

impl ShortVectors<'_> {
    /// Increments the coordinate at the current level, climbing as needed.
    fn advance(&mut self) -> bool {
        loop {
            let i = self.level;
            if self.x[i] < self.upper[i] {
                self.x[i] += 1;
                return true;
            }
            self.x[i] = BigInt::zero();
            if i + 1 >= self.n {
                return false;
            }
            self.level += 1;
        }
    }
}

/// All nonzero lattice vectors with squared length `<= bound`, one per
/// `±` pair, ordered by length then lexicographically by coefficients.
pub fn short_vectors(basis: &LatticeBasis, bound: &BigRat) -> Result<Vec<ShortVector>, KernelError> {
    let mut out: Vec<ShortVector> = ShortVectors::new(basis, bound)?.collect();
    out.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRat {
        BigRat::from_integer(n.into())
    }

    #[test]
    fn orthogonal_basis_is_fixed() {
        let b = LatticeBasis::from_integers(&[vec![3, 0], vec![0, 5]]);
        let red = lll_reduce(&b, &BigRat::new(99.into(), 100.into())).unwrap();
        assert_eq!(red.rows, b.rows);
    }

    #[test]
    fn skewed_basis_reduces() {
        let b = LatticeBasis::from_integers(&[vec![1, 0], vec![100, 1]]);
        let delta = BigRat::new(99.into(), 100.into());
        let red = lll_reduce(&b, &delta).unwrap();
        assert!(red.inner(&red.rows[0], &red.rows[0]) <= r(2));
        assert!(is_lll_reduced(&red, &delta));
    }

    #[test]
    fn dependent_basis_rejected() {
        let b = LatticeBasis::from_integers(&[vec![1, 2], vec![2, 4]]);
        assert!(lll_reduce(&b, &BigRat::new(3.into(), 4.into())).is_err());
        assert!(lll_reduce(&LatticeBasis::from_integers(&[vec![1, 0]]), &BigRat::new(1.into(), 4.into())).is_err());
    }

    #[test]
    fn square_lattice_enumeration() {
        let b = LatticeBasis::from_integers(&[vec![1, 0], vec![0, 1]]);
        let one = short_vectors(&b, &r(1)).unwrap();
        assert_eq!(one.len(), 2);
        let two = short_vectors(&b, &r(2)).unwrap();
        let coeffs: Vec<Vec<i64>> = two.iter().map(|v| v.coeffs.iter().map(|c| i64::try_from(c).unwrap()).collect()).collect();
        assert_eq!(coeffs, vec![vec![0, 1], vec![1, 0], vec![1, -1], vec![1, 1]]);
        let none = short_vectors(&LatticeBasis::from_integers(&[vec![2, 0], vec![0, 2]]), &r(3)).unwrap();
        assert!(none.is_empty());
    }
}
