//! Integer matrices with Hermite and Smith normal forms.
//!
//! Row convention throughout: a matrix stands for the lattice spanned by its
//! rows, and `hnf` returns the unique row-echelon basis of that lattice
//! (positive pivots, entries above each pivot reduced into `[0, pivot)`).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::int::ext_gcd;
use super::BigRat;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * q;
            self.data[dst * self.cols + c] -= v;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * q;
            self.data[r * self.cols + dst] -= v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = !sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign {
            -d
        } else {
            d
        }
    }

    /// Row-style Hermite normal form with unimodular transform:
    /// `transform * self == h`.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut t = IntMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            loop {
                let piv =
                    (r..self.rows).filter(|&i| !h[(i, c)].is_zero()).min_by(|&a, &b| h[(a, c)].abs().cmp(&h[(b, c)].abs()).then(a.cmp(&b)));
                let Some(piv) = piv else { break };
                h.swap_rows(piv, r);
                t.swap_rows(piv, r);
                let mut done = true;
                for i in r + 1..self.rows {
                    if h[(i, c)].is_zero() {
                        continue;
                    }
                    let q = h[(i, c)].div_floor(&h[(r, c)]);
                    h.row_submul(i, r, &q);
                    t.row_submul(i, r, &q);
                    if !h[(i, c)].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[(r, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_negative() {
                h.negate_row(r);
                t.negate_row(r);
            }
            for i in 0..r {
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                h.row_submul(i, r, &q);
                t.row_submul(i, r, &q);
            }
            r += 1;
        }
        (h, t)
    }

    /// Column-style Hermite normal form: `self * transform == h`, with `h`
    /// lower echelon (the lattice spanned by the columns).
    pub fn hnf_columns(&self) -> (IntMatrix, IntMatrix) {
        let (h, t) = self.transpose().hnf();
        (h.transpose(), t.transpose())
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        (0..h.rows).filter(|&r| h.row(r).iter().any(|x| !x.is_zero())).count()
    }

    /// Smith normal form `u * self * v == diag(divisors)` with
    /// `d_1 | d_2 | ...`; zero divisors (if any) come last.
    pub fn snf_with_transforms(&self) -> Snf {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        let k = m.min(n);
        for t in 0..k {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        if a[(i, j)].is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else { break };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let mut clean = true;
                for i in t + 1..m {
                    if a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    a.row_submul(i, t, &q);
                    u.row_submul(i, t, &q);
                    clean &= a[(i, t)].is_zero();
                }
                for j in t + 1..n {
                    if a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    a.col_submul(j, t, &q);
                    v.col_submul(j, t, &q);
                    clean &= a[(t, j)].is_zero();
                }
                if !clean {
                    continue;
                }
                let pivot = a[(t, t)].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[(i, j)] % &pivot).is_zero()));
                match bad {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        a.row_submul(t, i, &minus_one);
                        u.row_submul(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if a[(t, t)].is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        let divisors = (0..k).map(|i| a[(i, i)].clone()).collect();
        Snf { divisors, left: u, right: v }
    }

    /// Elementary divisors, `min(rows, cols)` of them, in divisibility order.
    pub fn snf(&self) -> Vec<BigInt> {
        self.snf_with_transforms().divisors
    }
}

#[derive(Clone, Debug)]
pub struct Snf {
    pub divisors: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

/// Hermite normal form of the full-rank lattice spanned by `generators`
/// (each of length `ncols`), given a positive multiple `d` of its
/// determinant. All intermediate entries stay below `d` in size.
pub fn hnf_mod(generators: &[Vec<BigInt>], ncols: usize, d: &BigInt) -> IntMatrix {
    assert!(d.is_positive(), "hnf_mod needs a positive modulus");
    let reduce = |row: &mut [BigInt], from: usize| {
        for x in row[from..].iter_mut() {
            *x = x.mod_floor(d);
        }
    };
    let mut active: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| {
            assert_eq!(g.len(), ncols, "generator length mismatch");
            let mut g = g.clone();
            reduce(&mut g, 0);
            g
        })
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out = IntMatrix::zeros(ncols, ncols);
    for c in 0..ncols {
        let mut pivot = vec![BigInt::zero(); ncols];
        pivot[c] = d.clone();
        for a in active.iter_mut() {
            if a[c].is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(&pivot[c], &a[c]);
            let pc = &pivot[c] / &g;
            let ac = &a[c] / &g;
            let new_p: Vec<BigInt> = (0..ncols).map(|j| &x * &pivot[j] + &y * &a[j]).collect();
            let new_a: Vec<BigInt> = (0..ncols).map(|j| &ac * &pivot[j] - &pc * &a[j]).collect();
            pivot = new_p;
            *a = new_a;
            reduce(a, c + 1);
            reduce(&mut pivot, c + 1);
        }
        let g = pivot[c].clone();
        let scale = d / &g;
        let mut correction: Vec<BigInt> = pivot.iter().map(|x| x * &scale).collect();
        correction[c] = BigInt::zero();
        reduce(&mut correction, c + 1);
        active.retain(|a| a.iter().any(|x| !x.is_zero()));
        if correction.iter().any(|x| !x.is_zero()) {
            active.push(correction);
        }
        for (j, x) in pivot.into_iter().enumerate() {
            out[(c, j)] = x;
        }
    }
    for c in 0..ncols {
        for i in 0..c {
            let q = out[(i, c)].div_floor(&out[(c, c)]);
            out.row_submul(i, c, &q);
        }
    }
    out
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn rat_inverse(m: &[Vec<BigRat>]) -> Option<Vec<Vec<BigRat>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRat::one() } else { BigRat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rat_det(m: &[Vec<BigRat>]) -> BigRat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRat::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    det
}

/// `v * m` for a row vector `v`.
pub fn rat_vec_mul(v: &[BigRat], m: &[Vec<BigRat>]) -> Vec<BigRat> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigRat::zero(); cols];
    for (a, row) in v.iter().zip(m) {
        if a.is_zero() {
            continue;
        }
        for (o, b) in out.iter_mut().zip(row) {
            *o += a * b;
        }
    }
    out
}

pub fn rat_mat_mul(a: &[Vec<BigRat>], b: &[Vec<BigRat>]) -> Vec<Vec<BigRat>> {
    a.iter().map(|row| rat_vec_mul(row, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_canonical_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        for r in 0..h.nrows() {
            let lead = h.row(r).iter().position(|x| !x.is_zero());
            match lead {
                None => {
                    if (r..h.nrows()).any(|i| h.row(i).iter().any(|x| !x.is_zero())) {
                        return false;
                    }
                    break;
                }
                Some(c) => {
                    if last_pivot.is_some_and(|p| c <= p) || !h[(r, c)].is_positive() {
                        return false;
                    }
                    if (0..r).any(|i| h[(i, c)].is_negative() || h[(i, c)] >= h[(r, c)]) {
                        return false;
                    }
                    last_pivot = Some(c);
                }
            }
        }
        true
    }

    #[test]
    fn identity_is_its_own_hnf() {
        let id = IntMatrix::identity(3);
        let (h, t) = id.hnf();
        assert_eq!(h, id);
        assert_eq!(t, id);
    }

    #[test]
    fn extra_row_collapses_to_unit_lattice() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3], &[1, 1]]);
        let (h, t) = m.hnf();
        assert_eq!(t.mul(&m), h);
        assert_eq!(t.det().abs(), BigInt::one());
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]));
    }

    #[test]
    fn column_hnf_of_single_row_takes_the_gcd() {
        let m = IntMatrix::from_i64(&[&[4, 6]]);
        let (h, u) = m.hnf_columns();
        assert_eq!(m.mul(&u), h);
        assert_eq!(h[(0, 0)], BigInt::from(2));
        assert_eq!(u.det().abs(), BigInt::one());
    }

    #[test]
    fn snf_examples() {
        let d = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert_eq!(d.snf(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(IntMatrix::identity(3).snf(), vec![BigInt::one(); 3]);
        assert_eq!(IntMatrix::zeros(1, 1).snf(), vec![BigInt::zero()]);
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(m.snf(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn snf_transforms_reproduce_the_diagonal() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16], &[1, 1, 1]]);
        let s = m.snf_with_transforms();
        let d = s.left.mul(&m).mul(&s.right);
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                let expect = if i == j && i < s.divisors.len() { s.divisors[i].clone() } else { BigInt::zero() };
                assert_eq!(d[(i, j)], expect);
            }
        }
        assert_eq!(s.left.det().abs(), BigInt::one());
        assert_eq!(s.right.det().abs(), BigInt::one());
    }

    #[test]
    fn hnf_mod_matches_plain_hnf() {
        let gens = IntMatrix::from_i64(&[&[6, 4, 2], &[3, 9, 12], &[0, 5, 7], &[1, 1, 8]]);
        let (h, _) = gens.hnf();
        let det: BigInt = (0..3).map(|i| h[(i, i)].clone()).product();
        let hm = hnf_mod(&gens.to_rows(), 3, &(det * 5));
        assert_eq!(hm.to_rows(), h.to_rows()[..3].to_vec());
        assert!(is_canonical_hnf(&hm));
    }

    #[test]
    fn bareiss_det() {
        let m = IntMatrix::from_i64(&[&[0, 2, 1], &[3, 1, 4], &[1, 5, 9]]);
        // 0*(9-20) - 2*(27-4) + 1*(15-1) = -46 + 14
        assert_eq!(m.det(), BigInt::from(-32));
    }

    pub(crate) fn canonical(h: &IntMatrix) -> bool {
        is_canonical_hnf(h)
    }

    #[test]
    fn hnf_outputs_are_canonical() {
        let m = IntMatrix::from_i64(&[&[3, -7, 2], &[5, 1, -4], &[0, 6, 8], &[-2, 2, 2]]);
        assert!(canonical(&m.hnf().0));
    }
}
