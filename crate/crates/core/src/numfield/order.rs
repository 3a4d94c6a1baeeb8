use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernel::fp;
use crate::kernel::int::{factor, mod_u64};
use crate::kernel::matrix::{hnf_mod, rat_det, rat_inverse, rat_vec_mul};
use crate::kernel::{BigRat, IntMatrix, IntPoly};

use super::element::FieldElement;
use super::embed::EmbeddingData;
use super::field::NumberField;

/// A full-rank Z-module of the field given by the rows of `numer / denom`
/// in power-basis coordinates. Kept lower triangular with reduced
/// off-diagonal entries, so that equal modules have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderBasis {
    pub numer: IntMatrix,
    pub denom: BigInt,
}

impl OrderBasis {
    pub fn from_rational_rows(rows: &[Vec<BigRat>]) -> Self {
        let denom = rows.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let numer: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|q| (q * BigRat::from_integer(denom.clone())).to_integer()).collect()).collect();
        Self::canonical(numer, denom, None)
    }

    /// Canonical basis of the module generated by `rows / denom`. `det`, when
    /// given, is a positive multiple of the determinant of the integer
    /// lattice spanned by `rows`.
    pub fn canonical(rows: Vec<Vec<BigInt>>, denom: BigInt, det: Option<&BigInt>) -> Self {
        let n = rows[0].len();
        let rev: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().rev().cloned().collect()).collect();
        let h = match det {
            Some(d) => hnf_mod(&rev, n, d),
            None => {
                let (h, _) = IntMatrix::from_rows(rev).hnf();
                IntMatrix::from_rows(h.to_rows().into_iter().take(n).collect())
            }
        };
        let mut out: Vec<Vec<BigInt>> = h.to_rows().into_iter().rev().map(|r| r.into_iter().rev().collect()).collect();
        let g = out.iter().flatten().fold(denom.clone(), |acc, x| acc.gcd(x));
        let denom = &denom / &g;
        for r in out.iter_mut() {
            for x in r.iter_mut() {
                *x = &*x / &g;
            }
        }
        OrderBasis { numer: IntMatrix::from_rows(out), denom }
    }

    pub fn degree(&self) -> usize {
        self.numer.nrows()
    }

    /// Rows as rational power-basis vectors.
    pub fn rational_rows(&self) -> Vec<Vec<BigRat>> {
        self.numer.to_rows().into_iter().map(|r| r.into_iter().map(|x| BigRat::new(x, self.denom.clone())).collect()).collect()
    }

    /// Matrix mapping power-basis coordinates to coordinates in this basis.
    fn coordinate_map(&self) -> Vec<Vec<BigRat>> {
        rat_inverse(&self.rational_rows()).expect("full-rank basis")
    }
}

/// Structure constants: `w_i w_j = sum_k table[i][j][k] w_k`.
type MulTable = Vec<Vec<Vec<BigInt>>>;

fn mul_table(f: &IntPoly, basis: &OrderBasis, to_coords: &[Vec<BigRat>]) -> Result<MulTable> {
    let n = basis.degree();
    let polys: Vec<IntPoly> = basis.numer.to_rows().into_iter().map(IntPoly::new).collect();
    let d2 = BigRat::from_integer(&basis.denom * &basis.denom);
    let mut table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let (_, r) = (&polys[i] * &polys[j]).div_rem_monic(f);
            let v: Vec<BigRat> = (0..n).map(|k| BigRat::from_integer(r.coeff(k)) / &d2).collect();
            let c = rat_vec_mul(&v, to_coords);
            if !c.iter().all(|q| q.is_integer()) {
                return Err(Error::Inconsistent("basis is not closed under multiplication".into()));
            }
            let c: Vec<BigInt> = c.into_iter().map(|q| q.to_integer()).collect();
            table[j][i] = c.clone();
            table[i][j] = c;
        }
    }
    Ok(table)
}

fn traces(table: &MulTable) -> Vec<BigInt> {
    let n = table.len();
    (0..n).map(|k| (0..n).map(|i| table[k][i][i].clone()).sum()).collect()
}

fn trace_form_det(table: &MulTable, tr: &[BigInt]) -> BigInt {
    let n = table.len();
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| table[i][j].iter().zip(tr).map(|(a, b)| a * b).sum()).collect()).collect();
    IntMatrix::from_rows(rows).det()
}

/// One Round-2 step at `p`: returns the enlarged order, or `None` when the
/// order is already p-maximal.
fn enlarge_at(basis: &OrderBasis, table: &MulTable, p: u64) -> Option<OrderBasis> {
    let n = basis.degree();
    let pb = BigInt::from(p);
    let tp: Vec<Vec<Vec<u64>>> = table.iter().map(|r| r.iter().map(|c| c.iter().map(|x| mod_u64(x, p)).collect()).collect()).collect();
    let mul_p = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = (xi as u128 * yj as u128 % p as u128) as u64;
                for (o, &t) in out.iter_mut().zip(&tp[i][j]) {
                    *o = ((*o as u128 + c as u128 * t as u128) % p as u128) as u64;
                }
            }
        }
        out
    };
    // Frobenius power p^k >= n; its kernel is the p-radical.
    let mut e: u128 = p as u128;
    while e < n as u128 {
        e *= p as u128;
    }
    let frob: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut base: Vec<u64> = (0..n).map(|k| u64::from(k == i)).collect();
            let mut acc: Vec<u64> = (0..n).map(|k| u64::from(k == 0)).collect();
            let mut ex = e;
            while ex > 0 {
                if ex & 1 == 1 {
                    acc = mul_p(&acc, &base);
                }
                base = mul_p(&base, &base);
                ex >>= 1;
            }
            acc
        })
        .collect();
    let rad = fp::left_kernel(&frob, p);
    let pn = pb.pow(n as u32);
    let mut gens: Vec<Vec<BigInt>> = rad.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..n {
        gens.push((0..n).map(|k| if k == i { pb.clone() } else { BigInt::zero() }).collect());
    }
    let gamma = hnf_mod(&gens, n, &pn);
    let gamma_rat: Vec<Vec<BigRat>> = gamma.to_rows().into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect();
    let gamma_inv = rat_inverse(&gamma_rat).expect("radical has full rank");
    // u in U iff u * gamma_j in p * I_p for all j
    let mut m = vec![Vec::with_capacity(n * n); n];
    for (i, row) in m.iter_mut().enumerate() {
        for j in 0..n {
            let mut prod = vec![BigInt::zero(); n];
            for (k, g) in gamma.row(j).iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                for (o, t) in prod.iter_mut().zip(&table[i][k]) {
                    *o += g * t;
                }
            }
            let v: Vec<BigRat> = prod.into_iter().map(BigRat::from_integer).collect();
            for y in rat_vec_mul(&v, &gamma_inv) {
                debug_assert!(y.is_integer());
                row.push(mod_u64(&y.to_integer(), p));
            }
        }
    }
    let ker = fp::left_kernel(&m, p);
    if ker.is_empty() {
        return None;
    }
    let mut gens: Vec<Vec<BigInt>> = ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..n {
        gens.push((0..n).map(|k| if k == i { pb.clone() } else { BigInt::zero() }).collect());
    }
    let u = hnf_mod(&gens, n, &pn);
    // O' = U / p, expressed in power-basis coordinates
    let rows = u.mul(&basis.numer).to_rows();
    Some(OrderBasis::canonical(rows, &basis.denom * &pb, None))
}

/// The ring of integers of a number field, with an integral basis
/// `w_0 = 1, w_1, ..., w_{n-1}` in lower-triangular form.
pub struct MaximalOrder {
    field: NumberField,
    basis: OrderBasis,
    to_coords: Vec<Vec<BigRat>>,
    table: MulTable,
    traces: Vec<BigInt>,
    disc: BigInt,
    index: BigInt,
    embeddings: Mutex<HashMap<u32, Arc<EmbeddingData>>>,
}

impl std::fmt::Debug for MaximalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MaximalOrder")
            .field("poly", &self.field.poly().to_string())
            .field("basis", &self.basis)
            .field("disc", &self.disc)
            .finish()
    }
}

impl MaximalOrder {
    /// Round-2 maximal order computation, starting from the field's known
    /// suborder (or `Z[x]`).
    pub fn compute(field: &NumberField) -> Result<Self> {
        let n = field.degree();
        let mut basis = match field.suborder() {
            Some(b) => b.clone(),
            None => OrderBasis::canonical(IntMatrix::identity(n).to_rows(), BigInt::one(), None),
        };
        let mut to_coords = basis.coordinate_map();
        let mut table = mul_table(field.poly(), &basis, &to_coords)?;
        let start_disc = trace_form_det(&table, &traces(&table));
        let mut hints = field.prime_hints().to_vec();
        hints.extend(factor(&field.poly().discriminant(), field.prime_hints()).into_iter().map(|(p, _)| p));
        for (p, e) in factor(&start_disc, &hints) {
            if e < 2 {
                continue;
            }
            let p = p.to_u64().ok_or_else(|| Error::InvalidInput(format!("discriminant prime {p} exceeds 64 bits")))?;
            while let Some(next) = enlarge_at(&basis, &table, p) {
                basis = next;
                to_coords = basis.coordinate_map();
                table = mul_table(field.poly(), &basis, &to_coords)?;
            }
        }
        let tr = traces(&table);
        let disc = trace_form_det(&table, &tr);
        let index = basis.denom.pow(n as u32) / basis.numer.det().abs();
        if &index * &index * &disc != field.poly().discriminant() {
            return Err(Error::Inconsistent("disc(f) != index^2 * disc(O)".into()));
        }
        Ok(MaximalOrder { field: field.clone(), basis, to_coords, table, traces: tr, disc, index, embeddings: Mutex::new(HashMap::new()) })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &OrderBasis {
        &self.basis
    }

    /// Discriminant of the field.
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    /// `[O : Z[x]]`.
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    /// Coordinates of `w_i w_j`.
    pub fn structure(&self, i: usize, j: usize) -> &[BigInt] {
        &self.table[i][j]
    }

    /// Traces of the basis elements.
    pub fn basis_traces(&self) -> &[BigInt] {
        &self.traces
    }

    /// Stable digest of the defining polynomial and integral basis.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.field.poly().to_string().as_bytes());
        for x in self.basis.numer.entries() {
            h.update(x.to_string().as_bytes());
            h.update(b",");
        }
        h.update(self.basis.denom.to_string().as_bytes());
        format!("{:x}", h.finalize())
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_int_coords(&self.unit_vector(0))
    }

    pub fn unit_vector(&self, i: usize) -> Vec<BigInt> {
        (0..self.degree()).map(|k| BigInt::from(u8::from(k == i))).collect()
    }

    pub fn from_integer(&self, a: &BigInt) -> FieldElement {
        FieldElement::from_int_coords(&self.unit_vector(0).iter().map(|x| x * a).collect::<Vec<_>>())
    }

    /// Converts power-basis coordinates (`sum c_k x^k`) to this basis.
    pub fn from_power_basis(&self, v: &[BigRat]) -> FieldElement {
        let n = self.degree();
        let mut v = v.to_vec();
        v.resize(n, BigRat::zero());
        FieldElement::new(rat_vec_mul(&v, &self.to_coords))
    }

    pub fn to_power_basis(&self, a: &FieldElement) -> Vec<BigRat> {
        rat_vec_mul(a.coords(), &self.basis.rational_rows())
    }

    /// The generator `x` of the defining polynomial.
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_integer(&-self.field.poly().coeff(0));
        }
        self.from_power_basis(&[BigRat::zero(), BigRat::one()])
    }

    pub fn mul_int(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let n = self.degree();
        let mut out = vec![BigInt::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.degree();
        let mut out = vec![BigRat::zero(); n];
        for (i, xi) in a.coords().iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in b.coords().iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * BigRat::from_integer(t.clone());
                    }
                }
            }
        }
        FieldElement::new(out)
    }

    pub fn pow(&self, a: &FieldElement, mut e: u32) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by `x`: row `i` holds `w_i x`.
    pub fn mult_matrix_int(&self, x: &[BigInt]) -> IntMatrix {
        let n = self.degree();
        IntMatrix::from_rows((0..n).map(|i| self.mul_int(&self.unit_vector(i), x)).collect())
    }

    fn mult_matrix(&self, a: &FieldElement) -> Vec<Vec<BigRat>> {
        let n = self.degree();
        (0..n).map(|i| self.mul(&FieldElement::from_int_coords(&self.unit_vector(i)), a).coords().to_vec()).collect()
    }

    pub fn norm_int(&self, x: &[BigInt]) -> BigInt {
        self.mult_matrix_int(x).det()
    }

    pub fn norm(&self, a: &FieldElement) -> BigRat {
        match a.int_coords() {
            Some(x) => BigRat::from_integer(self.norm_int(&x)),
            None => rat_det(&self.mult_matrix(a)),
        }
    }

    pub fn trace(&self, a: &FieldElement) -> BigRat {
        a.coords().iter().zip(&self.traces).map(|(c, t)| c * BigRat::from_integer(t.clone())).sum()
    }

    pub fn inverse(&self, a: &FieldElement) -> Result<FieldElement> {
        let inv = rat_inverse(&self.mult_matrix(a)).ok_or(Error::ZeroElement)?;
        Ok(FieldElement::new(inv[0].clone()))
    }

    /// Characteristic polynomial of multiplication by an integral element.
    pub fn charpoly_int(&self, x: &[BigInt]) -> IntPoly {
        // Faddeev-LeVerrier over Q
        let n = self.degree();
        let m: Vec<Vec<BigRat>> =
            self.mult_matrix_int(x).to_rows().into_iter().map(|r| r.into_iter().map(BigRat::from_integer).collect()).collect();
        let mut coeffs = vec![BigRat::zero(); n + 1];
        coeffs[n] = BigRat::one();
        let mut mk: Vec<Vec<BigRat>> = vec![vec![BigRat::zero(); n]; n];
        for k in 1..=n {
            // mk = m * (mk_prev + c_{n-k+1} I)
            let mut prev = mk.clone();
            for (i, row) in prev.iter_mut().enumerate() {
                row[i] += &coeffs[n - k + 1];
            }
            mk = crate::kernel::matrix::rat_mat_mul(&m, &prev);
            let tr: BigRat = (0..n).map(|i| mk[i][i].clone()).sum();
            coeffs[n - k] = -tr / BigRat::from_integer(BigInt::from(k));
        }
        IntPoly::new(coeffs.into_iter().map(|q| q.to_integer()).collect())
    }

    /// Certified complex embeddings at `prec` bits, cached.
    pub fn embeddings(&self, prec: u32) -> Result<Arc<EmbeddingData>> {
        if let Some(e) = self.embeddings.lock().expect("embedding cache").get(&prec) {
            return Ok(e.clone());
        }
        let data = Arc::new(EmbeddingData::compute(self, prec)?);
        self.embeddings.lock().expect("embedding cache").insert(prec, data.clone());
        Ok(data)
    }

    /// `true` when `p` divides `[O : Z[x]]`.
    pub fn index_divisible_by(&self, p: &BigInt) -> bool {
        self.index.is_multiple_of(p)
    }

    /// Residue of `x^e mod p` computed in `O / pO` for small `p`.
    pub fn pow_mod_p(&self, x: &[u64], e: u128, p: u64) -> Vec<u64> {
        let n = self.degree();
        let mut acc: Vec<u64> = (0..n).map(|k| u64::from(k == 0)).collect();
        let mut base = x.to_vec();
        let mut ex = e;
        while ex > 0 {
            if ex & 1 == 1 {
                acc = self.mul_mod_p(&acc, &base, p);
            }
            base = self.mul_mod_p(&base, &base, p);
            ex >>= 1;
        }
        acc
    }

    pub fn mul_mod_p(&self, x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
        let n = self.degree();
        let mut out = vec![0u128; n];
        let pp = p as u128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = xi as u128 * yj as u128 % pp;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o = (*o + c * mod_u64(t, p) as u128) % pp;
                    }
                }
            }
        }
        out.into_iter().map(|v| v as u64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_cubic_disc_oracle(m: i64) -> i64 {
        // squarefree m: -27 m^2, or -3 m^2 when m = ±1 mod 9
        if m.rem_euclid(9) == 1 || m.rem_euclid(9) == 8 {
            -3 * m * m
        } else {
            -27 * m * m
        }
    }

    fn squarefree(m: i64) -> bool {
        (2..).take_while(|d| d * d <= m).all(|d| m % (d * d) != 0)
    }

    #[test]
    fn pure_cubic_discriminants() {
        for m in 2..=50i64 {
            if !squarefree(m) {
                continue;
            }
            let k = NumberField::pure_cubic(&BigInt::from(m)).unwrap();
            let o = MaximalOrder::compute(&k).unwrap();
            assert_eq!(o.disc(), &BigInt::from(pure_cubic_disc_oracle(m)), "m = {m}");
        }
    }

    #[test]
    fn cube_root_of_ten_basis() {
        let k = NumberField::pure_cubic(&BigInt::from(10)).unwrap();
        let o = MaximalOrder::compute(&k).unwrap();
        assert_eq!(o.disc(), &BigInt::from(-300));
        assert_eq!(o.index(), &BigInt::from(3));
        let w2 = o.basis().rational_rows()[2].clone();
        let third = BigRat::new(1.into(), 3.into());
        assert_eq!(w2, vec![third.clone(), third.clone(), third]);
    }

    #[test]
    fn small_fields() {
        let o = MaximalOrder::compute(&NumberField::eisenstein()).unwrap();
        assert_eq!(o.disc(), &BigInt::from(-3));
        let o = MaximalOrder::compute(&crate::numfield::build_field(&IntPoly::from_i64s(&[5, 0, 1])).unwrap()).unwrap();
        assert_eq!(o.disc(), &BigInt::from(-20));
        let o = MaximalOrder::compute(&crate::numfield::build_field(&IntPoly::from_i64s(&[-5, 0, 1])).unwrap()).unwrap();
        assert_eq!(o.disc(), &BigInt::from(5));
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(2)).unwrap()).unwrap();
        assert_eq!(o.disc(), &BigInt::from(-108));
    }

    #[test]
    fn sextic_discriminant() {
        // d(Q(ω, 79^(1/3))) = -3^7 * 79^4
        let c = NumberField::sextic(&BigInt::from(79)).unwrap();
        let o = MaximalOrder::compute(&c.field).unwrap();
        assert_eq!(o.disc(), &(-BigInt::from(3).pow(7u32) * BigInt::from(79).pow(4u32)));
    }

    #[test]
    fn norms_and_inverses() {
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(10)).unwrap()).unwrap();
        let x = o.generator();
        assert_eq!(o.norm(&x), BigRat::from_integer(10.into()));
        assert_eq!(o.trace(&x), BigRat::zero());
        let inv = o.inverse(&x).unwrap();
        assert_eq!(o.mul(&x, &inv), o.one());
        assert_eq!(o.charpoly_int(&x.int_coords().unwrap()), IntPoly::pure_cubic(&BigInt::from(10)));
    }
}
