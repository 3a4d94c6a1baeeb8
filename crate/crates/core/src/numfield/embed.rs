//! Certified complex embeddings.
//!
//! Values are fixed-point balls: an integer midpoint and radius, both scaled
//! by `2^w`. Roots of the defining polynomial are located in f64 (Aberth),
//! polished by Newton steps at the working precision, and then certified by
//! the inclusion disk `|z - c| <= n |f(c) / f'(c)|`, which always contains a
//! root. Disjoint disks therefore isolate all `n` roots.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::matrix::rat_det;
use crate::kernel::{BigRat, IntPoly};

use super::order::MaximalOrder;

/// Largest working precision tried before giving up.
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub mid: BigInt,
    pub rad: BigInt,
}

impl Ball {
    fn exact(mid: BigInt) -> Self {
        Ball { mid, rad: BigInt::zero() }
    }

    fn int(n: &BigInt, w: u32) -> Self {
        Ball::exact(n << w)
    }

    fn add(&self, o: &Ball) -> Ball {
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad }
    }

    fn sub(&self, o: &Ball) -> Ball {
        Ball { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad }
    }

    fn mul(&self, o: &Ball, w: u32) -> Ball {
        let mid = (&self.mid * &o.mid) >> w;
        let rad = ((self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad) >> w) + 2;
        Ball { mid, rad }
    }

    fn div_int(&self, d: &BigInt) -> Ball {
        Ball { mid: &self.mid / d, rad: &self.rad / d + 2 }
    }

    fn scale_int(&self, k: &BigInt) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.abs() }
    }

    fn upper_abs(&self) -> BigInt {
        self.mid.abs() + &self.rad
    }

    fn lower_abs(&self) -> BigInt {
        let v = self.mid.abs() - &self.rad;
        if v.is_negative() {
            BigInt::zero()
        } else {
            v
        }
    }

    /// Midpoint rounded to `bits` fractional bits, as a rational.
    fn center(&self, w: u32, bits: u32) -> BigRat {
        let shift = w.saturating_sub(bits);
        let half = if shift > 0 { BigInt::one() << (shift - 1) } else { BigInt::zero() };
        let m = (&self.mid + half) >> shift;
        BigRat::new(m, BigInt::one() << (w - shift))
    }

    pub fn to_f64(&self, w: u32) -> f64 {
        big_to_f64(&self.mid, w)
    }
}

fn big_to_f64(x: &BigInt, w: u32) -> f64 {
    let bits = x.bits() as i64;
    let drop = (bits - 60).max(0) as u32;
    (x >> drop).to_f64().unwrap_or(0.0) * 2f64.powi(drop as i32 - w as i32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    fn add(&self, o: &Self) -> Self {
        ComplexBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    fn mul(&self, o: &Self, w: u32) -> Self {
        ComplexBall { re: self.re.mul(&o.re, w).sub(&self.im.mul(&o.im, w)), im: self.re.mul(&o.im, w).add(&self.im.mul(&o.re, w)) }
    }

    fn scale_int(&self, k: &BigInt) -> Self {
        ComplexBall { re: self.re.scale_int(k), im: self.im.scale_int(k) }
    }

    fn div_int(&self, d: &BigInt) -> Self {
        ComplexBall { re: self.re.div_int(d), im: self.im.div_int(d) }
    }

    fn zero() -> Self {
        ComplexBall { re: Ball::exact(BigInt::zero()), im: Ball::exact(BigInt::zero()) }
    }

    /// Upper bound of `|z|^2`, scaled by `2^(2w)`.
    fn upper_abs2(&self) -> BigInt {
        let (a, b) = (self.re.upper_abs(), self.im.upper_abs());
        &a * &a + &b * &b
    }

    fn lower_abs2(&self) -> BigInt {
        let (a, b) = (self.re.lower_abs(), self.im.lower_abs());
        &a * &a + &b * &b
    }

    pub fn to_f64(&self, w: u32) -> (f64, f64) {
        (self.re.to_f64(w), self.im.to_f64(w))
    }
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / d, im: (self.im * o.re - self.re * o.im) / d }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Simultaneous f64 root approximation (Aberth iteration).
fn aberth(f: &IntPoly) -> Vec<C64> {
    let n = f.degree();
    let a: Vec<f64> = f.coeffs().iter().map(|c| big_to_f64(c, 0)).collect();
    let eval = |z: C64| {
        let mut v = C64 { re: 0.0, im: 0.0 };
        let mut d = C64 { re: 0.0, im: 0.0 };
        for c in a.iter().rev() {
            d = d.mul(z).add(v);
            v = v.mul(z).add(C64 { re: *c, im: 0.0 });
        }
        (v, d)
    };
    let radius = (0..n).map(|i| a[i].abs().powf(1.0 / (n - i) as f64)).fold(0.0f64, f64::max) * 2.0 + 1e-3;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            C64 { re: radius * t.cos(), im: radius * t.sin() }
        })
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (v, d) = eval(z[k]);
            if v.abs() == 0.0 {
                continue;
            }
            let ratio = v.div(d);
            let mut s = C64 { re: 0.0, im: 0.0 };
            for j in 0..n {
                if j != k {
                    s = s.add(C64 { re: 1.0, im: 0.0 }.div(z[k].sub(z[j])));
                }
            }
            let step = ratio.div(C64 { re: 1.0, im: 0.0 }.sub(ratio.mul(s)));
            if step.re.is_finite() && step.im.is_finite() {
                z[k] = z[k].sub(step);
                moved = moved.max(step.abs() / z[k].abs().max(1.0));
            }
        }
        if moved < 1e-14 {
            break;
        }
    }
    z
}

/// Complex fixed-point midpoint arithmetic for Newton polishing.
fn newton_polish(f: &IntPoly, z0: C64, w: u32) -> (BigInt, BigInt) {
    let scale = 2f64.powi(52);
    let to_fix = |x: f64| {
        let b = BigInt::from_f64((x * scale).round()).unwrap_or_default();
        if w >= 52 {
            b << (w - 52)
        } else {
            b >> (52 - w)
        }
    };
    let (mut re, mut im) = (to_fix(z0.re), to_fix(z0.im));
    let fd = f.derivative();
    let horner = |p: &IntPoly, re: &BigInt, im: &BigInt| {
        let (mut vr, mut vi) = (BigInt::zero(), BigInt::zero());
        for c in p.coeffs().iter().rev() {
            let nr = ((&vr * re - &vi * im) >> w) + (c << w);
            let ni = (&vr * im + &vi * re) >> w;
            vr = nr;
            vi = ni;
        }
        (vr, vi)
    };
    for _ in 0..200 {
        let (fr, fi) = horner(f, &re, &im);
        let (dr, di) = horner(&fd, &re, &im);
        let den = &dr * &dr + &di * &di;
        if den.is_zero() {
            break;
        }
        let sr = ((&fr * &dr + &fi * &di) << w) / &den;
        let si = ((&fi * &dr - &fr * &di) << w) / &den;
        re -= &sr;
        im -= &si;
        if sr.abs() + si.abs() <= BigInt::from(4) {
            break;
        }
    }
    (re, im)
}

fn eval_ball(p: &IntPoly, z: &ComplexBall, w: u32) -> ComplexBall {
    let mut v = ComplexBall::zero();
    for c in p.coeffs().iter().rev() {
        v = v.mul(z, w);
        v.re = v.re.add(&Ball::int(c, w));
    }
    v
}

/// Certified roots of `f` at working precision `w`: real roots first
/// (ascending), then one root of each conjugate pair with positive
/// imaginary part (ascending real part).
fn certified_roots(f: &IntPoly, w: u32, r1: usize) -> Result<Vec<ComplexBall>> {
    let n = f.degree();
    let approx = aberth(f);
    let fd = f.derivative();
    let mut centers = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for z in approx {
        let (re, im) = newton_polish(f, z, w);
        let c = ComplexBall { re: Ball::exact(re), im: Ball::exact(im) };
        let fv = eval_ball(f, &c, w);
        let dv = eval_ball(&fd, &c, w);
        let lower = dv.lower_abs2();
        if lower.is_zero() {
            return Err(Error::Precision(w));
        }
        let n2 = BigInt::from((n * n) as u64);
        let r2: BigInt = ((n2 * fv.upper_abs2()) << (2 * w)) / &lower + 1;
        radii.push(r2.sqrt() + 1);
        centers.push(c);
    }
    for i in 0..n {
        for j in i + 1..n {
            let dr = &centers[i].re.mid - &centers[j].re.mid;
            let di = &centers[i].im.mid - &centers[j].im.mid;
            let s = &radii[i] + &radii[j];
            if &dr * &dr + &di * &di <= &s * &s {
                return Err(Error::Precision(w));
            }
        }
    }
    let meets_axis: Vec<bool> = (0..n).map(|i| centers[i].im.mid.abs() <= radii[i]).collect();
    if meets_axis.iter().filter(|&&b| b).count() != r1 {
        return Err(Error::Precision(w));
    }
    let mut real = Vec::new();
    let mut upper = Vec::new();
    for i in 0..n {
        let r = radii[i].clone();
        if meets_axis[i] {
            real.push(ComplexBall { re: Ball { mid: centers[i].re.mid.clone(), rad: r }, im: Ball::exact(BigInt::zero()) });
        } else if centers[i].im.mid.is_positive() {
            upper.push(ComplexBall {
                re: Ball { mid: centers[i].re.mid.clone(), rad: r.clone() },
                im: Ball { mid: centers[i].im.mid.clone(), rad: r },
            });
        }
    }
    if upper.len() * 2 + real.len() != n {
        return Err(Error::Precision(w));
    }
    real.sort_by(|a, b| a.re.mid.cmp(&b.re.mid));
    upper.sort_by(|a, b| a.re.mid.cmp(&b.re.mid).then(a.im.mid.cmp(&b.im.mid)));
    real.extend(upper);
    Ok(real)
}

/// Embeddings of the integral basis and the resulting T2 Gram matrix.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    prec: u32,
    work: u32,
    r1: usize,
    roots: Vec<ComplexBall>,
    /// `values[s][i]` is `sigma_s(w_i)`.
    values: Vec<Vec<ComplexBall>>,
    t2: Vec<Vec<BigRat>>,
}

impl EmbeddingData {
    /// Computes embeddings with `prec` fractional bits in the exported T2
    /// form. Doubles the working precision until the T2 determinant is
    /// certified to equal `|d_K|`.
    pub fn compute(order: &MaximalOrder, prec: u32) -> Result<Self> {
        let mut work = prec.max(32) + 32;
        loop {
            match Self::attempt(order, prec, work) {
                Err(Error::Precision(_)) if work < MAX_PRECISION => work *= 2,
                Err(Error::Precision(_)) => return Err(Error::Precision(work)),
                other => return other,
            }
        }
    }

    fn attempt(order: &MaximalOrder, prec: u32, w: u32) -> Result<Self> {
        let field = order.field();
        let (r1, r2) = field.signature();
        let n = order.degree();
        let roots = certified_roots(field.poly(), w, r1)?;
        let basis = order.basis();
        let mut values = Vec::with_capacity(r1 + r2);
        for z in &roots {
            let mut powers = vec![ComplexBall { re: Ball::int(&BigInt::one(), w), im: Ball::exact(BigInt::zero()) }];
            for _ in 1..n {
                powers.push(powers.last().unwrap().mul(z, w));
            }
            let vals: Vec<ComplexBall> = (0..n)
                .map(|i| {
                    let mut acc = ComplexBall::zero();
                    for (k, c) in basis.numer.row(i).iter().enumerate() {
                        if !c.is_zero() {
                            acc = acc.add(&powers[k].scale_int(c));
                        }
                    }
                    acc.div_int(&basis.denom)
                })
                .collect();
            values.push(vals);
        }
        let mut gram = vec![vec![Ball::exact(BigInt::zero()); n]; n];
        for (s, vals) in values.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let mut t = vals[i].re.mul(&vals[j].re, w);
                    if s >= r1 {
                        t = t.add(&vals[i].im.mul(&vals[j].im, w));
                        t = t.add(&t);
                    }
                    gram[i][j] = gram[i][j].add(&t);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                gram[i][j] = gram[j][i].clone();
            }
        }
        // Perturbation bound for det(G + E) - det(G).
        let max_rad = gram.iter().flatten().map(|b| b.rad.clone()).max().unwrap_or_default();
        let max_abs = gram.iter().flatten().map(|b| b.upper_abs()).max().unwrap_or_default();
        let nn = BigInt::from(n as u64);
        let e = BigRat::new(&nn * &max_rad, BigInt::one() << w);
        let g = BigRat::new(&nn * &max_abs, BigInt::one() << w);
        let mut bound = BigRat::from_integer(nn.clone()) * &e;
        for _ in 1..n {
            bound *= &g;
        }
        let abs_disc = BigRat::from_integer(order.disc().abs());
        if bound > &abs_disc / BigRat::from_integer(BigInt::one() << 20) {
            return Err(Error::Precision(w));
        }
        let exact: Vec<Vec<BigRat>> =
            gram.iter().map(|r| r.iter().map(|b| BigRat::new(b.mid.clone(), BigInt::one() << w)).collect()).collect();
        let det = rat_det(&exact);
        if (det - &abs_disc).abs() > bound {
            return Err(Error::Inconsistent("det(T2) differs from |d_K|".into()));
        }
        let t2 = gram.iter().map(|r| r.iter().map(|b| b.center(w, prec)).collect()).collect();
        Ok(EmbeddingData { prec, work: w, r1, roots, values, t2 })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn working_precision(&self) -> u32 {
        self.work
    }

    /// Real roots first, then upper-half-plane representatives.
    pub fn roots(&self) -> &[ComplexBall] {
        &self.roots
    }

    pub fn num_real(&self) -> usize {
        self.r1
    }

    /// T2 Gram matrix `sum_sigma sigma(w_i) conj(sigma(w_j))` of the integral
    /// basis, rounded to the requested precision.
    pub fn t2_gram(&self) -> &[Vec<BigRat>] {
        &self.t2
    }

    /// `ln |sigma_s(x)|` for each place, from f64 approximations.
    pub fn log_abs(&self, coords: &[BigInt]) -> Vec<f64> {
        self.approx(coords).into_iter().map(|(re, im)| re.hypot(im).ln()).collect()
    }

    /// Gram matrix of the integral basis under the weighted form
    /// `sum_s c_s 4^(-shifts[s]) |sigma_s(x)|^2` (`c_s = 2` at complex
    /// places), built from the midpoints of the embedding values. Not
    /// certified: callers verify whatever they find with it.
    pub fn weighted_gram(&self, shifts: &[i64]) -> Vec<Vec<BigRat>> {
        let n = self.values.first().map_or(0, |v| v.len());
        let top = shifts.iter().copied().max().unwrap_or(0);
        let mut acc = vec![vec![BigInt::zero(); n]; n];
        for (s, vals) in self.values.iter().enumerate() {
            let up = 2 * (top - shifts[s]) as usize + usize::from(s >= self.r1);
            for i in 0..n {
                for j in i..n {
                    let mut t = &vals[i].re.mid * &vals[j].re.mid;
                    if s >= self.r1 {
                        t += &vals[i].im.mid * &vals[j].im.mid;
                    }
                    acc[i][j] += t << up;
                }
            }
        }
        // entries are scaled by 2^(2 work + 2 top)
        let e = 2 * self.work as i64 + 2 * top;
        let scale = |x: BigInt| {
            if e >= 0 {
                BigRat::new(x, BigInt::one() << e as usize)
            } else {
                BigRat::from_integer(x << (-e) as usize)
            }
        };
        let mut g = vec![vec![BigRat::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = scale(acc[i][j].clone());
                g[j][i] = v.clone();
                g[i][j] = v;
            }
        }
        g
    }

    /// Approximate embeddings of an integral element (f64, for display).
    pub fn approx(&self, coords: &[BigInt]) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .map(|vals| {
                let mut acc = ComplexBall::zero();
                for (c, v) in coords.iter().zip(vals) {
                    acc = acc.add(&v.scale_int(c));
                }
                acc.to_f64(self.work)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::NumberField;

    #[test]
    fn eisenstein_gram() {
        let o = MaximalOrder::compute(&NumberField::eisenstein()).unwrap();
        let e = o.embeddings(64).unwrap();
        // T2 on Z[ω]: [[2, -1], [-1, 2]]
        let g = e.t2_gram();
        let expect = [[2i64, -1], [-1, 2]];
        for i in 0..2 {
            for j in 0..2 {
                let diff = (&g[i][j] - BigRat::from_integer(expect[i][j].into())).abs();
                assert!(diff < BigRat::new(1.into(), BigInt::one() << 50), "{i} {j} {}", g[i][j]);
            }
        }
    }

    #[test]
    fn pure_cubic_roots() {
        let o = MaximalOrder::compute(&NumberField::pure_cubic(&BigInt::from(79)).unwrap()).unwrap();
        let e = o.embeddings(128).unwrap();
        let (re, im) = e.roots()[0].to_f64(e.working_precision());
        assert!((re - 79f64.cbrt()).abs() < 1e-12 && im == 0.0);
        let (re2, im2) = e.roots()[1].to_f64(e.working_precision());
        assert!((re2 + 79f64.cbrt() / 2.0).abs() < 1e-12);
        assert!((im2 - 79f64.cbrt() * 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sextic_gram_determinant() {
        let c = NumberField::sextic(&BigInt::from(79)).unwrap();
        let o = MaximalOrder::compute(&c.field).unwrap();
        assert!(o.embeddings(64).is_ok());
    }
}
