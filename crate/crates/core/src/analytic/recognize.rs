//! Integer relations by LLL, and exact arithmetic in Q(sqrt d) for
//! certifying recognized coordinates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::bigfloat::{Complex, Real};
use crate::error::{Error, Result};

/// LLL reduction with delta = 3/4 in exact integer arithmetic
/// (Cohen, Algorithm 2.6.7). Rows must be linearly independent.
pub fn lll(b: &mut [Vec<BigInt>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let dot = |x: &[BigInt], y: &[BigInt]| -> BigInt { x.iter().zip(y).map(|(a, c)| a * c).sum() };
    // d[0] = 1, d[i + 1] = d_i in Cohen's 1-based numbering
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(&b[0], &b[0]);
    let mut k = 1usize;
    let mut kmax = 0usize;

    fn red(k: usize, l: usize, b: &mut [Vec<BigInt>], d: &[BigInt], lam: &mut [Vec<BigInt>]) {
        let two = BigInt::from(2);
        if (&two * lam[k][l].abs()) > d[l + 1] {
            // q = nearest integer to lam / d
            let num = &two * &lam[k][l] + &d[l + 1];
            let q = num.div_floor(&(&two * &d[l + 1]));
            let bl = b[l].clone();
            for (x, y) in b[k].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            lam[k][l] -= &q * &d[l + 1];
            for i in 0..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    }

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "LLL input is linearly dependent");
                    d[k + 1] = u;
                }
            }
        }
        loop {
            red(k, k - 1, b, &d, &mut lam);
            let lhs = BigInt::from(4) * &d[k + 1] * &d[k - 1];
            let rhs = BigInt::from(3) * &d[k] * &d[k] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                // swap k and k - 1
                b.swap(k, k - 1);
                for j in 0..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = t;
                }
                let l = lam[k][k - 1].clone();
                let bb = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                    lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k + 1];
                }
                d[k] = bb;
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k.saturating_sub(1)).rev() {
                    red(k, l, b, &d, &mut lam);
                }
                k += 1;
                break;
            }
        }
    }
}

/// Short integer vector c with sum c_k v_k ~ 0, from LLL on
/// [e_k | round(C Re v_k), round(C Im v_k)] with C = 10^scale.
pub fn integer_relation(values: &[Complex], scale: u32) -> Vec<BigInt> {
    let n = values.len();
    let p = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let c = Real::from_bigint(&BigInt::from(10).pow(scale), p);
    let mut rows: Vec<Vec<BigInt>> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut row = vec![BigInt::zero(); n + 2];
            row[k] = BigInt::one();
            row[n] = (&v.re * &c).round_bigint();
            row[n + 1] = (&v.im * &c).round_bigint();
            row
        })
        .collect();
    lll(&mut rows);
    rows[0][..n].to_vec()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// u + v sqrt(d) with rational u, v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadRational {
    pub d: i64,
    pub u: BigRational,
    pub v: BigRational,
}

impl QuadRational {
    pub fn new(d: i64, u: BigRational, v: BigRational) -> Self {
        Self { d, u, v }
    }

    pub fn from_int(d: i64, n: i64) -> Self {
        Self::new(d, rat(n), BigRational::zero())
    }

    pub fn sqrt_d(d: i64) -> Self {
        Self::new(d, BigRational::zero(), BigRational::one())
    }

    /// (d + sqrt d) / 2 for d = 1 mod 4, sqrt(d / 4) = sqrt(d)/2 otherwise.
    pub fn omega(d: i64) -> Self {
        if d.rem_euclid(4) == 1 {
            Self::new(d, BigRational::new(d.into(), 2.into()), BigRational::new(1.into(), 2.into()))
        } else {
            Self::new(d, BigRational::zero(), BigRational::new(1.into(), 2.into()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.d, &self.u + &o.u, &self.v + &o.v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.d, &self.u - &o.u, &self.v - &o.v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = rat(self.d);
        Self::new(self.d, &self.u * &o.u + &d * &self.v * &o.v, &self.u * &o.v + &self.v * &o.u)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.d, &self.u * rat(k), &self.v * rat(k))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.d, self.u.clone(), -&self.v)
    }

    pub fn norm(&self) -> BigRational {
        &self.u * &self.u - rat(self.d) * &self.v * &self.v
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(self.d, &c.u / &n, &c.v / &n))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    pub fn to_complex(&self, p: usize) -> Complex {
        let r = |q: &BigRational| Real::from_bigint(q.numer(), p).div(&Real::from_bigint(q.denom(), p));
        let s = Real::from_i64(self.d.abs(), p).sqrt();
        let v = &r(&self.v) * &s;
        if self.d < 0 {
            Complex::new(r(&self.u), v)
        } else {
            Complex::new(&r(&self.u) + &v, Real::zero(p))
        }
    }

    /// Number of decimal digits of the largest numerator or denominator.
    pub fn height_digits(&self) -> usize {
        [self.u.numer(), self.u.denom(), self.v.numer(), self.v.denom()]
            .iter()
            .map(|x| x.abs().to_string().len())
            .max()
            .unwrap_or(1)
    }

    /// Integer minimal polynomial, low degree first, primitive with positive
    /// leading coefficient.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let coeffs: Vec<BigRational> = if self.v.is_zero() {
            vec![-&self.u, BigRational::one()]
        } else {
            vec![self.norm(), -(&self.u * rat(2)), BigRational::one()]
        };
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        primitive(ints)
    }
}

impl fmt::Display for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            write!(f, "{}", self.u)
        } else if self.u.is_zero() {
            write!(f, "({})*sqrt({})", self.v, self.d)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.u, self.v, self.d)
        }
    }
}

fn primitive(mut c: Vec<BigInt>) -> Vec<BigInt> {
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in c.iter_mut() {
            *x /= &g;
        }
    }
    if c.last().is_some_and(|x| x.is_negative()) {
        for x in c.iter_mut() {
            *x = -&*x;
        }
    }
    c
}

/// A recognized algebraic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebraic {
    /// Integer minimal polynomial, constant term first.
    pub minpoly: Vec<BigInt>,
    /// Exact value when it lies in Q(sqrt fieldDisc).
    pub value: Option<QuadRational>,
}

impl Algebraic {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }
}

fn eval_poly(c: &[BigInt], x: &Complex) -> (Complex, Real) {
    let p = x.prec();
    let mut acc = Complex::zero(p);
    let mut mag = Real::zero(p);
    let ax = x.abs();
    for k in c.iter().rev() {
        let kr = Real::from_bigint(k, p);
        acc = &(&acc * x) + &Complex::from_real(kr.clone());
        mag = &(&mag * &ax) + &kr.abs();
    }
    (acc, mag)
}

fn max_digits(c: &[BigInt]) -> usize {
    c.iter().map(|x| x.abs().to_string().len()).max().unwrap_or(1)
}

fn relation_scale(digits: u32) -> u32 {
    digits.saturating_sub(digits / 10 + 2).max(1)
}

/// Tries x in Q(sqrt d) via a + b w + c x + e w x = 0.
fn recognize_in_field(x: &Complex, d: i64, height_bound: u32, digits: u32) -> Option<QuadRational> {
    let p = x.prec();
    let w = QuadRational::omega(d);
    let wc = w.to_complex(p);
    let vals = [Complex::one(p), wc.clone(), x.clone(), &wc * x];
    let rel = integer_relation(&vals, relation_scale(digits));
    let r = |k: usize| -> Option<i64> { rel[k].to_i64() };
    let (a, b, c, e) = (r(0)?, r(1)?, r(2)?, r(3)?);
    let num = QuadRational::from_int(d, a).add(&w.scale(b));
    let den = QuadRational::from_int(d, c).add(&w.scale(e));
    let val = num.div(&den)?;
    let val = QuadRational::new(d, -val.u, -val.v);
    if val.height_digits() > height_bound as usize {
        return None;
    }
    let err = (&val.to_complex(p) - x).abs();
    if err > &Real::tolerance(digits / 2, p) * &(&x.abs() + &Real::one(p)) {
        return None;
    }
    Some(val)
}

fn recognize_poly(x: &Complex, degree: u32, height_bound: u32, digits: u32) -> Option<Vec<BigInt>> {
    let p = x.prec();
    let mut vals = vec![Complex::one(p)];
    for k in 1..=degree as usize {
        let next = &vals[k - 1] * x;
        vals.push(next);
    }
    let rel = primitive(integer_relation(&vals, relation_scale(digits)));
    if rel.len() < 2 || max_digits(&rel) > height_bound as usize {
        return None;
    }
    let (v, mag) = eval_poly(&rel, x);
    if v.abs() > &Real::tolerance(digits / 2, p) * &mag {
        return None;
    }
    Some(rel)
}

/// Quadratic roots of c0 + c1 X + c2 X^2 as elements of Q(sqrt d), picking
/// the one closest to x.
fn quadratic_in_field(c: &[BigInt], d: i64, x: &Complex) -> Option<QuadRational> {
    let (c0, c1, c2) = (&c[0], &c[1], &c[2]);
    let disc = c1 * c1 - BigInt::from(4) * c0 * c2;
    // disc = d m^2
    let (q, r) = disc.div_rem(&BigInt::from(d));
    if !r.is_zero() || q.is_negative() {
        return None;
    }
    let m = q.sqrt();
    if &m * &m != q {
        return None;
    }
    let two_c2 = BigInt::from(2) * c2;
    let u = BigRational::new(-c1, two_c2.clone());
    let v = BigRational::new(m, two_c2);
    let a = QuadRational::new(d, u.clone(), v.clone());
    let b = QuadRational::new(d, u, -v);
    let p = x.prec();
    let da = (&a.to_complex(p) - x).abs();
    let db = (&b.to_complex(p) - x).abs();
    Some(if da <= db { a } else { b })
}

/// Recognizes x as algebraic of degree <= degree_bound with coefficients of
/// at most height_bound digits, preferring an exact element of
/// Q(sqrt field_disc) when field_disc is not 0 or 1.
pub fn recognize_algebraic(
    x: &Complex,
    field_disc: i64,
    degree_bound: u32,
    height_bound: u32,
    digits: u32,
) -> Result<Algebraic> {
    if digits < 3 * height_bound {
        return Err(Error::Precondition(format!(
            "precision {digits} digits is below 3 x height bound {height_bound}"
        )));
    }
    if degree_bound == 0 {
        return Err(Error::Precondition("degree bound must be positive".into()));
    }
    let field = field_disc != 0 && field_disc != 1;
    if let Some(c) = recognize_poly(x, 1, height_bound, digits) {
        let value = QuadRational::new(field_disc, BigRational::new(-&c[0], c[1].clone()), BigRational::zero());
        return Ok(Algebraic { minpoly: c, value: Some(value) });
    }
    if field && degree_bound >= 2 {
        if let Some(v) = recognize_in_field(x, field_disc, height_bound, digits) {
            return Ok(Algebraic { minpoly: v.minimal_polynomial(), value: Some(v) });
        }
    }
    for deg in 2..=degree_bound {
        if let Some(c) = recognize_poly(x, deg, height_bound, digits) {
            let value = if c.len() == 3 && field { quadratic_in_field(&c, field_disc, x) } else { None };
            return Ok(Algebraic { minpoly: c, value });
        }
    }
    Err(Error::NoRelationFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::bigfloat::bits_for_digits;

    fn p60() -> usize {
        bits_for_digits(60) + 32
    }

    #[test]
    fn lll_small_example() {
        // reduces to (0,1,0), (1,0,1), (-1,0,2)
        let mut b: Vec<Vec<BigInt>> = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        lll(&mut b);
        let norms: Vec<i64> = b.iter().map(|r| r.iter().map(|x| (x * x).to_i64().unwrap()).sum()).collect();
        assert_eq!(norms, vec![1, 2, 5]);
        // determinant preserved up to sign: |det| = 3
        let m: Vec<Vec<i64>> = b.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        assert_eq!(det.abs(), 3);
    }

    #[test]
    fn recognizes_rationals() {
        let p = p60();
        let x = Complex::from_real(Real::from_ratio(1, 3, p));
        let a = recognize_algebraic(&x, 0, 4, 10, 60).unwrap();
        assert_eq!(a.minpoly, vec![BigInt::from(-1), BigInt::from(3)]);
        let x = Complex::from_real(Real::from_ratio(-22, 7, p));
        let a = recognize_algebraic(&x, 0, 2, 10, 60).unwrap();
        assert_eq!(a.value.unwrap().u, BigRational::new((-22).into(), 7.into()));
    }

    #[test]
    fn recognizes_sqrt_minus_11() {
        let p = p60();
        let x = Complex::new(Real::zero(p), Real::from_i64(11, p).sqrt());
        assert!(x.im.to_decimal(13).starts_with("3.3166247903554"));
        let a = recognize_algebraic(&x, -11, 2, 10, 60).unwrap();
        assert_eq!(a.minpoly, vec![BigInt::from(11), BigInt::from(0), BigInt::from(1)]);
        let v = a.value.unwrap();
        assert_eq!(v.mul(&v), QuadRational::from_int(-11, -11));
        // same root found without field information, through the degree-2 search
        let a = recognize_algebraic(&x, 0, 4, 10, 60).unwrap();
        assert_eq!(a.minpoly, vec![BigInt::from(11), BigInt::from(0), BigInt::from(1)]);
    }

    #[test]
    fn recognizes_field_elements() {
        let p = p60();
        let d = -67;
        let target = QuadRational::new(d, BigRational::new(1234.into(), 9.into()), BigRational::new((-55).into(), 27.into()));
        let x = target.to_complex(p);
        let a = recognize_algebraic(&x, d, 2, 15, 60).unwrap();
        assert_eq!(a.value.unwrap(), target);
        assert_eq!(a.minpoly.len(), 3);
    }

    #[test]
    fn pi_is_not_recognized() {
        let p = p60();
        let x = Complex::from_real(Real::pi(p));
        assert_eq!(recognize_algebraic(&x, 0, 4, 10, 60), Err(Error::NoRelationFound));
        assert!(recognize_algebraic(&x, 0, 4, 30, 60).is_err());
    }

    #[test]
    fn quad_rational_arithmetic() {
        let d = -7;
        let w = QuadRational::omega(d);
        // w = (d + sqrt d)/2 satisfies w^2 - d w + (d^2 - d)/4 = 0
        let z = w.mul(&w).add(&w.scale(7)).add(&QuadRational::from_int(d, 14));
        assert!(z.is_zero());
        let inv = w.inv().unwrap();
        assert_eq!(inv.mul(&w), QuadRational::from_int(d, 1));
        assert_eq!(w.minimal_polynomial(), vec![BigInt::from(14), BigInt::from(7), BigInt::from(1)]);
    }
}
