//! Fixed-precision real and complex numbers over `astro_float::BigFloat`.
//!
//! Every value carries its working precision in bits; binary operations run
//! at the larger of the two.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_traits::{One, Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Bits needed for `digits` decimal digits plus a guard word.
pub fn bits_for_digits(digits: u32) -> usize {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 64
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(((self.p as f64) / 3.33) as u32))
    }
}

impl Real {
    fn wrap(v: BigFloat, p: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN in big-float arithmetic");
        Self { v, p }
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    pub fn zero(p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(0, p), p)
    }

    pub fn one(p: usize) -> Self {
        Self::from_i64(1, p)
    }

    pub fn from_i64(x: i64, p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, p), p)
    }

    pub fn from_f64(x: f64, p: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, p), p)
    }

    pub fn from_bigint(n: &BigInt, p: usize) -> Self {
        let (sign, digits) = n.to_u64_digits();
        let work = p.max(64 * digits.len() + 64);
        let base = BigFloat::from_u64(u64::MAX, work).add(&BigFloat::from_u64(1, work), work, RM);
        let mut acc = BigFloat::from_u64(0, work);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, work, RM).add(&BigFloat::from_u64(*d, work), work, RM);
        }
        if sign == BigSign::Minus {
            acc.inv_sign();
        }
        let mut r = acc;
        r.set_precision(p, RM).expect("valid precision");
        Self::wrap(r, p)
    }

    pub fn from_ratio(num: i64, den: i64, p: usize) -> Self {
        Self::from_i64(num, p).div(&Self::from_i64(den, p))
    }

    /// Parses a decimal string such as "-1.25e-3".
    pub fn parse(s: &str, p: usize) -> Self {
        let v = with_cc(|cc| BigFloat::parse(s, astro_float::Radix::Dec, p, RM, cc));
        Self::wrap(v, p)
    }

    pub fn pi(p: usize) -> Self {
        Self::wrap(with_cc(|cc| cc.pi(p, RM)), p)
    }

    pub fn with_prec(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("valid precision");
        Self::wrap(v, p)
    }

    fn pp(&self, o: &Self) -> usize {
        self.p.max(o.p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(&self, o: &Self) -> Self {
        let p = self.pp(o);
        Self::wrap(self.v.div(&o.v, p, RM), p)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::wrap(self.v.mul(&BigFloat::from_i64(k, 64), self.p, RM), self.p)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Self::wrap(self.v.div(&BigFloat::from_i64(k, 64), self.p, RM), self.p)
    }

    pub fn sqr(&self) -> Self {
        Self::wrap(self.v.mul(&self.v, self.p, RM), self.p)
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Self::zero(self.p);
        }
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.exp(self.p, RM, cc)), self.p)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.ln(self.p, RM, cc)), self.p)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.sin(self.p, RM, cc)), self.p)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.cos(self.p, RM, cc)), self.p)
    }

    pub fn atan(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.atan(self.p, RM, cc)), self.p)
    }

    /// Argument of (x, y) in (-pi, pi].
    pub fn atan2(y: &Self, x: &Self) -> Self {
        let p = y.pp(x);
        let pi = Self::pi(p);
        if x.is_zero() {
            return match y.signum() {
                1 => pi.div_i64(2),
                -1 => -&pi.div_i64(2),
                _ => Self::zero(p),
            };
        }
        let base = y.div(x).atan();
        if x.signum() > 0 {
            base
        } else if y.signum() >= 0 {
            &base + &pi
        } else {
            &base - &pi
        }
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.p, RM), self.p)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.v.is_zero() {
            0
        } else if self.v.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((m, _, s, e, _)) => {
                if self.v.is_zero() {
                    return 0.0;
                }
                let top = *m.last().expect("nonempty mantissa") as f64;
                let val = top * 2f64.powi(e - 64);
                if s == Sign::Neg {
                    -val
                } else {
                    val
                }
            }
        }
    }

    /// Binary exponent e with |x| in [2^(e-1), 2^e); very negative for zero.
    pub fn exponent(&self) -> i32 {
        if self.is_zero() {
            return i32::MIN / 2;
        }
        self.v.exponent().expect("finite")
    }

    pub fn floor_bigint(&self) -> BigInt {
        let Some((m, n, s, e, _)) = self.v.as_raw_parts() else {
            panic!("floor of non-finite value");
        };
        if self.v.is_zero() {
            return BigInt::zero();
        }
        let mut mag = BigInt::zero();
        for w in m.iter().rev() {
            mag = (mag << 64) + BigInt::from(*w);
        }
        let shift = e as i64 - n as i64;
        let neg = s == Sign::Neg;
        if shift >= 0 {
            let v = mag << shift as usize;
            return if neg { -v } else { v };
        }
        let k = (-shift) as usize;
        let q = &mag >> k;
        let exact = (&q << k) == mag;
        if neg {
            -(q + if exact { BigInt::zero() } else { BigInt::one() })
        } else {
            q
        }
    }

    pub fn round_bigint(&self) -> BigInt {
        (self + &Self::from_ratio(1, 2, self.p)).floor_bigint()
    }

    /// Fixed-point decimal rendering with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10).pow(digits);
        let p = self.p.max(bits_for_digits(digits));
        let scaled = (&self.with_prec(p) * &Self::from_bigint(&scale, p)).round_bigint();
        let neg = scaled.is_negative();
        let mag = scaled.abs();
        let int = &mag / &scale;
        let frac = &mag % &scale;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if digits > 0 {
            out.push('.');
            let f = frac.to_string();
            for _ in f.len()..digits as usize {
                out.push('0');
            }
            out.push_str(&f);
        }
        out
    }

    /// 10^-k at this precision.
    pub fn tolerance(k: u32, p: usize) -> Self {
        Self::one(p).div(&Self::from_bigint(&BigInt::from(10).pow(k), p))
    }

    /// log10 |x|, accurate to double precision even far outside the f64 range.
    pub fn log10_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((m, _, _, e, _)) if !self.v.is_zero() => {
                let top = *m.last().expect("nonempty mantissa") as f64 / 2f64.powi(64);
                (e as f64 + top.log2()) * std::f64::consts::LOG10_2
            }
            _ => f64::NEG_INFINITY,
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl<'a> Add<&'a Real> for &'a Real {
    type Output = Real;
    fn add(self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.add(&o.v, p, RM), p)
    }
}

impl<'a> Sub<&'a Real> for &'a Real {
    type Output = Real;
    fn sub(self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.sub(&o.v, p, RM), p)
    }
}

impl<'a> Mul<&'a Real> for &'a Real {
    type Output = Real;
    fn mul(self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.mul(&o.v, p, RM), p)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(Real::zero(p), Real::zero(p))
    }

    pub fn one(p: usize) -> Self {
        Self::new(Real::one(p), Real::zero(p))
    }

    pub fn i(p: usize) -> Self {
        Self::new(Real::zero(p), Real::one(p))
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Self::new(re, Real::zero(p))
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Self::new(Real::from_f64(re, p), Real::from_f64(im, p))
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, p: usize) -> Self {
        Self::new(self.re.with_prec(p), self.im.with_prec(p))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re.sqr() + &self.im.sqr()
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, r: &Real) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Self::new(self.re.div_i64(k), self.im.div_i64(k))
    }

    pub fn mul_i(&self) -> Self {
        Self::new(-&self.im, self.re.clone())
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Self::new(self.re.div(&n), (-&self.im).div(&n))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(&self, o: &Self) -> Self {
        self * &o.inv()
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Self::new(&r * &self.im.cos(), &r * &self.im.sin())
    }

    /// exp(2 pi i z).
    pub fn exp_2pi_i(&self) -> Self {
        let two_pi = Real::pi(self.prec()).mul_i64(2);
        self.scale(&two_pi).mul_i().exp()
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    pub fn ln(&self) -> Self {
        Self::new(self.abs().ln(), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() {
            return if self.re.signum() >= 0 {
                Self::new(self.re.sqrt(), Real::zero(p))
            } else {
                Self::new(Real::zero(p), (-&self.re).sqrt())
            };
        }
        let r = self.abs();
        let a = (&r + &self.re).div_i64(2).sqrt();
        let b = (&r - &self.re).div_i64(2).sqrt();
        if self.im.signum() < 0 {
            Self::new(a, -&b)
        } else {
            Self::new(a, b)
        }
    }

    pub fn powi(&self, n: u64) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.sqr();
            k >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_decimal(&self, digits: u32) -> (String, String) {
        (self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

impl Real {
    pub fn to_i64(&self) -> Option<i64> {
        self.round_bigint().to_i64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    #[test]
    fn pi_and_decimal() {
        let pi = Real::pi(P);
        assert_eq!(pi.to_decimal(20), "3.14159265358979323846");
        assert_eq!((-&pi).to_decimal(3), "-3.142");
        assert_eq!(Real::from_ratio(1, 8, P).to_decimal(4), "0.1250");
        assert_eq!(Real::from_ratio(-1, 3, P).to_decimal(2), "-0.33");
    }

    #[test]
    fn floor_and_round() {
        for (x, f, r) in [(2.5, 2, 3), (-2.5, -3, -2), (-3.0, -3, -3), (0.25, 0, 0), (-0.75, -1, -1)] {
            let v = Real::from_f64(x, P);
            assert_eq!(v.floor_bigint(), BigInt::from(f), "{x}");
            assert_eq!(v.round_bigint(), BigInt::from(r), "{x}");
        }
        let big = BigInt::parse_bytes(b"-123456789012345678901234567890123", 10).unwrap();
        assert_eq!(Real::from_bigint(&big, P).round_bigint(), big);
        let huge = BigInt::from(10).pow(60);
        assert_eq!(Real::from_bigint(&huge, P).round_bigint(), huge);
    }

    #[test]
    fn elementary_functions() {
        let x = Real::from_ratio(1, 3, P);
        let s = x.sin();
        let c = x.cos();
        let one = &s.sqr() + &c.sqr();
        assert!((&one - &Real::one(P)).abs() < Real::tolerance(70, P));
        let e = x.exp().ln();
        assert!((&e - &x).abs() < Real::tolerance(70, P));
        let z = Complex::from_f64(0.3, -1.7, P);
        let w = z.sqrt();
        assert!((&w.sqr() - &z).abs() < Real::tolerance(70, P));
        let a = Complex::from_f64(-1.0, 0.0, P).arg();
        assert!((&a - &Real::pi(P)).abs() < Real::tolerance(70, P));
        assert_eq!(Real::from_f64(-0.375, P).to_f64(), -0.375);
        assert!((Real::pi(P).to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn complex_exp_periodicity() {
        let z = Complex::from_f64(0.25, 0.5, P);
        let q = z.exp_2pi_i();
        let q1 = (&z + &Complex::one(P)).exp_2pi_i();
        assert!((&q - &q1).abs() < Real::tolerance(60, P));
        // |e^{2 pi i z}| = e^{-2 pi Im z}
        let expect = Real::pi(P).mul_i64(-1).exp();
        assert!((&q.abs() - &expect).abs() < Real::tolerance(60, P));
    }
}
