//! Integral Weierstrass models: invariants, local reduction data via Tate's
//! algorithm, and the coefficients a_n of the associated newform.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, is_odd_prime, primes_up_to};
use crate::error::{Error, Result};

/// Largest coefficient bound accepted by `an_coefficients`.
pub const MAX_COEFFICIENTS: usize = 1_000_000;

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Weierstrass {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

#[derive(Debug, Clone, Copy)]
struct W {
    a1: i128,
    a2: i128,
    a3: i128,
    a4: i128,
    a6: i128,
}

impl W {
    fn b2(&self) -> i128 {
        self.a1 * self.a1 + 4 * self.a2
    }
    fn b4(&self) -> i128 {
        2 * self.a4 + self.a1 * self.a3
    }
    fn b6(&self) -> i128 {
        self.a3 * self.a3 + 4 * self.a6
    }
    fn b8(&self) -> i128 {
        let W { a1, a2, a3, a4, a6 } = *self;
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    fn c4(&self) -> i128 {
        let b2 = self.b2();
        b2 * b2 - 24 * self.b4()
    }
    fn c6(&self) -> i128 {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
    }
    fn disc(&self) -> i128 {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// x = x' + r, y = y' + s x' + t.
    fn rst(&self, r: i128, s: i128, t: i128) -> Self {
        let W { a1, a2, a3, a4, a6 } = *self;
        W {
            a1: a1 + 2 * s,
            a2: a2 - s * a1 + 3 * r - s * s,
            a3: a3 + r * a1 + 2 * t,
            a4: a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }
}

/// Reduction data at one bad prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub prime: u64,
    pub conductor_exponent: u32,
    pub kodaira: String,
    pub tamagawa: u32,
    pub disc_valuation: u32,
}

fn val(x: i128, p: i128) -> u32 {
    crate::arith::valuation(x, p)
}

fn md(x: i128, p: i128) -> i128 {
    x.rem_euclid(p)
}

fn inv_mod(x: i128, p: i128) -> i128 {
    let (g, u, _) = crate::arith::ext_gcd(md(x, p), p);
    debug_assert_eq!(g, 1);
    md(u, p)
}

fn quad_has_root(a: i128, b: i128, c: i128, p: i128) -> bool {
    (0..p).any(|x| md(a * x * x + b * x + c, p) == 0)
}

/// Roots in F_p of a monic cubic with multiplicities.
fn cubic_roots(b: i128, c: i128, d: i128, p: i128) -> Vec<(i128, u32)> {
    let mut coeffs = vec![md(d, p), md(c, p), md(b, p), 1];
    let mut out: Vec<(i128, u32)> = Vec::new();
    let mut x = 0;
    while x < p && coeffs.len() > 1 {
        let v = coeffs.iter().rev().fold(0, |acc, &k| md(acc * x + k, p));
        if v == 0 {
            // synthetic division by (T - x)
            let n = coeffs.len() - 1;
            let mut q = vec![0i128; n];
            let mut carry = 0;
            for i in (0..n).rev() {
                carry = md(coeffs[i + 1] + carry * x, p);
                q[i] = carry;
            }
            coeffs = q;
            match out.last_mut() {
                Some((r, m)) if *r == x => *m += 1,
                _ => out.push((x, 1)),
            }
        } else {
            x += 1;
        }
    }
    out
}

/// Tate's algorithm at p for a model that must be minimal at p.
fn tate(w: &W, p: i128) -> Result<LocalData> {
    let mut e = *w;
    let n = val(e.disc(), p);
    let done = |f: u32, k: String, c: u32| -> Result<LocalData> {
        Ok(LocalData {
            prime: p as u64,
            conductor_exponent: f,
            kodaira: k,
            tamagawa: c,
            disc_valuation: n,
        })
    };
    if n == 0 {
        return done(0, "I0".into(), 1);
    }
    let half = if p == 2 { 0 } else { inv_mod(2, p) };
    let p2 = p * p;
    let p3 = p2 * p;

    // Move the singular point to (0, 0).
    let (b2, b4, b6) = (e.b2(), e.b4(), e.b6());
    let (r, t) = if p == 2 {
        if md(b2, 2) == 0 {
            let r = md(e.a4, 2);
            (r, md(r * (1 + e.a2 + e.a4) + e.a6, 2))
        } else {
            let r = md(e.a3, 2);
            (r, md(r + e.a4, 2))
        }
    } else if p == 3 {
        let r = if md(b2, 3) == 0 { md(-b6, 3) } else { md(-b2 * b4, 3) };
        (r, md(e.a1 * r + e.a3, 3))
    } else {
        let c4 = e.c4();
        let r = if md(c4, p) == 0 {
            md(-inv_mod(12, p) * b2, p)
        } else {
            md(-inv_mod(12 * c4, p) * (e.c6() + b2 * c4), p)
        };
        (r, md(-half * (e.a1 * r + e.a3), p))
    };
    e = e.rst(r, 0, t);

    if md(e.c4(), p) != 0 {
        let split = quad_has_root(1, e.a1, -e.a2, p);
        let c = if split { n } else if n % 2 == 0 { 2 } else { 1 };
        return done(1, format!("I{n}"), c);
    }
    if val(e.a6, p) < 2 {
        return done(n, "II".into(), 1);
    }
    if val(e.b8(), p) < 3 {
        return done(n - 1, "III".into(), 2);
    }
    if val(e.b6(), p) < 3 {
        let c = if quad_has_root(1, e.a3 / p, -e.a6 / p2, p) { 3 } else { 1 };
        return done(n - 2, "IV".into(), c);
    }

    // Now p | a1, a2; p^2 | a3, a4; p^3 | a6.
    let (s, t) = if p == 2 {
        (md(e.a2, 2), 2 * md(e.a6 / 4, 2))
    } else {
        (md(-e.a1 * half, p), p * md(-(e.a3 / p) * half, p))
    };
    e = e.rst(0, s, t);

    let roots = cubic_roots(e.a2 / p, e.a4 / p2, e.a6 / p3, p);
    let max_mult = roots.iter().map(|r| r.1).max().unwrap_or(1);
    if max_mult == 1 {
        return done(n - 4, "I0*".into(), 1 + roots.len() as u32);
    }
    if max_mult == 2 {
        let beta = roots.iter().find(|r| r.1 == 2).expect("double root").0;
        e = e.rst(p * beta, 0, 0);
        let (mut ix, mut iy) = (3u32, 3u32);
        let (mut mx, mut my) = (p2, p2);
        let c;
        loop {
            let a2t = e.a2 / p;
            let a3t = e.a3 / my;
            let a6t = e.a6 / (mx * my);
            if md(a3t * a3t + 4 * a6t, p) == 0 {
                let t = if p == 2 { my * md(a6t, 2) } else { my * md(-a3t * half, p) };
                e = e.rst(0, 0, t);
                my *= p;
                iy += 1;
                let a4t = e.a4 / (p * mx);
                let a6t = e.a6 / (mx * my);
                if md(a4t * a4t - 4 * a6t * a2t, p) == 0 {
                    let r = if p == 2 {
                        mx * md(a6t * a2t, 2)
                    } else {
                        mx * md(-a4t * inv_mod(2 * a2t, p), p)
                    };
                    e = e.rst(r, 0, 0);
                    mx *= p;
                    ix += 1;
                } else {
                    c = if quad_has_root(a2t, a4t, a6t, p) { 4 } else { 2 };
                    break;
                }
            } else {
                c = if quad_has_root(1, a3t, -a6t, p) { 4 } else { 2 };
                break;
            }
        }
        let m = ix + iy - 5;
        return done(n - m - 4, format!("I{m}*"), c);
    }

    let beta = roots[0].0;
    e = e.rst(p * beta, 0, 0);
    let a3t = e.a3 / p2;
    let a6t = e.a6 / (p2 * p2);
    if md(a3t * a3t + 4 * a6t, p) != 0 {
        let c = if quad_has_root(1, a3t, -a6t, p) { 3 } else { 1 };
        return done(n - 6, "IV*".into(), c);
    }
    let t = if p == 2 { p2 * md(a6t, 2) } else { p2 * md(-a3t * half, p) };
    e = e.rst(0, 0, t);
    if val(e.a4, p) < 4 {
        return done(n - 7, "III*".into(), 2);
    }
    if val(e.a6, p) < 6 {
        return done(n - 8, "II*".into(), 1);
    }
    Err(Error::NonMinimal(p as i64))
}

impl fmt::Display for Weierstrass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

impl Weierstrass {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let c = Self { a1, a2, a3, a4, a6 };
        if c.disc() == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    pub fn from_slice(a: &[i64]) -> Result<Self> {
        match a {
            [a1, a2, a3, a4, a6] => Self::new(*a1, *a2, *a3, *a4, *a6),
            _ => Err(Error::Invalid(format!("expected 5 coefficients, got {}", a.len()))),
        }
    }

    fn w(&self) -> W {
        W {
            a1: self.a1 as i128,
            a2: self.a2 as i128,
            a3: self.a3 as i128,
            a4: self.a4 as i128,
            a6: self.a6 as i128,
        }
    }

    pub fn coefficients(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn b2(&self) -> i128 {
        self.w().b2()
    }
    pub fn b4(&self) -> i128 {
        self.w().b4()
    }
    pub fn b6(&self) -> i128 {
        self.w().b6()
    }
    pub fn b8(&self) -> i128 {
        self.w().b8()
    }
    pub fn c4(&self) -> i128 {
        self.w().c4()
    }
    pub fn c6(&self) -> i128 {
        self.w().c6()
    }
    pub fn disc(&self) -> i128 {
        self.w().disc()
    }

    /// Reduction data at every prime dividing the discriminant.
    pub fn local_data(&self) -> Result<Vec<LocalData>> {
        let d = self.disc();
        if d == 0 {
            return Err(Error::SingularCurve);
        }
        let w = self.w();
        let d = d.unsigned_abs();
        let primes = factorize_u128(d);
        primes.into_iter().map(|q| tate(&w, q as i128)).collect()
    }

    pub fn conductor(&self) -> Result<i64> {
        let mut n: i64 = 1;
        for l in self.local_data()? {
            n *= (l.prime as i64).pow(l.conductor_exponent);
        }
        Ok(n)
    }

    /// -sum_x chi(disc_x), i.e. l + 1 - #E(F_l) counting every projective
    /// point of the reduced cubic, singular or not.
    pub fn ap(&self, l: u64) -> i64 {
        let li = l as i64;
        let r = |x: i64| x.rem_euclid(li);
        if l == 2 {
            let mut count = 0i64;
            for x in 0..2i64 {
                for y in 0..2i64 {
                    let lhs = y * y + self.a1 * x * y + self.a3 * y;
                    let rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6;
                    if r(lhs - rhs) == 0 {
                        count += 1;
                    }
                }
            }
            return 2 - count;
        }
        let mut chi = vec![-1i8; l as usize];
        chi[0] = 0;
        for y in 1..l {
            chi[(y * y % l) as usize] = 1;
        }
        let (a1, a2, a3, a4, a6) = (r(self.a1), r(self.a2), r(self.a3), r(self.a4), r(self.a6));
        let mut s = 0i64;
        for x in 0..li {
            let h = (a1 * x + a3) % li;
            let f = ((((x + a2) * x % li + a4) * x % li) + a6) % li;
            let d = (h * h + 4 * f) % li;
            s += chi[d as usize] as i64;
        }
        -s
    }

    /// a_1 .. a_bound (index 0 holds a_0 = 0).
    pub fn an_coefficients(&self, bound: usize) -> Result<Vec<i64>> {
        if bound > MAX_COEFFICIENTS {
            return Err(Error::CoefficientBound(bound, MAX_COEFFICIENTS));
        }
        let disc = self.disc();
        let primes = primes_up_to(bound);
        let ap: Vec<i64> = primes.par_iter().map(|&l| self.ap(l)).collect();
        let mut a = vec![0i64; bound + 1];
        if bound == 0 {
            return Ok(a);
        }
        a[1] = 1;
        // prime powers
        let mut spf = vec![0u32; bound + 1];
        for (&l, &al) in primes.iter().zip(&ap) {
            let good = disc % l as i128 != 0;
            let li = l as i64;
            let (mut prev, mut cur) = (1i64, al);
            let mut q = l as usize;
            loop {
                a[q] = cur;
                let Some(nq) = q.checked_mul(l as usize).filter(|&x| x <= bound) else { break };
                let next = if good { al * cur - li * prev } else { al * cur };
                prev = cur;
                cur = next;
                q = nq;
            }
            let mut m = l as usize;
            while m <= bound {
                if spf[m] == 0 {
                    spf[m] = l as u32;
                }
                m += l as usize;
            }
        }
        for n in 2..=bound {
            let l = spf[n] as usize;
            let mut pk = l;
            while n % (pk * l) == 0 {
                pk *= l;
            }
            if pk != n {
                a[n] = a[pk] * a[n / pk];
            }
        }
        Ok(a)
    }
}

fn factorize_u128(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

/// An elliptic curve of conductor p^2 M with p odd and p not dividing M.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveModel {
    pub curve: Weierstrass,
    pub conductor: i64,
    pub p: u64,
    pub m: i64,
}

impl std::ops::Deref for CurveModel {
    type Target = Weierstrass;
    fn deref(&self) -> &Weierstrass {
        &self.curve
    }
}

impl CurveModel {
    /// Validates the level by Tate's algorithm (which also rejects models
    /// that are not minimal).
    pub fn new(curve: Weierstrass, p: u64) -> Result<Self> {
        let conductor = curve.conductor()?;
        Self::with_conductor(curve, p, conductor)
    }

    /// Trusts the supplied conductor.
    pub fn with_conductor(curve: Weierstrass, p: u64, conductor: i64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p as i64));
        }
        let p2 = (p * p) as i64;
        if conductor % p2 != 0 || (conductor / p2) % p as i64 == 0 {
            return Err(Error::BadLevel { conductor, p });
        }
        Ok(Self { curve, conductor, p, m: conductor / p2 })
    }

    /// The odd prime whose square exactly divides the conductor, if unique.
    pub fn guess_p(curve: &Weierstrass) -> Result<u64> {
        let n = curve.conductor()?;
        let cands: Vec<u64> = factorize(n as u64)
            .into_iter()
            .filter(|&(q, e)| q > 2 && e == 2)
            .map(|(q, _)| q)
            .collect();
        match cands.as_slice() {
            [q] => Ok(*q),
            _ => Err(Error::BadLevel { conductor: n, p: 0 }),
        }
    }

    pub fn an_coefficients(&self, bound: usize) -> Result<Vec<i64>> {
        self.curve.an_coefficients(bound)
    }
}

/// Curves used for validation, with their rank.
pub mod known {
    use super::Weierstrass;

    pub const C11A1: (Weierstrass, i64, u32) = (w(0, -1, 1, -10, -20), 11, 0);
    pub const C37A1: (Weierstrass, i64, u32) = (w(0, 0, 1, -1, 0), 37, 1);
    pub const C43A1: (Weierstrass, i64, u32) = (w(0, 1, 1, 0, 0), 43, 1);
    pub const C389A1: (Weierstrass, i64, u32) = (w(0, 1, 1, -2, 0), 389, 2);
    pub const C49A1: (Weierstrass, i64, u32) = (w(1, -1, 0, -2, -1), 49, 0);
    pub const C121B1: (Weierstrass, i64, u32) = (w(0, -1, 1, -7, 10), 121, 1);

    const fn w(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Weierstrass {
        Weierstrass { a1, a2, a3, a4, a6 }
    }

    pub const ALL: [(Weierstrass, i64, u32); 6] = [C11A1, C37A1, C43A1, C389A1, C49A1, C121B1];
}
