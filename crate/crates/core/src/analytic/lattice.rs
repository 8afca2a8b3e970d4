//! Period lattice of the invariant differential, the Weierstrass map
//! C/Lambda -> E(C), and numerical torsion tests.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::bigfloat::{bits_for_digits, Complex, Real};
use super::curve::Weierstrass;
use crate::error::{Error, Result};

/// Largest working precision accepted by the analytic layer.
pub const MAX_DIGITS: u32 = 400;

#[derive(Debug, Clone)]
pub struct PeriodLattice {
    pub curve: Weierstrass,
    pub digits: u32,
    /// w1 is real and Im(w2 / w1) > 0.
    pub w1: Complex,
    pub w2: Complex,
    pub real_components: u32,
    v1: Complex,
    v2: Complex,
    q: Complex,
}

#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub z: Complex,
    /// None for the point at infinity.
    pub xy: Option<(Complex, Complex)>,
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        self.xy.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct TorsionCheck {
    pub torsion: bool,
    pub order: Option<u32>,
    /// min over m of the distance from m z to the lattice.
    pub residual: Real,
}

fn real_i128(x: i128, p: usize) -> Real {
    Real::from_bigint(&BigInt::from(x), p)
}

fn agm(a: &Real, b: &Real) -> Result<Real> {
    let p = a.prec();
    let tol = Real::one(p).div(&Real::from_bigint(&(BigInt::from(1) << (p - 8)), p));
    let (mut a, mut b) = (a.clone(), b.clone());
    for _ in 0..200 {
        if (&a - &b).abs() <= (&tol * &a.abs()) {
            return Ok(a);
        }
        let na = (&a + &b).div_i64(2);
        b = (&a * &b).sqrt();
        a = na;
    }
    Err(Error::PrecisionNotAchieved("AGM did not converge".into()))
}

/// f64 roots of 4X^3 - g2 X - g3 by Durand-Kerner.
fn cubic_roots_f64(g2: f64, g3: f64) -> [(f64, f64); 3] {
    type C = (f64, f64);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let sub = |a: C, b: C| (a.0 - b.0, a.1 - b.1);
    let div = |a: C, b: C| {
        let n = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
    };
    let f = |x: C| {
        let x3 = mul(mul(x, x), x);
        sub(sub(x3, (g2 / 4.0 * x.0, g2 / 4.0 * x.1)), (g3 / 4.0, 0.0))
    };
    let scale = 1.0 + g2.abs().sqrt() + g3.abs().cbrt();
    let mut r: [C; 3] = [(0.4 * scale, 0.9 * scale), (-0.65 * scale, 0.3 * scale), (0.2 * scale, -0.7 * scale)];
    for _ in 0..500 {
        for i in 0..3 {
            let mut den = (1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den = mul(den, sub(r[i], r[j]));
                }
            }
            r[i] = sub(r[i], div(f(r[i]), den));
        }
    }
    r
}

fn newton_root(x0: (f64, f64), g2: &Real, g3: &Real, p: usize) -> Complex {
    let mut x = Complex::from_f64(x0.0, x0.1, p);
    let g2c = Complex::from_real(g2.clone());
    let g3c = Complex::from_real(g3.clone());
    let tol = Real::one(p).div(&Real::from_bigint(&(BigInt::from(1) << (p - 4)), p));
    for _ in 0..(2 * (p as f64).log2() as usize + 20) {
        let x2 = x.sqr();
        let f = &(&(&x2 * &x).mul_i64(4) - &(&g2c * &x)) - &g3c;
        let df = &x2.mul_i64(12) - &g2c;
        let step = f.div(&df);
        x = &x - &step;
        if step.abs() <= &tol * &(&x.abs() + &Real::one(p)) {
            break;
        }
    }
    x
}

fn sigma(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::from(0);
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            if d * d != n {
                s += BigInt::from(n / d).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Number of q-series terms so that |q|^n < 2^-bits.
fn terms_for(q_abs: f64, bits: usize) -> usize {
    ((bits as f64 + 20.0) * std::f64::consts::LN_2 / -q_abs.ln()).ceil() as usize + 2
}

impl PeriodLattice {
    pub fn prec(&self) -> usize {
        self.w1.prec()
    }

    /// Real coordinates (s, t) with z = s v1 + t v2 in the given basis.
    fn coords_in(z: &Complex, v1: &Complex, v2: &Complex) -> (Real, Real) {
        let zz = z.div(v1);
        let tau = v2.div(v1);
        let t = zz.im.div(&tau.im);
        let s = &zz.re - &(&t * &tau.re);
        (s, t)
    }

    /// Coordinates of z in the basis (w1, w2).
    pub fn coordinates(&self, z: &Complex) -> (Real, Real) {
        Self::coords_in(z, &self.w1, &self.w2)
    }

    /// z - (nearest lattice point in the reduced basis).
    pub fn reduce(&self, z: &Complex) -> Complex {
        let (s, t) = Self::coords_in(z, &self.v1, &self.v2);
        let p = self.prec();
        let ms = Real::from_bigint(&s.round_bigint(), p);
        let mt = Real::from_bigint(&t.round_bigint(), p);
        let shift = &self.v1.scale(&ms) + &self.v2.scale(&mt);
        z - &shift
    }

    pub fn distance_to_lattice(&self, z: &Complex) -> Real {
        let r = self.reduce(z);
        // the reduced basis makes one correction step enough up to its neighbours
        let mut best = r.abs();
        for (i, j) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
            for sgn in [1i64, -1] {
                let c = &self.v1.mul_i64(i * sgn) + &self.v2.mul_i64(j * sgn);
                let d = (&r - &c).abs();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn real_period(&self) -> Real {
        self.w1.re.mul_i64(self.real_components as i64)
    }

    /// g2 and g3 of the lattice from Eisenstein series in the reduced basis.
    pub fn eisenstein_invariants(&self) -> (Complex, Complex) {
        let p = self.prec();
        let n = terms_for(self.q.abs().to_f64(), p);
        let to_c = |b: BigInt| Complex::from_real(Real::from_bigint(&b, p));
        let mut e4 = Complex::zero(p);
        let mut e6 = Complex::zero(p);
        let mut qn = Complex::one(p);
        for k in 1..=n as u64 {
            qn = &qn * &self.q;
            e4 = &e4 + &(&to_c(sigma(k, 3)) * &qn);
            e6 = &e6 + &(&to_c(sigma(k, 5)) * &qn);
        }
        let e4 = &Complex::one(p) + &e4.mul_i64(240);
        let e6 = &Complex::one(p) - &e6.mul_i64(504);
        let two_pi_over = Complex::from_real(Real::pi(p).mul_i64(2)).div(&self.v1);
        let s4 = two_pi_over.powi(4);
        let s6 = two_pi_over.powi(6);
        ((&s4 * &e4).div_i64(12), (&s6 * &e6).div_i64(216))
    }

    /// Weierstrass p and p' at z.
    pub fn wp(&self, z: &Complex) -> (Complex, Complex) {
        let p = self.prec();
        let zr = self.reduce(z);
        let u = zr.div(&self.v1).exp_2pi_i();
        let uinv = u.inv();
        let one = Complex::one(p);
        let g = |v: &Complex| {
            let d = &one - v;
            v.div(&d.sqr())
        };
        let h = |v: &Complex| {
            let d = &one - v;
            (v * &(&one + v)).div(&(&d.sqr() * &d))
        };
        let uabs = u.abs().to_f64();
        let spread = uabs.max(1.0 / uabs);
        let qa = self.q.abs().to_f64();
        let n = terms_for(qa, p) + (spread.ln() / -qa.ln()).ceil().max(0.0) as usize + 1;
        let mut s = &Complex::from_real(Real::from_ratio(1, 12, p)) + &g(&u);
        let mut sd = h(&u);
        let mut qn = Complex::one(p);
        for _ in 1..=n {
            qn = &qn * &self.q;
            let a = &qn * &u;
            let b = &qn * &uinv;
            s = &(&(&s + &g(&a)) + &g(&b)) - &g(&qn).mul_i64(2);
            sd = &(&sd + &h(&a)) - &h(&b);
        }
        let c = Complex::from_real(Real::pi(p).mul_i64(2)).mul_i().div(&self.v1);
        let c2 = c.sqr();
        (&c2 * &s, &(&c2 * &c) * &sd)
    }

    pub fn elliptic_exp(&self, z: &Complex) -> CurvePoint {
        let p = self.prec();
        let zr = self.reduce(z);
        if zr.abs() < Real::tolerance(self.digits / 2, p) {
            return CurvePoint { z: zr, xy: None };
        }
        let (wp, dwp) = self.wp(&zr);
        let e = &self.curve;
        let x = &wp - &Complex::from_real(real_i128(e.b2(), p).div_i64(12));
        let a1 = Complex::from_real(Real::from_i64(e.a1, p));
        let a3 = Complex::from_real(Real::from_i64(e.a3, p));
        let y = (&(&dwp - &(&a1 * &x)) - &a3).div_i64(2);
        CurvePoint { z: zr, xy: Some((x, y)) }
    }

    /// Smallest m <= max_order with m z within 10^-(digits/2) of the lattice.
    pub fn is_torsion(&self, z: &Complex, max_order: u32) -> TorsionCheck {
        let tol = Real::tolerance(self.digits / 2, self.prec());
        let mut residual: Option<Real> = None;
        for m in 1..=max_order {
            let d = self.distance_to_lattice(&z.mul_i64(m as i64));
            if d < tol {
                return TorsionCheck { torsion: true, order: Some(m), residual: d };
            }
            if residual.as_ref().is_none_or(|r| d < *r) {
                residual = Some(d);
            }
        }
        TorsionCheck { torsion: false, order: None, residual: residual.expect("max_order >= 1") }
    }
}

/// |y^2 + a1 x y + a3 y - (x^3 + a2 x^2 + a4 x + a6)|.
pub fn curve_residual(e: &Weierstrass, x: &Complex, y: &Complex) -> Real {
    let p = x.prec();
    let c = |k: i64| Complex::from_real(Real::from_i64(k, p));
    let lhs = &(&y.sqr() + &(&(&c(e.a1) * x) * y)) + &(&c(e.a3) * y);
    let x2 = x.sqr();
    let rhs = &(&(&(&x2 * x) + &(&c(e.a2) * &x2)) + &(&c(e.a4) * x)) + &c(e.a6);
    (&lhs - &rhs).abs()
}

pub fn period_lattice(curve: &Weierstrass, digits: u32) -> Result<PeriodLattice> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Precondition(format!("digits must be in 1..={MAX_DIGITS}, got {digits}")));
    }
    let p = bits_for_digits(digits) + 32;
    let disc = curve.disc();
    if disc == 0 {
        return Err(Error::SingularCurve);
    }
    let g2 = real_i128(curve.c4(), p).div_i64(12);
    let g3 = real_i128(curve.c6(), p).div_i64(216);
    let approx = cubic_roots_f64(g2.to_f64(), g3.to_f64());
    let roots: Vec<Complex> = approx.iter().map(|&r| newton_root(r, &g2, &g3, p)).collect();

    let (w1, w2, comps) = if disc > 0 {
        let mut e: Vec<Real> = roots.iter().map(|r| r.re.clone()).collect();
        e.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
        let (e1, e2, e3) = (&e[0], &e[1], &e[2]);
        let a = (e1 - e3).sqrt();
        let w1 = Real::pi(p).div(&agm(&a, &(e1 - e2).sqrt())?);
        let w2 = Real::pi(p).div(&agm(&a, &(e2 - e3).sqrt())?);
        (Complex::from_real(w1), Complex::new(Real::zero(p), w2), 2)
    } else {
        let idx = (0..3)
            .min_by(|&i, &j| approx[i].1.abs().partial_cmp(&approx[j].1.abs()).expect("finite"))
            .expect("three roots");
        let e1 = roots[idx].re.clone();
        let beta = (&e1.sqr().mul_i64(3) - &g2.div_i64(4)).sqrt();
        let two_sqrt_beta = beta.sqrt().mul_i64(2);
        let e13 = e1.mul_i64(3);
        let two_beta = beta.mul_i64(2);
        let w1 = Real::pi(p).mul_i64(2).div(&agm(&two_sqrt_beta, &(&two_beta + &e13).sqrt())?);
        let im = Real::pi(p).div(&agm(&two_sqrt_beta, &(&two_beta - &e13).sqrt())?);
        let w2 = Complex::new(-&w1.div_i64(2), im);
        (Complex::from_real(w1), w2, 1)
    };

    // Gauss reduction, tracked in f64 and applied exactly.
    let (mut v1, mut v2) = (w1.clone(), w2.clone());
    for _ in 0..100 {
        let t = v2.div(&v1);
        let m = t.re.round_bigint();
        if m != BigInt::from(0) {
            let mr = Real::from_bigint(&m, p);
            v2 = &v2 - &v1.scale(&mr);
        }
        if v2.norm_sqr() < v1.norm_sqr() {
            let nv1 = v2.clone();
            v2 = -&v1;
            v1 = nv1;
        } else {
            break;
        }
    }
    let tau = v2.div(&v1);
    if tau.im.signum() <= 0 || tau.im.to_f64() < 0.8 {
        return Err(Error::PrecisionNotAchieved(format!("lattice reduction failed: tau = {:?}", tau.to_f64())));
    }
    let q = tau.exp_2pi_i();
    let lat = PeriodLattice { curve: *curve, digits, w1, w2, real_components: comps, v1, v2, q };

    let (lg2, lg3) = lat.eisenstein_invariants();
    let scale = &g2.abs() + &g3.abs();
    let tol = &Real::tolerance(digits + 5, p) * &(&scale + &Real::one(p));
    let err = &(&lg2 - &Complex::from_real(g2)).abs() + &(&lg3 - &Complex::from_real(g3)).abs();
    if err > tol {
        return Err(Error::PrecisionNotAchieved(format!(
            "lattice invariants off by 10^{:.1}",
            err.log10_abs()
        )));
    }
    Ok(lat)
}

/// Helper for tests and reports: the integer nearest to x, if small.
pub fn nearest_i64(x: &Real) -> Option<i64> {
    x.round_bigint().to_i64()
}
