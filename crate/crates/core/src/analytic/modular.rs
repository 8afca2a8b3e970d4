//! The newform of an elliptic curve as a q-series, the modular
//! parametrization tau -> sum a_n q^n / n, and Atkin-Lehner eigenvalues.

use super::bigfloat::{bits_for_digits, Complex, Real};
use super::curve::{CurveModel, Weierstrass};
use super::lattice::MAX_DIGITS;
use crate::arith::{ext_gcd, gcd};
use crate::cartan::IntMatrix;
use crate::error::{Error, Result};

/// Largest number of series terms evaluated for one tau.
pub const SERIES_LIMIT: usize = 200_000;

/// Smallest N with sum_{n > N} 2 n r^n < 10^-(digits + 10), where
/// r = exp(-2 pi Im tau). This dominates sum sigma_0(n) sqrt(n) r^n.
pub fn n_max_for(im_tau: f64, digits: u32) -> Result<usize> {
    if im_tau.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Precondition(format!("Im(tau) must be positive, got {im_tau}")));
    }
    let lr = -2.0 * std::f64::consts::PI * im_tau * std::f64::consts::LOG10_E;
    let r = 10f64.powf(lr);
    let target = -(digits as f64) - 10.0;
    let log_tail = |n: f64| {
        2f64.log10() + (n + 1.0) * lr + ((n + 1.0) - n * r).log10() - 2.0 * (1.0 - r).log10()
    };
    let (mut lo, mut hi) = (0f64, 1f64);
    while log_tail(hi) >= target {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if log_tail(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n = hi as usize;
    if n > SERIES_LIMIT {
        return Err(Error::SeriesBudget { required: n, limit: SERIES_LIMIT });
    }
    Ok(n.max(1))
}

/// Coefficients a_1..a_bound of the newform, shared by many evaluations.
#[derive(Debug, Clone)]
pub struct Newform {
    pub curve: Weierstrass,
    pub level: i64,
    pub an: Vec<i64>,
}

impl Newform {
    pub fn new(curve: &Weierstrass, bound: usize) -> Result<Self> {
        let level = curve.conductor()?;
        Ok(Self { curve: *curve, level, an: curve.an_coefficients(bound)? })
    }

    pub fn with_level(curve: &Weierstrass, level: i64, bound: usize) -> Result<Self> {
        Ok(Self { curve: *curve, level, an: curve.an_coefficients(bound)? })
    }

    pub fn bound(&self) -> usize {
        self.an.len() - 1
    }

    fn check(&self, tau: &Complex, digits: u32) -> Result<usize> {
        if digits == 0 || digits > MAX_DIGITS {
            return Err(Error::Precondition(format!("digits must be in 1..={MAX_DIGITS}")));
        }
        let n = n_max_for(tau.im.to_f64(), digits)?;
        if n > self.bound() {
            return Err(Error::Precondition(format!(
                "needs {n} coefficients, only {} available",
                self.bound()
            )));
        }
        Ok(n)
    }

    /// sum_{n <= n_max} c_n q^n by Horner's rule from the top index down.
    fn series(&self, tau: &Complex, n: usize, p: usize, weight: impl Fn(usize) -> Option<Real>) -> Complex {
        let q = tau.with_prec(p).exp_2pi_i();
        let mut acc = Complex::zero(p);
        for k in (1..=n).rev() {
            if let Some(c) = weight(k) {
                acc = &acc + &Complex::from_real(c);
            }
            acc = &acc * &q;
        }
        acc
    }

    /// z = sum a_n q^n / n and the number of terms used.
    pub fn phi(&self, tau: &Complex, digits: u32) -> Result<(Complex, usize)> {
        let n = self.check(tau, digits)?;
        let p = bits_for_digits(digits) + 32;
        let z = self.series(tau, n, p, |k| {
            let a = self.an[k];
            (a != 0).then(|| Real::from_ratio(a, k as i64, p))
        });
        Ok((z, n))
    }

    /// f(tau) = sum a_n q^n.
    pub fn eval(&self, tau: &Complex, digits: u32) -> Result<Complex> {
        let n = self.check(tau, digits)?;
        let p = bits_for_digits(digits) + 32;
        Ok(self.series(tau, n, p, |k| {
            let a = self.an[k];
            (a != 0).then(|| Real::from_i64(a, p))
        }))
    }
}

/// Coefficient bound large enough for Im(tau) >= im_min.
pub fn coefficient_bound(im_min: f64, digits: u32) -> Result<usize> {
    n_max_for(im_min, digits)
}

pub fn eval_phi(curve: &Weierstrass, tau: &Complex, digits: u32) -> Result<Complex> {
    let n = n_max_for(tau.im.to_f64(), digits)?;
    Ok(Newform::new(curve, n)?.phi(tau, digits)?.0)
}

/// g tau = (a tau + b) / (c tau + d).
pub fn act(g: &IntMatrix, tau: &Complex) -> Complex {
    let p = tau.prec();
    let c = |k: i64| Complex::from_real(Real::from_i64(k, p));
    let num = &(&c(g.a) * tau) + &c(g.b);
    let den = &(&c(g.c) * tau) + &c(g.d);
    num.div(&den)
}

/// W_Q = (Q, y; N, Q w) with Q w - (N/Q) y = 1.
pub fn atkin_lehner_matrix(level: i64, q: i64) -> Result<IntMatrix> {
    if q <= 0 || level % q != 0 || gcd(q, level / q) != 1 {
        return Err(Error::Precondition(format!("{q} is not an exact divisor of {level}")));
    }
    let r = level / q;
    let (g, w, y) = ext_gcd(q as i128, r as i128);
    debug_assert_eq!(g, 1);
    let (w, y) = (w as i64, -(y as i64));
    Ok(IntMatrix { a: q, b: y, c: level, d: q * w })
}

/// Eigenvalue of w_Q on the newform, from
/// (f | W_Q)(tau) = Q (N tau + Q w)^-2 f(W_Q tau) at several tau near the
/// fixed locus. The global root number is minus the value for Q = N.
pub fn atkin_lehner_sign(curve: &CurveModel, q: i64, digits: u32) -> Result<i32> {
    let w = atkin_lehner_matrix(curve.conductor, q)?;
    let n = curve.conductor as f64;
    let im0 = (q as f64).sqrt() / n;
    let bound = n_max_for(im0 * 0.8, digits)?;
    let form = Newform::with_level(&curve.curve, curve.conductor, bound)?;
    let p = bits_for_digits(digits) + 32;
    let base_re = -(w.d as f64) / n;
    let tol = Real::tolerance(digits / 2, p);
    let mut sign: Option<i32> = None;
    let mut used = 0;
    for (dx, fy) in [(0.013, 1.0), (0.21 / n, 0.93), (-0.17 / n, 1.07), (0.05 / n, 0.97), (0.31 / n, 1.0)] {
        let tau = Complex::new(
            Real::from_f64(base_re + dx, p),
            Real::from_f64(im0 * fy, p),
        );
        let wt = act(&w, &tau);
        if wt.im.to_f64() < im0 * 0.8 {
            continue;
        }
        let f0 = form.eval(&tau, digits)?;
        if f0.abs() < Real::tolerance(digits / 4, p) {
            continue;
        }
        let f1 = form.eval(&wt, digits)?;
        let cpl = &tau.mul_i64(w.c) + &Complex::from_real(Real::from_i64(w.d, p));
        let ratio = f1.mul_i64(q).div(&(&cpl.sqr() * &f0));
        let s = if ratio.re.signum() >= 0 { 1 } else { -1 };
        let err = (&ratio - &Complex::from_real(Real::from_i64(s as i64, p))).abs();
        if err > tol {
            return Err(Error::InconsistentSign);
        }
        match sign {
            Some(t) if t != s => return Err(Error::InconsistentSign),
            _ => sign = Some(s),
        }
        used += 1;
    }
    if used < 2 {
        return Err(Error::InconsistentSign);
    }
    Ok(sign.expect("at least two samples"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::curve::known;
    use crate::analytic::lattice::period_lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tail_bound_examples() {
        let im = (539f64).sqrt() / 98.0;
        assert!((im - 0.237).abs() < 1e-3);
        let n = n_max_for(im, 60).unwrap();
        assert!((105..=125).contains(&n), "{n}");
        // the bound really is met at n and not at n - 1
        let r = (-2.0 * std::f64::consts::PI * im).exp();
        let tail = |n: usize| {
            let n = n as f64;
            2.0 * r.powf(n + 1.0) * ((n + 1.0) - n * r) / (1.0 - r).powi(2)
        };
        assert!(tail(n) < 1e-70 && tail(n - 1) >= 1e-70);
        assert!(matches!(n_max_for(1e-6, 60), Err(Error::SeriesBudget { .. })));
        assert!(n_max_for(-1.0, 60).is_err());
    }

    #[test]
    fn translation_invariance() {
        let e = known::C11A1.0;
        let p = bits_for_digits(40) + 32;
        let tau = Complex::from_f64(0.1, 0.2, p);
        let a = eval_phi(&e, &tau, 40).unwrap();
        let b = eval_phi(&e, &(&tau + &Complex::one(p)), 40).unwrap();
        assert!((&a - &b).abs() < Real::tolerance(40, p));
    }

    fn random_gamma0(rng: &mut ChaCha8Rng, n: i64) -> IntMatrix {
        loop {
            let c = n * rng.gen_range(1..=2);
            let d: i64 = rng.gen_range(-30..=30);
            if gcd(c, d) != 1 {
                continue;
            }
            let (_, x, y) = ext_gcd(d as i128, c as i128);
            // a d - b c = 1
            let (a, b) = (x as i64, -(y as i64));
            let k: i64 = rng.gen_range(-3..=3);
            return IntMatrix { a: a + k * c, b: b + k * d, c, d };
        }
    }

    #[test]
    fn modularity_on_gamma0() {
        let digits = 30;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (e, n, _) in [known::C11A1, known::C37A1, known::C49A1] {
            let lat = period_lattice(&e, digits).unwrap();
            let p = lat.prec();
            let form = Newform::new(&e, n_max_for(0.5 / (2 * n) as f64, digits).unwrap()).unwrap();
            for _ in 0..20 {
                let g = random_gamma0(&mut rng, n);
                assert_eq!(g.det(), 1);
                // cτ + d = i·(0.9..1.1) keeps both Im τ and Im γτ near 1/c
                let t = rng.gen_range(0.9..1.1);
                let tau = Complex::new(
                    Real::from_f64(-(g.d as f64) / g.c as f64 + rng.gen_range(-0.1..0.1) / g.c as f64, p),
                    Real::from_f64(t / g.c as f64, p),
                );
                let gt = act(&g, &tau);
                let (z0, _) = form.phi(&tau, digits).unwrap();
                let (z1, _) = form.phi(&gt, digits).unwrap();
                let d = lat.distance_to_lattice(&(&z1 - &z0));
                assert!(d < Real::tolerance(digits / 2, p), "{e} {g:?}: {:?}", d);
            }
        }
    }

    #[test]
    fn atkin_lehner_matrices() {
        for (n, q) in [(49, 49), (98, 49), (98, 2), (605, 121)] {
            let w = atkin_lehner_matrix(n, q).unwrap();
            assert_eq!(w.det(), q);
            assert_eq!(w.a % q, 0);
            assert_eq!(w.d % q, 0);
            assert_eq!(w.c % n, 0);
            // W_Q^2 is Q times an element of Gamma_0(N)
            let w2 = w.mul(&w);
            assert!(w2.a % q == 0 && w2.b % q == 0 && w2.c % q == 0 && w2.d % q == 0);
            assert_eq!((w2.c / q) % n, 0);
        }
        assert!(atkin_lehner_matrix(49, 7).is_err());
    }

    #[test]
    fn root_numbers_of_validation_curves() {
        for (e, n, rank) in known::ALL {
            let p = if n == 121 { 11 } else if n == 49 { 7 } else { 0 };
            let model = if p > 0 {
                CurveModel::new(e, p).unwrap()
            } else {
                CurveModel { curve: e, conductor: n, p: 0, m: n }
            };
            let eps = atkin_lehner_sign(&model, n, 30).unwrap();
            let root = -eps;
            assert_eq!(root, if rank % 2 == 0 { 1 } else { -1 }, "{e}");
        }
    }
}
