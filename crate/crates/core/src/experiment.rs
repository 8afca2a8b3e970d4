//! Heegner orbits of conductor p f on X_0(p^2 M), their Galois traces, and
//! the finite-level checks that accompany them.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::bigfloat::{bits_for_digits, Complex, Real};
use crate::analytic::curve::CurveModel;
use crate::analytic::lattice::{curve_residual, period_lattice, PeriodLattice};
use crate::analytic::modular::{atkin_lehner_sign, n_max_for, Newform};
use crate::analytic::recognize::{recognize_algebraic, QuadRational};
use crate::arith::{crt, factorize, gcd, is_prime, kronecker, legendre, primes_up_to};
use crate::cartan::{cartan_membership, index_ns_plus, CartanKind, FpParams, ProjClass};
use crate::embedding::{
    build_embedding, find_common_norm_element, lemma_converse_check, signo_pairing_check, two_to_one_check,
    verify_optimal, FiberMap,
};
use crate::error::{Error, Result};
use crate::quad::{kernel_classes, order_data, reduced_forms, BinaryForm, GaloisKernel};

/// Largest multiplier a tried when looking for (N a, b, c) in a class.
const REPRESENTATIVE_SEARCH: i64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SignoMinus,
    MainPlus,
    FiniteOnly,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signo_minus" | "signo-minus" => Ok(Mode::SignoMinus),
            "main_plus" | "main-plus" => Ok(Mode::MainPlus),
            "finite_only" | "finite-only" => Ok(Mode::FiniteOnly),
            _ => Err(Error::Invalid(format!("unknown mode {s}"))),
        }
    }
}

/// How the residue B mod 2N of the base Heegner form is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseChoice {
    /// B = 0 mod p^2, the residue fixed by w_p.
    Stable,
    /// Smallest |B|.
    SmallestB,
    /// A caller-supplied form with N | A and discriminant (p f)^2 dK.
    Given(BinaryForm),
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentSpec {
    pub curve: Option<CurveModel>,
    pub p: u64,
    pub level_m: i64,
    #[serde(rename = "dK")]
    pub dk: i64,
    pub f: i64,
    pub digits: u32,
    pub mode: Mode,
    pub base: BaseChoice,
    pub max_torsion: u32,
}

impl ExperimentSpec {
    pub fn new(curve: CurveModel, dk: i64, f: i64, digits: u32, mode: Mode) -> Self {
        Self {
            p: curve.p,
            level_m: curve.m,
            curve: Some(curve),
            dk,
            f,
            digits,
            mode,
            base: BaseChoice::Stable,
            max_torsion: 24,
        }
    }

    pub fn finite(p: u64, level_m: i64, dk: i64, f: i64) -> Self {
        Self {
            curve: None,
            p,
            level_m,
            dk,
            f,
            digits: 0,
            mode: Mode::FiniteOnly,
            base: BaseChoice::Stable,
            max_torsion: 24,
        }
    }

    pub fn level(&self) -> i64 {
        (self.p * self.p) as i64 * self.level_m
    }

    /// gcd(f, N) = 1, p inert in K, and every prime of M split in K.
    pub fn validate(&self) -> Result<()> {
        order_data(self.dk, self.f)?;
        if !crate::arith::is_odd_prime(self.p) {
            return Err(Error::NotOddPrime(self.p as i64));
        }
        if gcd(self.f, self.level()) != 1 {
            return Err(Error::DividesConductor { p: self.p, value: self.f });
        }
        if legendre(self.dk, self.p) != -1 {
            return Err(Error::NotInert { p: self.p, dk: self.dk });
        }
        for (q, _) in factorize(self.level_m as u64) {
            if kronecker(self.dk, q) != 1 {
                return Err(Error::Precondition(format!(
                    "prime {q} of M must split in Q(sqrt({}))",
                    self.dk
                )));
            }
        }
        Ok(())
    }
}

/// Roots of x^2 = d mod m by brute force.
fn sqrt_roots(d: i64, m: i64) -> Vec<i64> {
    (0..m).filter(|&x| ((x as i128 * x as i128 - d as i128).rem_euclid(m as i128)) == 0).collect()
}

/// Every residue B mod 2N with B^2 = disc mod 4N, built prime by prime.
fn heegner_residues(n: i64, disc: i64) -> Result<Vec<i64>> {
    let four_n = 4 * n;
    let mut sols: Vec<(i128, i128)> = vec![(0, 1)];
    for (q, e) in factorize(four_n as u64) {
        let qe = (q as i64).pow(e);
        let roots = sqrt_roots(disc, qe);
        if roots.is_empty() {
            return Err(Error::NoHeegnerPoint { disc, modulus: four_n });
        }
        let mut next = Vec::new();
        for &(r, m) in &sols {
            for &x in &roots {
                next.push((crt(r, m, x as i128, qe as i128), m * qe as i128));
            }
        }
        sols = next;
    }
    let mut out: Vec<i64> = sols.iter().map(|&(r, _)| (r as i64).rem_euclid(2 * n)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_heegner_args(n: i64, dk: i64, c: i64) -> Result<i64> {
    if n < 1 || c < 1 {
        return Err(Error::Precondition(format!("N = {n} and c = {c} must be positive")));
    }
    let g = gcd(c, n);
    if g != 1 && !(is_prime(g as u64) && n % (g * g) == 0) {
        return Err(Error::Precondition(format!("gcd(c, N) = {g} must be 1 or a prime whose square divides N")));
    }
    Ok(c * c * dk)
}

fn form_for(n: i64, b: i64, disc: i64) -> Option<BinaryForm> {
    let num = b as i128 * b as i128 - disc as i128;
    if num % (4 * n as i128) != 0 {
        return None;
    }
    let f = BinaryForm::new(n, b, (num / (4 * n as i128)) as i64);
    f.is_primitive().then_some(f)
}

/// A primitive (A, B, C) with A = N and B^2 = c^2 dK mod 4N, choosing the
/// smallest |B| (positive on ties).
pub fn heegner_form(n: i64, dk: i64, c: i64) -> Result<BinaryForm> {
    let disc = check_heegner_args(n, dk, c)?;
    let mut cands: Vec<i64> = heegner_residues(n, disc)?
        .into_iter()
        .map(|b| if b > n { b - 2 * n } else { b })
        .collect();
    cands.sort_by_key(|&b| (b.abs(), -b));
    cands
        .into_iter()
        .find_map(|b| form_for(n, b, disc))
        .ok_or(Error::NoHeegnerPoint { disc, modulus: 4 * n })
}

/// As `heegner_form`, restricted to B = 0 mod p^2.
pub fn heegner_form_stable(n: i64, p: u64, dk: i64, c: i64) -> Result<BinaryForm> {
    let disc = check_heegner_args(n, dk, c)?;
    let p2 = (p * p) as i64;
    let mut cands: Vec<i64> = heegner_residues(n, disc)?
        .into_iter()
        .filter(|b| b % p2 == 0)
        .map(|b| if b > n { b - 2 * n } else { b })
        .collect();
    cands.sort_by_key(|&b| (b.abs(), -b));
    cands
        .into_iter()
        .find_map(|b| form_for(n, b, disc))
        .ok_or(Error::NoHeegnerPoint { disc, modulus: 4 * n })
}

#[derive(Debug, Clone)]
pub struct HeegnerTau {
    pub form: BinaryForm,
    pub tau: Complex,
    pub conductor: i64,
}

impl HeegnerTau {
    /// (-B + sqrt(disc)) / (2A).
    pub fn new(form: BinaryForm, conductor: i64, prec: usize) -> Self {
        let d = form.disc();
        let two_a = Real::from_i64(2 * form.a, prec);
        let re = Real::from_i64(-form.b, prec).div(&two_a);
        let im = Real::from_i64(-d, prec).sqrt().div(&two_a);
        Self { form, tau: Complex::new(re, im), conductor }
    }

    pub fn im_f64(&self) -> f64 {
        (-self.form.disc() as f64).sqrt() / (2.0 * self.form.a as f64)
    }
}

/// The form (N a, b, c) with b = beta mod 2N and smallest a in the class of
/// `target`.
pub fn find_representative(target: &BinaryForm, n: i64, beta: i64) -> Result<BinaryForm> {
    let disc = target.disc();
    let goal = target.reduce();
    let beta = beta.rem_euclid(2 * n);
    for a in 1..=REPRESENTATIVE_SEARCH {
        let na = n * a;
        for j in 0..a {
            let b = beta + 2 * n * j;
            if let Some(f) = form_for(na, b, disc) {
                if f.reduce() == goal {
                    // centre B in (-A, A]
                    let k = (b + na - 1).div_euclid(2 * na);
                    let nb = b - 2 * na * k;
                    return Ok(form_for(na, nb, disc).expect("translate of a valid form"));
                }
            }
        }
    }
    Err(Error::RepresentativeNotFound(goal.as_tuple()))
}

#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub class: ProjClass,
    pub kernel_form: BinaryForm,
    pub heegner: HeegnerTau,
}

/// One N-divisible point per kernel class: base composed with the class.
pub fn galois_orbit(base: &HeegnerTau, kernel: &GaloisKernel, n: i64) -> Result<Vec<OrbitPoint>> {
    if base.form.disc() != kernel.suborder.disc {
        return Err(Error::DiscriminantMismatch(base.form.disc(), kernel.suborder.disc));
    }
    let prec = base.tau.prec();
    kernel
        .entries
        .iter()
        .map(|e| {
            let target = base.form.compose(&e.form)?;
            let rep = find_representative(&target, n, base.form.b)?;
            Ok(OrbitPoint { class: e.class, kernel_form: e.form, heegner: HeegnerTau::new(rep, base.conductor, prec) })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexJson {
    pub re: String,
    pub im: String,
}

impl ComplexJson {
    pub fn new(z: &Complex, digits: u32) -> Self {
        let (re, im) = z.to_decimal(digits);
        Self { re, im }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitEntry {
    pub kernel_class: ProjClass,
    pub form: BinaryForm,
    pub tau: ComplexJson,
    pub z: ComplexJson,
    pub n_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecognizedPoint {
    pub field_disc: i64,
    pub x: String,
    pub y: String,
    pub on_curve: bool,
    #[serde(skip)]
    pub exact: (QuadRational, QuadRational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Torsion,
    NonTorsion,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub orbit_ms: u128,
    pub series_ms: u128,
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceReport {
    pub spec: ExperimentSpec,
    pub wp: i32,
    /// -kronecker(dK, N), the root number of E over K when gcd(dK, N) = 1.
    pub root_number_over_k: i32,
    pub base_form: BinaryForm,
    pub orbit: Vec<OrbitEntry>,
    #[serde(rename = "traceZ")]
    pub trace_z: ComplexJson,
    pub trace_lattice_coordinates: (String, String),
    pub torsion_order: Option<u32>,
    /// log10 of min_m dist(m z, Lattice).
    pub torsion_residual_log10: f64,
    pub recognized: Option<RecognizedPoint>,
    pub verdict: Verdict,
    /// Whether the verdict is the one the mode predicts.
    pub expected: bool,
    pub digits: u32,
    pub precision_bits: usize,
    pub n_max: usize,
    /// log10 |z(digits) - z(2 digits)| mod Lattice.
    pub stability_log10: Option<f64>,
    pub fibers: usize,
    pub fibers_ok: bool,
    pub timings: Timings,
    #[serde(skip)]
    pub trace_value: Complex,
}

struct TraceRun {
    orbit: Vec<OrbitEntry>,
    trace: Complex,
    lattice: PeriodLattice,
    n_max: usize,
    orbit_ms: u128,
    series_ms: u128,
}

/// z-values of the orbit in kernel-class order and their sum.
fn run_trace(curve: &CurveModel, base: &BinaryForm, kernel: &GaloisKernel, digits: u32) -> Result<TraceRun> {
    let n = curve.conductor;
    let prec = bits_for_digits(digits) + 32;
    let t0 = Instant::now();
    let base_tau = HeegnerTau::new(*base, kernel.p as i64 * kernel.order.f, prec);
    let orbit = galois_orbit(&base_tau, kernel, n)?;
    let orbit_ms = t0.elapsed().as_millis();

    let t1 = Instant::now();
    let im_min = orbit.iter().map(|o| o.heegner.im_f64()).fold(f64::INFINITY, f64::min);
    let n_max = n_max_for(im_min, digits)?;
    let form = Newform::with_level(&curve.curve, n, n_max)?;
    let values: Vec<(Complex, usize)> =
        orbit.par_iter().map(|o| form.phi(&o.heegner.tau, digits)).collect::<Result<_>>()?;
    let mut trace = Complex::zero(prec);
    for (z, _) in &values {
        trace = &trace + z;
    }
    let series_ms = t1.elapsed().as_millis();
    let lattice = period_lattice(&curve.curve, digits)?;
    let entries = orbit
        .iter()
        .zip(&values)
        .map(|(o, (z, k))| OrbitEntry {
            kernel_class: o.class,
            form: o.heegner.form,
            tau: ComplexJson::new(&o.heegner.tau, digits),
            z: ComplexJson::new(z, digits),
            n_terms: *k,
        })
        .collect();
    Ok(TraceRun { orbit: entries, trace, lattice, n_max, orbit_ms, series_ms })
}

/// Exact point over Q(sqrt dK) from numeric coordinates, if recognizable.
pub fn recognize_point(curve: &CurveModel, lat: &PeriodLattice, z: &Complex, dk: i64, digits: u32) -> Option<RecognizedPoint> {
    let pt = lat.elliptic_exp(z);
    let (x, y) = pt.xy?;
    let height = digits / 3;
    let rx = recognize_algebraic(&x, dk, 2, height, digits).ok()?.value?;
    let ry = recognize_algebraic(&y, dk, 2, height, digits).ok()?.value?;
    let e = &curve.curve;
    let c = |k: i64| QuadRational::from_int(dk, k);
    let lhs = ry.mul(&ry).add(&c(e.a1).mul(&rx).mul(&ry)).add(&c(e.a3).mul(&ry));
    let x2 = rx.mul(&rx);
    let rhs = x2.mul(&rx).add(&c(e.a2).mul(&x2)).add(&c(e.a4).mul(&rx)).add(&c(e.a6));
    let on_curve = lhs.sub(&rhs).is_zero();
    Some(RecognizedPoint { field_disc: dk, x: rx.to_string(), y: ry.to_string(), on_curve, exact: (rx, ry) })
}

fn base_form(spec: &ExperimentSpec) -> Result<BinaryForm> {
    let n = spec.level();
    let c = spec.p as i64 * spec.f;
    match spec.base {
        BaseChoice::Stable => heegner_form_stable(n, spec.p, spec.dk, c),
        BaseChoice::SmallestB => heegner_form(n, spec.dk, c),
        BaseChoice::Given(g) => {
            if g.a % n != 0 || g.disc() != c * c * spec.dk || !g.is_primitive() {
                return Err(Error::Precondition(format!("{g} is not a Heegner form of level {n} and disc {}", c * c * spec.dk)));
            }
            Ok(g)
        }
    }
}

/// Full analytic experiment: orbit, trace, torsion test, recognition.
pub fn trace_point(spec: &ExperimentSpec) -> Result<TraceReport> {
    let t0 = Instant::now();
    if spec.mode == Mode::FiniteOnly {
        return Err(Error::Precondition("trace_point needs an analytic mode".into()));
    }
    spec.validate()?;
    let curve = spec.curve.as_ref().ok_or_else(|| Error::Precondition("no curve given".into()))?;
    let digits = spec.digits;
    let order = order_data(spec.dk, spec.f)?;
    let kernel = kernel_classes(&order, spec.p)?;
    let base = base_form(spec)?;
    let q = (spec.p * spec.p) as i64;
    let wp = atkin_lehner_sign(curve, q, digits)?;

    let run = run_trace(curve, &base, &kernel, digits)?;
    let lat = &run.lattice;
    let chk = lat.is_torsion(&run.trace, spec.max_torsion);

    let mut stability = None;
    let mut recognized = None;
    let verdict = if chk.torsion {
        Verdict::Torsion
    } else {
        let h = reduced_forms(order.disc)?.len();
        if h == 1 {
            recognized = recognize_point(curve, lat, &run.trace, spec.dk, digits).filter(|r| r.on_curve);
        }
        let doubled = (2 * digits).min(crate::analytic::lattice::MAX_DIGITS);
        let hi = run_trace(curve, &base, &kernel, doubled)?;
        let diff = hi.lattice.distance_to_lattice(&(&hi.trace - &run.trace.with_prec(hi.trace.prec())));
        let stable = diff < Real::tolerance(digits / 2, hi.trace.prec());
        stability = Some(diff.log10_abs());
        let hi_torsion = hi.lattice.is_torsion(&hi.trace, spec.max_torsion).torsion;
        if recognized.is_none() && h == 1 {
            recognized = recognize_point(curve, &hi.lattice, &hi.trace, spec.dk, doubled).filter(|r| r.on_curve);
        }
        if !stable || hi_torsion {
            Verdict::Undecided
        } else if recognized.is_some() {
            Verdict::NonTorsion
        } else {
            Verdict::Undecided
        }
    };

    let emb = build_embedding(&FpParams::new(spec.p)?, &order, spec.level_m)?;
    let fibers: FiberMap = two_to_one_check(&emb, &kernel)?;
    let fibers_ok = fibers.distinct_labels() as u64 == (spec.p + 1) / 2
        && fibers.partners_differ_by(&emb.proj_params(), &emb.involution());

    let expected = match spec.mode {
        Mode::SignoMinus => wp == -1 && verdict == Verdict::Torsion,
        Mode::MainPlus => wp == 1 && verdict == Verdict::NonTorsion,
        Mode::FiniteOnly => false,
    };
    let (s, t) = lat.coordinates(&run.trace);
    Ok(TraceReport {
        spec: spec.clone(),
        wp,
        root_number_over_k: -kronecker(spec.dk, spec.level() as u64),
        base_form: base,
        orbit: run.orbit,
        trace_z: ComplexJson::new(&run.trace, digits),
        trace_lattice_coordinates: (s.to_decimal(digits), t.to_decimal(digits)),
        torsion_order: chk.order,
        torsion_residual_log10: chk.residual.log10_abs(),
        recognized,
        verdict,
        expected,
        digits,
        precision_bits: run.trace.prec(),
        n_max: run.n_max,
        stability_log10: stability,
        fibers: fibers.distinct_labels(),
        fibers_ok,
        timings: Timings { orbit_ms: run.orbit_ms, series_ms: run.series_ms, total_ms: t0.elapsed().as_millis() },
        trace_value: run.trace,
    })
}

/// Trace value alone, for precision comparisons.
pub fn trace_value(spec: &ExperimentSpec, digits: u32) -> Result<(Complex, PeriodLattice)> {
    spec.validate()?;
    let curve = spec.curve.as_ref().ok_or_else(|| Error::Precondition("no curve given".into()))?;
    let order = order_data(spec.dk, spec.f)?;
    let kernel = kernel_classes(&order, spec.p)?;
    let run = run_trace(curve, &base_form(spec)?, &kernel, digits)?;
    Ok((run.trace, run.lattice))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FiniteReport {
    pub p: u64,
    #[serde(rename = "dK")]
    pub dk: i64,
    pub f: i64,
    pub level_m: i64,
    pub index_ns_plus: u64,
    pub fibers: usize,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
    pub fiber_map: Option<FiberMap>,
}

/// Finite-level consequences: optimal embedding, two-to-one coset map,
/// w_p pairing, and alpha_l for the first five good primes.
pub fn experiment_finite(spec: &ExperimentSpec) -> Result<FiniteReport> {
    let order = order_data(spec.dk, spec.f)?;
    let params = FpParams::new(spec.p)?;
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(CheckResult { name: name.into(), passed, detail });
    };
    let index = index_ns_plus(&params)?;
    let mut fibers = 0;
    let mut fiber_map = None;
    match build_embedding(&params, &order, spec.level_m) {
        Err(e) => push("build_embedding", false, e.to_string()),
        Ok(emb) => {
            push("build_embedding", true, format!("iota(w) = {}", emb.iota_omega));
            push("verify_optimal", verify_optimal(&emb), String::new());
            push("lemma_converse", lemma_converse_check(&emb), String::new());
            match kernel_classes(&order, spec.p).and_then(|k| two_to_one_check(&emb, &k)) {
                Err(e) => push("two_to_one", false, e.to_string()),
                Ok(map) => {
                    fibers = map.distinct_labels();
                    let ok = fibers as u64 == index
                        && map.all_fibers_size_two()
                        && map.partners_differ_by(&emb.proj_params(), &emb.involution());
                    push("two_to_one", ok, format!("{fibers} fibers, index {index}"));
                    fiber_map = Some(map);
                }
            }
            push("signo_pairing", signo_pairing_check(&emb), String::new());
        }
    }
    let n = spec.level();
    let good: Vec<u64> = primes_up_to(10_000).into_iter().filter(|&l| n % l as i64 != 0).take(5).collect();
    for l in good {
        let res = find_common_norm_element(&params, l as i64);
        let ok = res.as_ref().is_ok_and(|m| {
            m.det() == l % spec.p
                && cartan_membership(m, CartanKind::SplitPlus, &params)
                && cartan_membership(m, CartanKind::NonSplitPlus, &params)
        });
        let detail = match res {
            Ok(m) => m.to_string(),
            Err(e) => e.to_string(),
        };
        push(&format!("alpha_{l}"), ok, detail);
    }
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(FiniteReport {
        p: spec.p,
        dk: spec.dk,
        f: spec.f,
        level_m: spec.level_m,
        index_ns_plus: index,
        fibers,
        checks,
        all_passed,
        fiber_map,
    })
}

/// Residual of the recognized point in the curve equation, evaluated
/// numerically; zero when the exact check passed.
pub fn recognized_residual(curve: &CurveModel, r: &RecognizedPoint, prec: usize) -> Real {
    let x = r.exact.0.to_complex(prec);
    let y = r.exact.1.to_complex(prec);
    curve_residual(&curve.curve, &x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::curve::known;

    #[test]
    fn heegner_form_examples() {
        assert_eq!(heegner_form(49, -11, 7).unwrap(), BinaryForm::new(49, 7, 3));
        assert_eq!(
            heegner_form(49, -11, 1).unwrap_err(),
            Error::NoHeegnerPoint { disc: -11, modulus: 196 }
        );
        let f = heegner_form(121, -67, 11).unwrap();
        assert_eq!(f.a % 121, 0);
        assert_eq!(f.disc(), -8107);
        assert_eq!(heegner_form_stable(49, 7, -11, 7).unwrap(), BinaryForm::new(49, 49, 15));
        assert_eq!(heegner_form_stable(121, 11, -67, 11).unwrap(), BinaryForm::new(121, 121, 47));
        // classical Heegner points of conductor 1 on X_0(11)
        let f = heegner_form(11, -7, 1).unwrap();
        assert_eq!((f.a, f.disc()), (11, -7));
        assert!(heegner_form(49, -11, 2).is_err());
    }

    #[test]
    fn heegner_residues_solve_the_congruence() {
        for (n, d) in [(49i64, -539i64), (121, -8107), (11, -7), (98, -539 * 4)] {
            if let Ok(rs) = heegner_residues(n, d) {
                for b in rs {
                    assert_eq!((b * b - d).rem_euclid(4 * n), 0);
                }
            }
        }
    }

    #[test]
    fn orbit_has_distinct_points() {
        let order = order_data(-11, 1).unwrap();
        let kernel = kernel_classes(&order, 7).unwrap();
        let base = HeegnerTau::new(BinaryForm::new(49, 49, 15), 7, 128);
        let orbit = galois_orbit(&base, &kernel, 49).unwrap();
        assert_eq!(orbit.len(), 8);
        let mut forms: Vec<BinaryForm> = orbit.iter().map(|o| o.heegner.form.reduce()).collect();
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), 8);
        for o in &orbit {
            assert_eq!(o.heegner.form.a % 49, 0);
            assert_eq!((o.heegner.form.b - 49).rem_euclid(98), 0);
        }
        // the principal kernel class gives the base point back
        assert_eq!(orbit[0].heegner.form.reduce(), base.form.reduce());
        assert!(orbit[0].class.is_identity());
    }

    #[test]
    fn composing_twice() {
        let order = order_data(-11, 1).unwrap();
        let kernel = kernel_classes(&order, 7).unwrap();
        let base = BinaryForm::new(49, 49, 15);
        for e in &kernel.entries {
            let once = find_representative(&base.compose(&e.form).unwrap(), 49, 49).unwrap();
            let twice = find_representative(&once.compose(&e.form).unwrap(), 49, 49).unwrap();
            let sq = find_representative(&base.compose(&e.form.compose(&e.form).unwrap()).unwrap(), 49, 49).unwrap();
            assert_eq!(twice, sq);
        }
    }

    #[test]
    fn spec_validation() {
        let c = CurveModel::new(known::C49A1.0, 7).unwrap();
        assert!(ExperimentSpec::new(c.clone(), -11, 1, 30, Mode::SignoMinus).validate().is_ok());
        assert!(matches!(
            ExperimentSpec::new(c.clone(), -7, 1, 30, Mode::SignoMinus).validate(),
            Err(Error::NotInert { .. })
        ));
        assert!(ExperimentSpec::new(c.clone(), -11, 7, 30, Mode::SignoMinus).validate().is_err());
        let mut s = ExperimentSpec::finite(7, 2, -11, 1);
        assert!(s.validate().is_err()); // 2 is inert in Q(sqrt -11)
        s.level_m = 3;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn finite_experiments() {
        for (p, dk, fib) in [(5u64, -7i64, 3usize), (11, -67, 6), (13, -7, 7)] {
            let r = experiment_finite(&ExperimentSpec::finite(p, 1, dk, 1)).unwrap();
            assert!(r.all_passed, "{p} {dk}: {:?}", r.checks);
            assert_eq!(r.fibers, fib);
            assert_eq!(r.checks.iter().filter(|c| c.name.starts_with("alpha_")).count(), 5);
        }
    }

    #[test]
    fn sign_minus_trace_is_torsion_small_precision() {
        let c = CurveModel::new(known::C49A1.0, 7).unwrap();
        let r = trace_point(&ExperimentSpec::new(c, -11, 1, 30, Mode::SignoMinus)).unwrap();
        assert_eq!(r.wp, -1);
        assert_eq!(r.orbit.len(), 8);
        assert_eq!(r.verdict, Verdict::Torsion, "{:?}", r.trace_z);
        assert!(r.expected && r.fibers_ok);
    }
}
