use cartan_heegner::analytic::bigfloat::Real;
use cartan_heegner::analytic::curve::{known, CurveModel, Weierstrass};
use cartan_heegner::experiment::*;
use cartan_heegner::quad::BinaryForm;

fn spec(curve: Weierstrass, p: u64, dk: i64, digits: u32, mode: Mode) -> ExperimentSpec {
    ExperimentSpec::new(CurveModel::new(curve, p).unwrap(), dk, 1, digits, mode)
}

#[test]
fn sign_minus_pairs_give_torsion() {
    let c121c1 = Weierstrass::new(1, 1, 0, -2, -7).unwrap();
    for (curve, p, dk) in [(known::C49A1.0, 7, -11), (known::C49A1.0, 7, -8), (c121c1, 11, -67)] {
        let r = trace_point(&spec(curve, p, dk, 40, Mode::SignoMinus)).unwrap();
        assert_eq!(r.wp, -1, "{curve} {dk}");
        assert_eq!(r.verdict, Verdict::Torsion, "{curve} {dk}");
        assert_eq!(r.orbit.len() as u64, p + 1);
        assert!(r.fibers_ok && r.fibers as u64 == (p + 1) / 2);
        assert!(r.expected);
    }
}

#[test]
fn sign_plus_pair_gives_rational_point() {
    let r = trace_point(&spec(known::C121B1.0, 11, -67, 40, Mode::MainPlus)).unwrap();
    assert_eq!(r.wp, 1);
    assert_eq!(r.verdict, Verdict::NonTorsion);
    let pt = r.recognized.unwrap();
    assert!(pt.on_curve);
    assert_eq!(r.root_number_over_k, -1);
}

/// The trace must not depend on which Gamma_0(N)-translate of the base form is used.
#[test]
fn trace_invariant_under_gamma0_change_of_base() {
    for (curve, p, dk) in [(known::C121B1.0, 11u64, -67), (known::C49A1.0, 7, -11)] {
        let s = spec(curve, p, dk, 30, Mode::MainPlus);
        let n = s.level();
        let base = heegner_form_stable(n, p, dk, p as i64).unwrap();
        let (z0, lat) = trace_value(&s, 30).unwrap();
        for (a, b, c, d) in [(1, 1, 0, 1), (1, 0, n, 1), (2 * n + 1, 2, n, 1), (1, -1, -n, n + 1)] {
            assert_eq!(a * d - b * c, 1);
            let moved: BinaryForm = base.transform(a, b, c, d);
            assert_eq!(moved.a % n, 0);
            let mut t = s.clone();
            t.base = BaseChoice::Given(moved);
            let (z1, _) = trace_value(&t, 30).unwrap();
            let diff = lat.distance_to_lattice(&(&z1 - &z0));
            assert!(diff < Real::tolerance(15, z0.prec()), "{moved}: 10^{}", diff.log10_abs());
        }
    }
}

/// The smallest-|B| base is not fixed by w_p, and the sign -1 vanishing then fails.
#[test]
fn smallest_b_base_breaks_vanishing() {
    let mut s = spec(known::C49A1.0, 7, -11, 40, Mode::SignoMinus);
    s.base = BaseChoice::SmallestB;
    let r = trace_point(&s).unwrap();
    assert_eq!(r.base_form.as_tuple(), (49, 7, 3));
    assert_eq!(r.verdict, Verdict::NonTorsion);
    assert!(!r.expected);
}

#[test]
fn given_base_is_validated() {
    let mut s = spec(known::C49A1.0, 7, -11, 30, Mode::SignoMinus);
    s.base = BaseChoice::Given(BinaryForm::new(7, 7, 19));
    assert!(trace_point(&s).is_err());
}

#[test]
fn report_json_has_schema_fields() {
    let r = trace_point(&spec(known::C49A1.0, 7, -11, 30, Mode::SignoMinus)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["spec", "wp", "orbit", "traceZ", "verdict", "digits", "nMax", "timings"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["orbit"].as_array().unwrap().len(), 8);
    assert_eq!(v["verdict"], "torsion");
}
