use std::collections::HashSet;

use cartan_heegner::analytic::curve::known;
use cartan_heegner::analytic::modular::n_max_for;
use cartan_heegner::analytic::recognize::QuadRational;
use cartan_heegner::arith::{is_fundamental, kronecker, legendre, primes_up_to, sigma0};
use cartan_heegner::cartan::*;
use cartan_heegner::embedding::*;
use cartan_heegner::quad::{kernel_classes, order_data, reduced_forms, BinaryForm, ClassGroup};
use num_rational::BigRational;
use proptest::prelude::*;

fn odd_primes(max: u64) -> Vec<u64> {
    primes_up_to(max as usize).into_iter().filter(|&p| p > 2).collect()
}

fn odd_prime(max: u64) -> impl Strategy<Value = u64> {
    proptest::sample::select(odd_primes(max))
}

fn fundamental_discs(max_abs: i64) -> Vec<i64> {
    (5..=max_abs).map(|d| -d).filter(|&d| is_fundamental(d)).collect()
}

/// (p, t, n) with X^2 - tX + n irreducible mod p.
fn admissible() -> impl Strategy<Value = (u64, i64, i64)> {
    odd_prime(97).prop_flat_map(|p| (Just(p), 0..p as i64, 0..p as i64)).prop_filter("irreducible", |&(p, t, n)| {
        legendre(t * t - 4 * n, p) == -1
    })
}

/// (dK, f, p) with p inert in Q(sqrt dK) and prime to f.
fn inert_triple(max_p: u64) -> impl Strategy<Value = (i64, i64, u64)> {
    (proptest::sample::select(fundamental_discs(200)), 1i64..4, odd_prime(max_p))
        .prop_filter("inert, p prime to f", |&(dk, f, p)| kronecker(dk, p) == -1 && f % p as i64 != 0)
}

fn embedding(dk: i64, f: i64, p: u64) -> EmbeddingData {
    build_embedding(&FpParams::new(p).unwrap(), &order_data(dk, f).unwrap(), 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn proj_line_is_cyclic_group((p, t, n) in admissible(), seed in any::<u64>()) {
        let params = ProjParams::new(p, t, n).unwrap();
        let all = ProjClass::all(p);
        prop_assert_eq!(all.len() as u64, p + 1);
        let e = ProjClass::identity();
        let k = all.len();
        let (u, v, w) = (all[seed as usize % k], all[(seed >> 16) as usize % k], all[(seed >> 32) as usize % k]);
        prop_assert_eq!(proj_mul(&params, &u, &v), proj_mul(&params, &v, &u));
        prop_assert_eq!(
            proj_mul(&params, &proj_mul(&params, &u, &v), &w),
            proj_mul(&params, &u, &proj_mul(&params, &v, &w))
        );
        prop_assert_eq!(proj_mul(&params, &u, &e), u);
        prop_assert!(all.iter().any(|x| proj_mul(&params, &u, x).is_identity()));
        let orders: Vec<u64> = all.iter().map(|x| proj_order(&params, x)).collect();
        prop_assert!(orders.contains(&(p + 1)));
        let twos: Vec<ProjClass> = all.iter().zip(&orders).filter(|(_, &o)| o == 2).map(|(x, _)| *x).collect();
        let a = (t * ((p as i64 + 1) / 2)).rem_euclid(p as i64);
        prop_assert_eq!(twos, vec![involution_class(&params, a).unwrap()]);
    }

    #[test]
    fn cartan_to_proj_is_homomorphism((dk, f, p) in inert_triple(31), i in any::<usize>(), j in any::<usize>()) {
        let emb = embedding(dk, f, p);
        let cns = enumerate_cartan(&emb.params, CartanKind::NonSplit).unwrap();
        let (m1, m2) = (cns[i % cns.len()], cns[j % cns.len()]);
        let proj = emb.proj_params();
        let lhs = cartan_to_proj(&emb, &m1.mul(&m2)).unwrap();
        let rhs = proj_mul(&proj, &cartan_to_proj(&emb, &m1).unwrap(), &cartan_to_proj(&emb, &m2).unwrap());
        prop_assert_eq!(lhs, rhs);
        let s = 1 + i as u64 % (p - 1);
        prop_assert!(cartan_to_proj(&emb, &FpMatrix::scalar(p, s)).unwrap().is_identity());
    }

    #[test]
    fn lift_reduces_to_itself(p in odd_prime(97), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let p64 = p as i64;
        let (a, b) = (a as i64 % p64, b as i64 % p64);
        // Complete (a, b) to a det-1 matrix, or use (a, b) as the bottom row of a shear when a = 0.
        let m = if a != 0 {
            let ai = cartan_heegner::arith::mod_inv(a as u64, p).unwrap() as i64;
            let c = c as i64 % p64;
            FpMatrix::new(p, a, b, c, (1 + b * c) % p64 * ai)
        } else {
            FpMatrix::new(p, b, 1, p64 - 1, 0)
        };
        prop_assume!(m.det() == 1);
        let lift = lift_to_integral_sl2(&m).unwrap();
        prop_assert_eq!(lift.det(), 1);
        prop_assert_eq!(lift.reduce(p), m);
    }

    #[test]
    fn embedding_postconditions((dk, f, p) in inert_triple(31)) {
        let emb = embedding(dk, f, p);
        let order = order_data(dk, f).unwrap();
        let pi = p as i64;
        prop_assert_eq!(emb.iota_omega.charpoly(), (order.t.rem_euclid(pi) as u64, order.n.rem_euclid(pi) as u64));
        prop_assert!(cartan_membership(&emb.iota_omega, CartanKind::NonSplit, &emb.params));
        prop_assert!(emb.b % p != 0 && emb.c % p != 0);
        prop_assert!(verify_optimal(&emb));
    }

    #[test]
    fn decompose_gamma_postcondition((dk, f, p) in inert_triple(13), i in any::<usize>()) {
        let emb = embedding(dk, f, p);
        let cns = enumerate_cartan(&emb.params, CartanKind::NonSplit).unwrap();
        let r = cns[i % cns.len()];
        let dec = decompose_gamma(&emb, &r).unwrap();
        prop_assert_eq!(dec.gamma_i.mul(&dec.r_s), r);
        prop_assert_eq!(dec.gamma_i.det(), 1);
        prop_assert!(cartan_membership(&dec.gamma_i, CartanKind::NonSplitPlus, &emb.params));
        prop_assert!(cartan_membership(&dec.r_s, CartanKind::SplitPlus, &emb.params));
    }

    #[test]
    fn common_norm_elements_close_up(p in odd_prime(97), l1 in 1i64..10_000, l2 in 1i64..10_000) {
        let pi = p as i64;
        prop_assume!(l1 % pi != 0 && l2 % pi != 0);
        let params = FpParams::new(p).unwrap();
        let (x, y) = (find_common_norm_element(&params, l1).unwrap(), find_common_norm_element(&params, l2).unwrap());
        let xy = x.mul(&y);
        prop_assert_eq!(xy.det() as i64, (l1 * l2).rem_euclid(pi));
        for m in [x, y, xy, x.inverse().unwrap()] {
            prop_assert!(cartan_membership(&m, CartanKind::NonSplitPlus, &params));
            prop_assert!(cartan_membership(&m, CartanKind::SplitPlus, &params));
        }
    }

    #[test]
    fn kernel_has_p_plus_one_classes((dk, p) in (proptest::sample::select(fundamental_discs(400)), odd_prime(31))
        .prop_filter("inert", |&(dk, p)| kronecker(dk, p) == -1)) {
        let kernel = kernel_classes(&order_data(dk, 1).unwrap(), p).unwrap();
        prop_assert_eq!(kernel.len() as u64, p + 1);
        let distinct: HashSet<_> = kernel.entries.iter().map(|e| e.form).collect();
        prop_assert_eq!(distinct.len() as u64, p + 1);
    }

    #[test]
    fn class_number_ratio(dk in proptest::sample::select(fundamental_discs(100)), p in odd_prime(13)) {
        prop_assume!(dk % p as i64 != 0);
        let h1 = reduced_forms(dk).unwrap().len() as i64;
        let hp = reduced_forms(dk * (p * p) as i64).unwrap().len() as i64;
        prop_assert_eq!(hp, h1 * (p as i64 - kronecker(dk, p) as i64));
    }

    #[test]
    fn form_composition_is_abelian(d in proptest::sample::select((3..=2000).map(|k| -k).filter(|d: &i64| d.rem_euclid(4) <= 1).collect::<Vec<_>>()),
        i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let forms = reduced_forms(d).unwrap();
        let principal: Vec<_> = forms.iter().filter(|g| g.a == 1).collect();
        prop_assert_eq!(principal.len(), 1);
        let e = BinaryForm::principal(d).reduce();
        let (x, y, z) = (forms[i % forms.len()], forms[j % forms.len()], forms[k % forms.len()]);
        let c = |u: &BinaryForm, v: &BinaryForm| u.compose(v).unwrap().reduce();
        prop_assert_eq!(c(&x, &y), c(&y, &x));
        prop_assert_eq!(c(&c(&x, &y), &z), c(&x, &c(&y, &z)));
        prop_assert_eq!(c(&x, &x.inverse()), e);
        prop_assert_eq!(c(&x, &e), x);
    }

    #[test]
    fn tail_bound_holds(im in 0.05f64..2.0, digits in 20u32..200) {
        let n = n_max_for(im, digits).unwrap();
        let r = (-2.0 * std::f64::consts::PI * im).exp();
        let tail: f64 = (n + 1..n + 20_000).map(|k| 2.0 * k as f64 * r.powi(k as i32)).sum();
        prop_assert!(tail.log10() < -(digits as f64) - 10.0 + 1e-6 || tail == 0.0);
        prop_assert!(n_max_for(im, digits + 10).unwrap() >= n);
    }

    #[test]
    fn quad_rational_field_ops(d in proptest::sample::select(fundamental_discs(100)),
        a in -50i64..50, b in -50i64..50, c in 1i64..20, e in -50i64..50, g in -50i64..50, h in 1i64..20) {
        let q = |u: i64, v: i64, den: i64| QuadRational::new(d, BigRational::new(u.into(), den.into()), BigRational::new(v.into(), den.into()));
        let (x, y) = (q(a, b, c), q(e, g, h));
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        if !y.is_zero() {
            prop_assert_eq!(x.mul(&y).div(&y).unwrap(), x.clone());
        }
        let poly = x.minimal_polynomial();
        let mut acc = QuadRational::from_int(d, 0);
        for coeff in poly.iter().rev() {
            acc = acc.mul(&x).add(&QuadRational::new(d, BigRational::from_integer(coeff.clone()), BigRational::from_integer(0.into())));
        }
        prop_assert!(acc.is_zero());
    }
}

#[test]
fn cartan_group_sizes() {
    for p in odd_primes(31) {
        let params = FpParams::new(p).unwrap();
        let size = |k| enumerate_cartan(&params, k).unwrap().len() as u64;
        assert_eq!(size(CartanKind::NonSplit), p * p - 1);
        assert_eq!(size(CartanKind::NonSplitPlus), 2 * (p * p - 1));
        assert_eq!(size(CartanKind::Split), (p - 1) * (p - 1));
        assert_eq!(size(CartanKind::SplitPlus), 2 * (p - 1) * (p - 1));
    }
}

#[test]
fn det_on_nonsplit_is_surjective() {
    for p in odd_primes(97) {
        let params = FpParams::new(p).unwrap();
        let dets: HashSet<u64> = enumerate_cartan(&params, CartanKind::NonSplit).unwrap().iter().map(|m| m.det()).collect();
        assert_eq!(dets.len() as u64, p - 1, "p = {p}");
    }
}

#[test]
fn decompose_gamma_exhaustive_small_primes() {
    for (dk, p) in [(-7, 3), (-7, 5), (-8, 5), (-11, 7), (-19, 13), (-20, 11)] {
        if kronecker(dk, p) != -1 {
            continue;
        }
        let emb = embedding(dk, 1, p);
        for r in enumerate_cartan(&emb.params, CartanKind::NonSplit).unwrap() {
            let dec = decompose_gamma(&emb, &r).unwrap();
            assert_eq!(dec.gamma_i.mul(&dec.r_s), r);
            assert_eq!(dec.gamma_i.det(), 1);
            assert!(cartan_membership(&dec.r_s, CartanKind::SplitPlus, &emb.params));
        }
    }
}

#[test]
fn class_to_proj_matches_cayley_table() {
    for (dk, p) in [(-7, 3), (-7, 5), (-11, 7), (-23, 5), (-47, 13)] {
        if kronecker(dk, p) != -1 {
            continue;
        }
        let order = order_data(dk, 1).unwrap();
        let kernel = kernel_classes(&order, p).unwrap();
        let group = ClassGroup::new(kernel.suborder.disc).unwrap();
        for u in &kernel.entries {
            for v in &kernel.entries {
                let w = proj_mul(&kernel.proj, &u.class, &v.class);
                let composed = u.form.compose(&v.form).unwrap().reduce();
                assert_eq!(group.index_of(&composed), group.index_of(&kernel.entry_for_class(&w).form), "{dk} {p}");
            }
        }
    }
}

#[test]
fn fiber_count_matches_index() {
    for p in [5u64, 7, 11, 13] {
        let params = FpParams::new(p).unwrap();
        let index = index_ns_plus(&params).unwrap();
        let orders: Vec<(i64, i64)> = fundamental_discs(200)
            .into_iter()
            .flat_map(|d| (1..4).map(move |f| (d, f)))
            .filter(|&(d, f)| kronecker(d, p) == -1 && f % p as i64 != 0)
            .take(5)
            .collect();
        assert_eq!(orders.len(), 5);
        for (dk, f) in orders {
            let order = order_data(dk, f).unwrap();
            let emb = build_embedding(&params, &order, 1).unwrap();
            let fibers = two_to_one_check(&emb, &kernel_classes(&order, p).unwrap()).unwrap();
            assert_eq!(fibers.distinct_labels() as u64, index);
            assert!(fibers.all_fibers_size_two());
            assert!(fibers.partners_differ_by(&emb.proj_params(), &emb.involution()));
        }
    }
}

#[test]
fn divisor_count_bound_covers_small_coefficients() {
    let (e, _, _) = known::C37A1;
    let an = e.an_coefficients(3000).unwrap();
    for (n, a) in an.iter().enumerate().skip(1) {
        assert!((a.abs() as f64) <= sigma0(n as u64) as f64 * (n as f64).sqrt() + 1e-9, "n = {n}");
    }
}
