//! Optimal embeddings of O_f into the non-split Cartan order at p, and the
//! coset combinatorics comparing C_ns+ with C_s+.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{crt, gcd, is_square_mod, legendre, mod_inv, sqrt_mod};
use crate::cartan::{
    cartan_membership, involution_class, lift_sl2_mod, order_membership, proj_mul, CartanKind,
    FpMatrix, FpParams, IntMatrix, ProjClass, ProjParams,
};
use crate::error::{Error, Result};
use crate::quad::{GaloisKernel, QuadOrder};

/// The image of w_f at p, conjugated into C_ns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddingData {
    pub params: FpParams,
    pub order: QuadOrder,
    #[serde(rename = "A0")]
    pub a0: FpMatrix,
    pub gamma_bar: FpMatrix,
    pub iota_omega: FpMatrix,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub level_m: i64,
}

impl EmbeddingData {
    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn proj_params(&self) -> ProjParams {
        ProjParams::new(self.params.p, self.order.t, self.order.n).expect("inert by construction")
    }

    /// The unique involution [-a : 1] of P^1(F_p).
    pub fn involution(&self) -> ProjClass {
        involution_class(&self.proj_params(), self.a as i64).expect("2a = t by construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaDecomposition {
    pub kernel_class: ProjClass,
    pub r_bar: FpMatrix,
    /// The element of C_ns+ ∩ C_s+ used to correct the determinant.
    pub m: FpMatrix,
    pub gamma_i: FpMatrix,
    pub r_s: FpMatrix,
}

/// Canonical representative of a right coset of C_s+ ∩ SL_2(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetLabel {
    pub rep: FpMatrix,
}

fn half(p: u64) -> u64 {
    (p + 1) / 2
}

/// Conjugates the companion matrix of X^2 - tX + n into C_ns by an element
/// of SL_2(F_p). The target is (t/2, s; eps s, t/2) with eps s^2 = D/4 and s
/// the smallest such residue.
pub fn build_embedding(params: &FpParams, order: &QuadOrder, level_m: i64) -> Result<EmbeddingData> {
    let p = params.p;
    let eps = params.eps;
    if level_m < 1 {
        return Err(Error::Precondition(format!("level M = {level_m} must be positive")));
    }
    if gcd(p as i64, order.f * level_m) != 1 {
        return Err(Error::DividesConductor { p, value: order.f * level_m });
    }
    let disc = order.disc.rem_euclid(p as i64) as u64;
    if disc == 0 {
        return Err(Error::Precondition(format!("discriminant {} is 0 mod {p}", order.disc)));
    }
    if legendre(order.dk, p) != -1 || is_square_mod(disc, p) {
        return Err(Error::NotInert { p, dk: order.dk });
    }
    let tt = order.t.rem_euclid(p as i64) as u64;
    let nn = order.n.rem_euclid(p as i64) as u64;
    let h = half(p);
    let quarter = h * h % p;
    let target_sq = disc * quarter % p * mod_inv(eps, p).expect("eps is a unit") % p;
    let s = sqrt_mod(target_sq, p).expect("D/4eps is a square when D and eps are non-squares");
    let a = tt * h % p;
    let t_mat = FpMatrix { p, a, b: s, c: eps * s % p, d: a };

    let a0 = FpMatrix::new(p, 0, -(nn as i64), 1, tt as i64);
    // Q = [e1 | T e1] satisfies Q^-1 T Q = A0.
    let q = FpMatrix { p, a: 1, b: t_mat.a, c: 0, d: t_mat.c };
    let gamma0 = q.inverse().expect("eps s != 0");
    // Correct the determinant by an element of the centralizer of T.
    let want = q.det();
    let corr = (0..p)
        .flat_map(|x| (0..p).map(move |y| (x, y)))
        .map(|(x, y)| FpMatrix { p, a: x, b: y, c: eps * y % p, d: x })
        .find(|m| m.det() == want)
        .expect("det: C_ns -> F_p^x is surjective");
    let gamma_bar = gamma0.mul(&corr);
    let iota_omega = gamma_bar.inverse().expect("invertible").mul(&a0).mul(&gamma_bar);
    debug_assert_eq!(iota_omega, t_mat);
    debug_assert_eq!(gamma_bar.det(), 1);
    Ok(EmbeddingData {
        params: *params,
        order: *order,
        a0,
        gamma_bar,
        iota_omega,
        a: iota_omega.a,
        b: iota_omega.b,
        c: iota_omega.c,
        d: iota_omega.d,
        level_m,
    })
}

/// Checks that O_f lands optimally in R_ns and O_pf optimally in R_s at p.
///
/// For O_pf: if x1 + x2 p w_f is in M_s then the (2,1) entry x2 p c has
/// positive valuation, which forces x2 integral exactly when c is a unit;
/// the (1,1) entry then forces x1 integral. The (1,2) entry gives the same
/// with b. For O_f the entries of x1 + x2 T are integral iff x1, x2 are when
/// b or c is a unit.
pub fn verify_optimal(emb: &EmbeddingData) -> bool {
    let p = emb.p();
    let m = emb.iota_omega;
    let t = emb.order.t.rem_euclid(p as i64) as u64;
    let n = emb.order.n.rem_euclid(p as i64) as u64;
    let in_ns = cartan_membership(&m, CartanKind::NonSplit, &emb.params);
    let charpoly = m.charpoly() == (t, n);
    let conj = emb
        .gamma_bar
        .inverse()
        .map(|gi| gi.mul(&emb.a0).mul(&emb.gamma_bar) == m)
        .unwrap_or(false);
    let sl2 = emb.gamma_bar.det() == 1;
    let entries = (emb.a, emb.b, emb.c, emb.d) == (m.a, m.b, m.c, m.d);
    let diag = (2 * emb.a) % p == t;
    let split_side = emb.b != 0 && emb.c != 0;
    in_ns && charpoly && conj && sl2 && entries && diag && split_side
}

/// x1 I + x2 iota(w_f) mod p.
pub fn galois_matrix(emb: &EmbeddingData, x1: i64, x2: i64) -> Result<FpMatrix> {
    let p = emb.p();
    if x1.rem_euclid(p as i64) == 0 && x2.rem_euclid(p as i64) == 0 {
        return Err(Error::ZeroPair(x1, x2));
    }
    let x1 = x1.rem_euclid(p as i64) as u64;
    let x2 = x2.rem_euclid(p as i64) as u64;
    Ok(FpMatrix::scalar(p, x1).add(&emb.iota_omega.scale(x2)))
}

fn class_matrix(emb: &EmbeddingData, c: &ProjClass) -> FpMatrix {
    galois_matrix(emb, c.x1 as i64, c.x2 as i64).expect("canonical class is nonzero")
}

/// Inverse of `galois_matrix` on C_ns: the class [x1 : x2] with m = x1 + x2 T.
pub fn cartan_to_proj(emb: &EmbeddingData, m: &FpMatrix) -> Result<ProjClass> {
    if !cartan_membership(m, CartanKind::NonSplit, &emb.params) {
        return Err(Error::Precondition(format!("{m} is not in C_ns")));
    }
    let p = emb.p();
    let x2 = m.b * mod_inv(emb.b, p).expect("b is a unit") % p;
    let x1 = (m.a + p - x2 * emb.a % p) % p;
    ProjClass::new(p, x1 as i64, x2 as i64)
}

/// Classes whose Galois matrix lies in M_s+.
pub fn split_plus_classes(emb: &EmbeddingData) -> Vec<ProjClass> {
    ProjClass::all(emb.p())
        .into_iter()
        .filter(|c| order_membership(&class_matrix(emb, c), CartanKind::SplitPlus, &emb.params))
        .collect()
}

/// Exhaustive check that only [1:0] and [-a:1] give matrices in M_s+.
pub fn lemma_converse_check(emb: &EmbeddingData) -> bool {
    let mut expected = vec![ProjClass::identity(), emb.involution()];
    expected.sort();
    let mut found = split_plus_classes(emb);
    found.sort();
    found == expected
}

/// An element of C_s+ ∩ C_ns+ of determinant `l`: the scalar mu with
/// mu^2 = l (smallest mu), or (0, b; -eps b, 0) with eps b^2 = l (smallest b).
pub fn find_common_norm_element(params: &FpParams, l: i64) -> Result<FpMatrix> {
    let p = params.p;
    let l = l.rem_euclid(p as i64) as u64;
    if l == 0 {
        return Err(Error::Precondition("norm must be nonzero mod p".into()));
    }
    if let Some(mu) = sqrt_mod(l, p) {
        return Ok(FpMatrix::scalar(p, mu));
    }
    let target = l * mod_inv(params.eps, p).expect("eps is a unit") % p;
    let b = sqrt_mod(target, p).expect("l / eps is a square when l is not");
    Ok(FpMatrix::new(p, 0, b as i64, -((params.eps * b % p) as i64), 0))
}

/// Writes rBar in C_ns as gammaI · rS with gammaI in SL_2 ∩ C_ns+ and rS in C_s+.
pub fn decompose_gamma(emb: &EmbeddingData, r_bar: &FpMatrix) -> Result<GammaDecomposition> {
    let kernel_class = cartan_to_proj(emb, r_bar)?;
    let p = emb.p();
    let dinv = mod_inv(r_bar.det(), p).expect("invertible");
    let m = find_common_norm_element(&emb.params, dinv as i64)?;
    let gamma_i = r_bar.mul(&m);
    let r_s = m.inverse().expect("invertible");
    debug_assert_eq!(gamma_i.det(), 1);
    Ok(GammaDecomposition { kernel_class, r_bar: *r_bar, m, gamma_i, r_s })
}

/// C_s+ ∩ SL_2(F_p): diag(x, 1/x) and (0, x; -1/x, 0).
pub fn split_plus_sl2(p: u64) -> Vec<FpMatrix> {
    let mut out = Vec::with_capacity(2 * (p as usize - 1));
    for x in 1..p {
        let xi = mod_inv(x, p).expect("p prime");
        out.push(FpMatrix { p, a: x, b: 0, c: 0, d: xi });
        out.push(FpMatrix { p, a: 0, b: x, c: (p - xi) % p, d: 0 });
    }
    out
}

fn label_with(h: &[FpMatrix], g: &FpMatrix) -> Result<CosetLabel> {
    if g.det() != 1 {
        return Err(Error::Precondition(format!("det {} != 1", g.det())));
    }
    let gi = g.inverse().expect("det 1");
    let rep = h.iter().map(|x| x.mul(&gi)).min().expect("nonempty");
    Ok(CosetLabel { rep })
}

/// Lexicographically minimal element of (C_s+ ∩ SL_2) · g^-1.
pub fn coset_label(g: &FpMatrix) -> Result<CosetLabel> {
    label_with(&split_plus_sl2(g.p), g)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FiberMap {
    pub fibers: BTreeMap<String, Vec<ProjClass>>,
    pub labels: Vec<CosetLabel>,
    pub decompositions: Vec<GammaDecomposition>,
}

impl FiberMap {
    pub fn distinct_labels(&self) -> usize {
        self.fibers.len()
    }

    pub fn all_fibers_size_two(&self) -> bool {
        self.fibers.values().all(|v| v.len() == 2)
    }

    /// Every fiber is {b, b·b0} with b0 the involution.
    pub fn partners_differ_by(&self, proj: &ProjParams, inv: &ProjClass) -> bool {
        self.fibers.values().all(|v| v.len() == 2 && proj_mul(proj, &v[0], inv) == v[1])
    }
}

/// Labels the gamma_i attached to each kernel class.
pub fn two_to_one_check(emb: &EmbeddingData, kernel: &GaloisKernel) -> Result<FiberMap> {
    if kernel.order != emb.order || kernel.p != emb.p() {
        return Err(Error::Precondition("kernel and embedding use different (order, p)".into()));
    }
    let h = split_plus_sl2(emb.p());
    let mut fibers: BTreeMap<CosetLabel, Vec<ProjClass>> = BTreeMap::new();
    let mut labels = Vec::with_capacity(kernel.len());
    let mut decompositions = Vec::with_capacity(kernel.len());
    for entry in &kernel.entries {
        let r_bar = galois_matrix(emb, entry.generator.0, entry.generator.1)?;
        let dec = decompose_gamma(emb, &r_bar)?;
        let label = label_with(&h, &dec.gamma_i)?;
        fibers.entry(label).or_default().push(entry.class);
        labels.push(label);
        decompositions.push(dec);
    }
    let fibers = fibers
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|c| c.index());
            (k.rep.to_string(), v)
        })
        .collect();
    Ok(FiberMap { fibers, labels, decompositions })
}

/// galois_matrix(-a, 1) = (0,1;-1,0) · s with s in C_s, and is itself not in C_s.
pub fn signo_pairing_check(emb: &EmbeddingData) -> bool {
    let p = emb.p();
    let Ok(m) = galois_matrix(emb, -(emb.a as i64), 1) else { return false };
    let w = FpMatrix::new(p, 0, 1, -1, 0);
    let s = w.inverse().expect("det 1").mul(&m);
    cartan_membership(&s, CartanKind::Split, &emb.params)
        && cartan_membership(&m, CartanKind::SplitPlus, &emb.params)
        && !cartan_membership(&m, CartanKind::Split, &emb.params)
}

/// Lift of g in SL_2(F_p) to SL_2(Z) that is also congruent to the identity
/// modulo the level M, so lies in Gamma_0(M).
pub fn lift_with_level(g: &FpMatrix, level_m: i64) -> Result<IntMatrix> {
    if g.det() != 1 {
        return Err(Error::Precondition(format!("det {} != 1 mod {}", g.det(), g.p)));
    }
    let p = g.p as i128;
    let m = level_m as i128;
    let e = |x: u64, id: i128| crt(x as i128, p, id, m) as i64;
    lift_sl2_mod(e(g.a, 1), e(g.b, 0), e(g.c, 0), e(g.d, 1), (p * m) as u64)
}
