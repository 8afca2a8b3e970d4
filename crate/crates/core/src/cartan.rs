//! Arithmetic in GL_2(F_p): the split and non-split Cartan orders, their
//! groups and normalizers, and the projective line P^1(F_p) with the group
//! law induced by multiplication in (O/pO)^x / F_p^x.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::arith::{ext_gcd, gcd, is_odd_prime, is_square_mod, mod_inv, modp, smallest_nonsquare};
use crate::error::{Error, Result};

/// Largest prime accepted by exhaustive enumerations.
pub const ENUMERATION_BOUND: u64 = 200;

/// An odd prime together with a fixed non-square residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FpParams {
    pub p: u64,
    pub eps: u64,
}

impl FpParams {
    /// Uses the smallest positive non-square as `eps`.
    pub fn new(p: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p as i64));
        }
        Ok(Self { p, eps: smallest_nonsquare(p) })
    }

    pub fn with_eps(p: u64, eps: i64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p as i64));
        }
        let eps = modp(eps, p);
        if is_square_mod(eps, p) {
            return Err(Error::Precondition(format!("eps = {eps} is a square mod {p}")));
        }
        Ok(Self { p, eps })
    }

    fn check_bound(&self) -> Result<()> {
        if self.p > ENUMERATION_BOUND {
            return Err(Error::BoundExceeded { p: self.p, bound: ENUMERATION_BOUND });
        }
        Ok(())
    }
}

/// A 2x2 matrix over F_p, entries kept reduced in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Serialize for FpMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c, self.d].serialize(s)
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

impl FpMatrix {
    pub fn new(p: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { p, a: modp(a, p), b: modp(b, p), c: modp(c, p), d: modp(d, p) }
    }

    pub fn identity(p: u64) -> Self {
        Self::scalar(p, 1)
    }

    pub fn scalar(p: u64, x: u64) -> Self {
        Self { p, a: x % p, b: 0, c: 0, d: x % p }
    }

    pub fn det(&self) -> u64 {
        let p = self.p;
        (self.a * self.d % p + p - self.b * self.c % p) % p
    }

    pub fn trace(&self) -> u64 {
        (self.a + self.d) % self.p
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let p = self.p;
        Self {
            p,
            a: (self.a * o.a + self.b * o.c) % p,
            b: (self.a * o.b + self.b * o.d) % p,
            c: (self.c * o.a + self.d * o.c) % p,
            d: (self.c * o.b + self.d * o.d) % p,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p;
        Self {
            p,
            a: (self.a + o.a) % p,
            b: (self.b + o.b) % p,
            c: (self.c + o.c) % p,
            d: (self.d + o.d) % p,
        }
    }

    pub fn scale(&self, x: u64) -> Self {
        let p = self.p;
        let x = x % p;
        Self { p, a: self.a * x % p, b: self.b * x % p, c: self.c * x % p, d: self.d * x % p }
    }

    pub fn inverse(&self) -> Option<Self> {
        let p = self.p;
        let inv = mod_inv(self.det(), p)?;
        Some(Self {
            p,
            a: self.d * inv % p,
            b: (p - self.b) % p * inv % p,
            c: (p - self.c) % p * inv % p,
            d: self.a * inv % p,
        })
    }

    /// Coefficients `(t, n)` of the characteristic polynomial X^2 - tX + n.
    pub fn charpoly(&self) -> (u64, u64) {
        (self.trace(), self.det())
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Which of the four Cartan orders (or groups) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CartanKind {
    #[serde(rename = "ns")]
    NonSplit,
    #[serde(rename = "ns+")]
    NonSplitPlus,
    #[serde(rename = "s")]
    Split,
    #[serde(rename = "s+")]
    SplitPlus,
}

impl CartanKind {
    pub const ALL: [CartanKind; 4] =
        [CartanKind::NonSplit, CartanKind::NonSplitPlus, CartanKind::Split, CartanKind::SplitPlus];
}

impl fmt::Display for CartanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CartanKind::NonSplit => "ns",
            CartanKind::NonSplitPlus => "ns+",
            CartanKind::Split => "s",
            CartanKind::SplitPlus => "s+",
        })
    }
}

impl FromStr for CartanKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ns" => Ok(CartanKind::NonSplit),
            "ns+" => Ok(CartanKind::NonSplitPlus),
            "s" => Ok(CartanKind::Split),
            "s+" => Ok(CartanKind::SplitPlus),
            _ => Err(Error::Invalid(format!("unknown Cartan kind {s:?}"))),
        }
    }
}

/// Congruence pattern of the order M_? reduced mod p (no invertibility).
pub fn order_membership(m: &FpMatrix, kind: CartanKind, params: &FpParams) -> bool {
    let p = params.p;
    let be = m.b * params.eps % p;
    let ns = m.a == m.d && be == m.c;
    let ns_twist = (m.a + m.d) % p == 0 && (be + m.c) % p == 0;
    let s = m.b == 0 && m.c == 0;
    let s_twist = m.a == 0 && m.d == 0;
    match kind {
        CartanKind::NonSplit => ns,
        CartanKind::NonSplitPlus => ns || ns_twist,
        CartanKind::Split => s,
        CartanKind::SplitPlus => s || s_twist,
    }
}

/// Membership in the Cartan group C_?: the order pattern plus invertibility.
pub fn cartan_membership(m: &FpMatrix, kind: CartanKind, params: &FpParams) -> bool {
    m.p == params.p && m.is_invertible() && order_membership(m, kind, params)
}

/// All elements of C_?, sorted.
pub fn enumerate_cartan(params: &FpParams, kind: CartanKind) -> Result<Vec<FpMatrix>> {
    params.check_bound()?;
    let p = params.p;
    let e = params.eps;
    let mut candidates = Vec::new();
    for x in 0..p {
        for y in 0..p {
            match kind {
                CartanKind::NonSplit | CartanKind::NonSplitPlus => {
                    candidates.push(FpMatrix { p, a: x, b: y, c: y * e % p, d: x });
                    if kind == CartanKind::NonSplitPlus {
                        candidates.push(FpMatrix {
                            p,
                            a: x,
                            b: y,
                            c: (p - y * e % p) % p,
                            d: (p - x) % p,
                        });
                    }
                }
                CartanKind::Split | CartanKind::SplitPlus => {
                    candidates.push(FpMatrix { p, a: x, b: 0, c: 0, d: y });
                    if kind == CartanKind::SplitPlus {
                        candidates.push(FpMatrix { p, a: 0, b: x, c: y, d: 0 });
                    }
                }
            }
        }
    }
    let mut out: Vec<FpMatrix> = candidates
        .into_iter()
        .filter(|m| cartan_membership(m, kind, params))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    out.sort();
    Ok(out)
}

/// Index [C_ns+ : C_ns+ ∩ C_s+], by enumeration.
pub fn index_ns_plus(params: &FpParams) -> Result<u64> {
    let ns_plus = enumerate_cartan(params, CartanKind::NonSplitPlus)?;
    let s_plus: HashSet<FpMatrix> =
        enumerate_cartan(params, CartanKind::SplitPlus)?.into_iter().collect();
    let common = ns_plus.iter().filter(|m| s_plus.contains(m)).count() as u64;
    Ok(ns_plus.len() as u64 / common)
}

/// Trace and norm residues of an element whose characteristic polynomial
/// X^2 - tX + n is irreducible mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProjParams {
    pub p: u64,
    pub t: u64,
    pub n: u64,
}

impl ProjParams {
    pub fn new(p: u64, t: i64, n: i64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p as i64));
        }
        let (t, n) = (modp(t, p), modp(n, p));
        let disc = (t * t % p + 4 * (p - n)) % p;
        if is_square_mod(disc, p) {
            return Err(Error::Precondition(format!(
                "t^2 - 4n = {disc} is a square mod {p}; the prime is not inert"
            )));
        }
        Ok(Self { p, t, n })
    }
}

/// A point [x1 : x2] of P^1(F_p) in canonical form: x2 = 1, or [1 : 0].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjClass {
    pub x1: u64,
    pub x2: u64,
}

impl Serialize for ProjClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x1, self.x2].serialize(s)
    }
}

impl fmt::Display for ProjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x1, self.x2)
    }
}

impl ProjClass {
    pub fn new(p: u64, x1: i64, x2: i64) -> Result<Self> {
        let (r1, r2) = (modp(x1, p), modp(x2, p));
        match (r1, r2) {
            (0, 0) => Err(Error::ZeroPair(x1, x2)),
            (_, 0) => Ok(Self { x1: 1, x2: 0 }),
            _ => {
                let inv = mod_inv(r2, p).expect("p prime");
                Ok(Self { x1: r1 * inv % p, x2: 1 })
            }
        }
    }

    pub fn identity() -> Self {
        Self { x1: 1, x2: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.x2 == 0
    }

    /// Canonical enumeration of P^1(F_p): [1:0] first, then [x:1] for x = 0..p-1.
    pub fn all(p: u64) -> Vec<Self> {
        std::iter::once(Self::identity())
            .chain((0..p).map(|x| Self { x1: x, x2: 1 }))
            .collect()
    }

    /// Position in the canonical enumeration.
    pub fn index(&self) -> usize {
        if self.x2 == 0 {
            0
        } else {
            self.x1 as usize + 1
        }
    }
}

/// The group law [x1:x2][y1:y2] = [x1y1 - n x2y2 : x1y2 + x2y1 + t x2y2].
pub fn proj_mul(params: &ProjParams, u: &ProjClass, v: &ProjClass) -> ProjClass {
    let ProjParams { p, t, n } = *params;
    let z1 = (u.x1 * v.x1 % p + p - n * (u.x2 * v.x2 % p) % p) % p;
    let z2 = (u.x1 * v.x2 + u.x2 * v.x1 + t * (u.x2 * v.x2 % p)) % p;
    ProjClass::new(p, z1 as i64, z2 as i64).expect("inert: product of units is a unit")
}

pub fn proj_pow(params: &ProjParams, u: &ProjClass, mut k: u64) -> ProjClass {
    let mut acc = ProjClass::identity();
    let mut base = *u;
    while k > 0 {
        if k & 1 == 1 {
            acc = proj_mul(params, &acc, &base);
        }
        base = proj_mul(params, &base, &base);
        k >>= 1;
    }
    acc
}

pub fn proj_order(params: &ProjParams, u: &ProjClass) -> u64 {
    let mut x = *u;
    let mut k = 1;
    while !x.is_identity() {
        x = proj_mul(params, &x, u);
        k += 1;
    }
    k
}

/// The unique element of order 2, [-a : 1], where 2a = t mod p.
pub fn involution_class(params: &ProjParams, a: i64) -> Result<ProjClass> {
    let p = params.p;
    if (2 * modp(a, p)) % p != params.t {
        return Err(Error::Precondition(format!("2a = {} != t = {} mod {p}", 2 * a, params.t)));
    }
    ProjClass::new(p, -a, 1)
}

/// An integral 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn reduce(&self, p: u64) -> FpMatrix {
        FpMatrix::new(p, self.a, self.b, self.c, self.d)
    }

    pub fn max_abs(&self) -> u64 {
        [self.a, self.b, self.c, self.d].iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Lifts a matrix of SL_2(Z/modulus) (entries given as integers) to SL_2(Z).
///
/// The bottom row is adjusted to a coprime pair congruent to (c, d), the top
/// row is completed by an extended gcd and then shifted along (c', d') to hit
/// (a, b). Entries are bounded by `modulus^3 + modulus^2`.
pub fn lift_sl2_mod(a: i64, b: i64, c: i64, d: i64, modulus: u64) -> Result<IntMatrix> {
    let m = modulus as i128;
    let (a, b, c, d) = (
        (a as i128).rem_euclid(m),
        (b as i128).rem_euclid(m),
        (c as i128).rem_euclid(m),
        (d as i128).rem_euclid(m),
    );
    if (a * d - b * c - 1).rem_euclid(m) != 0 {
        return Err(Error::Precondition(format!("determinant is not 1 mod {modulus}")));
    }
    if m == 1 {
        return Ok(IntMatrix::new(1, 0, 0, 1));
    }
    let sym = |x: i128| if 2 * x > m { x - m } else { x };
    let direct = (sym(a), sym(b), sym(c), sym(d));
    if direct.0 * direct.3 - direct.1 * direct.2 == 1 {
        return Ok(IntMatrix::new(direct.0 as i64, direct.1 as i64, direct.2 as i64, direct.3 as i64));
    }
    let c1 = if c == 0 { m } else { c };
    let mut d1 = d;
    while gcd(c1 as i64, d1 as i64) != 1 {
        d1 += m;
    }
    let (_, x, y) = ext_gcd(d1, -c1);
    // x*d1 - y*c1 = 1
    let (a0, b0) = (x, y);
    let (_, u, v) = ext_gcd(c1, d1);
    let s = u * (a - a0) + v * (b - b0);
    let s = s.rem_euclid(m);
    let (a1, b1) = (a0 + s * c1, b0 + s * d1);
    // Reduce the top row modulo m along the bottom row to keep entries small.
    let k = if c1 != 0 { a1.div_euclid(m * c1) } else { 0 };
    let (a1, b1) = (a1 - k * m * c1, b1 - k * m * d1);
    let out = IntMatrix::new(a1 as i64, b1 as i64, c1 as i64, d1 as i64);
    debug_assert_eq!(out.det(), 1);
    Ok(out)
}

/// Integral matrix of determinant 1 reducing to `m` (which must have det 1).
pub fn lift_to_integral_sl2(m: &FpMatrix) -> Result<IntMatrix> {
    if m.det() != 1 {
        return Err(Error::Precondition(format!("det {} != 1 mod {}", m.det(), m.p)));
    }
    lift_sl2_mod(m.a as i64, m.b as i64, m.c as i64, m.d as i64, m.p)
}
