use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{ext_gcd, isqrt};
use crate::error::{Error, Result};

/// The form A x^2 + B xy + C y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(s)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl BinaryForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// (1, 0, -D/4) or (1, 1, (1-D)/4).
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Self { a: 1, b, c: (b - disc) / 4 }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let Self { a, b, c } = *self;
        if !(b.abs() <= a && a <= c) {
            return false;
        }
        if b.abs() == a || a == c {
            return b >= 0;
        }
        true
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    pub fn as_tuple(&self) -> (i64, i64, i64) {
        (self.a, self.b, self.c)
    }

    /// Evaluates the form at (x, y).
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y) = (x as i128, y as i128);
        a * x * x + b * x * y + c * y * y
    }

    /// Acts by the substitution (x, y) -> (αx + βy, γx + δy).
    pub fn transform(&self, al: i64, be: i64, ga: i64, de: i64) -> Self {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (al, be, ga, de) = (al as i128, be as i128, ga as i128, de as i128);
        let na = a * al * al + b * al * ga + c * ga * ga;
        let nb = 2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de;
        let nc = a * be * be + b * be * de + c * de * de;
        Self { a: na as i64, b: nb as i64, c: nc as i64 }
    }

    /// Reduced representative of a positive definite form's class.
    pub fn reduce(&self) -> Self {
        debug_assert!(self.a > 0 && self.disc() < 0);
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            // normalize: -a < b <= a
            if !(-a < b && b <= a) {
                let two_a = 2 * a;
                let k = (a - b).div_euclid(two_a);
                let nb = b + k * two_a;
                c += k * (b + a * k);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Self { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// Gaussian composition (Dirichlet's united forms), reduced.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let disc = self.disc();
        if disc != other.disc() {
            return Err(Error::DiscriminantMismatch(disc, other.disc()));
        }
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (other.a as i128, other.b as i128);
        let d = disc as i128;
        let beta = (b1 + b2) / 2;
        let (g1, u1, v1) = ext_gcd(a1, a2);
        let (e, u2, v2) = ext_gcd(g1, beta);
        // e = u2*(u1*a1 + v1*a2) + v2*beta
        let (x, y, z) = (u2 * u1, u2 * v1, v2);
        let a3 = a1 * a2 / (e * e);
        let num = a1 * b2 * x + a2 * b1 * y + z * (b1 * b2 + d) / 2;
        let b3 = (num / e).rem_euclid(2 * a3);
        let c3 = (b3 * b3 - d) / (4 * a3);
        debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d);
        Ok(Self { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce())
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::principal(self.disc());
        let mut base = self.reduce();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("same discriminant");
            }
            base = base.compose(&base).expect("same discriminant");
            k >>= 1;
        }
        acc
    }
}

fn check_disc(disc: i64) -> Result<()> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(disc));
    }
    Ok(())
}

/// All reduced primitive forms of a negative discriminant, sorted by (A, B).
pub fn reduced_forms(disc: i64) -> Result<Vec<BinaryForm>> {
    check_disc(disc)?;
    let amax = isqrt((-disc / 3) as u64) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = BinaryForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// Pic of the order of discriminant `disc`, with its composition table.
#[derive(Debug, Clone, Serialize)]
pub struct ClassGroup {
    pub disc: i64,
    pub elements: Vec<BinaryForm>,
    /// `cayley[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub cayley: Vec<Vec<usize>>,
}

impl ClassGroup {
    pub fn new(disc: i64) -> Result<Self> {
        let elements = reduced_forms(disc)?;
        let index: HashMap<BinaryForm, usize> =
            elements.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let cayley = elements
            .iter()
            .map(|x| {
                elements
                    .iter()
                    .map(|y| index[&x.compose(y).expect("same disc")])
                    .collect()
            })
            .collect();
        Ok(Self { disc, elements, cayley })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, f: &BinaryForm) -> Option<usize> {
        let r = f.reduce();
        self.elements.iter().position(|g| *g == r)
    }

    pub fn identity(&self) -> usize {
        self.index_of(&BinaryForm::principal(self.disc)).expect("principal form present")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::ideal::Lattice;

    #[test]
    fn class_numbers() {
        assert_eq!(reduced_forms(-7).unwrap(), vec![BinaryForm::new(1, 1, 2)]);
        assert_eq!(reduced_forms(-23).unwrap().len(), 3);
        assert_eq!(reduced_forms(-175).unwrap().len(), 6);
        assert_eq!(reduced_forms(-539).unwrap().len(), 8);
        assert_eq!(reduced_forms(-8107).unwrap().len(), 12);
        assert_eq!(reduced_forms(-4).unwrap().len(), 1);
        assert!(matches!(reduced_forms(-5), Err(Error::InvalidDiscriminant(-5))));
        assert!(reduced_forms(12).is_err());
    }

    #[test]
    fn composition_examples() {
        let g = BinaryForm::new(2, 1, 3);
        let e = BinaryForm::principal(-23);
        assert_eq!(e.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&g.inverse()).unwrap(), e);
        assert_eq!(g.compose(&g).unwrap(), BinaryForm::new(2, -1, 3));
        assert!(matches!(
            g.compose(&BinaryForm::new(1, 1, 2)),
            Err(Error::DiscriminantMismatch(-23, -7))
        ));
    }

    #[test]
    fn composition_matches_ideal_multiplication() {
        for disc in [-23i64, -47, -56, -71, -84, -175, -231, -420, -539, -1155] {
            let forms = reduced_forms(disc).unwrap();
            for x in &forms {
                for y in &forms {
                    let via_ideals =
                        Lattice::from_form(x).mul(&Lattice::from_form(y), disc).to_form(disc).reduce();
                    assert_eq!(x.compose(y).unwrap(), via_ideals, "{x} * {y} disc {disc}");
                }
            }
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        let mut disc = -3i64;
        while disc >= -2000 {
            if matches!(disc.rem_euclid(4), 0 | 1) {
                let g = ClassGroup::new(disc).unwrap();
                let h = g.order();
                let e = g.identity();
                let principal_count = g
                    .elements
                    .iter()
                    .filter(|f| **f == BinaryForm::principal(disc))
                    .count();
                assert_eq!(principal_count, 1);
                for i in 0..h {
                    assert_eq!(g.cayley[e][i], i);
                    assert!((0..h).any(|j| g.cayley[i][j] == e));
                    for j in 0..h {
                        assert_eq!(g.cayley[i][j], g.cayley[j][i]);
                        if h <= 24 {
                            for k in 0..h {
                                assert_eq!(
                                    g.cayley[g.cayley[i][j]][k],
                                    g.cayley[i][g.cayley[j][k]],
                                    "disc {disc}"
                                );
                            }
                        }
                    }
                }
            }
            disc -= 1;
        }
    }

    #[test]
    fn reduction_preserves_class_and_disc() {
        let f = BinaryForm::new(49, 7, 3);
        let r = f.reduce();
        assert!(r.is_reduced());
        assert_eq!(r.disc(), -539);
        let t = f.transform(2, 1, 1, 1);
        assert_eq!(t.reduce(), r);
    }
}
