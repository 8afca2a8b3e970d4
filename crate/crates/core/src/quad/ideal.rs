use num_integer::Integer;

use super::forms::BinaryForm;

/// A full-rank lattice Z·a + Z·(b + c·w) inside an order Z + Z·w, stored in
/// Hermite normal form (a > 0, c > 0, 0 <= b < a).
///
/// The multiplication on coordinates depends on the minimal polynomial
/// X^2 - tX + n of w, which callers pass explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// (t, n) of w = (D mod 2 + sqrt(D))/2.
pub fn standard_basis(disc: i64) -> (i128, i128) {
    let t = disc.rem_euclid(2) as i128;
    (t, (t - disc as i128) / 4)
}

fn mul_coords(x: (i128, i128), y: (i128, i128), t: i128, n: i128) -> (i128, i128) {
    (x.0 * y.0 - n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + t * x.1 * y.1)
}

impl Lattice {
    /// HNF of the Z-span of the given coordinate vectors.
    pub fn from_generators(gens: &[(i128, i128)]) -> Self {
        let mut pivot: Option<(i128, i128)> = None;
        let mut horiz: i128 = 0;
        for &w in gens {
            let mut w = w;
            match pivot {
                None if w.1 != 0 => pivot = Some(w),
                None => horiz = horiz.gcd(&w.0),
                Some(mut pv) => {
                    while w.1 != 0 {
                        let q = pv.1.div_euclid(w.1);
                        pv = (pv.0 - q * w.0, pv.1 - q * w.1);
                        std::mem::swap(&mut pv, &mut w);
                    }
                    horiz = horiz.gcd(&w.0);
                    pivot = Some(pv);
                }
            }
        }
        let (mut b, mut c) = pivot.expect("lattice must have full rank");
        if c < 0 {
            b = -b;
            c = -c;
        }
        assert!(horiz != 0, "lattice must have full rank");
        let a = horiz.abs();
        Self { a, b: b.rem_euclid(a), c }
    }

    /// [A, (-B + sqrt(D))/2] in the basis with w of trace `t` and norm `n`.
    pub fn from_form_in(f: &BinaryForm, t: i128, _n: i128) -> Self {
        let h = (-(f.b as i128) - t) / 2;
        debug_assert_eq!((-(f.b as i128) - t) % 2, 0);
        Self::from_generators(&[(f.a as i128, 0), (h, 1)])
    }

    pub fn from_form(f: &BinaryForm) -> Self {
        let (t, n) = standard_basis(f.disc());
        Self::from_form_in(f, t, n)
    }

    /// Inverse of `from_form_in` on classes: the norm form of the lattice
    /// divided by its norm, in the orientation (A, B, C) <-> [A, (-B+sqrt D)/2].
    /// Requires the lattice to be closed under multiplication by w.
    pub fn to_form_in(&self, t: i128, n: i128) -> BinaryForm {
        let Self { a, b, c } = *self;
        debug_assert!(a % c == 0 && b % c == 0, "not an ideal of this order: {self:?}");
        let fa = a / c;
        let fb = -(2 * b + t * c) / c;
        let fc = (b * b + t * b * c + n * c * c) / (a * c);
        BinaryForm::new(fa as i64, fb as i64, fc as i64)
    }

    pub fn to_form(&self, disc: i64) -> BinaryForm {
        let (t, n) = standard_basis(disc);
        self.to_form_in(t, n)
    }

    pub fn generators(&self) -> [(i128, i128); 2] {
        [(self.a, 0), (self.b, self.c)]
    }

    pub fn mul_in(&self, other: &Self, t: i128, n: i128) -> Self {
        let mut gens = Vec::with_capacity(4);
        for x in self.generators() {
            for y in other.generators() {
                gens.push(mul_coords(x, y, t, n));
            }
        }
        Self::from_generators(&gens)
    }

    pub fn mul(&self, other: &Self, disc: i64) -> Self {
        let (t, n) = standard_basis(disc);
        self.mul_in(other, t, n)
    }

    /// The O-module generated by this lattice, O = Z + Z·w.
    pub fn extend_in(&self, t: i128, n: i128) -> Self {
        let mut gens = Vec::with_capacity(4);
        for g in self.generators() {
            gens.push(g);
            gens.push(mul_coords(g, (0, 1), t, n));
        }
        Self::from_generators(&gens)
    }

    /// Index in Z^2, i.e. the norm relative to Z + Z·w.
    pub fn index(&self) -> i128 {
        self.a * self.c
    }

    pub fn contains(&self, x: (i128, i128)) -> bool {
        if x.1 % self.c != 0 {
            return false;
        }
        let k = x.1 / self.c;
        (x.0 - k * self.b) % self.a == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_generators() {
        let l = Lattice::from_generators(&[(6, 0), (4, 2), (3, 3)]);
        // span contains (6,0), (4,2), (3,3) -> (1,1)... check containment both ways
        for g in [(6, 0), (4, 2), (3, 3)] {
            assert!(l.contains(g));
        }
        assert!(l.c > 0 && l.a > 0 && l.b < l.a);
        assert_eq!(l.index(), 6);
    }

    #[test]
    fn form_round_trip() {
        for f in [BinaryForm::new(2, 1, 3), BinaryForm::new(49, 7, 3), BinaryForm::new(3, -2, 5)] {
            let l = Lattice::from_form(&f);
            let g = l.to_form(f.disc());
            assert_eq!(g.disc(), f.disc());
            assert_eq!(g.reduce(), f.reduce());
        }
    }
}
