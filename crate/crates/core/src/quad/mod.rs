//! Imaginary quadratic orders and their class groups, modelled by reduced
//! primitive positive definite binary quadratic forms.

mod forms;
mod ideal;
mod kernel;

pub use forms::{reduced_forms, BinaryForm, ClassGroup};
pub use ideal::Lattice;
pub use kernel::{class_to_proj, kernel_classes, project_to_order, GaloisKernel, KernelEntry};

use serde::Serialize;

use crate::arith::is_fundamental;
use crate::error::{Error, Result};

/// The order O_f = Z + w Z of conductor `f` in Q(sqrt(dK)), where
/// w = (t + sqrt(disc))/2 has minimal polynomial X^2 - tX + n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadOrder {
    pub dk: i64,
    pub f: i64,
    pub disc: i64,
    pub t: i64,
    pub n: i64,
}

impl QuadOrder {
    /// The order of conductor `k * f` in the same field.
    pub fn suborder(&self, k: i64) -> Result<Self> {
        order_data(self.dk, self.f * k)
    }

    /// Multiplication of x1 + x2 w by y1 + y2 w, in coordinates.
    pub fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        let (t, n) = (self.t as i128, self.n as i128);
        (x.0 * y.0 - n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + t * x.1 * y.1)
    }

    /// Norm of x1 + x2 w.
    pub fn norm(&self, x: (i128, i128)) -> i128 {
        let (t, n) = (self.t as i128, self.n as i128);
        x.0 * x.0 + t * x.0 * x.1 + n * x.1 * x.1
    }

    pub fn principal_form(&self) -> BinaryForm {
        BinaryForm::principal(self.disc)
    }
}

/// Builds O_f for a fundamental discriminant dK < -4.
pub fn order_data(dk: i64, f: i64) -> Result<QuadOrder> {
    if dk == -3 || dk == -4 {
        return Err(Error::ExtraUnits(dk));
    }
    if !is_fundamental(dk) {
        return Err(Error::NonFundamental(dk));
    }
    if f < 1 {
        return Err(Error::Precondition(format!("conductor f = {f} must be positive")));
    }
    let disc = f * f * dk;
    let (t, n) = if dk.rem_euclid(4) == 1 {
        (f, f * f * (1 - dk) / 4)
    } else {
        (0, -f * f * dk / 4)
    };
    debug_assert_eq!(t * t - 4 * n, disc);
    Ok(QuadOrder { dk, f, disc, t, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        let o = order_data(-7, 1).unwrap();
        assert_eq!((o.t, o.n, o.disc), (1, 2, -7));
        let o = order_data(-8, 1).unwrap();
        assert_eq!((o.t, o.n, o.disc), (0, 2, -8));
        let o = order_data(-7, 5).unwrap();
        assert_eq!((o.t, o.n, o.disc), (5, 50, -175));
        assert_eq!(o.t * o.t - 4 * o.n, o.disc);
    }

    #[test]
    fn order_errors() {
        assert_eq!(order_data(-3, 1), Err(Error::ExtraUnits(-3)));
        assert_eq!(order_data(-4, 2), Err(Error::ExtraUnits(-4)));
        assert_eq!(order_data(-28, 1), Err(Error::NonFundamental(-28)));
        assert_eq!(order_data(5, 1), Err(Error::NonFundamental(5)));
        assert!(order_data(-7, 0).is_err());
    }

    #[test]
    fn suborder_generator_scales() {
        let o = order_data(-11, 2).unwrap();
        let s = o.suborder(7).unwrap();
        assert_eq!(s.f, 14);
        assert_eq!(s.t, 7 * o.t);
        assert_eq!(s.n, 49 * o.n);
    }
}
