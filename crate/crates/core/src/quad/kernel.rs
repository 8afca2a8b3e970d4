use serde::Serialize;

use super::forms::{BinaryForm, ClassGroup};
use super::ideal::Lattice;
use super::QuadOrder;
use crate::arith::{gcd, legendre};
use crate::cartan::{ProjClass, ProjParams};
use crate::error::{Error, Result};

/// One element of ker(Pic(O_pf) -> Pic(O_f)) together with the unit class
/// x1 + x2 w_f in (O_f/p)^x / F_p^x that produces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelEntry {
    pub class: ProjClass,
    pub generator: (i64, i64),
    /// Reduced form of discriminant p^2 f^2 dK.
    pub form: BinaryForm,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaloisKernel {
    pub order: QuadOrder,
    pub suborder: QuadOrder,
    pub p: u64,
    pub proj: ProjParams,
    /// Sorted by `ProjClass::index`.
    pub entries: Vec<KernelEntry>,
}

impl GaloisKernel {
    pub fn classes(&self) -> Vec<BinaryForm> {
        self.entries.iter().map(|e| e.form).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry_for_form(&self, f: &BinaryForm) -> Option<&KernelEntry> {
        let r = f.reduce();
        self.entries.iter().find(|e| e.form == r)
    }

    pub fn entry_for_class(&self, c: &ProjClass) -> &KernelEntry {
        &self.entries[c.index()]
    }
}

/// A form equivalent to `f` whose leading coefficient is prime to `p`.
fn prime_to(f: &BinaryForm, p: i64) -> BinaryForm {
    if f.a % p != 0 {
        *f
    } else if f.c % p != 0 {
        f.transform(0, -1, 1, 0)
    } else {
        f.transform(1, 0, 1, 1)
    }
}

/// Image of a class of Pic(O_pf) in Pic(O_f), by extending the ideal
/// [A, (-B + sqrt D)/2] to O_f.
pub fn project_to_order(form: &BinaryForm, order: &QuadOrder, p: u64) -> Result<BinaryForm> {
    let sub = order.suborder(p as i64)?;
    if form.disc() != sub.disc {
        return Err(Error::DiscriminantMismatch(form.disc(), sub.disc));
    }
    let g = prime_to(form, p as i64);
    let l = Lattice::from_form_in(&g, sub.t as i128, sub.n as i128);
    // u + v w_pf = u + (p v) w_f
    let gens: Vec<(i128, i128)> =
        l.generators().iter().map(|&(u, v)| (u, v * p as i128)).collect();
    let ext = Lattice::from_generators(&gens).extend_in(order.t as i128, order.n as i128);
    Ok(ext.to_form_in(order.t as i128, order.n as i128).reduce())
}

/// Class in Pic(O_pf) of lambda O_f ∩ O_pf, lambda = x1 + x2 w_f prime to p.
fn unit_class_form(order: &QuadOrder, sub: &QuadOrder, p: u64, lambda: (i64, i64)) -> BinaryForm {
    let lam = (lambda.0 as i128, lambda.1 as i128);
    let principal = Lattice::from_generators(&[lam, order.mul(lam, (0, 1))]);
    let p = p as i128;
    // Elements j (a, 0) + k (b, c) with p | k c, rewritten in the basis {1, w_pf}.
    let k = if principal.c % p == 0 { 1 } else { p };
    let gens = [(principal.a, 0), (principal.b * k, principal.c * k / p)];
    let meet = Lattice::from_generators(&gens);
    meet.to_form_in(sub.t as i128, sub.n as i128).reduce()
}

/// Canonical image of x1 + x2 w_f in P^1(F_p).
pub fn class_to_proj(_order: &QuadOrder, p: u64, lambda: (i64, i64)) -> Result<ProjClass> {
    ProjClass::new(p, lambda.0, lambda.1)
}

/// ker(Pic(O_pf) -> Pic(O_f)), one entry per point of P^1(F_p).
pub fn kernel_classes(order: &QuadOrder, p: u64) -> Result<GaloisKernel> {
    if legendre(order.dk, p) != -1 {
        return Err(Error::NotInert { p, dk: order.dk });
    }
    if gcd(p as i64, order.f) != 1 {
        return Err(Error::DividesConductor { p, value: order.f });
    }
    let sub = order.suborder(p as i64)?;
    let proj = ProjParams::new(p, order.t, order.n)?;
    let principal = order.principal_form();

    let big = ClassGroup::new(sub.disc)?;
    let mut filtered: Vec<BinaryForm> = Vec::new();
    for f in &big.elements {
        if project_to_order(f, order, p)? == principal {
            filtered.push(*f);
        }
    }

    let mut entries = Vec::with_capacity(p as usize + 1);
    for class in ProjClass::all(p) {
        let generator = (class.x1 as i64, class.x2 as i64);
        let form = unit_class_form(order, &sub, p, generator);
        entries.push(KernelEntry { class, generator, form });
    }

    let mut built: Vec<BinaryForm> = entries.iter().map(|e| e.form).collect();
    built.sort();
    built.dedup();
    filtered.sort();
    if built != filtered || built.len() != entries.len() {
        return Err(Error::Precondition(format!(
            "kernel mismatch for disc {}: {} unit classes, {} filtered classes",
            sub.disc,
            built.len(),
            filtered.len()
        )));
    }
    Ok(GaloisKernel { order: *order, suborder: sub, p, proj, entries })
}
