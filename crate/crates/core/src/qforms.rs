//! Integral binary quadratic forms `ax² + bxy + cy²` of negative discriminant.
//!
//! Classes are always carried by their reduced representative: `|b| ≤ a ≤ c`,
//! with `b ≥ 0` whenever `|b| = a` or `a = c`. Two [`FormClass`] values are
//! therefore equal exactly when they are properly (SL₂(ℤ)) equivalent.

use std::fmt;

use num_integer::Integer;

use crate::arith::{ext_gcd3, gcd3, is_discriminant, to_i64};
use crate::{Error, Result};

/// The form `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    /// `b² − 4ac`.
    ///
    /// Panics if the value does not fit in an `i64`; use
    /// [`QuadForm::checked_discriminant`] for untrusted input.
    pub fn discriminant(&self) -> i64 {
        self.checked_discriminant().expect("discriminant overflows i64")
    }

    pub fn checked_discriminant(&self) -> Result<i64> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        to_i64(b * b - 4 * a * c, "discriminant")
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && matches!(self.checked_discriminant(), Ok(d) if d < 0)
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// Index of primitivity, `gcd(a, b, c)`.
    pub fn content(&self) -> i64 {
        gcd3(self.a, self.b, self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Splits the form as `m · q0` with `q0` primitive.
    pub fn primitive_part(&self) -> (i64, QuadForm) {
        let m = self.content();
        (m, QuadForm::new(self.a / m, self.b / m, self.c / m))
    }

    pub fn scale(&self, n: i64) -> QuadForm {
        QuadForm::new(self.a * n, self.b * n, self.c * n)
    }

    /// Value of the form at `(x, y)`.
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (a, b, c, x, y) = (self.a as i128, self.b as i128, self.c as i128, x as i128, y as i128);
        a * x * x + b * x * y + c * y * y
    }

    /// Forms fixed by inversion `(a, b, c) ↦ (a, −b, c)` up to equivalence.
    /// Only meaningful on reduced forms.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == self.b || self.a == self.c
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// An integer matrix `[[p, q], [r, s]]` acting on forms by the substitution
/// `Q'(x, y) = Q(px + qy, rx + sy)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transform {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl Transform {
    pub const IDENTITY: Transform = Transform { p: 1, q: 0, r: 0, s: 1 };
    /// `(x, y) ↦ (−y, x)`, which sends `(a, b, c)` to `(c, −b, a)`.
    pub const SWAP: Transform = Transform { p: 0, q: -1, r: 1, s: 0 };

    pub const fn translate(k: i64) -> Transform {
        Transform { p: 1, q: k, r: 0, s: 1 }
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    /// Matrix product `self · rhs`. Substituting by `self` then by `rhs`
    /// equals substituting by the product.
    pub fn then(&self, rhs: &Transform) -> Transform {
        Transform {
            p: self.p * rhs.p + self.q * rhs.r,
            q: self.p * rhs.q + self.q * rhs.s,
            r: self.r * rhs.p + self.s * rhs.r,
            s: self.r * rhs.q + self.s * rhs.s,
        }
    }

    /// Coefficients of `Q(px + qy, rx + sy)`.
    pub fn apply(&self, f: &QuadForm) -> QuadForm {
        let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
        let (p, q, r, s) = (self.p as i128, self.q as i128, self.r as i128, self.s as i128);
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        QuadForm::new(na as i64, nb as i64, nc as i64)
    }
}

/// A proper equivalence class of positive definite forms, held by its reduced
/// representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormClass {
    rep: QuadForm,
    disc: i64,
}

impl FormClass {
    /// Class of an arbitrary positive definite form.
    pub fn of(q: QuadForm) -> Result<FormClass> {
        reduce(q).map(|(cls, _)| cls)
    }

    pub fn rep(&self) -> QuadForm {
        self.rep
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn is_primitive(&self) -> bool {
        self.rep.is_primitive()
    }

    pub fn is_principal(&self) -> bool {
        self.rep.a == 1
    }

    pub fn inverse(&self) -> FormClass {
        inverse(self)
    }

    pub fn compose(&self, other: &FormClass) -> Result<FormClass> {
        compose(self, other)
    }
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}

/// Gauss reduction. Returns the class together with the unimodular matrix that
/// carries `q` onto the reduced representative.
pub fn reduce(q: QuadForm) -> Result<(FormClass, Transform)> {
    if !q.is_positive_definite() {
        return Err(Error::NotPositiveDefinite(q));
    }
    let disc = q.discriminant();
    let (mut a, mut b, mut c) = (q.a as i128, q.b as i128, q.c as i128);
    let mut t = Transform::IDENTITY;
    loop {
        if b <= -a || b > a {
            // bring b into (−a, a]
            let k = Integer::div_floor(&(a - b), &(2 * a));
            c += a * k * k + b * k;
            b += 2 * a * k;
            t = t.then(&Transform::translate(to_i64(k, "reduction step")?));
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            t = t.then(&Transform::SWAP);
            continue;
        }
        break;
    }
    if a == c && b < 0 {
        (a, b, c) = (c, -b, a);
        t = t.then(&Transform::SWAP);
    }
    let rep = QuadForm::new(a as i64, b as i64, c as i64);
    debug_assert!(rep.is_reduced());
    Ok((FormClass { rep, disc }, t))
}

fn check_disc(d: i64) -> Result<()> {
    if is_discriminant(d) {
        Ok(())
    } else {
        Err(Error::BadDiscriminant(d))
    }
}

/// Identity form of discriminant `d`.
pub fn principal_form(d: i64) -> Result<QuadForm> {
    check_disc(d)?;
    Ok(if d.rem_euclid(4) == 0 { QuadForm::new(1, 0, -d / 4) } else { QuadForm::new(1, 1, (1 - d) / 4) })
}

pub fn principal_class(d: i64) -> Result<FormClass> {
    let rep = principal_form(d)?;
    Ok(FormClass { rep, disc: d })
}

/// `(a, b, c) ↦ (a, −b, c)`, reduced.
pub fn inverse(cls: &FormClass) -> FormClass {
    let QuadForm { a, b, c } = cls.rep;
    FormClass::of(QuadForm::new(a, -b, c)).expect("reduced forms stay positive definite")
}

/// Dirichlet composition of two primitive classes of one discriminant.
pub fn compose(x: &FormClass, y: &FormClass) -> Result<FormClass> {
    if x.disc != y.disc {
        return Err(Error::DiscriminantMismatch { left: x.disc, right: y.disc });
    }
    for f in [x, y] {
        if !f.is_primitive() {
            return Err(Error::NotPrimitive(f.rep));
        }
    }
    let d = x.disc;
    let f1 = x.rep;
    let mut f2 = y.rep;
    if gcd3(f1.a, f2.a, (f1.b + f2.b) / 2) != 1 {
        f2 = concordant_rep(&f2, 2 * f1.a as i128 * d as i128);
    }
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2) = (f2.a as i128, f2.b as i128);
    let (e, u, v, w) = ext_gcd3(a1, a2, (b1 + b2) / 2);
    debug_assert_eq!(e, 1);
    let modulus = 2 * a1 * a2;
    let big_b = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + d as i128) / 2).rem_euclid(modulus);
    debug_assert_eq!((big_b - b1).rem_euclid(2 * a1), 0);
    debug_assert_eq!((big_b - b2).rem_euclid(2 * a2), 0);
    debug_assert_eq!((big_b * big_b - d as i128).rem_euclid(4 * a1 * a2), 0);
    let big_a = a1 * a2;
    let big_c = (big_b * big_b - d as i128) / (4 * big_a);
    FormClass::of(QuadForm::new(
        to_i64(big_a, "composition")?,
        to_i64(big_b, "composition")?,
        to_i64(big_c, "composition")?,
    ))
}

/// A form equivalent to `f` whose leading coefficient is coprime to `modulus`.
///
/// Primitive forms represent integers prime to any given modulus, so the
/// search over growing boxes terminates.
fn concordant_rep(f: &QuadForm, modulus: i128) -> QuadForm {
    let mut bound = 2i64;
    loop {
        for y in 0..=bound {
            for x in -bound..=bound {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let n = f.eval(x, y);
                if n.gcd(&modulus) != 1 {
                    continue;
                }
                // complete (x, y) to a determinant-one matrix
                let eg = x.extended_gcd(&y);
                let (s, q) = (eg.x * eg.gcd, -eg.y * eg.gcd);
                let t = Transform { p: x, q, r: y, s };
                debug_assert_eq!(t.det(), 1);
                let g = t.apply(f);
                debug_assert_eq!(g.a as i128, n);
                return g;
            }
        }
        bound *= 2;
    }
}
