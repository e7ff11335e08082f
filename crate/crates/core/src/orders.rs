//! Orders `O_{K,f} = ℤ + f·ω_K·ℤ` in imaginary quadratic fields and exact
//! arithmetic on lattices in `K`.
//!
//! Lattices are held in Hermite normal form over a common denominator:
//!
//! ```text
//! L = ℤ·(e / den) + ℤ·((g + h·√d_K) / den),   e, h > 0,  0 ≤ g < e
//! ```
//!
//! which makes equality of lattices a field-by-field comparison and keeps the
//! multiplier-ring membership tests exact. Products of lattices are formed
//! from the four pairwise products and brought back to this shape.
//!
//! The generalized composition `⊛` of classes living in different orders of
//! the same field is defined here as ideal multiplication followed by reading
//! off the norm form of the product.

use std::fmt;

use num_integer::Integer;

use crate::arith::{divisors, is_discriminant, is_fundamental, to_i64};
use crate::qforms::{principal_class, FormClass, QuadForm};
use crate::{Error, Result};

/// The order of conductor `f` in the field of fundamental discriminant `d_K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadOrder {
    d_k: i64,
    f: i64,
}

impl QuadOrder {
    pub fn new(d_k: i64, f: i64) -> Result<QuadOrder> {
        if !is_fundamental(d_k) {
            return Err(Error::BadDiscriminant(d_k));
        }
        if f <= 0 {
            return Err(Error::BadConductor { conductor: f, target: f });
        }
        Ok(QuadOrder { d_k, f })
    }

    pub fn d_k(&self) -> i64 {
        self.d_k
    }

    pub fn conductor(&self) -> i64 {
        self.f
    }

    pub fn disc(&self) -> i64 {
        self.f * self.f * self.d_k
    }

    pub fn maximal(&self) -> QuadOrder {
        QuadOrder { d_k: self.d_k, f: 1 }
    }
}

impl fmt::Display for QuadOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O(d_K={}, f={})", self.d_k, self.f)
    }
}

/// Writes `d = f²·d_K` with `d_K` fundamental.
pub fn order_of_disc(d: i64) -> Result<QuadOrder> {
    if !is_discriminant(d) {
        return Err(Error::BadDiscriminant(d));
    }
    let mut f = 1;
    let mut best = None;
    while f * f <= -d {
        if d % (f * f) == 0 && is_fundamental(d / (f * f)) {
            best = Some(f);
        }
        f += 1;
    }
    let f = best.expect("every discriminant has a fundamental part");
    Ok(QuadOrder { d_k: d / (f * f), f })
}

/// An element `(x + y·√d_K) / den` of the quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KElement {
    x: i128,
    y: i128,
    den: i128,
}

impl KElement {
    pub fn new(x: i128, y: i128, den: i128) -> KElement {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let g = x.gcd(&y).gcd(&den);
        KElement { x: s * x / g, y: s * y / g, den: s * den / g }
    }

    pub fn integer(n: i128) -> KElement {
        KElement::new(n, 0, 1)
    }

    /// Parts `(x, y, den)`.
    pub fn parts(&self) -> (i128, i128, i128) {
        (self.x, self.y, self.den)
    }

    /// `ω_K = (d_K + √d_K) / 2`.
    pub fn omega(d_k: i64) -> KElement {
        KElement::new(d_k as i128, 1, 2)
    }

    pub fn mul(&self, other: &KElement, d_k: i64) -> KElement {
        let d = d_k as i128;
        KElement::new(
            self.x * other.x + d * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.den * other.den,
        )
    }

    pub fn scale(&self, n: i128) -> KElement {
        KElement::new(self.x * n, self.y * n, self.den)
    }
}

/// A full-rank lattice in `K`, tagged with its multiplier ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IdealLattice {
    order: QuadOrder,
    den: i128,
    e: i128,
    g: i128,
    h: i128,
}

impl IdealLattice {
    /// Lattice spanned by `gens`; its multiplier ring is determined by
    /// membership tests.
    pub fn new(d_k: i64, gens: &[KElement]) -> Result<IdealLattice> {
        if !is_fundamental(d_k) {
            return Err(Error::BadDiscriminant(d_k));
        }
        let (den, e, g, h) = hermite_span(gens)?;
        let mut lat = IdealLattice { order: QuadOrder { d_k, f: 1 }, den, e, g, h };
        // The primitive norm form's discriminant bounds the conductor; the
        // membership descent then pins it down.
        let bound = conductor_from_disc(lat.norm_form().discriminant(), d_k)?;
        let f = lat.multiplier_conductor(bound);
        if f != bound {
            return Err(Error::Inconsistent(format!(
                "multiplier ring conductor {f} disagrees with norm form conductor {bound}"
            )));
        }
        lat.order.f = f;
        Ok(lat)
    }

    pub fn order(&self) -> QuadOrder {
        self.order
    }

    /// The Hermite basis `[e/den, (g + h√d_K)/den]`.
    pub fn basis(&self) -> [KElement; 2] {
        [KElement::new(self.e, 0, self.den), KElement::new(self.g, self.h, self.den)]
    }

    pub fn contains(&self, z: &KElement) -> bool {
        // z = α·e/den + β·(g + h√d)/den with α, β ∈ ℤ
        let (x, y, zd) = (z.x, z.y, z.den);
        let yd = y * self.den;
        if yd % (zd * self.h) != 0 {
            return false;
        }
        let beta = yd / (zd * self.h);
        let xd = x * self.den;
        if xd % zd != 0 {
            return false;
        }
        (xd / zd - beta * self.g) % self.e == 0
    }

    /// Whether `z·L ⊆ L`.
    pub fn is_stable_under(&self, z: &KElement) -> bool {
        self.basis().iter().all(|b| self.contains(&z.mul(b, self.order.d_k)))
    }

    /// Smallest divisor `f` of `bound` with `f·ω_K·L ⊆ L`, i.e. the conductor
    /// of the multiplier ring when that ring contains `O_{K,bound}`.
    pub fn multiplier_conductor(&self, bound: i64) -> i64 {
        let omega = KElement::omega(self.order.d_k);
        divisors(bound)
            .into_iter()
            .find(|&f| self.is_stable_under(&omega.scale(f as i128)))
            .expect("f = bound always stabilises")
    }

    /// Checks the recorded order against membership tests.
    pub fn verify_multiplier_ring(&self) -> bool {
        let f = self.order.f;
        let omega = KElement::omega(self.order.d_k);
        self.is_stable_under(&omega.scale(f as i128))
            && divisors(f).into_iter().filter(|&p| p < f).all(|p| !self.is_stable_under(&omega.scale(p as i128)))
    }

    /// `N(x·α − y·β)` divided by its content, for the positively oriented
    /// Hermite basis `(α, β)`.
    fn norm_form(&self) -> QuadForm {
        let d = self.order.d_k as i128;
        let (e, g, h) = (self.e, self.g, self.h);
        let a = e * e;
        let b = -2 * e * g;
        let c = g * g - d * h * h;
        let m = a.gcd(&b).gcd(&c);
        QuadForm::new((a / m) as i64, (b / m) as i64, (c / m) as i64)
    }
}

impl fmt::Display for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}/{}, ({} + {}*sqrt({}))/{}>", self.e, self.den, self.g, self.h, self.order.d_k, self.den)
    }
}

fn conductor_from_disc(d: i64, d_k: i64) -> Result<i64> {
    let ratio = d / d_k;
    if d % d_k != 0 || ratio <= 0 {
        return Err(Error::Inconsistent(format!("{d} is not a square multiple of {d_k}")));
    }
    let f = (ratio as f64).sqrt().round() as i64;
    if f * f != ratio {
        return Err(Error::Inconsistent(format!("{d} is not a square multiple of {d_k}")));
    }
    Ok(f)
}

/// Hermite normal form of the ℤ-span of `gens` as `(den, e, g, h)`.
fn hermite_span(gens: &[KElement]) -> Result<(i128, i128, i128, i128)> {
    let den = gens.iter().fold(1i128, |l, z| l.lcm(&z.den));
    let rows: Vec<(i128, i128)> = gens.iter().map(|z| (z.x * (den / z.den), z.y * (den / z.den))).collect();

    // pivot row (g, h) carries the gcd of the √d coordinates; every other row
    // is cleared in that coordinate and contributes to e.
    let mut pivot: Option<(i128, i128)> = None;
    let mut e = 0i128;
    for &(mut x, mut y) in &rows {
        if y == 0 {
            e = e.gcd(&x);
            continue;
        }
        let Some((mut px, mut py)) = pivot else {
            pivot = Some((x, y));
            continue;
        };
        while y != 0 {
            let q = Integer::div_floor(&py, &y);
            (px, py, x, y) = (x, y, px - q * x, py - q * y);
        }
        e = e.gcd(&x);
        pivot = Some((px, py));
    }
    let (mut g, mut h) = pivot.ok_or(Error::DegenerateLattice)?;
    if e == 0 {
        return Err(Error::DegenerateLattice);
    }
    if h < 0 {
        (g, h) = (-g, -h);
    }
    g = g.rem_euclid(e);
    let common = e.gcd(&g).gcd(&h).gcd(&den);
    Ok((den / common, e / common, g / common, h / common))
}

/// The proper ideal `⟨a, (−b + √D)/2⟩` attached to a primitive form.
pub fn form_to_ideal(cls: &FormClass) -> Result<IdealLattice> {
    let q = cls.rep();
    if !q.is_primitive() {
        return Err(Error::NotPrimitive(q));
    }
    let order = order_of_disc(cls.disc())?;
    let gens = [KElement::integer(q.a as i128), KElement::new(-q.b as i128, order.f as i128, 2)];
    let (den, e, g, h) = hermite_span(&gens)?;
    let lat = IdealLattice { order, den, e, g, h };
    debug_assert!(lat.verify_multiplier_ring());
    Ok(lat)
}

/// Reduced primitive norm form of a lattice; its discriminant is that of the
/// multiplier ring.
pub fn ideal_to_form(lat: &IdealLattice) -> Result<FormClass> {
    let q = lat.norm_form();
    let cls = FormClass::of(q)?;
    if cls.disc() != lat.order.disc() {
        return Err(Error::Inconsistent(format!(
            "norm form {q} has discriminant {} but the multiplier ring has {}",
            cls.disc(),
            lat.order.disc()
        )));
    }
    Ok(cls)
}

/// Product lattice `L₁·L₂`; its multiplier ring has conductor `gcd(f₁, f₂)`
/// for proper ideals.
pub fn multiply(l1: &IdealLattice, l2: &IdealLattice) -> Result<IdealLattice> {
    let d_k = l1.order.d_k;
    if d_k != l2.order.d_k {
        return Err(Error::FieldMismatch { left: d_k, right: l2.order.d_k });
    }
    let mut gens = Vec::with_capacity(4);
    for a in l1.basis() {
        for b in l2.basis() {
            gens.push(a.mul(&b, d_k));
        }
    }
    let (den, e, g, h) = hermite_span(&gens)?;
    let mut lat = IdealLattice { order: QuadOrder { d_k, f: 1 }, den, e, g, h };
    // O_{f1}·O_{f2} = O_{gcd} multiplies the product into itself
    lat.order.f = lat.multiplier_conductor(l1.order.f.gcd(&l2.order.f));
    Ok(lat)
}

/// Generalized Dirichlet composition `x ⊛ y` of classes in `C(f₁²d_K)` and
/// `C(f₂²d_K)`, landing in `C(gcd(f₁, f₂)²·d_K)`.
pub fn compose_general(x: &FormClass, y: &FormClass) -> Result<FormClass> {
    let (ox, oy) = (order_of_disc(x.disc())?, order_of_disc(y.disc())?);
    if ox.d_k != oy.d_k {
        return Err(Error::FieldMismatch { left: ox.d_k, right: oy.d_k });
    }
    ideal_to_form(&multiply(&form_to_ideal(x)?, &form_to_ideal(y)?)?)
}

/// Extension of ideal classes `C(O_{K,f}) → C(O_{K,target})`, computed as
/// `x ⊛ P_target`.
pub fn reduction_map(x: &FormClass, target: i64) -> Result<FormClass> {
    let order = order_of_disc(x.disc())?;
    if target <= 0 || order.f % target != 0 {
        return Err(Error::BadConductor { conductor: order.f, target });
    }
    let disc = to_i64(target as i128 * target as i128 * order.d_k as i128, "target discriminant")?;
    compose_general(x, &principal_class(disc)?)
}
