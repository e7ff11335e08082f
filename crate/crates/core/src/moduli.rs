//! Fields of moduli of singular K3 surfaces.
//!
//! For a lattice `m·q₀` with `q₀ ∈ C = C(D₀)`, `Gal(H/ℚ) ≅ C ⋊ ⟨ι⟩` with `ι`
//! acting by inversion. An element `c·ιᵉ` moves the lattice to
//! `c²·ιᵉ(q₀)`, so
//!
//! * `M_K` is cut out by `C[2]` and has degree `g = |C²|` over `K`;
//! * `M_ℚ` is cut out by the stabilizer of `q₀`,
//!   `C[2] ∪ {c·ι : c ∈ q₀·C[2]}`, of index `g`.
//!
//! Explicit generators are symmetric functions of `j`-values over cosets of
//! `C[2]`, evaluated numerically and recognized as algebraic integers.
//!
//! ```
//! use k3moduli::k3::TranscLattice;
//! use k3moduli::moduli::{moduli_degree, mq_is_galois};
//!
//! let t = TranscLattice::from_gram([[2, 1], [1, 12]]).unwrap();
//! assert_eq!(moduli_degree(&t).unwrap(), 3);
//! assert!(!mq_is_galois(&t).unwrap());
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::classgroup::{ClassGroup, ClassSet};
use crate::k3::TranscLattice;
use crate::numerics::{
    bits_for, j_values, log10_abs, nearest_integer, poly_from_roots, recognize_integer, BigComplex, Tolerance,
};
use crate::orders::order_of_disc;
use crate::qforms::FormClass;
use crate::{Error, Result};

/// Number of times the working precision may be doubled.
pub const MAX_DOUBLINGS: u32 = 8;

/// Residual accepted when rounding to a rational integer.
pub const INTEGER_TOLERANCE: i32 = -10;

/// Starting precision `30 + 10·h`.
pub fn default_digits(h: usize) -> u32 {
    30 + 10 * h as u32
}

/// `c·ιᵉ`, with `c` an index into the class group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisElement {
    pub class: usize,
    pub flip: bool,
}

/// `C(D₀) ⋊ ⟨ι⟩` acting on the primitive parts of conjugate lattices.
#[derive(Clone, Debug)]
pub struct GaloisModel {
    group: ClassGroup,
    q0: usize,
    subgroup_mk: Vec<GaloisElement>,
    subgroup_mq: Vec<GaloisElement>,
}

impl GaloisModel {
    pub fn new(group: ClassGroup, q0: &FormClass) -> Result<GaloisModel> {
        let q0 = group.index_of(q0)?;
        let two = group.two_torsion();
        let subgroup_mk = two.iter().map(|&c| GaloisElement { class: c, flip: false }).collect();
        let mut model = GaloisModel { group, q0, subgroup_mk, subgroup_mq: Vec::new() };
        let identity = model.group.identity();
        model.subgroup_mq = model.elements().filter(|&x| model.act(x, q0) == q0).collect();
        debug_assert!(model.subgroup_mq.contains(&GaloisElement { class: identity, flip: false }));
        Ok(model)
    }

    pub fn class_group(&self) -> &ClassGroup {
        &self.group
    }

    /// Index of `q₀` in the class group.
    pub fn base_class(&self) -> usize {
        self.q0
    }

    /// `2·h`.
    pub fn order(&self) -> usize {
        2 * self.group.order()
    }

    pub fn elements(&self) -> impl Iterator<Item = GaloisElement> + '_ {
        [false, true]
            .into_iter()
            .flat_map(move |flip| (0..self.group.order()).map(move |class| GaloisElement { class, flip }))
    }

    pub fn identity(&self) -> GaloisElement {
        GaloisElement { class: self.group.identity(), flip: false }
    }

    pub fn iota(&self) -> GaloisElement {
        GaloisElement { class: self.group.identity(), flip: true }
    }

    /// `(c₁ιᵉ¹)(c₂ιᵉ²) = c₁·ιᵉ¹(c₂)·ιᵉ¹⁺ᵉ²`.
    pub fn mul(&self, x: GaloisElement, y: GaloisElement) -> GaloisElement {
        let c2 = if x.flip { self.group.inv(y.class) } else { y.class };
        GaloisElement { class: self.group.mul(x.class, c2), flip: x.flip ^ y.flip }
    }

    pub fn inv(&self, x: GaloisElement) -> GaloisElement {
        if x.flip {
            x
        } else {
            GaloisElement { class: self.group.inv(x.class), flip: false }
        }
    }

    /// Action on primitive classes: `c·ιᵉ : q ↦ c²·ιᵉ(q)`.
    pub fn act(&self, x: GaloisElement, q: usize) -> usize {
        let q = if x.flip { self.group.inv(q) } else { q };
        let c2 = self.group.mul(x.class, x.class);
        self.group.mul(c2, q)
    }

    /// `C[2]`, fixing `M_K`.
    pub fn subgroup_mk(&self) -> &[GaloisElement] {
        &self.subgroup_mk
    }

    /// Stabilizer of `q₀`, fixing `M_ℚ`.
    pub fn subgroup_mq(&self) -> &[GaloisElement] {
        &self.subgroup_mq
    }

    pub fn is_subgroup(&self, s: &[GaloisElement]) -> bool {
        s.contains(&self.identity()) && s.iter().all(|&x| s.iter().all(|&y| s.contains(&self.mul(x, self.inv(y)))))
    }

    pub fn is_normal(&self, s: &[GaloisElement]) -> bool {
        self.elements().all(|x| s.iter().all(|&y| s.contains(&self.mul(self.mul(x, y), self.inv(x)))))
    }

    /// Index of `s` in the whole group.
    pub fn index(&self, s: &[GaloisElement]) -> usize {
        self.order() / s.len()
    }
}

pub fn galois_model(t: &TranscLattice) -> Result<GaloisModel> {
    GaloisModel::new(ClassGroup::enumerate(t.disc0())?, &t.q0())
}

/// `[M_K : K] = [M_ℚ : ℚ] = g`, the genus order of `C(D₀)`.
pub fn moduli_degree(t: &TranscLattice) -> Result<usize> {
    Ok(ClassGroup::enumerate(t.disc0())?.genus_order())
}

/// Whether `M_ℚ / ℚ` is Galois, i.e. whether the stabilizer is normal.
pub fn mq_is_galois(t: &TranscLattice) -> Result<bool> {
    let model = galois_model(t)?;
    Ok(model.is_normal(model.subgroup_mq()))
}

/// Runs `attempt` at `start`, `2·start`, … digits until it produces a value.
fn escalate<T>(start: u32, mut attempt: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut digits = start.max(10);
    for _ in 0..=MAX_DOUBLINGS {
        if let Some(v) = attempt(digits)? {
            return Ok(v);
        }
        digits *= 2;
    }
    Err(Error::PrecisionExhausted { digits: digits / 2 })
}

/// Whether `digits` covers the size of the coefficients of `Π(x − rᵢ)` with
/// 15 digits to spare.
fn enough_digits(roots: &[BigComplex], digits: u32) -> bool {
    // log₁₀(1 + |r|) ≤ max(0, log₁₀|r|) + log₁₀ 2
    let est: f64 = roots.iter().map(|r| r.log10_abs().max(0.0) + std::f64::consts::LOG10_2).sum();
    digits as f64 >= est + 15.0
}

/// Pairwise separation above `10^(−digits/2)` relative to the largest root.
fn separated(roots: &[BigComplex], digits: u32) -> bool {
    let scale = roots.iter().map(|r| r.log10_abs()).fold(0.0, f64::max);
    let threshold = scale - digits as f64 / 2.0;
    roots.iter().enumerate().all(|(i, x)| roots[i + 1..].iter().all(|y| x.sub(y).log10_abs() > threshold))
}

/// A monic integer polynomial, lowest degree first, with the precision it was
/// certified at.
#[derive(Clone, Debug, PartialEq)]
pub struct IntPolynomial {
    pub coeffs: Vec<BigInt>,
    pub digits: u32,
    /// `log₁₀` of the largest rounding residual.
    pub max_residual_log10: f64,
}

impl IntPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Rounds the coefficients of `Π(x − rᵢ)` to integers, or `None` if any
/// residual reaches `10^INTEGER_TOLERANCE`.
fn integer_poly(roots: &[BigComplex], digits: u32) -> Option<IntPolynomial> {
    if !enough_digits(roots, digits) {
        return None;
    }
    let tol = Tolerance::pow10(INTEGER_TOLERANCE);
    let mut coeffs = Vec::with_capacity(roots.len() + 1);
    let mut worst = f64::NEG_INFINITY;
    for z in poly_from_roots(roots) {
        let (n, res) = nearest_integer(&z);
        if !tol.admits(&res) {
            return None;
        }
        worst = worst.max(log10_abs(&res));
        coeffs.push(n);
    }
    Some(IntPolynomial { coeffs, digits, max_residual_log10: worst })
}

/// The class polynomial of discriminant `d`, starting at `digits` (default
/// `30 + 10·h`).
pub fn class_polynomial(d: i64, digits: Option<u32>) -> Result<IntPolynomial> {
    let group = ClassGroup::enumerate(d)?;
    let forms: Vec<_> = group.classes().iter().map(|c| c.rep()).collect();
    let start = digits.unwrap_or_else(|| default_digits(group.order()));
    escalate(start, |digits| {
        let js = j_values(&forms, digits)?;
        Ok(integer_poly(&js, digits))
    })
}

/// `(u₂ + v₂·√d_K)/2`, an element of `K` with half-integral coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KCoeff {
    pub u2: BigInt,
    pub v2: BigInt,
}

impl KCoeff {
    pub fn rational(n: BigInt) -> KCoeff {
        KCoeff { u2: n * 2, v2: BigInt::zero() }
    }

    pub fn is_rational(&self) -> bool {
        self.v2.is_zero()
    }

    /// `u` as `"n"` or `"n/2"`.
    pub fn u_string(&self) -> String {
        half_string(&self.u2)
    }

    /// `v` as `"n"` or `"n/2"`.
    pub fn v_string(&self) -> String {
        half_string(&self.v2)
    }
}

fn half_string(n: &BigInt) -> String {
    if n.is_even() {
        (n / 2u32).to_string()
    } else {
        format!("{n}/2")
    }
}

impl fmt::Display for KCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.u_string())
        } else {
            write!(f, "{} + {}*w", self.u_string(), self.v_string())
        }
    }
}

/// Writes `z = u + v·√d_K` and accepts when `2u`, `2v` are within `tol` of
/// integers.
pub fn recognize_k(z: &BigComplex, d_k: i64, tol: &Tolerance) -> Result<KCoeff> {
    let digits = z.digits();
    let p = bits_for(digits);
    let rm = astro_float::RoundingMode::ToEven;
    let two = astro_float::BigFloat::from_i64(2, p);
    let sqrt = astro_float::BigFloat::from_i64(-d_k, p).sqrt(p, rm);
    let u2 = z.re().mul(&two, p, rm);
    let v2 = z.im().mul(&two, p, rm).div(&sqrt, p, rm);
    let zero = astro_float::BigFloat::new(p);
    let u2 =
        recognize_integer(&BigComplex::new(u2, zero.clone(), digits), tol).map_err(|_| Error::NotNearFieldElement)?;
    let v2 = recognize_integer(&BigComplex::new(v2, zero, digits), tol).map_err(|_| Error::NotNearFieldElement)?;
    Ok(KCoeff { u2, v2 })
}

/// Symmetric function of the `j`-values in a coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolvent {
    /// `Σ j`
    Trace,
    /// `Σ jᵏ`
    PowerSum(u32),
    /// `Σ (j + k)²`
    ShiftedSquares(i64),
}

impl Resolvent {
    /// The fallback ladder, tried in order.
    pub fn ladder() -> Vec<Resolvent> {
        let mut l = vec![Resolvent::Trace, Resolvent::PowerSum(2), Resolvent::PowerSum(3)];
        l.extend((1..=6).map(Resolvent::ShiftedSquares));
        l
    }

    fn eval(&self, js: &[&BigComplex]) -> BigComplex {
        let digits = js.iter().map(|j| j.digits()).max().unwrap_or(30);
        js.iter().fold(BigComplex::zero(digits), |acc, j| {
            let term = match *self {
                Resolvent::Trace => (*j).clone(),
                Resolvent::PowerSum(k) => j.powi(k),
                Resolvent::ShiftedSquares(k) => j.add(&BigComplex::from_i64(k, digits)).powi(2),
            };
            acc.add(&term)
        })
    }
}

impl fmt::Display for Resolvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolvent::Trace => write!(f, "sum of j"),
            Resolvent::PowerSum(k) => write!(f, "sum of j^{k}"),
            Resolvent::ShiftedSquares(k) => write!(f, "sum of (j+{k})^2"),
        }
    }
}

/// Cosets of `C[2]`, in order of their smallest member.
fn two_torsion_cosets(group: &ClassGroup) -> Vec<ClassSet> {
    let two = group.two_torsion();
    let mut seen = vec![false; group.order()];
    let mut out = Vec::new();
    for i in 0..group.order() {
        if seen[i] {
            continue;
        }
        let mut c: ClassSet = two.iter().map(|&t| group.mul(i, t)).collect();
        c.sort_unstable();
        for &k in &c {
            seen[k] = true;
        }
        out.push(c);
    }
    out
}

fn coset_values(js: &[BigComplex], cosets: &[ClassSet], r: Resolvent) -> Vec<BigComplex> {
    cosets.iter().map(|c| r.eval(&c.iter().map(|&i| &js[i]).collect::<Vec<_>>())).collect()
}

/// Minimal polynomial of the `M_K` generator over `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct KPolynomial {
    pub d_k: i64,
    pub coeffs: Vec<KCoeff>,
    pub resolvent: Resolvent,
    pub digits: u32,
}

impl KPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// How the `M_ℚ` generator was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MqGenerator {
    /// A single coset value, on a coset `x·C[2]` with `x² ∈ q₀·C[2]`.
    Coset { rep: FormClass },
    /// `γ·e_y + γ̄·e_{y·q₀}` with `γ = (gx + gy·√d_K)`.
    Twisted { gx: i64, gy: i64 },
}

impl fmt::Display for MqGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MqGenerator::Coset { rep } => write!(f, "coset value at {rep}"),
            MqGenerator::Twisted { gx, gy } => write!(f, "twisted pair sum with gamma = {gx} + {gy}*sqrt(d_K)"),
        }
    }
}

/// Minimal polynomial of the `M_ℚ` generator over `ℚ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolynomial {
    pub poly: IntPolynomial,
    pub resolvent: Resolvent,
    pub generator: MqGenerator,
}

fn twist_ladder() -> Vec<(i64, i64)> {
    let mut l = vec![(1, 0), (0, 1)];
    l.extend((1..=6).map(|k| (k, 1)));
    l
}

/// `Π(x − e_c)` over cosets `c` of `C[2]` in `C(D₀)`.
pub fn field_of_k_moduli(t: &TranscLattice, digits: Option<u32>) -> Result<KPolynomial> {
    let group = ClassGroup::enumerate(t.disc0())?;
    let d_k = t.cm_field();
    let cosets = two_torsion_cosets(&group);
    let forms: Vec<_> = group.classes().iter().map(|c| c.rep()).collect();
    let start = digits.unwrap_or_else(|| default_digits(group.order()));
    escalate(start, |digits| {
        let js = j_values(&forms, digits)?;
        let Some((resolvent, roots)) = Resolvent::ladder()
            .into_iter()
            .map(|r| (r, coset_values(&js, &cosets, r)))
            .find(|(_, roots)| separated(roots, digits))
        else {
            return Err(Error::ResolventDegenerate);
        };
        if !enough_digits(&roots, digits) {
            return Ok(None);
        }
        let tol = Tolerance::pow10(-(digits as i32) / 4);
        let coeffs: Result<Vec<_>> = poly_from_roots(&roots).iter().map(|z| recognize_k(z, d_k, &tol)).collect();
        match coeffs {
            Ok(coeffs) => Ok(Some(KPolynomial { d_k, coeffs, resolvent, digits })),
            Err(Error::NotNearFieldElement) => Ok(None),
            Err(e) => Err(e),
        }
    })
}

/// Integer minimal polynomial of a generator of `M_ℚ`.
pub fn field_of_q_moduli(t: &TranscLattice, digits: Option<u32>) -> Result<QPolynomial> {
    let group = ClassGroup::enumerate(t.disc0())?;
    let d_k = t.cm_field();
    let q0 = group.index_of(&t.q0())?;
    let cosets = two_torsion_cosets(&group);
    let coset_of = |i: usize| cosets.iter().position(|c| c.contains(&i)).expect("cosets cover C");
    let forms: Vec<_> = group.classes().iter().map(|c| c.rep()).collect();
    let start = digits.unwrap_or_else(|| default_digits(group.order()));

    let target = coset_of(q0);
    let x0 = (0..group.order()).find(|&x| coset_of(group.mul(x, x)) == target);

    escalate(start, |digits| {
        let js = j_values(&forms, digits)?;
        for resolvent in Resolvent::ladder() {
            let e = coset_values(&js, &cosets, resolvent);
            if let Some(x0) = x0 {
                if !separated(&e, digits) {
                    continue;
                }
                let generator = MqGenerator::Coset { rep: *group.class(x0) };
                return Ok(integer_poly(&e, digits).map(|poly| QPolynomial { poly, resolvent, generator }));
            }
            // θ_y = γ·e_y + γ̄·e_{y·q₀} over coset representatives y
            let sqrt_dk = BigComplex::new(
                astro_float::BigFloat::new(bits_for(digits)),
                astro_float::BigFloat::from_i64(-d_k, bits_for(digits))
                    .sqrt(bits_for(digits), astro_float::RoundingMode::ToEven),
                digits,
            );
            for (gx, gy) in twist_ladder() {
                let gamma = BigComplex::from_i64(gx, digits).add(&sqrt_dk.mul(&BigComplex::from_i64(gy, digits)));
                let roots: Vec<_> = cosets
                    .iter()
                    .map(|c| {
                        let y = c[0];
                        let partner = coset_of(group.mul(y, q0));
                        gamma.mul(&e[coset_of(y)]).add(&gamma.conj().mul(&e[partner]))
                    })
                    .collect();
                if separated(&roots, digits) {
                    let generator = MqGenerator::Twisted { gx, gy };
                    return Ok(integer_poly(&roots, digits).map(|poly| QPolynomial { poly, resolvent, generator }));
                }
            }
        }
        Err(Error::ResolventDegenerate)
    })
}

/// Everything known about the fields of moduli of one lattice.
#[derive(Clone, Debug)]
pub struct ModuliReport {
    pub lattice: TranscLattice,
    pub disc: i64,
    pub disc0: i64,
    pub m: i64,
    pub d_k: i64,
    /// Class number of `D₀`.
    pub h: usize,
    /// Genus order of `C(D₀)`.
    pub g: usize,
    pub degree_mk_over_k: usize,
    pub degree_mq_over_q: usize,
    pub orbit: Vec<TranscLattice>,
    pub mq_is_galois: bool,
    /// Class polynomial of `D₀`.
    pub class_polynomial: IntPolynomial,
    pub mk_min_poly: KPolynomial,
    pub mq_min_poly: QPolynomial,
    pub precision_used: u32,
    pub warnings: Vec<String>,
}

pub fn moduli_report(t: &TranscLattice, digits: Option<u32>) -> Result<ModuliReport> {
    let model = galois_model(t)?;
    let group = model.class_group();
    let h = group.order();
    let g = group.genus_order();
    let orbit = t.galois_orbit_in(group)?;
    let class_polynomial = class_polynomial(t.disc0(), digits)?;
    let mk_min_poly = field_of_k_moduli(t, digits)?;
    let mq_min_poly = field_of_q_moduli(t, digits)?;

    let mut warnings = Vec::new();
    if mk_min_poly.resolvent != Resolvent::Trace {
        warnings.push(format!("M_K generator: coset traces collide, used {}", mk_min_poly.resolvent));
    }
    if mq_min_poly.resolvent != Resolvent::Trace {
        warnings.push(format!("M_Q generator: coset traces collide, used {}", mq_min_poly.resolvent));
    }
    if let MqGenerator::Twisted { gx, gy } = mq_min_poly.generator {
        if (gx, gy) != (1, 0) {
            warnings.push(format!("M_Q generator: plain pair sums collide, used {}", mq_min_poly.generator));
        }
    }

    let report = ModuliReport {
        lattice: *t,
        disc: t.disc(),
        disc0: t.disc0(),
        m: t.m(),
        d_k: t.cm_field(),
        h,
        g,
        degree_mk_over_k: group.order() / group.two_torsion().len(),
        degree_mq_over_q: model.index(model.subgroup_mq()),
        orbit,
        mq_is_galois: model.is_normal(model.subgroup_mq()),
        precision_used: class_polynomial.digits.max(mk_min_poly.digits).max(mq_min_poly.poly.digits),
        class_polynomial,
        mk_min_poly,
        mq_min_poly,
        warnings,
    };
    check_report(&report, &model)?;
    Ok(report)
}

fn check_report(r: &ModuliReport, model: &GaloisModel) -> Result<()> {
    let fail = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::Inconsistent(what.to_string())) };
    fail(r.degree_mk_over_k == r.g, "[M_K:K] differs from the genus order")?;
    fail(r.degree_mq_over_q == r.g, "[M_Q:Q] differs from the genus order")?;
    fail(model.index(model.subgroup_mk()) == 2 * r.g, "C[2] has the wrong index")?;
    fail(model.is_subgroup(model.subgroup_mq()), "stabilizer is not a subgroup")?;
    fail(model.is_normal(model.subgroup_mk()), "C[2] is not normal")?;
    fail(r.orbit.len() == r.g, "orbit size differs from the genus order")?;
    fail(r.class_polynomial.degree() == r.h, "class polynomial has the wrong degree")?;
    fail(r.mk_min_poly.degree() == r.g, "M_K polynomial has the wrong degree")?;
    fail(r.mq_min_poly.poly.degree() == r.g, "M_Q polynomial has the wrong degree")?;
    fail(r.class_polynomial.coeffs.last().is_some_and(|c| c.is_one()), "class polynomial is not monic")?;
    fail(r.mq_min_poly.poly.coeffs.last().is_some_and(|c| c.is_one()), "M_Q polynomial is not monic")?;
    fail(r.mk_min_poly.coeffs.last() == Some(&KCoeff::rational(BigInt::one())), "M_K polynomial is not monic")?;
    let integral = |c: &KCoeff| if r.d_k % 4 == 0 { c.u2.is_even() } else { (&c.u2 - &c.v2).is_even() };
    fail(r.mk_min_poly.coeffs.iter().all(integral), "M_K coefficient outside O_K")?;
    fail(order_of_disc(r.disc0).map(|o| o.d_k()) == Ok(r.d_k), "CM field differs between lattice and primitive part")?;
    Ok(())
}
