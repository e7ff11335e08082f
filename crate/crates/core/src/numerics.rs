//! Arbitrary-precision evaluation of the modular `j`-function at CM points.
//!
//! `j(τ) = 1/q + 744 + Σ c_n qⁿ` with `q = e^{2πiτ}`. The coefficients are
//! generated exactly from `E₄³ / Δ` and cached for the whole process; the
//! series is truncated where the classical envelope `c_n < e^{4π√n}` puts the
//! tail below `10^(−digits−5)`.
//!
//! ```
//! use k3moduli::numerics::{j_invariant, recognize_integer, CMPoint, Tolerance};
//!
//! let i = CMPoint::new(1, 0, -4).unwrap();
//! let j = j_invariant(&i, 40).unwrap();
//! assert_eq!(recognize_integer(&j, &Tolerance::pow10(-30)).unwrap(), 1728.into());
//! ```

use std::cell::RefCell;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::qforms::{reduce, QuadForm};
use crate::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default upper bound on the number of q-series terms.
pub const DEFAULT_SERIES_CAP: usize = 4096;

static SERIES_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_SERIES_CAP);

/// Sets the process-wide q-series length cap.
pub fn set_series_cap(cap: usize) {
    SERIES_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub fn series_cap() -> usize {
    SERIES_CAP.load(Ordering::Relaxed)
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Working precision in bits for `digits` decimal digits, with guard bits.
pub fn bits_for(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

pub(crate) fn bigint_to_float(n: &BigInt, p: usize) -> BigFloat {
    if n.is_zero() {
        return BigFloat::new(p);
    }
    let words: Vec<Word> = n.magnitude().to_u64_digits().into_iter().map(|w| w as Word).collect();
    let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
    let x = BigFloat::from_words(&words, sign, (64 * words.len()) as i32);
    // from_words keeps every bit; bring it to the working precision
    x.add(&BigFloat::new(p), p, RM)
}

/// Nearest integer to `x` (ties to even).
pub(crate) fn float_to_nearest(x: &BigFloat) -> BigInt {
    let r = x.round(0, RM);
    if r.is_zero() {
        return BigInt::zero();
    }
    let (words, _, sign, e, _) = r.as_raw_parts().expect("finite value");
    let mut mag = BigUint::zero();
    for &w in words.iter().rev() {
        mag = (mag << 64u32) + BigUint::from(w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    let mag = if shift >= 0 { mag << shift as u64 } else { mag >> (-shift) as u64 };
    let n = BigInt::from(mag);
    if sign == Sign::Neg {
        -n
    } else {
        n
    }
}

/// `log₁₀|x|`, or `−∞` for zero.
pub(crate) fn log10_abs(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        Some((words, _, _, e, _)) if !x.is_zero() => {
            let top = *words.last().expect("nonempty mantissa") as f64 / 2f64.powi(64);
            (top.log2() + e as f64) * std::f64::consts::LOG10_2
        }
        _ => f64::NEG_INFINITY,
    }
}

/// A complex number with `digits` decimal digits of working precision.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    digits: u32,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat, digits: u32) -> BigComplex {
        BigComplex { re, im, digits }
    }

    pub fn zero(digits: u32) -> BigComplex {
        let p = bits_for(digits);
        BigComplex::new(BigFloat::new(p), BigFloat::new(p), digits)
    }

    pub fn from_i64(n: i64, digits: u32) -> BigComplex {
        let p = bits_for(digits);
        BigComplex::new(BigFloat::from_i64(n, p), BigFloat::new(p), digits)
    }

    pub fn from_bigint(n: &BigInt, digits: u32) -> BigComplex {
        let p = bits_for(digits);
        BigComplex::new(bigint_to_float(n, p), BigFloat::new(p), digits)
    }

    /// `re + i·im` from `f64` parts; exact in binary.
    pub fn from_f64(re: f64, im: f64, digits: u32) -> BigComplex {
        let p = bits_for(digits);
        BigComplex::new(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p), digits)
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn prec(&self, other: &BigComplex) -> (usize, u32) {
        let d = self.digits.max(other.digits);
        (bits_for(d), d)
    }

    pub fn add(&self, other: &BigComplex) -> BigComplex {
        let (p, d) = self.prec(other);
        BigComplex::new(self.re.add(&other.re, p, RM), self.im.add(&other.im, p, RM), d)
    }

    pub fn sub(&self, other: &BigComplex) -> BigComplex {
        let (p, d) = self.prec(other);
        BigComplex::new(self.re.sub(&other.re, p, RM), self.im.sub(&other.im, p, RM), d)
    }

    pub fn mul(&self, other: &BigComplex) -> BigComplex {
        let (p, d) = self.prec(other);
        let re = self.re.mul(&other.re, p, RM).sub(&self.im.mul(&other.im, p, RM), p, RM);
        let im = self.re.mul(&other.im, p, RM).add(&self.im.mul(&other.re, p, RM), p, RM);
        BigComplex::new(re, im, d)
    }

    pub fn scale(&self, x: &BigFloat) -> BigComplex {
        let p = bits_for(self.digits);
        BigComplex::new(self.re.mul(x, p, RM), self.im.mul(x, p, RM), self.digits)
    }

    pub fn neg(&self) -> BigComplex {
        BigComplex::new(self.re.neg(), self.im.neg(), self.digits)
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex::new(self.re.clone(), self.im.neg(), self.digits)
    }

    pub fn powi(&self, n: u32) -> BigComplex {
        let mut acc = BigComplex::from_i64(1, self.digits);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `|z|`.
    pub fn abs(&self) -> BigFloat {
        let p = bits_for(self.digits);
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM).sqrt(p, RM)
    }

    /// `log₁₀|z|` as a float estimate.
    pub fn log10_abs(&self) -> f64 {
        log10_abs(&self.abs())
    }

    /// Approximate value as `(re, im)` doubles.
    pub fn to_f64(&self) -> (f64, f64) {
        (float_to_f64(&self.re), float_to_f64(&self.im))
    }
}

fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let v = 10f64.powf(log10_abs(x));
    if x.is_negative() {
        -v
    } else {
        v
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "{re:e} {} {:e}i", if im < 0.0 { '-' } else { '+' }, im.abs())
    }
}

/// An absolute tolerance `10^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tolerance {
    exp: i32,
}

impl Tolerance {
    pub fn pow10(exp: i32) -> Tolerance {
        Tolerance { exp }
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    /// Whether `|x| < 10^exp`.
    pub fn admits(&self, x: &BigFloat) -> bool {
        x.is_zero() || log10_abs(x) < self.exp as f64
    }
}

/// Nearest integer to `z` and the distance `|z − n|`.
pub fn nearest_integer(z: &BigComplex) -> (BigInt, BigFloat) {
    let p = bits_for(z.digits);
    let n = float_to_nearest(&z.re);
    let dr = z.re.sub(&bigint_to_float(&n, p), p, RM);
    let res = dr.mul(&dr, p, RM).add(&z.im.mul(&z.im, p, RM), p, RM).sqrt(p, RM);
    (n, res)
}

/// The integer `n` with `|Re z − n| < tol` and `|Im z| < tol`.
pub fn recognize_integer(z: &BigComplex, tol: &Tolerance) -> Result<BigInt> {
    let p = bits_for(z.digits);
    let n = float_to_nearest(&z.re);
    let dr = z.re.sub(&bigint_to_float(&n, p), p, RM);
    if tol.admits(&dr) && tol.admits(&z.im) {
        Ok(n)
    } else {
        Err(Error::NotNearInteger)
    }
}

/// Coefficients of `Π (x − rᵢ)`, lowest degree first; the last entry is 1.
pub fn poly_from_roots(roots: &[BigComplex]) -> Vec<BigComplex> {
    let digits = roots.iter().map(|r| r.digits).max().unwrap_or(30);
    let mut c = vec![BigComplex::from_i64(1, digits)];
    for r in roots {
        let mut next = vec![BigComplex::zero(digits); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] = next[k + 1].add(ck);
            next[k] = next[k].sub(&ck.mul(r));
        }
        c = next;
    }
    c
}

/// `τ = (−b + √D) / (2a)` in the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CMPoint {
    a: i64,
    b: i64,
    d: i64,
}

impl CMPoint {
    pub fn new(a: i64, b: i64, d: i64) -> Result<CMPoint> {
        let invalid = Error::InvalidCmPoint { a, b, disc: d };
        if a <= 0 || d >= 0 {
            return Err(invalid);
        }
        let num = b as i128 * b as i128 - d as i128;
        if num % (4 * a as i128) != 0 || num / (4 * a as i128) > i64::MAX as i128 {
            return Err(invalid);
        }
        Ok(CMPoint { a, b, d })
    }

    /// The root in the upper half plane of `a·x² + b·x + c`.
    pub fn of_form(q: &QuadForm) -> Result<CMPoint> {
        CMPoint::new(q.a, q.b, q.checked_discriminant()?)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn disc(&self) -> i64 {
        self.d
    }

    pub fn form(&self) -> QuadForm {
        let c = ((self.b as i128 * self.b as i128 - self.d as i128) / (4 * self.a as i128)) as i64;
        QuadForm::new(self.a, self.b, c)
    }

    /// The equivalent point in the standard fundamental domain.
    pub fn reduced(&self) -> CMPoint {
        let (cls, _) = reduce(self.form()).expect("positive definite by construction");
        let q = cls.rep();
        CMPoint { a: q.a, b: q.b, d: self.d }
    }

    /// `−1/τ`.
    pub fn s_transform(&self) -> CMPoint {
        let q = self.form();
        CMPoint { a: q.c, b: -q.b, d: self.d }
    }

    /// `τ + 1`.
    pub fn t_transform(&self) -> CMPoint {
        let q = self.form();
        CMPoint { a: q.a, b: q.b - 2 * q.a, d: self.d }
    }

    /// `Im τ = √|D| / (2a)`.
    pub fn imag(&self) -> f64 {
        ((-self.d) as f64).sqrt() / (2.0 * self.a as f64)
    }
}

impl fmt::Display for CMPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(-{} + sqrt({}))/{}", self.b, self.d, 2 * self.a)
    }
}

struct Coefficients {
    /// `c[n]` is the coefficient of `qⁿ`, starting with `c[0] = 744`.
    c: Vec<BigInt>,
}

fn coefficient_cache() -> &'static RwLock<Arc<Coefficients>> {
    static CACHE: OnceLock<RwLock<Arc<Coefficients>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Arc::new(Coefficients { c: j_coefficients(64) })))
}

/// The first `n` coefficients `c_0 = 744, c_1, …` of `j − 1/q`.
pub fn coefficients(n: usize) -> Arc<Vec<BigInt>> {
    let cache = coefficient_cache();
    {
        let cur = cache.read().expect("coefficient cache poisoned");
        if cur.c.len() >= n {
            return Arc::new(cur.c[..n].to_vec());
        }
    }
    let mut w = cache.write().expect("coefficient cache poisoned");
    if w.c.len() < n {
        let target = n.max(2 * w.c.len());
        *w = Arc::new(Coefficients { c: j_coefficients(target) });
    }
    Arc::new(w.c[..n].to_vec())
}

fn divisor_sums(n: usize, k: u32) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); n + 1];
    for d in 1..=n {
        let dk = BigInt::from(d).pow(k);
        for m in (d..=n).step_by(d) {
            s[m] += &dk;
        }
    }
    s
}

fn truncated_mul(x: &[BigInt], y: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, xi) in x.iter().enumerate().take(n) {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate().take(n - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

/// Exact `c_0, …, c_{n−1}` from `q·j = E₄³ · Π(1 − qᵏ)⁻²⁴`.
fn j_coefficients(n: usize) -> Vec<BigInt> {
    let m = n + 1;
    let s1 = divisor_sums(m, 1);
    let s3 = divisor_sums(m, 3);
    // k·f_k = 24 Σ σ₁(i) f_{k−i}
    let mut f = vec![BigInt::zero(); m];
    f[0] = BigInt::from(1);
    for k in 1..m {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            acc += &s1[i] * &f[k - i];
        }
        f[k] = acc * 24 / k;
    }
    let mut e4 = vec![BigInt::zero(); m];
    e4[0] = BigInt::from(1);
    for k in 1..m {
        e4[k] = &s3[k] * 240;
    }
    let e4sq = truncated_mul(&e4, &e4, m);
    let e4cube = truncated_mul(&e4sq, &e4, m);
    let t = truncated_mul(&e4cube, &f, m);
    t[1..].to_vec()
}

/// Number of terms `N` so that `Σ_{n≥N} e^{4π√n}|q|ⁿ < 10^(−digits−5)` for
/// `|q| = e^{−2π·Im τ}`.
pub fn series_terms(im_tau: f64, digits: u32) -> Option<usize> {
    let log_q = -2.0 * std::f64::consts::PI * im_tau;
    let target = -((digits as f64) + 5.0) * std::f64::consts::LN_10;
    let log_term = |n: f64| 4.0 * std::f64::consts::PI * n.sqrt() + n * log_q;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        // terms decay with ratio at most r once the exponent is decreasing
        let log_ratio = 2.0 * std::f64::consts::PI / nf.sqrt() + log_q;
        if log_ratio < 0.0 {
            let log_tail = log_term(nf) - (-log_ratio.exp()).ln_1p();
            if log_tail < target {
                return Some(n);
            }
        }
        n += 1;
        if n > 1 << 24 {
            return None;
        }
    }
}

/// Generous a-priori bound on `series_terms` at reduced points,
/// `(digits + 10)/2.3 + margin`.
pub fn reduced_terms_bound(digits: u32) -> usize {
    let base = (digits as f64 + 10.0) / 2.3;
    (base + 2.5 * base.sqrt() + 8.0).ceil() as usize
}

/// `j(τ)` evaluated on the reduced representative of `τ`.
pub fn j_invariant(p: &CMPoint, digits: u32) -> Result<BigComplex> {
    j_series(&p.reduced(), digits)
}

/// `j(τ)` straight from the q-series at `τ`, without moving it into the
/// fundamental domain.
pub fn j_series(p: &CMPoint, digits: u32) -> Result<BigComplex> {
    let cap = series_cap();
    let n = series_terms(p.imag(), digits).unwrap_or(usize::MAX);
    if n > cap {
        return Err(Error::PrecisionUnsupported { needed: n, cap });
    }
    let bits = bits_for(digits);
    let coeffs = coefficients(n);
    let (q, q_inv) = with_consts(|cc| {
        let pi = cc.pi(bits, RM);
        let a = BigFloat::from_i64(p.a, bits);
        let t = pi.mul(&BigFloat::from_i64(-p.d, bits).sqrt(bits, RM), bits, RM).div(&a, bits, RM);
        let theta = pi.mul(&BigFloat::from_i64(p.b, bits), bits, RM).div(&a, bits, RM);
        let (cos, sin) = (theta.cos(bits, RM, cc), theta.sin(bits, RM, cc));
        let r = t.neg().exp(bits, RM, cc);
        let r_inv = t.exp(bits, RM, cc);
        (
            BigComplex::new(r.mul(&cos, bits, RM), r.mul(&sin, bits, RM).neg(), digits),
            BigComplex::new(r_inv.mul(&cos, bits, RM), r_inv.mul(&sin, bits, RM), digits),
        )
    });
    let mut acc = BigComplex::zero(digits);
    for c in coeffs.iter().rev() {
        acc = acc.mul(&q).add(&BigComplex::from_bigint(c, digits));
    }
    Ok(acc.add(&q_inv))
}

/// `j` at each form's CM point, in order.
pub fn j_values(forms: &[QuadForm], digits: u32) -> Result<Vec<BigComplex>> {
    use rayon::prelude::*;
    let n = forms
        .iter()
        .map(|q| CMPoint::of_form(q).map(|p| series_terms(p.reduced().imag(), digits).unwrap_or(usize::MAX)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    // grow the shared table once before fanning out
    if n <= series_cap() {
        coefficients(n);
    }
    forms.par_iter().map(|q| j_invariant(&CMPoint::of_form(q)?, digits)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficients() {
        let c = coefficients(6);
        let expect: [i64; 6] = [744, 196884, 21493760, 864299970, 20245856256, 333202640600];
        for (x, y) in c.iter().zip(expect) {
            assert_eq!(*x, BigInt::from(y));
        }
    }

    #[test]
    fn conversions_round_trip() {
        let p = bits_for(60);
        for s in
            ["0", "1", "-1728", "12771880859375", "-6267542200571287109375", "340282366920938463463374607431768211457"]
        {
            let n: BigInt = s.parse().unwrap();
            assert_eq!(float_to_nearest(&bigint_to_float(&n, p)), n, "{s}");
        }
        let half = BigFloat::from_f64(2.5, p);
        assert_eq!(float_to_nearest(&half), BigInt::from(2));
        assert_eq!(float_to_nearest(&half.neg()), BigInt::from(-2));
        assert_eq!(float_to_nearest(&BigFloat::from_f64(0.4, p)), BigInt::zero());
    }

    #[test]
    fn cm_points() {
        assert!(CMPoint::new(1, 0, -4).is_ok());
        assert_eq!(CMPoint::new(2, 0, -4).unwrap_err(), Error::InvalidCmPoint { a: 2, b: 0, disc: -4 });
        assert!(CMPoint::new(0, 1, -3).is_err());
        assert!(CMPoint::new(1, 1, 5).is_err());
        let p = CMPoint::new(6, 1, -23).unwrap();
        assert_eq!(p.reduced(), CMPoint::new(1, 1, -23).unwrap());
        assert!((CMPoint::new(1, 0, -4).unwrap().imag() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn special_values() {
        let tol = Tolerance::pow10(-40);
        let j_i = j_invariant(&CMPoint::new(1, 0, -4).unwrap(), 50).unwrap();
        assert_eq!(recognize_integer(&j_i, &tol).unwrap(), BigInt::from(1728));
        let j_rho = j_invariant(&CMPoint::new(1, 1, -3).unwrap(), 50).unwrap();
        assert_eq!(recognize_integer(&j_rho, &tol).unwrap(), BigInt::zero());
        let j7 = j_invariant(&CMPoint::new(1, 1, -7).unwrap(), 50).unwrap();
        assert_eq!(recognize_integer(&j7, &tol).unwrap(), BigInt::from(-3375));
    }

    #[test]
    fn periodicity_and_inversion() {
        let p = CMPoint::new(2, 1, -23).unwrap();
        let d = 40;
        let base = j_series(&p, d).unwrap();
        let shifted = j_series(&p.t_transform(), d).unwrap();
        assert!(Tolerance::pow10(-30).admits(&base.sub(&shifted).abs()));
        let inv = j_series(&p.s_transform(), d).unwrap();
        let rel = log10_abs(&base.sub(&inv).abs()) - base.log10_abs();
        assert!(rel < -(d as f64) + 5.0, "{rel}");
    }

    #[test]
    fn recognition() {
        let near = BigComplex::new(
            BigFloat::from_i64(1728, 256).sub(&BigFloat::from_f64(1e-40, 256), 256, RM),
            BigFloat::from_f64(1e-50, 256),
            60,
        );
        assert_eq!(recognize_integer(&near, &Tolerance::pow10(-20)).unwrap(), BigInt::from(1728));
        let half = BigComplex::from_f64(0.5, 0.0, 60);
        assert_eq!(recognize_integer(&half, &Tolerance::pow10(-20)).unwrap_err(), Error::NotNearInteger);
        let complex = BigComplex::from_f64(3.0, 1e-3, 60);
        assert!(recognize_integer(&complex, &Tolerance::pow10(-20)).is_err());
    }

    #[test]
    fn polynomial_expansion() {
        let c = poly_from_roots(&[BigComplex::from_i64(1728, 30)]);
        assert_eq!(c.len(), 2);
        let tol = Tolerance::pow10(-20);
        assert_eq!(recognize_integer(&c[0], &tol).unwrap(), BigInt::from(-1728));
        assert_eq!(recognize_integer(&c[1], &tol).unwrap(), BigInt::from(1));

        let r = BigComplex::from_f64(1.5, 2.25, 30);
        let c = poly_from_roots(&[r.clone(), r.conj()]);
        assert!(c.iter().all(|z| tol.admits(z.im())));
        assert_eq!(recognize_integer(&c[1], &tol).unwrap(), BigInt::from(-3));
    }

    #[test]
    fn term_counts_are_bounded_on_reduced_points() {
        let worst = 3f64.sqrt() / 2.0;
        for digits in [10, 40, 100, 400, 1000, 3000] {
            let n = series_terms(worst, digits).unwrap();
            assert!(n <= reduced_terms_bound(digits), "{digits}: {n}");
        }
    }

    #[test]
    fn series_cap_is_enforced() {
        // a point far from the fundamental domain needs many terms
        let p = CMPoint::new(1_000_000, 0, -4_000_000).unwrap();
        match j_series(&p, 40) {
            Err(Error::PrecisionUnsupported { needed, cap }) => assert!(needed > cap),
            other => panic!("{other:?}"),
        }
    }
}
