//! Transcendental lattices of singular K3 surfaces.
//!
//! A positive-definite even lattice with Gram matrix `(2a b; b 2c)` is the
//! form `(a, b, c) = m·q₀` with `q₀` primitive. The Galois action on such
//! lattices factors through the class group of `q₀`'s discriminant: an
//! automorphism with class fingerprint `g` sends `m·q₀` to `m·(g⁻²·q₀)`.
//!
//! ```
//! use k3moduli::k3::TranscLattice;
//!
//! let t = TranscLattice::from_gram([[4, 2], [2, 24]]).unwrap();
//! assert_eq!(t.m(), 2);
//! assert_eq!(t.disc(), -92);
//! assert_eq!(t.disc0(), -23);
//! assert_eq!(t.galois_orbit().unwrap().len(), 3);
//! ```

use std::fmt;

use crate::classgroup::ClassGroup;
use crate::numerics::CMPoint;
use crate::orders::order_of_disc;
use crate::qforms::{compose, principal_class, FormClass, QuadForm};
use crate::{Error, Result};

/// A 2×2 integer Gram matrix.
pub type Gram = [[i64; 2]; 2];

/// A transcendental lattice, stored in reduced form so that equality is
/// isometry (with orientation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TranscLattice {
    m: i64,
    q0: FormClass,
}

impl TranscLattice {
    pub fn from_gram(gram: Gram) -> Result<TranscLattice> {
        if gram[0][1] != gram[1][0] {
            return Err(Error::NotSymmetric);
        }
        if gram[0][0] % 2 != 0 || gram[1][1] % 2 != 0 {
            return Err(Error::NotEven);
        }
        TranscLattice::from_form(QuadForm::new(gram[0][0] / 2, gram[0][1], gram[1][1] / 2))
    }

    pub fn from_form(q: QuadForm) -> Result<TranscLattice> {
        if !q.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(q));
        }
        q.checked_discriminant()?;
        let (m, q0) = q.primitive_part();
        Ok(TranscLattice { m, q0: FormClass::of(q0)? })
    }

    /// `m·q₀` for a primitive class `q₀`.
    pub fn from_parts(m: i64, q0: FormClass) -> Result<TranscLattice> {
        if m <= 0 {
            return Err(Error::NotPositiveDefinite(q0.rep().scale(m)));
        }
        if !q0.is_primitive() {
            return Err(Error::NotPrimitive(q0.rep()));
        }
        let t = TranscLattice { m, q0 };
        t.form().checked_discriminant()?;
        Ok(t)
    }

    /// Index of primitivity.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// Primitive part.
    pub fn q0(&self) -> FormClass {
        self.q0
    }

    /// The (reduced) form `m·q₀`.
    pub fn form(&self) -> QuadForm {
        self.q0.rep().scale(self.m)
    }

    pub fn gram(&self) -> Gram {
        let q = self.form();
        [[2 * q.a, q.b], [q.b, 2 * q.c]]
    }

    pub fn disc(&self) -> i64 {
        self.m * self.m * self.q0.disc()
    }

    pub fn disc0(&self) -> i64 {
        self.q0.disc()
    }

    /// `n·T`.
    pub fn scale(&self, n: i64) -> Result<TranscLattice> {
        TranscLattice::from_parts(self.m.checked_mul(n).ok_or(Error::Overflow("lattice scaling"))?, self.q0)
    }

    /// Fundamental discriminant of `ℚ(√disc)`.
    pub fn cm_field(&self) -> i64 {
        order_of_disc(self.disc0()).expect("valid discriminant").d_k()
    }

    pub fn shioda_mitani(&self) -> Result<SMDecomposition> {
        let q = self.form();
        Ok(SMDecomposition { tau: CMPoint::of_form(&q)?, q1: self.q0, q2: principal_class(self.disc())? })
    }

    /// The lattice of the conjugate surface under an automorphism with class
    /// fingerprint `g`: `m·(g⁻²·q₀)`.
    pub fn conjugate_lattice(&self, g: &FormClass) -> Result<TranscLattice> {
        if g.disc() != self.disc0() {
            return Err(Error::DiscriminantMismatch { left: g.disc(), right: self.disc0() });
        }
        let gi = g.inverse();
        let q0 = compose(&compose(&gi, &gi)?, &self.q0)?;
        Ok(TranscLattice { m: self.m, q0 })
    }

    /// Complex conjugation: `(a, b, c) ↦ (a, −b, c)`, inverting `q₀`.
    pub fn complex_conjugate(&self) -> TranscLattice {
        TranscLattice { m: self.m, q0: self.q0.inverse() }
    }

    /// All Galois conjugates: `m·t` for `t` in the genus of `q₀`.
    pub fn galois_orbit(&self) -> Result<Vec<TranscLattice>> {
        self.galois_orbit_in(&ClassGroup::enumerate(self.disc0())?)
    }

    /// As [`galois_orbit`](Self::galois_orbit) with a precomputed `C(disc0)`.
    pub fn galois_orbit_in(&self, group: &ClassGroup) -> Result<Vec<TranscLattice>> {
        if group.disc() != self.disc0() {
            return Err(Error::DiscriminantMismatch { left: group.disc(), right: self.disc0() });
        }
        Ok(group.genus_of(&self.q0)?.into_iter().map(|i| TranscLattice { m: self.m, q0: *group.class(i) }).collect())
    }
}

impl fmt::Display for TranscLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.gram();
        write!(f, "[[{}, {}], [{}, {}]]", g[0][0], g[0][1], g[1][0], g[1][1])
    }
}

/// `A ≅ E_τ × E_{aτ+b}` for the form `(a, b, c)` of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SMDecomposition {
    /// `τ = (−b + √D)/(2a)`, upper half plane.
    pub tau: CMPoint,
    /// Class of `E_τ` in `C(disc0)`.
    pub q1: FormClass,
    /// Class of `E_{aτ+b}`: the principal class of `C(disc)`.
    pub q2: FormClass,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::compose_general;

    fn lat(g: Gram) -> TranscLattice {
        TranscLattice::from_gram(g).unwrap()
    }

    fn cls(a: i64, b: i64, c: i64) -> FormClass {
        FormClass::of(QuadForm::new(a, b, c)).unwrap()
    }

    #[test]
    fn gram_conversion() {
        let p = lat([[2, 1], [1, 12]]);
        assert_eq!((p.m(), p.q0(), p.disc()), (1, cls(1, 1, 6), -23));
        let q = lat([[4, 1], [1, 6]]);
        assert_eq!((q.m(), q.q0(), q.disc()), (1, cls(2, 1, 3), -23));
        let t = lat([[4, 2], [2, 24]]);
        assert_eq!((t.m(), t.q0(), t.disc(), t.disc0()), (2, cls(1, 1, 6), -92, -23));
        assert_eq!(t.gram(), [[4, 2], [2, 24]]);
        // non-reduced input is stored reduced
        assert_eq!(lat([[12, 1], [1, 2]]), p);
    }

    #[test]
    fn gram_errors() {
        assert_eq!(TranscLattice::from_gram([[3, 1], [1, 12]]).unwrap_err(), Error::NotEven);
        assert_eq!(TranscLattice::from_gram([[2, 1], [0, 12]]).unwrap_err(), Error::NotSymmetric);
        assert!(matches!(TranscLattice::from_gram([[2, 3], [3, 2]]).unwrap_err(), Error::NotPositiveDefinite(_)));
        assert!(matches!(TranscLattice::from_gram([[-2, 0], [0, -2]]).unwrap_err(), Error::NotPositiveDefinite(_)));
    }

    #[test]
    fn cm_fields() {
        assert_eq!(lat([[2, 1], [1, 12]]).cm_field(), -23);
        assert_eq!(lat([[2, 0], [0, 2]]).cm_field(), -4);
        assert_eq!(lat([[4, 2], [2, 24]]).cm_field(), -23);
        assert_eq!(lat([[2, 0], [0, 8]]).cm_field(), -4);
    }

    #[test]
    fn shioda_mitani_examples() {
        let sm = lat([[4, 1], [1, 6]]).shioda_mitani().unwrap();
        assert_eq!(sm.tau, CMPoint::new(2, 1, -23).unwrap());
        assert_eq!((sm.q1, sm.q2), (cls(2, 1, 3), cls(1, 1, 6)));

        let sm = lat([[2, 0], [0, 2]]).shioda_mitani().unwrap();
        assert_eq!((sm.q1, sm.q2), (cls(1, 0, 1), cls(1, 0, 1)));

        let sm = lat([[4, 2], [2, 24]]).shioda_mitani().unwrap();
        assert_eq!((sm.q1, sm.q2), (cls(1, 1, 6), principal_class(-92).unwrap()));
        assert_eq!(compose_general(&sm.q1, &sm.q2).unwrap(), cls(1, 1, 6));
    }

    #[test]
    fn conjugation() {
        let p = lat([[2, 1], [1, 12]]);
        assert_eq!(p.conjugate_lattice(&principal_class(-23).unwrap()).unwrap(), p);
        assert_eq!(p.conjugate_lattice(&cls(2, 1, 3)).unwrap().q0(), cls(2, 1, 3));

        let t = lat([[4, 2], [2, 24]]);
        let c = t.conjugate_lattice(&cls(2, 1, 3)).unwrap();
        assert_eq!((c.m(), c.q0()), (2, cls(2, 1, 3)));

        assert_eq!(
            t.conjugate_lattice(&cls(1, 0, 1)).unwrap_err(),
            Error::DiscriminantMismatch { left: -4, right: -23 }
        );
    }

    #[test]
    fn complex_conjugation() {
        assert_eq!(lat([[4, 1], [1, 6]]).complex_conjugate().q0(), cls(2, -1, 3));
        let p = lat([[2, 1], [1, 12]]);
        assert_eq!(p.complex_conjugate(), p);
        let t = lat([[4, 2], [2, 24]]);
        assert_eq!(t.complex_conjugate(), t);
    }

    #[test]
    fn orbits() {
        let o = lat([[2, 1], [1, 12]]).galois_orbit().unwrap();
        let qs: Vec<_> = o.iter().map(|t| t.q0()).collect();
        assert_eq!(qs, vec![cls(1, 1, 6), cls(2, 1, 3), cls(2, -1, 3)]);

        let sq = lat([[2, 0], [0, 2]]);
        assert_eq!(sq.galois_orbit().unwrap(), vec![sq]);

        let o = lat([[4, 2], [2, 24]]).galois_orbit().unwrap();
        assert_eq!(o.len(), 3);
        assert!(o.iter().all(|t| t.m() == 2 && t.disc0() == -23));

        // two genera in C(−56)
        let o = TranscLattice::from_form(QuadForm::new(3, 2, 5)).unwrap().galois_orbit().unwrap();
        let qs: Vec<_> = o.iter().map(|t| t.q0()).collect();
        assert_eq!(qs, vec![cls(3, 2, 5), cls(3, -2, 5)]);
    }
}
