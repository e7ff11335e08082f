//! Fields of moduli of singular K3 surfaces, computed from their
//! transcendental lattices.
//!
//! A singular K3 surface is determined by an even positive-definite binary
//! lattice `T = m·q₀`. This crate works out, exactly where possible and with
//! certified numerics elsewhere:
//!
//! * binary quadratic forms, reduction and Dirichlet composition ([`qforms`]);
//! * class groups, their structure and genus theory ([`classgroup`]);
//! * orders and ideal lattices, with composition across orders ([`orders`]);
//! * transcendental lattices and their Galois conjugates ([`k3`]);
//! * the `j`-function at CM points ([`numerics`]);
//! * degrees, Galois groups and minimal polynomials of the fields of moduli
//!   `M_K` and `M_ℚ` ([`moduli`]).
//!
//! ```
//! use k3moduli::k3::TranscLattice;
//! use k3moduli::moduli::moduli_report;
//!
//! let t = TranscLattice::from_gram([[2, 1], [1, 12]]).unwrap();
//! let r = moduli_report(&t, None).unwrap();
//! assert_eq!((r.h, r.g), (3, 3));
//! assert!(!r.mq_is_galois);
//! ```

mod arith;
pub mod classgroup;
mod error;
pub mod k3;
pub mod moduli;
pub mod numerics;
pub mod orders;
pub mod qforms;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/class-groups.md")]
    mod class_groups {}
    #[doc = include_str!("../../../book/src/orders.md")]
    mod orders {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/j-function.md")]
    mod j_function {}
    #[doc = include_str!("../../../book/src/fields-of-moduli.md")]
    mod fields_of_moduli {}
}
