//! Exact-arithmetic mirror symmetry for Calabi–Yau double covers.
//!
//! The crate follows the computations end to end: lattice polytopes and
//! nef-partitions, GKZ systems and Picard–Fuchs operators, mirror maps,
//! Yukawa couplings and instanton numbers, orbifold I-functions, and the
//! toric and lattice constructions behind the pre-quotient spaces. Every
//! number is an exact rational; nothing is evaluated in floating point.

pub mod amodel;
pub mod bmodel;
pub mod examples;
pub mod fan;
pub mod gkz;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod quotientgeom;
pub mod rational;
pub mod series;

pub use rational::{int, rat, Rational};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    pub mod series {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    pub mod lattices {}
    #[doc = include_str!("../../../book/src/polytopes.md")]
    pub mod polytopes {}
    #[doc = include_str!("../../../book/src/gkz.md")]
    pub mod gkz {}
    #[doc = include_str!("../../../book/src/bmodel.md")]
    pub mod bmodel {}
    #[doc = include_str!("../../../book/src/amodel.md")]
    pub mod amodel {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    pub mod quotients {}
}
