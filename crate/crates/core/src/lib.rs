//! Exact symbolic computation for the noncommutative deformations of the
//! commutative and noncommutative crepant resolutions of the `A_n` surface
//! singularity.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! - [`cyclotomic`] and [`param`]: the scalar field `Q(ζ_{n+1})` and the
//!   deformation-parameter rings `k[t]`, `k[w]`, `k[s]` with their linear
//!   coordinate changes,
//! - [`chart`]: PBW arithmetic in the chart algebras `R_i` and the overlap
//!   algebras `R_{i,i+1}`, and the gluing transitions between them,
//! - [`scheme`]: divisorial sheaves, sheaf homomorphisms, the Čech map `Δ`,
//!   graded Hom / `Ȟ¹` computations and the short exact sequences between
//!   divisorial sheaves,
//! - [`endo`]: the tilting bundle `T = R ⊕ ⊕ R(-D_i)` and its endomorphism
//!   algebra, including the division algorithm expressing any endomorphism in
//!   the quiver generators,
//! - [`cbh`]: the deformed twisted group algebra `S`,
//! - [`mckay`]: the comparison homomorphism `S → End(T)` and the evidence for
//!   it being an isomorphism,
//! - [`suite`]: named verification checks used by the command-line driver.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cbh;
pub mod chart;
pub mod cyclotomic;
pub mod endo;
mod error;
pub mod linalg;
pub mod mckay;
pub mod param;
pub mod scheme;
pub mod suite;

pub use error::{Error, Result};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
