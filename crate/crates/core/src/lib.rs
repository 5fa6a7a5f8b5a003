//! Exact character computations for torus actions on GKM graphs.
//!
//! The layers build on each other: [`lattice`] (weights, basis completion),
//! [`charring`] (Laurent polynomials, exact division, numeric evaluation),
//! [`gkm`] (graphs, axioms, K-classes), [`quantization`] (the localized
//! character and its combinatorics), [`residue`] (circle residues) and
//! [`reduction`] (reduced characters and the invariant-part check).

pub mod charring;
pub mod error;
pub mod generators;
pub mod gkm;
pub mod graphfile;
pub mod lattice;
pub mod quantization;
pub mod reduction;
pub mod residue;
pub mod selftest;

pub use charring::{divide_exact, LaurentPoly, RationalChar, TorusPoint};
pub use error::{Error, Result};
pub use gkm::{validate_action, validate_class, GkmAction, KClass, SymplecticClass, Violation};
pub use lattice::{LatticeVector, Weight};
