//! Finite-algebra toolkit for multisorted natural dualities of Sugihara
//! algebras, Sugihara monoids and Kleene algebras.

pub mod algebra;
pub mod bitset;
pub mod dot;
pub mod duality;
pub mod error;
pub mod generators;
pub mod hom;
pub mod json;
pub mod kleene;
pub mod piggyback;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
