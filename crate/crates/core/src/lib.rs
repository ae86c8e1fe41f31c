//! Semiring-valued homomorphism counts for labeled transition systems.
//!
//! The crate decides modal equivalences of finite pointed structures both
//! through left homomorphism-count profiles and through structural oracles
//! (unraveling and generated-submodel isomorphism, simulations), and checks
//! that the two agree on exhaustively enumerated small structures.

pub mod canon;
pub mod cli;
pub mod enumerate;
pub mod hom;
pub mod harness;
pub mod logic;
pub mod semiring;
pub mod structure;
pub mod transform;
pub mod tree;

pub use semiring::{Elem, Semiring};
pub use structure::{ClassKind, ClassTag, Fact, PointedStructure, Signature, StructureError};
