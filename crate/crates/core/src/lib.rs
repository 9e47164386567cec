//! Computer algebra for topological Hochschild homology calculations.
//!
//! The crate is layered: [`fplin`] supplies exact linear algebra over `F_p`;
//! [`steenrod`] the mod 2 Steenrod algebra and the dual Steenrod algebra;
//! [`gca`] presented graded-commutative algebras with comodule structure;
//! [`hochschild`] Hochschild complexes and their homology; [`bokstedt`] the
//! Bökstedt spectral sequence pipeline; [`adams`] the Adams spectral
//! sequences for `THH(ku) ∧ M` and `THH(ko) ∧ Y`.

pub mod adams;
pub mod bokstedt;
pub mod fplin;
pub mod gca;
pub mod hochschild;
pub mod steenrod;

mod error;

pub use error::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;
