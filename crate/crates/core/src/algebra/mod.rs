//! Finite monoids as Cayley tables and their structure theory: Green's preorder,
//! idempotents, complete regularity, inverses, the projections `π_I` and `π_†`,
//! generated submonoids, Cartesian powers and homomorphism enumeration.

pub mod builtins;
mod hom;
mod monoid;
mod power;
mod subset;
pub mod sweep;

pub use hom::{enumerate_homs, extend_from_generators, is_hom, MonoidHom};
pub(crate) use hom::for_each_tuple;
pub use monoid::FiniteMonoid;
pub use power::{decode_tuple, encode_tuple, CartesianPower, DEFAULT_POWER_CAP};
pub use subset::Subset;

/// Index of an element within a [`FiniteMonoid`].
pub type Element = usize;
