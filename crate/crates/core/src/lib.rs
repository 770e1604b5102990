//! Promise equation/CSP templates over monoids.
//!
//! The crate decides whether `PCSP(rel M, rel N)` is tractable for a finitely generated
//! left template and a finite right template, solves CSPs over finitely generated
//! commutative regular monoids expanded by a coset, and exposes the monoid theory the
//! decision rests on.

pub mod algebra;
pub mod classifier;
pub mod cosets;
pub mod csp;
pub mod error;
pub mod polymorph;
pub mod regularize;
pub mod solver;
pub mod text;
pub mod zlinalg;

pub use error::{Error, Result};
