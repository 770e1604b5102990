//! Exact integer linear algebra: Hermite and Smith normal forms with unimodular
//! certificates, integer system solving, and lattice / lattice-coset membership.

mod lattice;
mod matrix;
mod normal_forms;

pub use lattice::{coset_member, lattice_member, Lattice, LatticeCoset};
pub use matrix::{
    int_vector, is_zero_vector, vec_add, vec_scale, vec_sub, zero_vector, IntMatrix, IntVector,
};
pub use normal_forms::{
    hermite_normal_form, smith_normal_form, solve_integer, Hermite, IntegerSolution, Smith,
};
