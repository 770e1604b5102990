//! Polymorphisms given by component homomorphisms, minors, 2-block symmetric
//! polymorphisms, minor conditions and the reduction from minor conditions to CSP instances.

mod hom_poly;
mod minor_condition;
mod pmc;

pub use hom_poly::{
    block_symmetric_from_witness, constant_sets, find_block_symmetric, is_polymorphism, is_polymorphism_table,
    minor, selection_set, unary_minor, HomPolymorphism,
};
pub use minor_condition::{
    is_satisfiable_in_pol, is_trivial, polymorphism_tables, table_minor, trivial_indices, MinorCondition, MinorEdge,
    Side, Symbol,
};
pub use pmc::{pmc_reduce, PmcContext};
