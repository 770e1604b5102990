//! Templates, instances, their text formats, the group-to-monoid instance translation and
//! the exhaustive satisfiability oracle.

mod instance;
mod oracle;
mod random;
mod template;

pub use instance::{group_to_monoid, Constraint, GroupConstraint, GroupInstance, Instance, Term};
pub use oracle::{oracle_solve, DEFAULT_BUDGET};
pub use random::random_instance;
pub use template::{
    parse_template, tuples_where, FiniteTemplate, NfTemplate, RelationBlock, Template,
};
