use rand::Rng;

use super::instance::{Constraint, Instance};

/// A random instance with `var_count` variables and `constraints` constraints: roughly half
/// relation constraints of the given arity, the rest products and identities.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, var_count: usize, constraints: usize, arity: usize) -> Instance {
    assert!(var_count > 0, "random instances need at least one variable");
    let mut inst = Instance::new(var_count);
    for _ in 0..constraints {
        let kind = rng.gen_range(0..8);
        let mut pick = || rng.gen_range(0..var_count);
        let c = match kind {
            0..=3 => Constraint::Relation((0..arity).map(|_| pick()).collect()),
            4..=6 => Constraint::Product(pick(), pick(), pick()),
            _ => Constraint::Identity(pick()),
        };
        inst.push(c);
    }
    inst
}
