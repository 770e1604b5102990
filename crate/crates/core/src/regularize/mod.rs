//! Commutative regularization of finite monoids (abelianization followed by the regular
//! retract) and the semilattice-over-ℤ normal form of finitely generated commutative
//! regular monoids.

mod congruence;
mod normal_form;

pub use congruence::{
    ab_reg, abelianization, congruence_closure, images_generate, regular_retract,
    verify_universal_property, CongruenceQuotient,
};
pub use normal_form::{nf_homs_to_finite, to_normal_form, NFElement, NfHom, NormalFormIso, NormalFormMonoid};
