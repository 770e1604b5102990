use crate::algebra::{enumerate_homs, Element, FiniteMonoid, MonoidHom, Subset};
use crate::error::{Error, Result};

/// A quotient of a finite monoid by a congruence.
///
/// Classes are numbered in order of their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceQuotient {
    source: FiniteMonoid,
    class_of: Vec<usize>,
    quotient: FiniteMonoid,
}

impl CongruenceQuotient {
    /// Quotient by the equivalence `a ≡ b ⟺ key(a) = key(b)`, which must be a congruence.
    fn from_keys(source: &FiniteMonoid, keys: &[usize]) -> Self {
        let mut label = vec![usize::MAX; keys.iter().max().map_or(0, |&k| k + 1)];
        let mut class_of = Vec::with_capacity(source.size());
        let mut reps = Vec::new();
        for a in source.elements() {
            let k = keys[a];
            if label[k] == usize::MAX {
                label[k] = reps.len();
                reps.push(a);
            }
            class_of.push(label[k]);
        }
        let n = reps.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in &reps {
            for &b in &reps {
                table.push(class_of[source.mul(a, b)]);
            }
        }
        let quotient = FiniteMonoid::from_flat_unchecked(n, table, class_of[source.identity()]);
        debug_assert!(source
            .elements()
            .all(|a| source.elements().all(|b| class_of[source.mul(a, b)]
                == quotient.mul(class_of[a], class_of[b]))));
        CongruenceQuotient {
            source: source.clone(),
            class_of,
            quotient,
        }
    }

    pub fn identity(m: &FiniteMonoid) -> Self {
        Self::from_keys(m, &m.elements().collect::<Vec<_>>())
    }

    pub fn source(&self) -> &FiniteMonoid {
        &self.source
    }

    pub fn quotient(&self) -> &FiniteMonoid {
        &self.quotient
    }

    pub fn class_of(&self, a: Element) -> usize {
        self.class_of[a]
    }

    pub fn projection(&self) -> MonoidHom {
        MonoidHom::new(self.class_of.clone())
    }

    /// Members of each class, in class order.
    pub fn classes(&self) -> Vec<Vec<Element>> {
        let mut out = vec![Vec::new(); self.quotient.size()];
        for a in self.source.elements() {
            out[self.class_of[a]].push(a);
        }
        out
    }

    /// `self` followed by a quotient of `self.quotient()`.
    pub fn then(&self, next: &CongruenceQuotient) -> CongruenceQuotient {
        assert_eq!(next.source, self.quotient, "quotients do not compose");
        let keys: Vec<usize> = self.class_of.iter().map(|&c| next.class_of[c]).collect();
        Self::from_keys(&self.source, &keys)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// The smallest congruence containing `seeds`.
pub fn congruence_closure(m: &FiniteMonoid, seeds: &[(Element, Element)]) -> CongruenceQuotient {
    let mut uf = UnionFind::new(m.size());
    let mut pending: Vec<(Element, Element)> = Vec::new();
    for &(a, b) in seeds {
        if uf.union(a, b) {
            pending.push((a, b));
        }
    }
    // Each merge of a with b forces ca ≡ cb and ac ≡ bc; merges are propagated until stable.
    while let Some((a, b)) = pending.pop() {
        for c in m.elements() {
            for (x, y) in [(m.mul(c, a), m.mul(c, b)), (m.mul(a, c), m.mul(b, c))] {
                if uf.union(x, y) {
                    pending.push((x, y));
                }
            }
        }
    }
    let keys: Vec<usize> = m.elements().map(|a| uf.find(a)).collect();
    CongruenceQuotient::from_keys(m, &keys)
}

/// The largest commutative quotient: the congruence generated by all `(ab, ba)`.
pub fn abelianization(m: &FiniteMonoid) -> CongruenceQuotient {
    let seeds: Vec<_> = m
        .elements()
        .flat_map(|a| m.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| a < b)
        .map(|(a, b)| (m.mul(a, b), m.mul(b, a)))
        .collect();
    congruence_closure(m, &seeds)
}

/// The retraction `a ↦ a·d_a` onto the regular part, as a quotient.
pub fn regular_retract(m: &FiniteMonoid) -> Result<CongruenceQuotient> {
    let dagger = m.pi_dagger()?;
    Ok(CongruenceQuotient::from_keys(m, dagger.images()))
}

/// The universal commutative completely regular quotient, computed as the regular
/// retract of the abelianization.
pub fn ab_reg(m: &FiniteMonoid) -> CongruenceQuotient {
    let ab = abelianization(m);
    let retract = regular_retract(ab.quotient()).expect("abelianization is commutative");
    ab.then(&retract)
}

/// Checks that every homomorphism from the source into each target factors uniquely
/// through the projection.
pub fn verify_universal_property(q: &CongruenceQuotient, targets: &[FiniteMonoid]) -> Result<bool> {
    if let Some(_bad) = targets
        .iter()
        .find(|t| !t.is_commutative() || !t.is_completely_regular())
    {
        return Err(Error::TargetNotRegularCommutative);
    }
    let classes = q.classes();
    for t in targets {
        for f in enumerate_homs(q.source(), t) {
            // Existence: f is constant on classes and the induced map is a homomorphism.
            if classes
                .iter()
                .any(|cls| cls.iter().any(|&a| f.apply(a) != f.apply(cls[0])))
            {
                return Ok(false);
            }
            let induced = MonoidHom::new(classes.iter().map(|cls| f.apply(cls[0])).collect());
            if !induced.is_hom(q.quotient(), t) {
                return Ok(false);
            }
            // Uniqueness is forced by surjectivity of the projection, which holds by construction.
        }
    }
    Ok(true)
}

/// Whether the projected generators generate the quotient.
pub fn images_generate(q: &CongruenceQuotient, generators: &Subset) -> bool {
    let image = q.projection().apply_set(generators, q.quotient().size());
    q.quotient().generates(&image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtins;

    #[test]
    fn commutative_abelianization_is_identity() {
        let z4 = builtins::cyclic(4);
        let q = abelianization(&z4);
        assert_eq!(q.quotient(), &z4);
        assert_eq!(q, CongruenceQuotient::identity(&z4));
    }

    #[test]
    fn flipflop_abelianization() {
        let q = abelianization(&builtins::flipflop1());
        assert_eq!(q.quotient().size(), 2);
        assert!(q.quotient().is_commutative());
        assert_eq!(q.class_of(1), q.class_of(2));
    }

    #[test]
    fn truncated_free_abelianization() {
        let q = abelianization(&builtins::truncated_free2());
        // ab = 4, ba = 5.
        assert_eq!(q.class_of(4), q.class_of(5));
        assert_ne!(q.class_of(3), q.class_of(4));
        assert_eq!(q.quotient().size(), 7);
    }

    #[test]
    fn regular_retract_examples() {
        let nil = builtins::nilpotent(2);
        let q = regular_retract(&nil).unwrap();
        assert_eq!(q.quotient().size(), 2);
        assert_eq!(q.class_of(1), q.class_of(2));
        let z3 = builtins::cyclic(3);
        assert_eq!(regular_retract(&z3).unwrap(), CongruenceQuotient::identity(&z3));
        assert!(regular_retract(&builtins::flipflop1()).is_err());
    }

    #[test]
    fn ab_reg_examples() {
        let m = builtins::monogenic(2, 1);
        let q = ab_reg(&m);
        assert!(q.quotient().is_semilattice());
        assert_eq!(q.quotient().size(), 2);
        assert_eq!(q.class_of(1), q.class_of(2));

        let ff = ab_reg(&builtins::flipflop1());
        assert!(ff.quotient().is_commutative() && ff.quotient().is_completely_regular());

        let targets: Vec<_> = crate::algebra::sweep::commutative_regular_monoids_up_to(3);
        assert!(verify_universal_property(&ff, &targets).unwrap());
        assert!(verify_universal_property(&q, &targets).unwrap());
    }

    #[test]
    fn wrong_quotient_fails() {
        let z3 = builtins::cyclic(3);
        let wrong = CongruenceQuotient::from_keys(&z3, z3.pi_idempotent().unwrap().images());
        assert!(!verify_universal_property(&wrong, std::slice::from_ref(&z3)).unwrap());
        assert_eq!(
            verify_universal_property(&wrong, &[builtins::nilpotent(2)]),
            Err(Error::TargetNotRegularCommutative)
        );
    }

    #[test]
    fn generator_images_generate() {
        let m = builtins::truncated_free2();
        let q = ab_reg(&m);
        assert!(images_generate(&q, &Subset::from_elements(8, [1, 2])));
    }
}
