//! Set products, coset closure and the splitting constants of finite commutative monoids.
//!
//! A coset of a commutative monoid is a regular set `U` with `U ⊗ (U⁻¹ ⊗ U) = U`;
//! `[U] = U ⊗ ⟨U⁻¹ ⊗ U⟩` is the least coset containing `U`. The empty set is treated
//! as a degenerate coset with `[∅] = ∅`.

use std::collections::{BTreeSet, HashMap};

use crate::algebra::{Element, FiniteMonoid, Subset};
use crate::error::{Error, Result};

/// A coset of a commutative monoid, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coset {
    members: Subset,
}

impl Coset {
    pub fn members(&self) -> &Subset {
        &self.members
    }

    pub fn into_members(self) -> Subset {
        self.members
    }
}

/// `U ⊗ V = {st : s ∈ U, t ∈ V}`.
pub fn setprod(m: &FiniteMonoid, u: &Subset, v: &Subset) -> Subset {
    let vs: Vec<_> = v.iter().collect();
    let mut out = Subset::empty(m.size());
    for s in u.iter() {
        for &t in &vs {
            out.insert(m.mul(s, t));
        }
    }
    out
}

/// The `n`-fold product `U^⊗n`, `n ≥ 1`.
pub fn tensor_power(m: &FiniteMonoid, u: &Subset, n: usize) -> Subset {
    assert!(n >= 1, "tensor power exponent must be positive");
    let mut acc = u.clone();
    for _ in 1..n {
        acc = setprod(m, &acc, u);
    }
    acc
}

/// `U⁻¹`, elementwise inverses of a regular set.
pub fn inverse_set(m: &FiniteMonoid, u: &Subset) -> Result<Subset> {
    let mut out = Subset::empty(m.size());
    for a in u.iter() {
        out.insert(m.inverse(a)?);
    }
    Ok(out)
}

/// `U_† = {a·d_a : a ∈ U}`.
pub fn dagger_set(m: &FiniteMonoid, u: &Subset) -> Subset {
    Subset::from_elements(m.size(), u.iter().map(|a| m.dagger(a)))
}

/// `[U] = U ⊗ ⟨U⁻¹ ⊗ U⟩` for a regular subset of a commutative monoid.
pub fn coset_closure(m: &FiniteMonoid, u: &Subset) -> Result<Coset> {
    m.require_commutative()?;
    let closure = closure_unchecked(m, u)?;
    debug_assert!(satisfies_coset_equation(m, &closure));
    Ok(Coset { members: closure })
}

/// Closure without the commutativity check; used on submonoids known to be commutative
/// (images of homomorphisms, regular parts).
pub(crate) fn closure_unchecked(m: &FiniteMonoid, u: &Subset) -> Result<Subset> {
    if u.is_empty() {
        return Ok(u.clone());
    }
    let inv = inverse_set(m, u)?;
    let generators = setprod(m, &inv, u);
    let sub = m.generated_submonoid(&generators);
    Ok(setprod(m, u, &sub))
}

fn satisfies_coset_equation(m: &FiniteMonoid, u: &Subset) -> bool {
    match inverse_set(m, u) {
        Ok(inv) => setprod(m, u, &setprod(m, &inv, u)) == *u,
        Err(_) => false,
    }
}

/// Whether `U` is regular and `U ⊗ (U⁻¹ ⊗ U) = U`.
pub fn is_coset(m: &FiniteMonoid, u: &Subset) -> bool {
    u.is_empty() || (m.is_regular_set(u) && satisfies_coset_equation(m, u))
}

/// Every coset of `m`, in increasing order of their member lists.
///
/// Uses that `[·]` is a closure operator: `[C ∪ {x}]` over cosets `C` and regular `x`
/// reaches every coset from `∅`.
pub fn all_cosets(m: &FiniteMonoid) -> Result<Vec<Subset>> {
    m.require_commutative()?;
    let regular: Vec<_> = m.elements().filter(|&a| m.in_subgroup(a)).collect();
    let mut seen: BTreeSet<Subset> = BTreeSet::new();
    let empty = Subset::empty(m.size());
    seen.insert(empty.clone());
    let mut frontier = vec![empty];
    while let Some(c) = frontier.pop() {
        for &x in &regular {
            if c.contains(x) {
                continue;
            }
            let mut grown = c.clone();
            grown.insert(x);
            let next = closure_unchecked(m, &grown)?;
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    let mut out: Vec<Subset> = seen.into_iter().collect();
    out.sort_by_key(|s| s.to_vec());
    Ok(out)
}

fn require_commutative_regular(m: &FiniteMonoid) -> Result<()> {
    m.require_commutative()?;
    match m.elements().find(|&a| !m.in_subgroup(a)) {
        Some(a) => Err(Error::NotRegular(a)),
        None => Ok(()),
    }
}

/// Least `n₀` such that `[R]^⊗n = R^⊗n` for every non-empty `R` and every `n ≥ n₀`.
///
/// For each `R` the pair `(R^⊗n, [R]^⊗n)` is iterated until it repeats, which determines
/// the whole tail of the sequence exactly.
pub fn splitting_index(m: &FiniteMonoid) -> Result<usize> {
    require_commutative_regular(m)?;
    let mut overall = 1;
    for r in Subset::all_nonempty(m.size()) {
        let closed = closure_unchecked(m, &r)?;
        let mut seen: HashMap<(Subset, Subset), usize> = HashMap::new();
        let mut equal: Vec<bool> = Vec::new();
        let (mut plain, mut full) = (r.clone(), closed.clone());
        let mut n = 1;
        let cycle_start = loop {
            if let Some(&start) = seen.get(&(plain.clone(), full.clone())) {
                break start;
            }
            seen.insert((plain.clone(), full.clone()), n);
            equal.push(plain == full);
            plain = setprod(m, &plain, &r);
            full = setprod(m, &full, &closed);
            n += 1;
        };
        // equal[i] is the status at exponent i + 1; exponents ≥ cycle_start repeat.
        if !equal[cycle_start - 1..].iter().all(|&e| e) {
            return Err(Error::Validation(format!(
                "splitting never stabilizes for R = {r}; monoid is not commutative regular"
            )));
        }
        let mut n0 = cycle_start;
        while n0 > 1 && equal[n0 - 2] {
            n0 -= 1;
        }
        overall = overall.max(n0);
    }
    Ok(overall)
}

/// The regular part `M_†` as a monoid, with its embedding into `m`.
pub fn regular_part(m: &FiniteMonoid) -> Result<(FiniteMonoid, Vec<usize>)> {
    m.require_commutative()?;
    let members = Subset::from_elements(m.size(), m.elements().map(|a| m.dagger(a)));
    m.submonoid(&members)
}

/// `K = max(L(M_†), 2·k·|M|)` with `k` the idempotent constant of `M`.
pub fn dagger_splitting_bound(m: &FiniteMonoid) -> Result<usize> {
    let (regular, _) = regular_part(m)?;
    let l = splitting_index(&regular)?;
    Ok(l.max(2 * m.idempotent_constant() * m.size()))
}

/// Checks `[R_†]^⊗n ⊆ R^⊗n` for every non-empty `R` and every `k_min ≤ n ≤ n_max`.
pub fn verify_dagger_splitting(m: &FiniteMonoid, k_min: usize, n_max: usize) -> Result<bool> {
    m.require_commutative()?;
    for r in Subset::all_nonempty(m.size()) {
        let closed = closure_unchecked(m, &dagger_set(m, &r))?;
        let (mut plain, mut full) = (r.clone(), closed.clone());
        for n in 1..=n_max {
            if n >= k_min && !full.is_subset(&plain) {
                return Ok(false);
            }
            plain = setprod(m, &plain, &r);
            full = setprod(m, &full, &closed);
        }
    }
    Ok(true)
}

/// A tuple of elements, i.e. an element of a direct power `M^r`.
pub type Tuple = Vec<Element>;

pub fn tuple_mul(m: &FiniteMonoid, a: &[Element], b: &[Element]) -> Tuple {
    a.iter().zip(b).map(|(&x, &y)| m.mul(x, y)).collect()
}

/// `U ⊗ V` in `M^r`, computed componentwise without materializing the power.
pub fn tuple_setprod(m: &FiniteMonoid, u: &BTreeSet<Tuple>, v: &BTreeSet<Tuple>) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    for a in u {
        for b in v {
            out.insert(tuple_mul(m, a, b));
        }
    }
    out
}

pub fn tuple_inverse_set(m: &FiniteMonoid, u: &BTreeSet<Tuple>) -> Result<BTreeSet<Tuple>> {
    u.iter()
        .map(|t| t.iter().map(|&a| m.inverse(a)).collect::<Result<Tuple>>())
        .collect()
}

/// The submonoid of `M^r` generated by `gens`.
pub fn tuple_generated(m: &FiniteMonoid, arity: usize, gens: &BTreeSet<Tuple>) -> BTreeSet<Tuple> {
    let mut seen = BTreeSet::from([vec![m.identity(); arity]]);
    let mut frontier: Vec<Tuple> = seen.iter().cloned().collect();
    while let Some(a) = frontier.pop() {
        for g in gens {
            let b = tuple_mul(m, &a, g);
            if seen.insert(b.clone()) {
                frontier.push(b);
            }
        }
    }
    seen
}

/// `[U]` in `M^r` for a regular set of tuples whose entries commute pairwise.
pub fn tuple_coset_closure(m: &FiniteMonoid, u: &BTreeSet<Tuple>) -> Result<BTreeSet<Tuple>> {
    let Some(arity) = u.iter().next().map(Vec::len) else {
        return Ok(BTreeSet::new());
    };
    let generators = tuple_setprod(m, &tuple_inverse_set(m, u)?, u);
    Ok(tuple_setprod(m, u, &tuple_generated(m, arity, &generators)))
}

/// Whether `U ⊗ (U⁻¹ ⊗ U) = U` in `M^r` (with `U` regular).
pub fn is_tuple_coset(m: &FiniteMonoid, u: &BTreeSet<Tuple>) -> bool {
    match tuple_inverse_set(m, u) {
        Ok(inv) => u.is_empty() || tuple_setprod(m, u, &tuple_setprod(m, &inv, u)) == *u,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtins;

    fn set(n: usize, xs: &[usize]) -> Subset {
        Subset::from_elements(n, xs.iter().copied())
    }

    #[test]
    fn setprod_examples() {
        let z6 = builtins::cyclic(6);
        let u = set(6, &[1, 3]);
        assert_eq!(setprod(&z6, &set(6, &[0]), &u), u);
        assert_eq!(setprod(&z6, &set(6, &[1]), &u), set(6, &[2, 4]));
        assert!(setprod(&z6, &Subset::empty(6), &u).is_empty());
    }

    #[test]
    fn tensor_power_examples() {
        let z4 = builtins::cyclic(4);
        let u = set(4, &[0, 1]);
        assert_eq!(tensor_power(&z4, &u, 1), u);
        assert_eq!(tensor_power(&z4, &u, 2), set(4, &[0, 1, 2]));
        assert_eq!(tensor_power(&z4, &set(4, &[0]), 7), set(4, &[0]));
    }

    #[test]
    fn inverse_and_dagger_sets() {
        let z6 = builtins::cyclic(6);
        assert_eq!(inverse_set(&z6, &set(6, &[1])).unwrap(), set(6, &[5]));
        assert_eq!(dagger_set(&z6, &set(6, &[1, 4])), set(6, &[1, 4]));
        let nil = builtins::nilpotent(2);
        assert_eq!(dagger_set(&nil, &set(3, &[1])), set(3, &[2]));
        assert_eq!(inverse_set(&nil, &set(3, &[1])), Err(Error::NotRegular(1)));
    }

    #[test]
    fn closure_examples() {
        let z6 = builtins::cyclic(6);
        assert_eq!(coset_closure(&z6, &set(6, &[0])).unwrap().members(), &set(6, &[0]));
        assert_eq!(
            coset_closure(&z6, &set(6, &[1, 3])).unwrap().members(),
            &set(6, &[1, 3, 5])
        );
        let odd = set(6, &[1, 3, 5]);
        assert_eq!(coset_closure(&z6, &odd).unwrap().members(), &odd);
        assert!(matches!(
            coset_closure(&builtins::flipflop1(), &set(3, &[1])),
            Err(Error::NotCommutative(..))
        ));
        assert_eq!(
            coset_closure(&builtins::nilpotent(2), &set(3, &[1])),
            Err(Error::NotRegular(1))
        );
    }

    #[test]
    fn coset_predicate() {
        let z4 = builtins::cyclic(4);
        assert!(is_coset(&z4, &Subset::full(4)));
        assert!(!is_coset(&z4, &set(4, &[0, 1])));
        assert!(is_coset(&z4, &Subset::empty(4)));
        assert!(!is_coset(&builtins::nilpotent(2), &set(3, &[1])));
    }

    #[test]
    fn enumerated_cosets_of_z4() {
        // ∅, the four singletons, the two cosets of {0,2}, and the whole group.
        let cosets = all_cosets(&builtins::cyclic(4)).unwrap();
        assert_eq!(cosets.len(), 8);
        assert!(cosets.iter().all(|c| is_coset(&builtins::cyclic(4), c)));
    }

    #[test]
    fn splitting_index_examples() {
        assert_eq!(splitting_index(&builtins::cyclic(2)), Ok(1));
        assert_eq!(splitting_index(&builtins::chain(2)), Ok(1));
        assert_eq!(splitting_index(&builtins::cyclic(4)), Ok(3));
        assert!(splitting_index(&builtins::nilpotent(2)).is_err());
    }

    #[test]
    fn dagger_splitting_examples() {
        let t = builtins::trivial();
        let k = dagger_splitting_bound(&t).unwrap();
        assert!(verify_dagger_splitting(&t, 1, k + 2).unwrap());

        let z3 = builtins::cyclic(3);
        assert_eq!(dagger_splitting_bound(&z3), Ok(18));
        assert!(verify_dagger_splitting(&z3, 18, 20).unwrap());

        let nil = builtins::nilpotent(2);
        let k = dagger_splitting_bound(&nil).unwrap();
        assert!(verify_dagger_splitting(&nil, k, k + 2).unwrap());
    }

    #[test]
    fn dagger_splitting_fails_below_bound() {
        // R = {a} in {e, a, 0}: R^⊗1 = {a} but [R_†] = {0}.
        let nil = builtins::nilpotent(2);
        assert!(!verify_dagger_splitting(&nil, 1, 1).unwrap());
    }

    #[test]
    fn tuple_closure_matches_materialized_power() {
        // Oracle: closure inside the explicit square of Z3 × chain(2).
        let m = builtins::cyclic(3).direct_product(&builtins::chain(2));
        let sq = m.direct_product(&m);
        let n = m.size();
        for mask in [0b1u64, 0b10_0000_0010, 0b1000_0001_0000_0100, (1 << 35) | (1 << 7)] {
            let u = Subset::from_mask(n * n, mask);
            let tuples: BTreeSet<Tuple> = u.iter().map(|x| vec![x / n, x % n]).collect();
            let expected: BTreeSet<Tuple> = coset_closure(&sq, &u)
                .unwrap()
                .members()
                .iter()
                .map(|x| vec![x / n, x % n])
                .collect();
            let got = tuple_coset_closure(&m, &tuples).unwrap();
            assert_eq!(got, expected);
            assert!(is_tuple_coset(&m, &got));
        }
        assert!(tuple_coset_closure(&m, &BTreeSet::new()).unwrap().is_empty());
    }
}
