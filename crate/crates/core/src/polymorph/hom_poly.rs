use std::collections::BTreeSet;

use crate::algebra::{Element, FiniteMonoid};
use crate::classifier::{images_commute, is_commutative_regular_set, TemplateHom};
use crate::cosets::{tuple_setprod, Tuple};
use crate::csp::{FiniteTemplate, Template};
use crate::error::{Error, Result};
use crate::regularize::NFElement;

/// A polymorphism `M^n → N` given by component homomorphisms `f₁, …, f_n: M → N` with
/// pairwise commuting images; it maps `(x₁, …, x_n)` to `f₁(x₁)⋯f_n(x_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomPolymorphism {
    components: Vec<TemplateHom>,
}

impl HomPolymorphism {
    /// Fails with `NonCommutingImages` if two distinct components have non-commuting images.
    pub fn new(components: Vec<TemplateHom>, target: &FiniteMonoid) -> Result<Self> {
        let images: Vec<_> = components.iter().map(|c| c.image(target)).collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if !images_commute(target, &images[i], &images[j]) {
                    return Err(Error::NonCommutingImages);
                }
            }
        }
        Ok(HomPolymorphism { components })
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[TemplateHom] {
        &self.components
    }

    pub fn evaluate(&self, target: &FiniteMonoid, args: &[Element]) -> Result<Element> {
        check_args(self.arity(), args.len())?;
        let mut acc = target.identity();
        for (c, &a) in self.components.iter().zip(args) {
            acc = target.mul(acc, c.apply_finite(a)?);
        }
        Ok(acc)
    }

    pub fn evaluate_nf(&self, target: &FiniteMonoid, args: &[NFElement]) -> Result<Element> {
        check_args(self.arity(), args.len())?;
        let mut acc = target.identity();
        for (c, a) in self.components.iter().zip(args) {
            acc = target.mul(acc, c.apply_nf(target, a)?);
        }
        Ok(acc)
    }

    /// The full table over `M^n` (big-endian base `|M|` indices), for finite carriers.
    pub fn table(&self, source: &FiniteMonoid, target: &FiniteMonoid, cap: usize) -> Result<Vec<Element>> {
        let n = self.arity();
        let size = source
            .size()
            .checked_pow(n as u32)
            .filter(|&s| s <= cap)
            .ok_or(Error::PowerTooLarge {
                size: source.size().saturating_pow(n as u32),
                cap,
            })?;
        let mut out = Vec::with_capacity(size);
        crate::algebra::for_each_tuple(source.size(), n, |args| {
            out.push(self.evaluate(target, args));
        });
        out.into_iter().collect()
    }
}

fn check_args(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}

/// Whether `f` maps `(R^M)^n` into `R^N`. The image is `f₁(R) ⊗ ⋯ ⊗ f_n(R)`, computed
/// componentwise; for normal-form carriers each `fᵢ(R)` is the finite image of the blocks.
/// Components must be homomorphisms of the right carrier.
pub fn is_polymorphism(f: &HomPolymorphism, rel_m: &Template, rel_n: &FiniteTemplate) -> Result<bool> {
    if rel_m.arity() != rel_n.arity() {
        return Err(Error::ArityMismatch {
            expected: rel_n.arity(),
            found: rel_m.arity(),
        });
    }
    let n = rel_n.monoid();
    if let Template::Finite(t) = rel_m {
        for c in f.components() {
            match c {
                TemplateHom::Finite(h) if h.is_hom(t.monoid(), n) => {}
                _ => return Ok(false),
            }
        }
    }
    let mut acc = BTreeSet::from([vec![n.identity(); rel_n.arity()]]);
    for c in f.components() {
        acc = tuple_setprod(n, &acc, &c.relation_image(rel_m, n)?);
    }
    Ok(acc.iter().all(|t| rel_n.contains(t)))
}

/// Whether an explicit table over `M^n` is a monoid homomorphism `M^n → N` preserving the
/// relations.
pub fn is_polymorphism_table(
    rel_m: &FiniteTemplate,
    rel_n: &FiniteTemplate,
    arity: usize,
    table: &[Element],
) -> Result<bool> {
    if rel_m.arity() != rel_n.arity() {
        return Err(Error::ArityMismatch {
            expected: rel_n.arity(),
            found: rel_m.arity(),
        });
    }
    let (m, n) = (rel_m.monoid(), rel_n.monoid());
    let power = crate::algebra::CartesianPower::new(m, arity);
    if power.size() != Some(table.len()) || table.iter().any(|&b| b >= n.size()) {
        return Ok(false);
    }
    if table[power.encode(&power.identity())] != n.identity() {
        return Ok(false);
    }
    for x in 0..table.len() {
        let xs = power.decode(x);
        for y in 0..table.len() {
            let xy = power.encode(&power.mul(&xs, &power.decode(y)));
            if table[xy] != n.mul(table[x], table[y]) {
                return Ok(false);
            }
        }
    }
    Ok(preserves_relation(rel_m, rel_n, arity, table))
}

/// Relation check for a table over `M^n`: every choice of `n` tuples of `R^M` maps into `R^N`.
pub(crate) fn preserves_relation(rel_m: &FiniteTemplate, rel_n: &FiniteTemplate, arity: usize, table: &[Element]) -> bool {
    let m = rel_m.monoid();
    let rows: Vec<&Vec<Element>> = rel_m.tuples().iter().collect();
    let r = rel_m.arity();
    let mut ok = true;
    crate::algebra::for_each_tuple(rows.len(), arity, |choice| {
        if !ok {
            return;
        }
        let image: Vec<Element> = (0..r)
            .map(|j| {
                let column: Vec<Element> = choice.iter().map(|&k| rows[k][j]).collect();
                table[crate::algebra::encode_tuple(m.size(), &column)]
            })
            .collect();
        ok = rel_n.contains(&image);
    });
    ok
}

/// The minor `f^σ` for `σ: [n] → [m]`: component `i` is `∏_{σ(j) = i} f_j` (the identity
/// homomorphism when the preimage is empty), so `f^σ(a) = f(a_σ(1), …, a_σ(n))`.
pub fn minor(
    f: &HomPolymorphism,
    sigma: &[usize],
    m: usize,
    source: &Template,
    target: &FiniteMonoid,
) -> Result<HomPolymorphism> {
    check_args(f.arity(), sigma.len())?;
    if let Some(&bad) = sigma.iter().find(|&&s| s >= m) {
        return Err(Error::Validation(format!("minor map sends a coordinate to {bad} >= {m}")));
    }
    let mut components = vec![TemplateHom::trivial(source, target); m];
    for (j, &i) in sigma.iter().enumerate() {
        components[i] = components[i].pointwise_product(&f.components[j], target)?;
    }
    HomPolymorphism::new(components, target)
}

/// The unary minor `a ↦ f(a, …, a)`.
pub fn unary_minor(f: &HomPolymorphism, source: &Template, target: &FiniteMonoid) -> Result<HomPolymorphism> {
    minor(f, &vec![0; f.arity()], 1, source, target)
}

/// The 2-block symmetric polymorphism
/// `(a₁, …, a_{i+1}, b₁, …, b_i) ↦ ∏ h(a_j) · ∏ h(b_j)⁻¹` of arity `2i + 1`.
pub fn block_symmetric_from_witness(h: &TemplateHom, target: &FiniteMonoid, i: usize) -> Result<HomPolymorphism> {
    if !is_commutative_regular_set(target, &h.image(target)) {
        return Err(Error::WitnessInvalid(
            "image is not a commutative completely regular submonoid".into(),
        ));
    }
    let inv = h.inverted(target)?;
    let mut components = vec![h.clone(); i + 1];
    components.extend(std::iter::repeat_n(inv, i));
    HomPolymorphism::new(components, target)
}

/// Searches a 2-block symmetric polymorphism of arity `2i + 1` whose components are `g₁`
/// on the first `i + 1` coordinates and `g₂` on the rest; pairs are tried in lexicographic
/// order of the homomorphism list.
pub fn find_block_symmetric(
    rel_m: &Template,
    rel_n: &FiniteTemplate,
    i: usize,
    cap: usize,
) -> Result<Option<HomPolymorphism>> {
    let n = rel_n.monoid();
    let homs = TemplateHom::enumerate(rel_m, n);
    if homs.len() > cap {
        return Err(Error::SearchCapExceeded { size: homs.len(), cap });
    }
    let images: Vec<_> = homs.iter().map(|h| h.image(n)).collect();
    let self_commuting: Vec<bool> = images.iter().map(|s| images_commute(n, s, s)).collect();
    let rels: Vec<BTreeSet<Tuple>> = homs
        .iter()
        .map(|h| h.relation_image(rel_m, n))
        .collect::<Result<_>>()?;
    let power = |rel: &BTreeSet<Tuple>, k: usize| {
        let mut acc = BTreeSet::from([vec![n.identity(); rel_n.arity()]]);
        for _ in 0..k {
            acc = tuple_setprod(n, &acc, rel);
        }
        acc
    };
    let first_powers: Vec<BTreeSet<Tuple>> = rels.iter().map(|r| power(r, i + 1)).collect();
    for (a, g1) in homs.iter().enumerate() {
        if i == 0 {
            if first_powers[a].iter().all(|t| rel_n.contains(t)) {
                return Ok(Some(HomPolymorphism::new(vec![g1.clone()], n)?));
            }
            continue;
        }
        if !self_commuting[a] {
            continue;
        }
        for (b, g2) in homs.iter().enumerate() {
            if (i >= 2 && !self_commuting[b]) || !images_commute(n, &images[a], &images[b]) {
                continue;
            }
            let all = tuple_setprod(n, &first_powers[a], &power(&rels[b], i));
            if all.iter().all(|t| rel_n.contains(t)) {
                let mut components = vec![g1.clone(); i + 1];
                components.extend(std::iter::repeat_n(g2.clone(), i));
                return Ok(Some(HomPolymorphism::new(components, n)?));
            }
        }
    }
    Ok(None)
}

/// Maximal classes of coordinates with equal components, ordered by first coordinate.
pub fn constant_sets(f: &HomPolymorphism) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (j, c) in f.components.iter().enumerate() {
        match classes.iter_mut().find(|cl| f.components[cl[0]] == *c) {
            Some(cl) => cl.push(j),
            None => classes.push(vec![j]),
        }
    }
    classes
}

/// Coordinates lying in a constant set of size smaller than `k`.
pub fn selection_set(f: &HomPolymorphism, k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = constant_sets(f).into_iter().filter(|c| c.len() < k).flatten().collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtins, enumerate_homs, for_each_tuple, MonoidHom};
    use crate::classifier::classify;
    use crate::csp::tuples_where;

    fn z(n: usize) -> FiniteMonoid {
        builtins::cyclic(n)
    }

    fn fin(h: Vec<Element>) -> TemplateHom {
        TemplateHom::Finite(MonoidHom::new(h))
    }

    #[test]
    fn noncommuting_components_rejected() {
        let ff = builtins::flipflop1();
        let id = fin(ff.elements().collect());
        assert_eq!(
            HomPolymorphism::new(vec![id.clone(), id.clone()], &ff),
            Err(Error::NonCommutingImages)
        );
        assert!(HomPolymorphism::new(vec![id], &ff).is_ok());
    }

    #[test]
    fn block_symmetric_formula_on_z2() {
        let z2 = z(2);
        let t = FiniteTemplate::new(z2.clone(), 1, vec![vec![0]]).unwrap();
        let h = fin(vec![0, 1]);
        for i in 0..3 {
            let f = block_symmetric_from_witness(&h, &z2, i).unwrap();
            assert_eq!(f.arity(), 2 * i + 1);
            for_each_tuple(2, 2 * i + 1, |args| {
                let (a, b) = args.split_at(i + 1);
                let expected = (a.iter().sum::<usize>() + 2 * b.len() - b.iter().sum::<usize>()) % 2;
                assert_eq!(f.evaluate(&z2, args).unwrap(), expected);
            });
            assert!(is_polymorphism(&f, &Template::Finite(t.clone()), &t).unwrap());
        }
        assert_eq!(block_symmetric_from_witness(&h, &z2, 0).unwrap().components(), &[h]);
    }

    #[test]
    fn witness_must_be_regular() {
        let nil = builtins::nilpotent(2);
        assert!(matches!(
            block_symmetric_from_witness(&fin(vec![0, 1, 2]), &nil, 1),
            Err(Error::WitnessInvalid(_))
        ));
    }

    #[test]
    fn intro_witness_polymorphism() {
        let mut text = String::from("integers\nrel 3\n");
        for off in ["0 0 1", "0 1 0", "1 0 0"] {
            text += &format!("block 0 0 0\noffset {off}\ngen 1 1 1\n");
        }
        let m = Template::parse(&text).unwrap();
        let n3 = FiniteTemplate::new(z(3), 3, tuples_where(3, 3, |t| !(t[0] == t[1] && t[1] == t[2]))).unwrap();
        let c = classify(&m, &n3).unwrap();
        let f = block_symmetric_from_witness(c.witness.as_ref().unwrap(), &z(3), 1).unwrap();
        assert!(is_polymorphism(&f, &m, &n3).unwrap());
        // Three copies of the witness (no inverse block) are not a polymorphism.
        let h = c.witness.unwrap();
        let bad = HomPolymorphism::new(vec![h.clone(), h.clone(), h], &z(3)).unwrap();
        assert!(!is_polymorphism(&bad, &m, &n3).unwrap());
        assert!(find_block_symmetric(&m, &n3, 2, 100).unwrap().is_some());
    }

    #[test]
    fn sum_on_sum_one_triples() {
        // Sum of three tuples with sum ≡ 1 has sum ≡ 0: not a polymorphism of {sum ≡ 1}.
        let t = FiniteTemplate::new(z(3), 3, tuples_where(3, 3, |t| t.iter().sum::<usize>() % 3 == 1)).unwrap();
        let id = fin(vec![0, 1, 2]);
        let sum3 = HomPolymorphism::new(vec![id.clone(); 3], &z(3)).unwrap();
        assert!(!is_polymorphism(&sum3, &Template::Finite(t.clone()), &t).unwrap());
        let table = sum3.table(&z(3), &z(3), 1000).unwrap();
        assert!(!is_polymorphism_table(&t, &t, 3, &table).unwrap());
        let alt = block_symmetric_from_witness(&id, &z(3), 1).unwrap();
        let table = alt.table(&z(3), &z(3), 1000).unwrap();
        assert!(is_polymorphism_table(&t, &t, 3, &table).unwrap());
        assert!(is_polymorphism(&alt, &Template::Finite(t.clone()), &t).unwrap());
    }

    #[test]
    fn minors_match_tables() {
        let z4 = z(4);
        let src = Template::Finite(FiniteTemplate::new(z4.clone(), 1, vec![vec![0]]).unwrap());
        let homs: Vec<TemplateHom> = enumerate_homs(&z4, &z4).into_iter().map(TemplateHom::Finite).collect();
        let f = HomPolymorphism::new(vec![homs[1].clone(), homs[3].clone(), homs[2].clone()], &z4).unwrap();
        let ft = f.table(&z4, &z4, 1000).unwrap();
        for sigma in [[0, 1, 2], [0, 0, 1], [1, 0, 1], [0, 0, 0], [2, 1, 0]] {
            let m = sigma.iter().max().unwrap() + 1;
            let g = minor(&f, &sigma, m, &src, &z4).unwrap();
            let gt = g.table(&z4, &z4, 1000).unwrap();
            for_each_tuple(4, m, |b| {
                let a: Vec<Element> = sigma.iter().map(|&s| b[s]).collect();
                assert_eq!(gt[crate::algebra::encode_tuple(4, b)], ft[crate::algebra::encode_tuple(4, &a)]);
            });
        }
        assert_eq!(minor(&f, &[0, 1, 2], 3, &src, &z4).unwrap(), f);
        let u = unary_minor(&f, &src, &z4).unwrap();
        assert_eq!(u.evaluate(&z4, &[1]).unwrap(), f.evaluate(&z4, &[1, 1, 1]).unwrap());
    }

    #[test]
    fn constant_and_selection_sets() {
        let z2 = z(2);
        let (id, triv) = (fin(vec![0, 1]), fin(vec![0, 0]));
        let f = HomPolymorphism::new(vec![id.clone(), triv.clone(), id.clone(), id.clone(), triv], &z2).unwrap();
        assert_eq!(constant_sets(&f), vec![vec![0, 2, 3], vec![1, 4]]);
        assert_eq!(selection_set(&f, 3), vec![1, 4]);
        assert_eq!(selection_set(&f, 2), Vec::<usize>::new());
        let g = HomPolymorphism::new(vec![id.clone(); 4], &z2).unwrap();
        assert!(selection_set(&g, 4).is_empty());
        let h = HomPolymorphism::new(vec![id, fin(vec![0, 0])], &z2).unwrap();
        assert_eq!(selection_set(&h, 2), vec![0, 1]);
    }

    #[test]
    fn trivial_target_always_has_block_symmetric() {
        let t = FiniteTemplate::new(builtins::trivial(), 1, vec![vec![0]]).unwrap();
        for m in [z(2), builtins::chain(3), builtins::flipflop1()] {
            let src = Template::Finite(FiniteTemplate::new(m.clone(), 1, vec![vec![1]]).unwrap());
            for i in 1..=3 {
                assert!(find_block_symmetric(&src, &t, i, 100).unwrap().is_some());
            }
        }
        assert!(matches!(
            find_block_symmetric(&Template::Finite(FiniteTemplate::new(z(4), 1, vec![vec![0]]).unwrap()),
                &FiniteTemplate::new(z(4), 1, vec![vec![0]]).unwrap(), 1, 2),
            Err(Error::SearchCapExceeded { .. })
        ));
    }
}
