//! The tractability dichotomy for `PCSP(rel M, rel N)` with `rel N` finite.
//!
//! The problem is tractable iff some relational homomorphism `h: rel M → rel N` has a
//! commutative completely regular image with `[h(R^M)] ⊆ R^N`, and NP-hard otherwise.
//! A tractable verdict carries the witness `h` and the finite template
//! `A = (im h, [h(R^M)])`, which sits between the two sides.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{enumerate_homs, Element, FiniteMonoid, MonoidHom, Subset};
use crate::cosets::{tuple_coset_closure, tuple_generated, tuple_setprod, Tuple};
use crate::csp::{FiniteTemplate, NfTemplate, Template};
use crate::error::{Error, Result};
use crate::regularize::{ab_reg, nf_homs_to_finite, NFElement, NfHom};

/// A homomorphism from the carrier of a (finite or normal-form) template into a finite
/// monoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateHom {
    Finite(MonoidHom),
    NormalForm(NfHom),
}

impl TemplateHom {
    /// All homomorphisms from the carrier of `source` into `target`, in lexicographic order.
    pub fn enumerate(source: &Template, target: &FiniteMonoid) -> Vec<TemplateHom> {
        match source {
            Template::Finite(t) => enumerate_homs(t.monoid(), target)
                .into_iter()
                .map(TemplateHom::Finite)
                .collect(),
            Template::NormalForm(t) => nf_homs_to_finite(t.nf(), target)
                .into_iter()
                .map(TemplateHom::NormalForm)
                .collect(),
        }
    }

    /// The homomorphism sending everything to the identity.
    pub fn trivial(source: &Template, target: &FiniteMonoid) -> TemplateHom {
        let e = target.identity();
        match source {
            Template::Finite(t) => TemplateHom::Finite(MonoidHom::new(vec![e; t.monoid().size()])),
            Template::NormalForm(t) => TemplateHom::NormalForm(NfHom {
                idempotent_images: vec![e; t.nf().semilattice().size()],
                generator_images: vec![e; t.nf().coords()],
            }),
        }
    }

    pub fn image(&self, target: &FiniteMonoid) -> Subset {
        match self {
            TemplateHom::Finite(h) => h.image_set(target.size()),
            TemplateHom::NormalForm(h) => h.image(target),
        }
    }

    pub fn apply_finite(&self, a: Element) -> Result<Element> {
        match self {
            TemplateHom::Finite(h) => Ok(h.apply(a)),
            TemplateHom::NormalForm(_) => Err(Error::Unsupported("finite argument to a normal-form hom".into())),
        }
    }

    pub fn apply_nf(&self, target: &FiniteMonoid, x: &NFElement) -> Result<Element> {
        match self {
            TemplateHom::NormalForm(h) => Ok(h.apply(target, x)),
            TemplateHom::Finite(_) => Err(Error::Unsupported("normal-form argument to a finite hom".into())),
        }
    }

    /// `h(R^M)`. For normal-form carriers every block `o + L` maps to the finite set
    /// `{h(o)} ⊗ ⟨h(u), h(−u) : u ∈ basis L⟩`.
    pub fn relation_image(&self, source: &Template, target: &FiniteMonoid) -> Result<BTreeSet<Tuple>> {
        match (self, source) {
            (TemplateHom::Finite(h), Template::Finite(t)) => {
                Ok(t.tuples().iter().map(|x| h.apply_tuple(x)).collect())
            }
            (TemplateHom::NormalForm(h), Template::NormalForm(t)) => Ok(nf_relation_image(h, t, target)),
            _ => Err(Error::Unsupported("homomorphism does not match the template carrier".into())),
        }
    }

    /// Pointwise product `x ↦ self(x)·other(x)`; a homomorphism when the images commute.
    pub fn pointwise_product(&self, other: &TemplateHom, target: &FiniteMonoid) -> Result<TemplateHom> {
        let zip = |a: &[Element], b: &[Element]| -> Vec<Element> {
            a.iter().zip(b).map(|(&x, &y)| target.mul(x, y)).collect()
        };
        match (self, other) {
            (TemplateHom::Finite(f), TemplateHom::Finite(g)) => {
                Ok(TemplateHom::Finite(MonoidHom::new(zip(f.images(), g.images()))))
            }
            (TemplateHom::NormalForm(f), TemplateHom::NormalForm(g)) => Ok(TemplateHom::NormalForm(NfHom {
                idempotent_images: zip(&f.idempotent_images, &g.idempotent_images),
                generator_images: zip(&f.generator_images, &g.generator_images),
            })),
            _ => Err(Error::Unsupported("mixed homomorphism kinds".into())),
        }
    }

    /// `x ↦ self(x)⁻¹`; requires an image inside the union of subgroups.
    pub fn inverted(&self, target: &FiniteMonoid) -> Result<TemplateHom> {
        let inv = |xs: &[Element]| xs.iter().map(|&a| target.inverse(a)).collect::<Result<Vec<_>>>();
        Ok(match self {
            TemplateHom::Finite(f) => TemplateHom::Finite(MonoidHom::new(inv(f.images())?)),
            TemplateHom::NormalForm(f) => TemplateHom::NormalForm(NfHom {
                idempotent_images: inv(&f.idempotent_images)?,
                generator_images: inv(&f.generator_images)?,
            }),
        })
    }

    /// Whether every element of the image commutes with every element of `other`'s image.
    pub fn commutes_with(&self, other: &TemplateHom, target: &FiniteMonoid) -> bool {
        images_commute(target, &self.image(target), &other.image(target))
    }
}

impl fmt::Display for TemplateHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Element]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        match self {
            TemplateHom::Finite(h) => write!(f, "images {}", join(h.images())),
            TemplateHom::NormalForm(h) => write!(
                f,
                "idempotents {} ; generators {}",
                join(&h.idempotent_images),
                join(&h.generator_images)
            ),
        }
    }
}

pub(crate) fn images_commute(m: &FiniteMonoid, a: &Subset, b: &Subset) -> bool {
    a.iter().all(|x| b.iter().all(|y| m.mul(x, y) == m.mul(y, x)))
}

fn nf_relation_image(h: &NfHom, t: &NfTemplate, target: &FiniteMonoid) -> BTreeSet<Tuple> {
    let q = t.nf().coords();
    let image_of = |ds: &[Element], w: &[num_bigint::BigInt]| -> Tuple {
        ds.iter()
            .enumerate()
            .map(|(i, &d)| {
                h.apply(
                    target,
                    &NFElement {
                        d,
                        v: w[i * q..(i + 1) * q].to_vec(),
                    },
                )
            })
            .collect()
    };
    let mut out = BTreeSet::new();
    for block in t.blocks() {
        let coset = block.coset();
        let mut gens = BTreeSet::new();
        for u in coset.lattice().basis() {
            if u.iter().all(Zero::is_zero) {
                continue;
            }
            gens.insert(image_of(block.ds(), u));
            let neg: Vec<_> = u.iter().map(|x| -x).collect();
            gens.insert(image_of(block.ds(), &neg));
        }
        let offset = BTreeSet::from([image_of(block.ds(), coset.offset())]);
        out.extend(tuple_setprod(target, &offset, &tuple_generated(target, t.arity(), &gens)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Tractable,
    NpHard,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Tractable => "TRACTABLE",
            Verdict::NpHard => "NP-HARD",
        })
    }
}

/// The finite template `A = (im h, [h(R^M)])`, with `embedding[a]` the element of `N`
/// that `a ∈ A` stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sandwich {
    pub template: FiniteTemplate,
    pub embedding: Vec<Element>,
}

impl Sandwich {
    /// The element of `A` standing for `b ∈ N`, if any.
    pub fn pull_back(&self, b: Element) -> Option<Element> {
        self.embedding.iter().position(|&x| x == b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: Option<TemplateHom>,
    pub sandwich: Option<Sandwich>,
    /// Number of relational homomorphisms `rel M → rel N` examined.
    pub candidates: usize,
}

impl Classification {
    pub fn is_tractable(&self) -> bool {
        self.verdict == Verdict::Tractable
    }
}

/// Whether a subset of `m` is a commutative completely regular submonoid's carrier.
pub(crate) fn is_commutative_regular_set(m: &FiniteMonoid, s: &Subset) -> bool {
    images_commute(m, s, s) && s.iter().all(|a| m.in_subgroup(a))
}

/// Checks the tractability condition for one relational homomorphism; returns the closure
/// `[h(R^M)]` when it holds.
fn witness_closure(
    h: &TemplateHom,
    relation_image: &BTreeSet<Tuple>,
    rel_n: &FiniteTemplate,
) -> Result<Option<BTreeSet<Tuple>>> {
    let n = rel_n.monoid();
    if !is_commutative_regular_set(n, &h.image(n)) {
        return Ok(None);
    }
    let closure = tuple_coset_closure(n, relation_image)?;
    Ok(closure.iter().all(|t| rel_n.contains(t)).then_some(closure))
}

fn build_sandwich(h: &TemplateHom, closure: &BTreeSet<Tuple>, rel_n: &FiniteTemplate) -> Result<Sandwich> {
    let n = rel_n.monoid();
    let (monoid, embedding) = n.submonoid(&h.image(n))?;
    let mut back = vec![usize::MAX; n.size()];
    for (a, &b) in embedding.iter().enumerate() {
        back[b] = a;
    }
    let tuples: Vec<Vec<Element>> = closure.iter().map(|t| t.iter().map(|&b| back[b]).collect()).collect();
    Ok(Sandwich {
        template: FiniteTemplate::new(monoid, rel_n.arity(), tuples)?,
        embedding,
    })
}

/// Relational homomorphisms `rel M → rel N` with their relation images, in order.
fn relational_homs(rel_m: &Template, rel_n: &FiniteTemplate) -> Result<Vec<(TemplateHom, BTreeSet<Tuple>)>> {
    if rel_m.arity() != rel_n.arity() {
        return Err(Error::ArityMismatch {
            expected: rel_n.arity(),
            found: rel_m.arity(),
        });
    }
    let mut out = Vec::new();
    for h in TemplateHom::enumerate(rel_m, rel_n.monoid()) {
        let img = h.relation_image(rel_m, rel_n.monoid())?;
        if img.iter().all(|t| rel_n.contains(t)) {
            out.push((h, img));
        }
    }
    Ok(out)
}

/// Decides tractability; the witness is the first qualifying homomorphism in
/// lexicographic order.
pub fn classify(rel_m: &Template, rel_n: &FiniteTemplate) -> Result<Classification> {
    let homs = relational_homs(rel_m, rel_n)?;
    if homs.is_empty() {
        return Err(Error::PromiseViolation);
    }
    let candidates = homs.len();
    for (h, img) in homs {
        if let Some(closure) = witness_closure(&h, &img, rel_n)? {
            let sandwich = build_sandwich(&h, &closure, rel_n)?;
            return Ok(Classification {
                verdict: Verdict::Tractable,
                witness: Some(h),
                sandwich: Some(sandwich),
                candidates,
            });
        }
    }
    Ok(Classification {
        verdict: Verdict::NpHard,
        witness: None,
        sandwich: None,
        candidates,
    })
}

/// Decides tractability by searching homomorphisms out of the commutative regularization
/// `(M^ab-reg, [π(R^M)])` instead of out of `rel M`.
pub fn classify_via_abreg(rel_m: &FiniteTemplate, rel_n: &FiniteTemplate) -> Result<Classification> {
    let as_template = Template::Finite(rel_m.clone());
    let candidates = relational_homs(&as_template, rel_n)?.len();
    if candidates == 0 {
        return Err(Error::PromiseViolation);
    }
    let q = ab_reg(rel_m.monoid());
    let pi = q.projection();
    let reg = q.quotient();
    let projected: BTreeSet<Tuple> = rel_m.tuples().iter().map(|t| pi.apply_tuple(t)).collect();
    let closed = tuple_coset_closure(reg, &projected)?;
    for g in enumerate_homs(reg, rel_n.monoid()) {
        if closed.iter().all(|t| rel_n.contains(&g.apply_tuple(t))) {
            let h = TemplateHom::Finite(g.compose(&pi));
            let img = h.relation_image(&as_template, rel_n.monoid())?;
            let closure = witness_closure(&h, &img, rel_n)?
                .ok_or_else(|| Error::WitnessInvalid("factored homomorphism fails the coset condition".into()))?;
            let sandwich = build_sandwich(&h, &closure, rel_n)?;
            return Ok(Classification {
                verdict: Verdict::Tractable,
                witness: Some(h),
                sandwich: Some(sandwich),
                candidates,
            });
        }
    }
    Ok(Classification {
        verdict: Verdict::NpHard,
        witness: None,
        sandwich: None,
        candidates,
    })
}

/// Re-validates a tractable verdict: `h` maps `rel M` into `A`, the embedding maps `A`
/// into `rel N`, and `A`'s relation is a coset of `A^r`.
pub fn sandwich_check(c: &Classification, rel_m: &Template, rel_n: &FiniteTemplate) -> bool {
    let (Verdict::Tractable, Some(h), Some(s)) = (c.verdict, &c.witness, &c.sandwich) else {
        return false;
    };
    let n = rel_n.monoid();
    let a = s.template.monoid();
    if !crate::algebra::is_hom(a, n, &s.embedding) {
        return false;
    }
    if let (TemplateHom::Finite(f), Template::Finite(t)) = (h, rel_m) {
        if !f.is_hom(t.monoid(), n) {
            return false;
        }
    }
    let Ok(img) = h.relation_image(rel_m, n) else {
        return false;
    };
    let into_a = img.iter().all(|t| {
        let pulled: Option<Vec<Element>> = t.iter().map(|&b| s.pull_back(b)).collect();
        pulled.is_some_and(|p| s.template.contains(&p))
    });
    let into_n = s
        .template
        .tuples()
        .iter()
        .all(|t| rel_n.contains(&t.iter().map(|&x| s.embedding[x]).collect::<Vec<_>>()));
    into_a && into_n && s.template.is_coset().unwrap_or(false)
}
