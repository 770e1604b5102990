//! Reduction from the promise minor condition problem `PMC_N(rel M, rel N)` to
//! `PCSP(rel M, rel N)` for a finite left template.
//!
//! `M^N` is generated by the tuples `g^S` carrying a generator `g` of `M` on a coordinate
//! set `S` and `e` elsewhere; this family is closed under every `σ: [N] → [N]`. Each symbol
//! `x` gets one variable `x(α)` per generator `α`, constrained so that `α ↦ x(α)` extends to
//! a polymorphism `M^N → N` and the extensions satisfy the minor identities.

use std::collections::BTreeSet;

use crate::algebra::{CartesianPower, Element};
use crate::csp::{FiniteTemplate, Instance};
use crate::error::{Error, Result};

use super::minor_condition::MinorCondition;

/// A word over the generator family, as generator indices.
type Word = Vec<usize>;

/// The part of the reduction that depends only on the templates and `N`.
#[derive(Debug, Clone)]
pub struct PmcContext {
    n_arity: usize,
    generators: Vec<Vec<Element>>,
    /// Pairs of words equal in `M^N` that together rule out every non-extending map.
    relators: Vec<(Word, Word)>,
    /// For each homomorphism `M^N → N` that is not a polymorphism, the words of the
    /// `r` columns of a violating choice of relation tuples.
    relation_witnesses: Vec<Vec<Word>>,
}

impl PmcContext {
    /// Fails with `TooLarge` when `|M|^N` or the number of maps from the generator family to
    /// `N` exceeds `cap`.
    pub fn new(rel_m: &FiniteTemplate, rel_n: &FiniteTemplate, n_arity: usize, cap: usize) -> Result<Self> {
        if rel_m.arity() != rel_n.arity() {
            return Err(Error::ArityMismatch {
                expected: rel_n.arity(),
                found: rel_m.arity(),
            });
        }
        if n_arity == 0 {
            return Err(Error::Validation("PMC arity must be positive".into()));
        }
        let (m, n) = (rel_m.monoid(), rel_n.monoid());
        let power = CartesianPower::new(m, n_arity);
        let size = power.size().filter(|&s| s <= cap).ok_or_else(|| {
            Error::TooLarge(format!("|M|^{n_arity} exceeds the cap of {cap}"))
        })?;

        let mut generators: BTreeSet<Vec<Element>> = BTreeSet::from([power.identity()]);
        for g in m.minimal_generating_set() {
            for mask in 1u64..(1 << n_arity) {
                generators.insert((0..n_arity).map(|i| if mask >> i & 1 == 1 { g } else { m.identity() }).collect());
            }
        }
        let generators: Vec<Vec<Element>> = generators.into_iter().collect();
        let k = generators.len();

        // Spanning-tree words by breadth-first search from e under right multiplication.
        let mut word: Vec<Option<Word>> = vec![None; size];
        let e = power.encode(&power.identity());
        word[e] = Some(Vec::new());
        let mut queue = std::collections::VecDeque::from([e]);
        let mut order = Vec::with_capacity(size);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            let at = power.decode(a);
            for (u, g) in generators.iter().enumerate() {
                let b = power.encode(&power.mul(&at, g));
                if word[b].is_none() {
                    let mut w = word[a].clone().expect("visited");
                    w.push(u);
                    word[b] = Some(w);
                    queue.push_back(b);
                }
            }
        }
        let word: Vec<Word> = word
            .into_iter()
            .map(|w| w.ok_or_else(|| Error::Validation("generator family does not generate M^N".into())))
            .collect::<Result<_>>()?;
        let mut all_relators = Vec::new();
        for &a in &order {
            let at = power.decode(a);
            for (u, g) in generators.iter().enumerate() {
                let b = power.encode(&power.mul(&at, g));
                let mut lhs = word[a].clone();
                lhs.push(u);
                if lhs != word[b] {
                    all_relators.push((lhs, word[b].clone()));
                }
            }
        }

        let maps = n.size().checked_pow(k as u32).filter(|&c| c <= cap).ok_or_else(|| {
            Error::TooLarge(format!("|N|^{k} maps from the generator family exceed the cap of {cap}"))
        })?;
        let eval = |f: &[Element], w: &Word| n.product(w.iter().map(|&u| f[u]));
        let mut used = BTreeSet::new();
        let mut extensions: Vec<Vec<Element>> = Vec::new();
        for code in 0..maps {
            let f = crate::algebra::decode_tuple(n.size(), k, code);
            match all_relators.iter().position(|(s, t)| eval(&f, s) != eval(&f, t)) {
                Some(i) => {
                    used.insert(i);
                }
                None => extensions.push(word.iter().map(|w| eval(&f, w)).collect()),
            }
        }
        let relators = used.into_iter().map(|i| all_relators[i].clone()).collect();

        let rows: Vec<&Vec<Element>> = rel_m.tuples().iter().collect();
        let r = rel_m.arity();
        let mut relation_witnesses = BTreeSet::new();
        for h in &extensions {
            let mut found: Option<Vec<Word>> = None;
            crate::algebra::for_each_tuple(rows.len(), n_arity, |choice| {
                if found.is_some() {
                    return;
                }
                let columns: Vec<usize> = (0..r)
                    .map(|j| power.encode(&choice.iter().map(|&c| rows[c][j]).collect::<Vec<_>>()))
                    .collect();
                let image: Vec<Element> = columns.iter().map(|&c| h[c]).collect();
                if !rel_n.contains(&image) {
                    found = Some(columns.iter().map(|&c| word[c].clone()).collect());
                }
            });
            if let Some(w) = found {
                relation_witnesses.insert(w);
            }
        }

        Ok(PmcContext {
            n_arity,
            generators,
            relators,
            relation_witnesses: relation_witnesses.into_iter().collect(),
        })
    }

    pub fn generators(&self) -> &[Vec<Element>] {
        &self.generators
    }

    pub fn relators(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.relators
    }

    fn generator_index(&self, t: &[Element]) -> usize {
        self.generators
            .binary_search_by(|g| g.as_slice().cmp(t))
            .expect("generator family is closed under coordinate maps")
    }

    /// `α ↦ α∘σ` on generator indices.
    fn compose(&self, sigma: &[usize]) -> Vec<usize> {
        self.generators
            .iter()
            .map(|a| self.generator_index(&sigma.iter().map(|&s| a[s]).collect::<Vec<_>>()))
            .collect()
    }

    /// The instance for `phi`; variable `x(α)` has index `x·|U| + α`.
    pub fn reduce(&self, phi: &MinorCondition) -> Result<Instance> {
        let big_n = self.n_arity;
        if phi.max_arity() > big_n {
            return Err(Error::Validation(format!(
                "symbol arity {} exceeds the PMC arity {big_n}",
                phi.max_arity()
            )));
        }
        let k = self.generators.len();
        let mut inst = Instance::new(phi.symbols().len() * k);
        let var = |x: usize, a: usize| x * k + a;
        for x in 0..phi.symbols().len() {
            let vars = |w: &Word| w.iter().map(|&a| var(x, a)).collect::<Vec<_>>();
            for (s, t) in &self.relators {
                inst.equation(&vars(s), &vars(t));
            }
            for columns in &self.relation_witnesses {
                let xs: Vec<usize> = columns.iter().map(|w| inst.word_var(&vars(w))).collect();
                inst.relation(&xs);
            }
        }
        // Padding: a symbol of arity `a < N` ignores coordinates `a..N`.
        let mut minor_eqs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (x, s) in phi.symbols().iter().enumerate() {
            if s.arity < big_n {
                let tau: Vec<usize> = (0..big_n).map(|i| if i < s.arity { i } else { 0 }).collect();
                for (a, b) in self.compose(&tau).into_iter().enumerate() {
                    if a != b {
                        minor_eqs.insert((var(x, a), var(x, b)));
                    }
                }
            }
        }
        // f_v = f_u^φ becomes v(α) = u(α∘φ̂), with φ̂ extending φ by 0 on padded coordinates.
        for e in phi.edges() {
            let hat: Vec<usize> = (0..big_n).map(|i| e.map.get(i).copied().unwrap_or(0)).collect();
            for (a, b) in self.compose(&hat).into_iter().enumerate() {
                let (p, q) = (var(e.to, a), var(e.from, b));
                if p != q {
                    minor_eqs.insert((p, q));
                }
            }
        }
        for (p, q) in minor_eqs {
            inst.equal(p, q);
        }
        Ok(inst)
    }
}

pub fn pmc_reduce(
    phi: &MinorCondition,
    rel_m: &FiniteTemplate,
    rel_n: &FiniteTemplate,
    n_arity: usize,
    cap: usize,
) -> Result<Instance> {
    PmcContext::new(rel_m, rel_n, n_arity, cap)?.reduce(phi)
}
