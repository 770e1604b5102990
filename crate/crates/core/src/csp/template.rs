use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::instance::{Constraint, Instance};
use crate::algebra::{Element, FiniteMonoid};
use crate::error::{Error, Result};
use crate::regularize::{NFElement, NormalFormIso, NormalFormMonoid};
use crate::text::{join, read_monoid, write_monoid, Lines};
use crate::zlinalg::{vec_sub, zero_vector, IntVector, Lattice, LatticeCoset};

/// A finite monoid expanded by one relation of arity `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTemplate {
    monoid: FiniteMonoid,
    arity: usize,
    tuples: BTreeSet<Vec<Element>>,
}

impl FiniteTemplate {
    pub fn new(
        monoid: FiniteMonoid,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Element>>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Validation("relation arity must be positive".into()));
        }
        let tuples: BTreeSet<Vec<Element>> = tuples.into_iter().collect();
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&a) = t.iter().find(|&&a| a >= monoid.size()) {
                return Err(Error::Validation(format!("element {a} out of range")));
            }
        }
        Ok(FiniteTemplate {
            monoid,
            arity,
            tuples,
        })
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<Element>> {
        &self.tuples
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        self.tuples.contains(t)
    }

    /// Whether the relation is a coset of `M^r`: every member is regular and
    /// `u·v⁻¹·w ∈ R` for all `u, v, w ∈ R`. Requires a commutative monoid.
    pub fn is_coset(&self) -> Result<bool> {
        let m = &self.monoid;
        m.require_commutative()?;
        if self.tuples.iter().flatten().any(|&a| !m.is_regular_element(a)) {
            return Ok(false);
        }
        let inverses: Vec<(Vec<Element>, Vec<Element>)> = self
            .tuples
            .iter()
            .map(|t| (t.clone(), t.iter().map(|&a| m.inverse(a).expect("regular")).collect()))
            .collect();
        for (u, _) in &inverses {
            for (_, vinv) in &inverses {
                for (w, _) in &inverses {
                    let p: Vec<Element> = (0..self.arity)
                        .map(|i| m.mul(m.mul(u[i], vinv[i]), w[i]))
                        .collect();
                    if !self.tuples.contains(&p) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Whether every constraint holds under `assignment`.
    pub fn check(&self, instance: &Instance, assignment: &[Element]) -> Result<bool> {
        instance.check_arity(self.arity)?;
        check_len(instance, assignment.len())?;
        let m = &self.monoid;
        Ok(instance.constraints.iter().all(|c| match c {
            Constraint::Product(x, y, z) => m.mul(assignment[*x], assignment[*y]) == assignment[*z],
            Constraint::Identity(x) => assignment[*x] == m.identity(),
            Constraint::Relation(xs) => {
                self.contains(&xs.iter().map(|&x| assignment[x]).collect::<Vec<_>>())
            }
        }))
    }

    fn write_relation(&self, out: &mut String) {
        let _ = writeln!(out, "rel {}", self.arity);
        for t in &self.tuples {
            let _ = writeln!(out, "tuple {}", join(t));
        }
    }
}

fn check_len(instance: &Instance, len: usize) -> Result<()> {
    if len == instance.var_count {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "assignment of length {len} for {} variables",
            instance.var_count
        )))
    }
}

/// One block `{[d, u] : u ∈ offset + lattice}` of a relation over a normal-form monoid;
/// vectors are concatenations of `r` coordinate vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationBlock {
    ds: Vec<Element>,
    coset: LatticeCoset,
}

impl RelationBlock {
    pub fn ds(&self) -> &[Element] {
        &self.ds
    }

    /// The block's coset, with `Ξ(d₁) ⊕ ⋯ ⊕ Ξ(d_r)` folded into its lattice.
    pub fn coset(&self) -> &LatticeCoset {
        &self.coset
    }
}

/// A normal-form monoid expanded by a relation given as a finite union of blocks. A coset
/// relation has exactly one block per `d`-tuple that occurs; other relations may have several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NfTemplate {
    nf: NormalFormMonoid,
    arity: usize,
    blocks: BTreeMap<Vec<Element>, Vec<RelationBlock>>,
}

impl NfTemplate {
    /// Builds a template from `(d-tuple, offset, generators)` triples; duplicate blocks are
    /// dropped.
    pub fn new(
        nf: NormalFormMonoid,
        arity: usize,
        blocks: Vec<(Vec<Element>, IntVector, Vec<IntVector>)>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Validation("relation arity must be positive".into()));
        }
        let q = nf.coords();
        let dim = arity * q;
        let mut out = BTreeMap::new();
        for (ds, offset, gens) in blocks {
            if ds.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: ds.len(),
                });
            }
            if let Some(&d) = ds.iter().find(|&&d| d >= nf.semilattice().size()) {
                return Err(Error::Validation(format!("idempotent {d} out of range")));
            }
            for v in std::iter::once(&offset).chain(&gens) {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "block vector of length {}, expected {dim}",
                        v.len()
                    )));
                }
                for (i, &d) in ds.iter().enumerate() {
                    nf.element(d, v[i * q..(i + 1) * q].to_vec())?;
                }
            }
            let mut all_gens = gens;
            for (i, &d) in ds.iter().enumerate() {
                for w in nf.xi(d).basis() {
                    let mut g = zero_vector(dim);
                    g[i * q..(i + 1) * q].clone_from_slice(w);
                    all_gens.push(g);
                }
            }
            let block = RelationBlock {
                ds: ds.clone(),
                coset: LatticeCoset::new(offset, Lattice::from_generators(dim, &all_gens)?)?,
            };
            let at: &mut Vec<RelationBlock> = out.entry(ds).or_default();
            if !at.contains(&block) {
                at.push(block);
            }
        }
        Ok(NfTemplate {
            nf,
            arity,
            blocks: out,
        })
    }

    /// The finite template transported along a normal-form isomorphism; the relation
    /// must be a coset.
    pub fn from_finite(t: &FiniteTemplate, iso: &NormalFormIso) -> Result<Self> {
        if t.monoid() != iso.monoid() {
            return Err(Error::Validation("isomorphism is for a different monoid".into()));
        }
        if !t.is_coset()? {
            return Err(Error::NotACoset("finite relation is not a coset".into()));
        }
        let mut groups: BTreeMap<Vec<Element>, Vec<IntVector>> = BTreeMap::new();
        for tuple in t.tuples() {
            let enc: Vec<&NFElement> = tuple.iter().map(|&a| iso.encode(a)).collect();
            let ds = enc.iter().map(|x| x.d).collect();
            let v: IntVector = enc.iter().flat_map(|x| x.v.iter().cloned()).collect();
            groups.entry(ds).or_default().push(v);
        }
        let blocks = groups
            .into_iter()
            .map(|(ds, vs)| {
                let gens = vs[1..].iter().map(|v| vec_sub(v, &vs[0])).collect();
                (ds, vs[0].clone(), gens)
            })
            .collect();
        Self::new(iso.nf().clone(), t.arity(), blocks)
    }

    pub fn nf(&self) -> &NormalFormMonoid {
        &self.nf
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn blocks(&self) -> impl Iterator<Item = &RelationBlock> {
        self.blocks.values().flatten()
    }

    pub fn blocks_at(&self, ds: &[Element]) -> &[RelationBlock] {
        self.blocks.get(ds).map_or(&[], Vec::as_slice)
    }

    /// The block at `ds` when there is exactly one.
    pub fn block(&self, ds: &[Element]) -> Option<&RelationBlock> {
        match self.blocks_at(ds) {
            [b] => Some(b),
            _ => None,
        }
    }

    pub fn contains(&self, t: &[NFElement]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        let ds: Vec<Element> = t.iter().map(|x| x.d).collect();
        let v: IntVector = t.iter().flat_map(|x| x.v.iter().cloned()).collect();
        self.blocks_at(&ds).iter().any(|b| b.coset.contains(&v).unwrap_or(false))
    }

    /// Exact coset test: there is one block per occurring `d`-tuple, and for all blocks
    /// `i, j, k` the block at `dᵢdⱼdₖ` exists, contains `oᵢ − oⱼ + oₖ`, and its lattice
    /// contains the lattices of `i`, `j` and `k`.
    ///
    /// A union of several cosets at one `d`-tuple is rejected even when it happens to be a
    /// coset; such relations must be given in merged form.
    pub fn validate_coset(&self) -> Result<()> {
        if let Some((ds, _)) = self.blocks.iter().find(|(_, bs)| bs.len() > 1) {
            return Err(Error::NotACoset(format!("several blocks for the idempotent tuple {ds:?}")));
        }
        let sl = self.nf.semilattice();
        let blocks: Vec<&RelationBlock> = self.blocks().collect();
        for bi in &blocks {
            for bj in &blocks {
                for bk in &blocks {
                    let ds: Vec<Element> = (0..self.arity)
                        .map(|p| sl.mul(sl.mul(bi.ds[p], bj.ds[p]), bk.ds[p]))
                        .collect();
                    let target = self.block(&ds).ok_or_else(|| {
                        Error::NotACoset(format!("no block for the idempotent tuple {ds:?}"))
                    })?;
                    let o: IntVector = bi
                        .coset
                        .offset()
                        .iter()
                        .zip(bj.coset.offset())
                        .zip(bk.coset.offset())
                        .map(|((a, b), c)| a - b + c)
                        .collect();
                    if !target.coset.contains(&o)? {
                        return Err(Error::NotACoset(format!(
                            "block {ds:?} misses a product of blocks {:?}, {:?}, {:?}",
                            bi.ds, bj.ds, bk.ds
                        )));
                    }
                    for b in [bi, bj, bk] {
                        if !target.coset.lattice().contains_lattice(b.coset.lattice())? {
                            return Err(Error::NotACoset(format!(
                                "lattice of block {:?} is not inside block {ds:?}",
                                b.ds
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check(&self, instance: &Instance, assignment: &[NFElement]) -> Result<bool> {
        instance.check_arity(self.arity)?;
        check_len(instance, assignment.len())?;
        let nf = &self.nf;
        Ok(instance.constraints.iter().all(|c| match c {
            Constraint::Product(x, y, z) => nf.mul(&assignment[*x], &assignment[*y]) == assignment[*z],
            Constraint::Identity(x) => assignment[*x] == nf.identity(),
            Constraint::Relation(xs) => {
                self.contains(&xs.iter().map(|&x| assignment[x].clone()).collect::<Vec<_>>())
            }
        }))
    }

    fn write_relation(&self, out: &mut String) {
        let _ = writeln!(out, "rel {}", self.arity);
        for b in self.blocks() {
            let _ = writeln!(out, "block {}", join(&b.ds));
            let _ = writeln!(out, "offset {}", join(b.coset.offset()));
            for g in b.coset.lattice().basis() {
                let _ = writeln!(out, "gen {}", join(g));
            }
        }
    }
}

/// A template over a finite or a normal-form carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    Finite(FiniteTemplate),
    NormalForm(NfTemplate),
}

impl Template {
    pub fn arity(&self) -> usize {
        match self {
            Template::Finite(t) => t.arity(),
            Template::NormalForm(t) => t.arity(),
        }
    }

    pub fn as_finite(&self) -> Result<&FiniteTemplate> {
        match self {
            Template::Finite(t) => Ok(t),
            Template::NormalForm(_) => Err(Error::Unsupported("a finite carrier is required".into())),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let first = lines
            .peek()
            .ok_or_else(|| Error::parse(1, "empty template"))?
            .keyword()
            .to_owned();
        let t = if first == "nf" || first == "integers" {
            let nf = NormalFormMonoid::read(&mut lines)?;
            let (arity, blocks) = read_nf_relations(&mut lines, nf.coords())?;
            Template::NormalForm(NfTemplate::new(nf, arity, blocks)?)
        } else {
            let m = read_monoid(&mut lines)?;
            let (arity, tuples) = read_finite_relations(&mut lines)?;
            Template::Finite(FiniteTemplate::new(m, arity, tuples)?)
        };
        lines.finish()?;
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Template::Finite(t) => {
                write_monoid(&mut out, t.monoid());
                t.write_relation(&mut out);
            }
            Template::NormalForm(t) => {
                t.nf().write(&mut out);
                t.write_relation(&mut out);
            }
        }
        out
    }
}

/// Reads one or more `rel` sections of `tuple` lines; several sections are combined into
/// their Cartesian product with concatenated tuples.
fn read_finite_relations(lines: &mut Lines) -> Result<(usize, Vec<Vec<Element>>)> {
    let mut arity = 0;
    let mut combined: Vec<Vec<Element>> = vec![Vec::new()];
    let mut sections = 0;
    while lines.peek_keyword() == Some("rel") {
        let header = lines.next_line()?;
        header.expect_args(1)?;
        let r: usize = header.parse_arg(0)?;
        if r == 0 {
            return Err(header.error("relation arity must be positive"));
        }
        let mut tuples = Vec::new();
        while lines.peek_keyword() == Some("tuple") {
            let line = lines.next_line()?;
            let t = line.usizes()?;
            if t.len() != r {
                return Err(line.error(format!("tuple of length {} in a relation of arity {r}", t.len())));
            }
            tuples.push(t);
        }
        combined = combined
            .iter()
            .flat_map(|prefix| {
                tuples.iter().map(move |t| prefix.iter().chain(t).copied().collect())
            })
            .collect();
        arity += r;
        sections += 1;
    }
    if sections == 0 {
        return Err(match lines.peek() {
            Some(l) => l.error("expected `rel`"),
            None => Error::parse(0, "missing `rel` section"),
        });
    }
    Ok((arity, combined))
}

type BlockSpec = (Vec<Element>, IntVector, Vec<IntVector>);

fn read_nf_relations(lines: &mut Lines, q: usize) -> Result<(usize, Vec<BlockSpec>)> {
    let mut arity = 0;
    let mut combined: Vec<BlockSpec> = vec![(Vec::new(), Vec::new(), Vec::new())];
    let mut sections = 0;
    while lines.peek_keyword() == Some("rel") {
        let header = lines.next_line()?;
        header.expect_args(1)?;
        let r: usize = header.parse_arg(0)?;
        if r == 0 {
            return Err(header.error("relation arity must be positive"));
        }
        let dim = r * q;
        let mut blocks: Vec<BlockSpec> = Vec::new();
        while lines.peek_keyword() == Some("block") {
            let line = lines.next_line()?;
            let ds = line.usizes()?;
            if ds.len() != r {
                return Err(line.error(format!("block with {} idempotents in arity {r}", ds.len())));
            }
            let off_line = lines.expect("offset")?;
            let offset = off_line.bigints()?;
            if offset.len() != dim {
                return Err(off_line.error(format!("offset needs {dim} entries")));
            }
            let mut gens = Vec::new();
            while lines.peek_keyword() == Some("gen") {
                let g_line = lines.next_line()?;
                let g = g_line.bigints()?;
                if g.len() != dim {
                    return Err(g_line.error(format!("generator needs {dim} entries")));
                }
                gens.push(g);
            }
            blocks.push((ds, offset, gens));
        }
        let prev_dim = arity * q;
        let mut next = Vec::new();
        for (pds, poff, pgens) in &combined {
            for (ds, off, gens) in &blocks {
                let cat_ds: Vec<Element> = pds.iter().chain(ds).copied().collect();
                let cat_off: IntVector = poff.iter().chain(off).cloned().collect();
                let mut cat_gens: Vec<IntVector> = pgens
                    .iter()
                    .map(|g| g.iter().cloned().chain(zero_vector(dim)).collect())
                    .collect();
                cat_gens.extend(
                    gens.iter()
                        .map(|g| zero_vector(prev_dim).into_iter().chain(g.iter().cloned()).collect()),
                );
                next.push((cat_ds, cat_off, cat_gens));
            }
        }
        combined = next;
        arity += r;
        sections += 1;
    }
    if sections == 0 {
        return Err(match lines.peek() {
            Some(l) => l.error("expected `rel`"),
            None => Error::parse(0, "missing `rel` section"),
        });
    }
    Ok((arity, combined))
}

pub fn parse_template(text: &str) -> Result<Template> {
    Template::parse(text)
}

/// Convenience for the intro-style relations: all tuples of `0..n` satisfying `keep`.
pub fn tuples_where(n: usize, arity: usize, keep: impl Fn(&[Element]) -> bool) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    crate::algebra::for_each_tuple(n, arity, |t| {
        if keep(t) {
            out.push(t.to_vec());
        }
    });
    out
}
