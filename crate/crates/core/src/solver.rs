//! The polynomial-time algorithm for templates over finitely generated commutative
//! regular monoids whose relation is a coset.
//!
//! 1. Project to the idempotent semilattice and compute the pointwise least homomorphism
//!    `h` by arc-consistency.
//! 2. Every solution above `h` can be moved onto `h` itself, so it remains to find vectors
//!    `v^x` with `f(x) = [h(x), v^x]`; these constraints form a linear system over ℤ.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{Element, FiniteMonoid};
use crate::csp::{Constraint, FiniteTemplate, Instance, NfTemplate};
use crate::error::{Error, Result};
use crate::regularize::{to_normal_form, NFElement};
use crate::zlinalg::{solve_integer, IntMatrix, IntVector};

/// A semilattice expanded by a relation, e.g. the projection `π_I` of a coset template.
#[derive(Debug, Clone)]
pub struct SemilatticeTemplate {
    template: FiniteTemplate,
}

impl SemilatticeTemplate {
    pub fn new(template: FiniteTemplate) -> Result<Self> {
        if !template.monoid().is_semilattice() {
            return Err(Error::Validation("carrier is not a semilattice".into()));
        }
        Ok(SemilatticeTemplate { template })
    }

    /// `(N, {d-tuples of the relation blocks})`.
    pub fn of_nf(t: &NfTemplate) -> Self {
        let tuples: Vec<Vec<Element>> = t.blocks().map(|b| b.ds().to_vec()).collect();
        let template = FiniteTemplate::new(t.nf().semilattice().clone(), t.arity(), tuples)
            .expect("block idempotents are in range");
        SemilatticeTemplate { template }
    }

    pub fn template(&self) -> &FiniteTemplate {
        &self.template
    }
}

/// Assignments of the distinct variables `vars` that satisfy `c` within `domains`.
fn supports(
    t: &FiniteTemplate,
    c: &Constraint,
    vars: &[usize],
    domains: &[BTreeSet<Element>],
) -> Vec<Vec<Element>> {
    let m = t.monoid();
    let pos = |x: usize| vars.iter().position(|&v| v == x).expect("variable of c");
    let mut out = Vec::new();
    match c {
        Constraint::Relation(xs) => {
            'tuples: for tuple in t.tuples() {
                let mut val: Vec<Option<Element>> = vec![None; vars.len()];
                for (&x, &a) in xs.iter().zip(tuple) {
                    let p = pos(x);
                    match val[p] {
                        Some(b) if b != a => continue 'tuples,
                        _ => val[p] = Some(a),
                    }
                    if !domains[x].contains(&a) {
                        continue 'tuples;
                    }
                }
                out.push(val.into_iter().map(|v| v.expect("all set")).collect());
            }
        }
        _ => {
            let lists: Vec<Vec<Element>> = vars.iter().map(|&x| domains[x].iter().copied().collect()).collect();
            let mut idx = vec![0usize; vars.len()];
            if lists.iter().any(Vec::is_empty) {
                return out;
            }
            loop {
                let val: Vec<Element> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
                let get = |x: usize| val[pos(x)];
                let ok = match c {
                    Constraint::Product(x, y, z) => m.mul(get(*x), get(*y)) == get(*z),
                    Constraint::Identity(x) => get(*x) == m.identity(),
                    Constraint::Relation(_) => unreachable!(),
                };
                if ok {
                    out.push(val);
                }
                let mut k = vars.len();
                loop {
                    if k == 0 {
                        return out;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < lists[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
    }
    out
}

/// Arc-consistent domains, or `None` if some domain empties.
pub fn arc_consistency(t: &FiniteTemplate, inst: &Instance) -> Result<Option<Vec<BTreeSet<Element>>>> {
    inst.validate()?;
    inst.check_arity(t.arity())?;
    let mut domains: Vec<BTreeSet<Element>> = vec![t.monoid().elements().collect(); inst.var_count];
    let cvars: Vec<Vec<usize>> = inst
        .constraints
        .iter()
        .map(|c| {
            let mut v = c.variables();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (c, vars) in inst.constraints.iter().zip(&cvars) {
            let sup = supports(t, c, vars, &domains);
            for (p, &x) in vars.iter().enumerate() {
                let kept: BTreeSet<Element> = sup.iter().map(|s| s[p]).collect();
                if kept.len() != domains[x].len() {
                    if kept.is_empty() {
                        return Ok(None);
                    }
                    domains[x] = kept;
                    changed = true;
                }
            }
        }
    }
    Ok(Some(domains))
}

/// The pointwise `⪯`-least homomorphism `inst → t`, or `None` if there is no homomorphism.
///
/// Computed as the product of the arc-consistent domain of each variable, then verified;
/// a failed verification means the relation is not closed under products.
pub fn minimal_homomorphism(t: &SemilatticeTemplate, inst: &Instance) -> Result<Option<Vec<Element>>> {
    let t = t.template();
    let Some(domains) = arc_consistency(t, inst)? else {
        return Ok(None);
    };
    let m = t.monoid();
    let h: Vec<Element> = domains.iter().map(|d| m.product(d.iter().copied())).collect();
    if !t.check(inst, &h)? {
        return Err(Error::NotProductClosed);
    }
    Ok(Some(h))
}

/// The integer system `Σ_X` for a fixed minimal homomorphism `h`.
///
/// Unknowns are the vectors `v^x` (columns `x·q .. x·q + q`) followed by one multiplier per
/// lattice generator use.
#[derive(Debug, Clone)]
pub struct SigmaSystem {
    pub coords: usize,
    pub var_count: usize,
    pub matrix: IntMatrix,
    pub rhs: IntVector,
}

/// Result of building `Σ_X`: either a system, or a relation constraint whose idempotent
/// tuple has no block, which already refutes the instance.
#[derive(Debug, Clone)]
pub enum SigmaOutcome {
    System(SigmaSystem),
    MissingBlock { constraint: usize, ds: Vec<Element> },
}

struct RowBuilder {
    rows: Vec<(Vec<(usize, BigInt)>, BigInt)>,
    extra: usize,
    base: usize,
}

impl RowBuilder {
    fn multiplier(&mut self) -> usize {
        self.extra += 1;
        self.base + self.extra - 1
    }
}

pub fn build_sigma(t: &NfTemplate, inst: &Instance, h: &[Element]) -> Result<SigmaOutcome> {
    let nf = t.nf();
    let q = nf.coords();
    let n = inst.var_count;
    if h.len() != n {
        return Err(Error::DimensionMismatch("minimal homomorphism length".into()));
    }
    let mut rb = RowBuilder {
        rows: Vec::new(),
        extra: 0,
        base: n * q,
    };
    let col = |x: usize, a: usize| x * q + a;
    for (x, &d) in h.iter().enumerate() {
        for a in (0..q).filter(|a| !nf.lambda(d).contains(a)) {
            rb.rows.push((vec![(col(x, a), BigInt::one())], BigInt::zero()));
        }
    }
    for (ci, c) in inst.constraints.iter().enumerate() {
        match c {
            Constraint::Identity(x) => {
                // v^x ∈ Ξ(e)
                let gens: Vec<usize> = nf.xi(h[*x]).basis().iter().map(|_| rb.multiplier()).collect();
                for a in 0..q {
                    let mut row = vec![(col(*x, a), BigInt::one())];
                    for (u, &g) in nf.xi(h[*x]).basis().iter().zip(&gens) {
                        row.push((g, -u[a].clone()));
                    }
                    rb.rows.push((row, BigInt::zero()));
                }
            }
            Constraint::Product(x, y, z) => {
                // v^x + v^y − v^z ∈ Ξ(h(z))
                let basis = nf.xi(h[*z]).basis();
                let gens: Vec<usize> = basis.iter().map(|_| rb.multiplier()).collect();
                for a in 0..q {
                    let mut row = vec![
                        (col(*x, a), BigInt::one()),
                        (col(*y, a), BigInt::one()),
                        (col(*z, a), -BigInt::one()),
                    ];
                    for (u, &g) in basis.iter().zip(&gens) {
                        row.push((g, -u[a].clone()));
                    }
                    rb.rows.push((row, BigInt::zero()));
                }
            }
            Constraint::Relation(xs) => {
                let ds: Vec<Element> = xs.iter().map(|&x| h[x]).collect();
                let Some(block) = t.block(&ds) else {
                    return Ok(SigmaOutcome::MissingBlock { constraint: ci, ds });
                };
                // (v^{x₁}, …, v^{x_r}) ∈ o + ⟨V⟩
                let coset = block.coset();
                let basis = coset.lattice().basis();
                let gens: Vec<usize> = basis.iter().map(|_| rb.multiplier()).collect();
                for (i, &x) in xs.iter().enumerate() {
                    for a in 0..q {
                        let k = i * q + a;
                        let mut row = vec![(col(x, a), BigInt::one())];
                        for (u, &g) in basis.iter().zip(&gens) {
                            row.push((g, -u[k].clone()));
                        }
                        rb.rows.push((row, coset.offset()[k].clone()));
                    }
                }
            }
        }
    }
    let cols = n * q + rb.extra;
    let mut matrix = IntMatrix::zeros(rb.rows.len(), cols);
    let mut rhs = Vec::with_capacity(rb.rows.len());
    for (i, (row, b)) in rb.rows.into_iter().enumerate() {
        for (j, c) in row {
            // Repeated variables (e.g. MUL x x z) accumulate.
            let v = matrix.get(i, j) + c;
            matrix.set(i, j, v);
        }
        rhs.push(b);
    }
    Ok(SigmaOutcome::System(SigmaSystem {
        coords: q,
        var_count: n,
        matrix,
        rhs,
    }))
}

/// Solves an instance over a normal-form template with a coset relation.
pub fn solve_tractable(t: &NfTemplate, inst: &Instance) -> Result<Option<Vec<NFElement>>> {
    inst.validate()?;
    inst.check_arity(t.arity())?;
    t.validate_coset()?;
    let semilattice = SemilatticeTemplate::of_nf(t);
    let Some(h) = minimal_homomorphism(&semilattice, inst)? else {
        return Ok(None);
    };
    let sys = match build_sigma(t, inst, &h)? {
        SigmaOutcome::System(s) => s,
        SigmaOutcome::MissingBlock { .. } => return Ok(None),
    };
    let Some(sol) = solve_integer(&sys.matrix, &sys.rhs)? else {
        return Ok(None);
    };
    let q = sys.coords;
    let assignment = (0..inst.var_count)
        .map(|x| t.nf().element(h[x], sol.particular[x * q..(x + 1) * q].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(t.check(inst, &assignment)?);
    Ok(Some(assignment))
}

/// Convenience: solves over a finite commutative regular template with a coset relation by
/// passing through its normal form, and maps the answer back.
pub fn solve_finite_tractable(t: &FiniteTemplate, inst: &Instance) -> Result<Option<Vec<Element>>> {
    let m: &FiniteMonoid = t.monoid();
    let iso = to_normal_form(m, &m.minimal_generating_set())?;
    let nt = NfTemplate::from_finite(t, &iso)?;
    match solve_tractable(&nt, inst)? {
        Some(a) => Ok(Some(a.iter().map(|x| iso.decode(x)).collect::<Result<_>>()?)),
        None => Ok(None),
    }
}
