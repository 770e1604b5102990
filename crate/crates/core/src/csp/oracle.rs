//! Exhaustive satisfiability oracle for finite templates: backtracking with forward
//! checking, smallest-domain-first variable choice and index-ordered values.

use super::instance::{Constraint, Instance};
use super::template::FiniteTemplate;
use crate::algebra::Element;
use crate::error::{Error, Result};

/// Default node budget for [`oracle_solve`].
pub const DEFAULT_BUDGET: u64 = 50_000_000;

struct Search<'a> {
    t: &'a FiniteTemplate,
    inst: &'a Instance,
    touching: Vec<Vec<usize>>,
    domains: Vec<Vec<Element>>,
    value: Vec<Option<Element>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn holds(&self, c: &Constraint, val: &dyn Fn(usize) -> Element) -> bool {
        let m = self.t.monoid();
        match c {
            Constraint::Product(x, y, z) => m.mul(val(*x), val(*y)) == val(*z),
            Constraint::Identity(x) => val(*x) == m.identity(),
            Constraint::Relation(xs) => self.t.contains(&xs.iter().map(|&x| val(x)).collect::<Vec<_>>()),
        }
    }

    /// Distinct unassigned variables of a constraint.
    fn open_vars(&self, c: &Constraint) -> Vec<usize> {
        let mut vs: Vec<usize> = c.variables().into_iter().filter(|&x| self.value[x].is_none()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Prunes the domains of constraints left with a single open variable. Returns the
    /// saved domains for undo, or `None` on a wipe-out or violated constraint.
    fn propagate(&mut self, constraints: &[usize]) -> Option<Vec<(usize, Vec<Element>)>> {
        let mut saved = Vec::new();
        for &ci in constraints {
            let c = &self.inst.constraints[ci];
            let open = self.open_vars(c);
            match open.as_slice() {
                [] => {
                    let ok = self.holds(c, &|x| self.value[x].expect("assigned"));
                    if !ok {
                        self.restore(saved);
                        return None;
                    }
                }
                [u] => {
                    let u = *u;
                    let kept: Vec<Element> = self.domains[u]
                        .iter()
                        .copied()
                        .filter(|&v| self.holds(c, &|x| if x == u { v } else { self.value[x].expect("assigned") }))
                        .collect();
                    if kept.len() != self.domains[u].len() {
                        let old = std::mem::replace(&mut self.domains[u], kept);
                        saved.push((u, old));
                        if self.domains[u].is_empty() {
                            self.restore(saved);
                            return None;
                        }
                    }
                }
                _ => {}
            }
        }
        Some(saved)
    }

    fn restore(&mut self, saved: Vec<(usize, Vec<Element>)>) {
        for (u, old) in saved.into_iter().rev() {
            self.domains[u] = old;
        }
    }

    fn run(&mut self) -> Result<bool> {
        let next = (0..self.inst.var_count)
            .filter(|&x| self.value[x].is_none())
            .min_by_key(|&x| (self.domains[x].len(), x));
        let Some(x) = next else {
            return Ok(true);
        };
        let candidates = self.domains[x].clone();
        for v in candidates {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            self.value[x] = Some(v);
            let touching = self.touching[x].clone();
            if let Some(saved) = self.propagate(&touching) {
                if self.run()? {
                    return Ok(true);
                }
                self.restore(saved);
            }
            self.value[x] = None;
        }
        Ok(false)
    }
}

/// A satisfying assignment of `inst` in `t`, or `None` if there is none.
pub fn oracle_solve(t: &FiniteTemplate, inst: &Instance, budget: u64) -> Result<Option<Vec<Element>>> {
    inst.validate()?;
    inst.check_arity(t.arity())?;
    let n = inst.var_count;
    let mut touching = vec![Vec::new(); n];
    for (ci, c) in inst.constraints.iter().enumerate() {
        let mut vs = c.variables();
        vs.sort_unstable();
        vs.dedup();
        for x in vs {
            touching[x].push(ci);
        }
    }
    let mut s = Search {
        t,
        inst,
        touching,
        domains: vec![t.monoid().elements().collect(); n],
        value: vec![None; n],
        nodes: 0,
        budget,
    };
    let all: Vec<usize> = (0..inst.constraints.len()).collect();
    if s.propagate(&all).is_none() {
        return Ok(None);
    }
    if s.run()? {
        Ok(Some(s.value.into_iter().map(|v| v.expect("complete")).collect()))
    } else {
        Ok(None)
    }
}
