use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::text::{join, Lines};

/// One constraint of an instance over the signature `(·, e, R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// `x · y = z`
    Product(usize, usize, usize),
    /// `x = e`
    Identity(usize),
    /// `(x₁, …, x_r) ∈ R`
    Relation(Vec<usize>),
}

impl Constraint {
    pub fn variables(&self) -> Vec<usize> {
        match self {
            Constraint::Product(x, y, z) => vec![*x, *y, *z],
            Constraint::Identity(x) => vec![*x],
            Constraint::Relation(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Instance {
    pub var_count: usize,
    pub constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(var_count: usize) -> Self {
        Instance {
            var_count,
            constraints: Vec::new(),
        }
    }

    pub fn fresh_var(&mut self) -> usize {
        self.var_count += 1;
        self.var_count - 1
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn product(&mut self, x: usize, y: usize, z: usize) {
        self.push(Constraint::Product(x, y, z));
    }

    pub fn identity(&mut self, x: usize) {
        self.push(Constraint::Identity(x));
    }

    pub fn relation(&mut self, xs: &[usize]) {
        self.push(Constraint::Relation(xs.to_vec()));
    }

    /// `x = y`, encoded as `x · e' = y` with a fresh `e' = e`.
    pub fn equal(&mut self, x: usize, y: usize) {
        let e = self.fresh_var();
        self.identity(e);
        self.product(x, e, y);
    }

    /// A variable holding the product of `word`, introducing auxiliaries as needed.
    pub fn word_var(&mut self, word: &[usize]) -> usize {
        match word {
            [] => {
                let e = self.fresh_var();
                self.identity(e);
                e
            }
            [x] => *x,
            [first, rest @ ..] => {
                let mut acc = *first;
                for &x in rest {
                    let t = self.fresh_var();
                    self.product(acc, x, t);
                    acc = t;
                }
                acc
            }
        }
    }

    /// The equation `lhs = rhs` between two words, flattened into binary products.
    pub fn equation(&mut self, lhs: &[usize], rhs: &[usize]) {
        let l = self.word_var(lhs);
        match rhs {
            [] => self.identity(l),
            [y] => self.equal(l, *y),
            [init @ .., last] => {
                let r = self.word_var(init);
                self.product(r, *last, l);
            }
        }
    }

    /// Checks variable indices against `var_count`.
    pub fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            if let Some(x) = c.variables().into_iter().find(|&x| x >= self.var_count) {
                return Err(Error::Validation(format!(
                    "variable {x} out of range in an instance with {} variables",
                    self.var_count
                )));
            }
            if let Constraint::Relation(xs) = c {
                if xs.is_empty() {
                    return Err(Error::Validation("relation constraint with no variables".into()));
                }
            }
        }
        Ok(())
    }

    /// Fails with `ArityMismatch` if some relation constraint has arity other than `arity`.
    pub fn check_arity(&self, arity: usize) -> Result<()> {
        for c in &self.constraints {
            if let Constraint::Relation(xs) = c {
                if xs.len() != arity {
                    return Err(Error::ArityMismatch {
                        expected: arity,
                        found: xs.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let header = lines.expect("instance")?;
        header.expect_args(1)?;
        let mut inst = Instance::new(header.parse_arg(0)?);
        while !lines.is_done() {
            let line = lines.next_line()?;
            let vars = line.usizes()?;
            let c = match (line.keyword(), vars.as_slice()) {
                ("MUL", &[x, y, z]) => Constraint::Product(x, y, z),
                ("ID", &[x]) => Constraint::Identity(x),
                ("REL", xs) if !xs.is_empty() => Constraint::Relation(xs.to_vec()),
                (kw @ ("MUL" | "ID" | "REL"), _) => {
                    return Err(line.error(format!("wrong number of variables for `{kw}`")))
                }
                (kw, _) => return Err(line.error(format!("unknown constraint `{kw}`"))),
            };
            if let Some(x) = c.variables().into_iter().find(|&x| x >= inst.var_count) {
                return Err(line.error(format!("variable {x} out of range")));
            }
            inst.push(c);
        }
        Ok(inst)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("instance {}\n", self.var_count);
        for c in &self.constraints {
            let _ = match c {
                Constraint::Product(x, y, z) => writeln!(out, "MUL {x} {y} {z}"),
                Constraint::Identity(x) => writeln!(out, "ID {x}"),
                Constraint::Relation(xs) => writeln!(out, "REL {}", join(xs)),
            };
        }
        out
    }
}

/// A variable occurrence in a group instance, possibly inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub var: usize,
    pub inverted: bool,
}

impl Term {
    pub fn var(var: usize) -> Self {
        Term { var, inverted: false }
    }

    pub fn inv(var: usize) -> Self {
        Term { var, inverted: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupConstraint {
    Product(Term, Term, Term),
    Identity(Term),
    Relation(Vec<Term>),
}

/// An instance over the group signature: variables may occur inverted (written `x'`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupInstance {
    pub var_count: usize,
    pub constraints: Vec<GroupConstraint>,
}

impl GroupInstance {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let header = lines.expect("instance")?;
        header.expect_args(1)?;
        let var_count: usize = header.parse_arg(0)?;
        let mut constraints = Vec::new();
        while !lines.is_done() {
            let line = lines.next_line()?;
            let terms = line
                .args()
                .iter()
                .map(|tok| {
                    let (name, inverted) = match tok.strip_suffix('\'') {
                        Some(n) => (n, true),
                        None => (tok.as_str(), false),
                    };
                    let var: usize = name
                        .parse()
                        .map_err(|_| line.error(format!("cannot parse `{tok}`")))?;
                    if var >= var_count {
                        return Err(line.error(format!("variable {var} out of range")));
                    }
                    Ok(Term { var, inverted })
                })
                .collect::<Result<Vec<_>>>()?;
            constraints.push(match (line.keyword(), terms.as_slice()) {
                ("MUL", &[x, y, z]) => GroupConstraint::Product(x, y, z),
                ("ID", &[x]) => GroupConstraint::Identity(x),
                ("REL", ts) if !ts.is_empty() => GroupConstraint::Relation(ts.to_vec()),
                (kw, _) => return Err(line.error(format!("malformed constraint `{kw}`"))),
            });
        }
        Ok(GroupInstance {
            var_count,
            constraints,
        })
    }
}

/// Translates a group instance into a monoid instance.
///
/// Variable `x` keeps its index; `x₋ = n + x` is its inverse and `e_x = 2n + x` an
/// auxiliary identity, with constraints `e_x = e`, `x₋·x = e_x`, `x·x₋ = e_x`. Inverted
/// occurrences are replaced by `x₋`.
pub fn group_to_monoid(g: &GroupInstance) -> Instance {
    let n = g.var_count;
    let mut inst = Instance::new(3 * n);
    for x in 0..n {
        let (minus, e) = (n + x, 2 * n + x);
        inst.identity(e);
        inst.product(minus, x, e);
        inst.product(x, minus, e);
    }
    let v = |t: Term| if t.inverted { n + t.var } else { t.var };
    for c in &g.constraints {
        inst.push(match c {
            GroupConstraint::Product(x, y, z) => Constraint::Product(v(*x), v(*y), v(*z)),
            GroupConstraint::Identity(x) => Constraint::Identity(v(*x)),
            GroupConstraint::Relation(ts) => Constraint::Relation(ts.iter().map(|&t| v(t)).collect()),
        });
    }
    inst
}
