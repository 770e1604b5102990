use std::collections::HashMap;
use std::fmt::Write as _;

use crate::algebra::{decode_tuple, encode_tuple, enumerate_homs, CartesianPower, Element};
use crate::csp::FiniteTemplate;
use crate::error::{Error, Result};
use crate::text::{join, Lines};

use super::hom_poly::preserves_relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub side: Side,
}

/// An identity `f_v = f_u^φ`, i.e. `f_v(a₁, …, a_m) = f_u(a_φ(1), …, a_φ(n))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinorEdge {
    pub from: usize,
    pub to: usize,
    /// `φ: [ar(from)] → [ar(to)]`, zero-based.
    pub map: Vec<usize>,
}

/// A finite minor condition: symbols on two sides and edges from `U` to `V`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MinorCondition {
    symbols: Vec<Symbol>,
    edges: Vec<MinorEdge>,
}

impl MinorCondition {
    pub fn new(symbols: Vec<Symbol>, edges: Vec<MinorEdge>) -> Result<Self> {
        for s in &symbols {
            if s.arity == 0 {
                return Err(Error::Validation(format!("symbol `{}` has arity 0", s.name)));
            }
        }
        for e in &edges {
            let (Some(u), Some(v)) = (symbols.get(e.from), symbols.get(e.to)) else {
                return Err(Error::Validation("edge refers to an unknown symbol".into()));
            };
            if u.side != Side::U || v.side != Side::V {
                return Err(Error::Validation(format!("edge {} → {} must go from U to V", u.name, v.name)));
            }
            if e.map.len() != u.arity || e.map.iter().any(|&i| i >= v.arity) {
                return Err(Error::Validation(format!(
                    "edge {} → {} needs a map [{}] → [{}]",
                    u.name, v.name, u.arity, v.arity
                )));
            }
        }
        Ok(MinorCondition { symbols, edges })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn edges(&self) -> &[MinorEdge] {
        &self.edges
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Format: `sym <name> <arity> <U|V>` lines, then `edge <u> <v> i₁ … i_{ar(u)}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let mut symbols: Vec<Symbol> = Vec::new();
        let mut edges = Vec::new();
        while !lines.is_done() {
            let line = lines.next_line()?;
            match line.keyword() {
                "sym" => {
                    line.expect_args(3)?;
                    let name = line.args()[0].clone();
                    if symbols.iter().any(|s| s.name == name) {
                        return Err(line.error(format!("duplicate symbol `{name}`")));
                    }
                    let side = match line.args()[2].as_str() {
                        "U" => Side::U,
                        "V" => Side::V,
                        other => return Err(line.error(format!("side must be U or V, got `{other}`"))),
                    };
                    symbols.push(Symbol {
                        name,
                        arity: line.parse_arg(1)?,
                        side,
                    });
                }
                "edge" => {
                    if line.args().len() < 2 {
                        return Err(line.error("edge needs two symbols and a map"));
                    }
                    let find = |name: &str| {
                        symbols
                            .iter()
                            .position(|s| s.name == name)
                            .ok_or_else(|| line.error(format!("unknown symbol `{name}`")))
                    };
                    let from = find(&line.args()[0])?;
                    let to = find(&line.args()[1])?;
                    let map = line.args()[2..]
                        .iter()
                        .map(|t| t.parse().map_err(|_| line.error(format!("cannot parse `{t}`"))))
                        .collect::<Result<Vec<usize>>>()?;
                    edges.push(MinorEdge { from, to, map });
                }
                other => return Err(line.error(format!("unknown keyword `{other}`"))),
            }
        }
        Self::new(symbols, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.symbols {
            let side = if s.side == Side::U { "U" } else { "V" };
            let _ = writeln!(out, "sym {} {} {side}", s.name, s.arity);
        }
        for e in &self.edges {
            let _ = write!(out, "edge {} {}", self.symbols[e.from].name, self.symbols[e.to].name);
            if !e.map.is_empty() {
                let _ = write!(out, " {}", join(&e.map));
            }
            out.push('\n');
        }
        out
    }
}

/// Indices `i_u` with `φ_{u,v}(i_u) = i_v` on every edge, if they exist.
pub fn trivial_indices(phi: &MinorCondition) -> Option<Vec<usize>> {
    let n = phi.symbols.len();
    let mut value: Vec<Option<usize>> = vec![None; n];
    fn consistent(phi: &MinorCondition, value: &[Option<usize>]) -> bool {
        phi.edges.iter().all(|e| match (value[e.from], value[e.to]) {
            (Some(i), Some(j)) => e.map[i] == j,
            _ => true,
        })
    }
    fn go(phi: &MinorCondition, value: &mut Vec<Option<usize>>, k: usize) -> bool {
        if k == value.len() {
            return true;
        }
        for i in 0..phi.symbols[k].arity {
            value[k] = Some(i);
            if consistent(phi, value) && go(phi, value, k + 1) {
                return true;
            }
        }
        value[k] = None;
        false
    }
    go(phi, &mut value, 0).then(|| value.into_iter().map(|v| v.expect("assigned")).collect())
}

pub fn is_trivial(phi: &MinorCondition) -> bool {
    trivial_indices(phi).is_some()
}

/// All polymorphisms of arity `n` as tables over `M^n`, in lexicographic order.
pub fn polymorphism_tables(
    rel_m: &FiniteTemplate,
    rel_n: &FiniteTemplate,
    n: usize,
    cap: usize,
) -> Result<Vec<Vec<Element>>> {
    let power = CartesianPower::new(rel_m.monoid(), n);
    let size = power.size().unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::TooLarge(format!("|M|^{n} = {size} exceeds the cap of {cap}")));
    }
    let pm = power.materialize(cap)?;
    Ok(enumerate_homs(&pm, rel_n.monoid())
        .into_iter()
        .map(|h| h.into_images())
        .filter(|t| preserves_relation(rel_m, rel_n, n, t))
        .collect())
}

/// Table of `f^φ` for `φ: [n] → [m]`.
pub fn table_minor(base: usize, f: &[Element], n: usize, phi: &[usize], m: usize) -> Vec<Element> {
    debug_assert_eq!(phi.len(), n);
    (0..base.pow(m as u32))
        .map(|b| {
            let bs = decode_tuple(base, m, b);
            let a: Vec<Element> = phi.iter().map(|&i| bs[i]).collect();
            f[encode_tuple(base, &a)]
        })
        .collect()
}

/// Whether some choice of polymorphisms `f_u ∈ Pol(rel M, rel N)` satisfies every identity
/// of `phi`. Exhaustive: enumerates all polymorphisms of each occurring arity.
pub fn is_satisfiable_in_pol(
    phi: &MinorCondition,
    rel_m: &FiniteTemplate,
    rel_n: &FiniteTemplate,
    cap: usize,
) -> Result<bool> {
    let mut pols: HashMap<usize, Vec<Vec<Element>>> = HashMap::new();
    for s in &phi.symbols {
        if let std::collections::hash_map::Entry::Vacant(slot) = pols.entry(s.arity) {
            slot.insert(polymorphism_tables(rel_m, rel_n, s.arity, cap)?);
        }
    }
    let base = rel_m.monoid().size();
    let mut choice: Vec<Option<usize>> = vec![None; phi.symbols.len()];
    let mut minors: HashMap<(usize, usize, usize), Vec<Element>> = HashMap::new();

    struct Ctx<'a> {
        phi: &'a MinorCondition,
        pols: &'a HashMap<usize, Vec<Vec<Element>>>,
        base: usize,
    }

    fn ok(ctx: &Ctx, choice: &[Option<usize>], minors: &mut HashMap<(usize, usize, usize), Vec<Element>>, k: usize) -> bool {
        ctx.phi.edges.iter().enumerate().all(|(ei, e)| {
            if e.from != k && e.to != k {
                return true;
            }
            let (Some(fu), Some(fv)) = (choice[e.from], choice[e.to]) else {
                return true;
            };
            let (au, av) = (ctx.phi.symbols[e.from].arity, ctx.phi.symbols[e.to].arity);
            let tu = &ctx.pols[&au][fu];
            let m = minors
                .entry((ei, fu, av))
                .or_insert_with(|| table_minor(ctx.base, tu, au, &e.map, av));
            *m == ctx.pols[&av][fv]
        })
    }

    fn go(ctx: &Ctx, choice: &mut Vec<Option<usize>>, minors: &mut HashMap<(usize, usize, usize), Vec<Element>>, k: usize) -> bool {
        if k == choice.len() {
            return true;
        }
        for f in 0..ctx.pols[&ctx.phi.symbols[k].arity].len() {
            choice[k] = Some(f);
            if ok(ctx, choice, minors, k) && go(ctx, choice, minors, k + 1) {
                return true;
            }
        }
        choice[k] = None;
        false
    }

    let ctx = Ctx {
        phi,
        pols: &pols,
        base,
    };
    Ok(go(&ctx, &mut choice, &mut minors, 0))
}
