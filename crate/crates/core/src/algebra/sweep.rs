//! Exhaustive enumeration of small monoids up to isomorphism.
//!
//! Tables are built by backtracking over the non-identity cells with the identity fixed at
//! index 0, pruning on partial associativity, and reduced to the lexicographically least
//! relabeling.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

use super::FiniteMonoid;

const UNSET: usize = usize::MAX;

struct Search {
    n: usize,
    commutative: bool,
    table: Vec<usize>,
    cells: Vec<(usize, usize)>,
    found: BTreeSet<Vec<usize>>,
    perms: Vec<Vec<usize>>,
}

impl Search {
    fn new(n: usize, commutative: bool) -> Self {
        let mut table = vec![UNSET; n * n];
        for a in 0..n {
            table[a] = a;
            table[a * n] = a;
        }
        let cells = (1..n)
            .flat_map(|a| (1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !commutative || a <= b)
            .collect();
        let mut perms = Vec::new();
        permutations_fixing_zero(n, &mut perms);
        Search {
            n,
            commutative,
            table,
            cells,
            found: BTreeSet::new(),
            perms,
        }
    }

    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    fn consistent(&self) -> bool {
        let n = self.n;
        for x in 1..n {
            for y in 1..n {
                let xy = self.get(x, y);
                if xy == UNSET {
                    continue;
                }
                for z in 1..n {
                    let yz = self.get(y, z);
                    if yz == UNSET {
                        continue;
                    }
                    let l = self.get(xy, z);
                    let r = self.get(x, yz);
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, k: usize) {
        if k == self.cells.len() {
            let canon = self.canonical();
            self.found.insert(canon);
            return;
        }
        let (a, b) = self.cells[k];
        for v in 0..self.n {
            self.table[a * self.n + b] = v;
            if self.commutative {
                self.table[b * self.n + a] = v;
            }
            if self.consistent() {
                self.run(k + 1);
            }
        }
        self.table[a * self.n + b] = UNSET;
        if self.commutative {
            self.table[b * self.n + a] = UNSET;
        }
    }

    fn canonical(&self) -> Vec<usize> {
        let n = self.n;
        let mut best: Option<Vec<usize>> = None;
        let mut relabeled = vec![0; n * n];
        for p in &self.perms {
            for a in 0..n {
                for b in 0..n {
                    relabeled[p[a] * n + p[b]] = p[self.table[a * n + b]];
                }
            }
            if best.as_ref().is_none_or(|cur| relabeled < *cur) {
                best = Some(relabeled.clone());
            }
        }
        best.expect("at least the identity permutation")
    }
}

fn permutations_fixing_zero(n: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, n, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    used[0] = true;
    rec(&mut vec![0], &mut used, n, out);
}

fn enumerate(n: usize, commutative: bool) -> Vec<FiniteMonoid> {
    let mut s = Search::new(n, commutative);
    s.run(0);
    s.found
        .into_iter()
        .map(|t| FiniteMonoid::from_flat(n, t, 0).expect("enumerated table is a monoid"))
        .collect()
}

type Cache = Mutex<Vec<((usize, bool), &'static [FiniteMonoid])>>;

fn cached(n: usize, commutative: bool) -> &'static [FiniteMonoid] {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("sweep cache poisoned");
    if let Some((_, v)) = guard.iter().find(|(k, _)| *k == (n, commutative)) {
        return v;
    }
    let v: &'static [FiniteMonoid] = Vec::leak(enumerate(n, commutative));
    guard.push(((n, commutative), v));
    v
}

/// Monoids of exactly `n` elements, one per isomorphism class, identity at index 0.
pub fn monoids_of_size(n: usize) -> &'static [FiniteMonoid] {
    cached(n, false)
}

pub fn commutative_monoids_of_size(n: usize) -> &'static [FiniteMonoid] {
    cached(n, true)
}

/// All monoids with `1..=max_size` elements.
pub fn monoids_up_to(max_size: usize) -> Vec<FiniteMonoid> {
    (1..=max_size).flat_map(|n| monoids_of_size(n).iter().cloned()).collect()
}

pub fn commutative_monoids_up_to(max_size: usize) -> Vec<FiniteMonoid> {
    (1..=max_size)
        .flat_map(|n| commutative_monoids_of_size(n).iter().cloned())
        .collect()
}

pub fn commutative_regular_monoids_up_to(max_size: usize) -> Vec<FiniteMonoid> {
    commutative_monoids_up_to(max_size)
        .into_iter()
        .filter(FiniteMonoid::is_completely_regular)
        .collect()
}
