use std::fmt;
use std::sync::OnceLock;

use super::{Element, MonoidHom, Subset};
use crate::error::{Error, Result};

/// A finite monoid given by its Cayley table.
///
/// Elements are the indices `0..size`; `table[a * size + b]` holds `a·b`.
/// Derived data (idempotent powers, inverses) is computed lazily and cached.
#[derive(Clone)]
pub struct FiniteMonoid {
    size: usize,
    table: Vec<Element>,
    identity: Element,
    idempotent_power: OnceLock<Vec<Element>>,
    cyclic_order: OnceLock<Vec<usize>>,
}

impl PartialEq for FiniteMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.identity == other.identity && self.table == other.table
    }
}

impl Eq for FiniteMonoid {}

impl fmt::Debug for FiniteMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMonoid")
            .field("size", &self.size)
            .field("identity", &self.identity)
            .field("rows", &self.rows())
            .finish()
    }
}

impl FiniteMonoid {
    /// Validates a Cayley table given row by row (`rows[a][b] = a·b`).
    pub fn new(rows: Vec<Vec<Element>>, identity: Element) -> Result<Self> {
        let size = rows.len();
        if let Some((a, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != size) {
            return Err(Error::MalformedTable(format!(
                "row {a} has {} entries, expected {size}",
                row.len()
            )));
        }
        Self::from_flat(size, rows.into_iter().flatten().collect(), identity)
    }

    /// Validates a flat row-major Cayley table.
    pub fn from_flat(size: usize, table: Vec<Element>, identity: Element) -> Result<Self> {
        if size == 0 {
            return Err(Error::MalformedTable("monoid must be non-empty".into()));
        }
        if table.len() != size * size {
            return Err(Error::MalformedTable(format!(
                "table has {} entries, expected {}",
                table.len(),
                size * size
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= size) {
            return Err(Error::MalformedTable(format!("entry {bad} out of range")));
        }
        if identity >= size {
            return Err(Error::MalformedTable(format!("identity {identity} out of range")));
        }
        let m = Self::from_flat_unchecked(size, table, identity);
        if let Some(a) = (0..size).find(|&a| m.mul(identity, a) != a || m.mul(a, identity) != a) {
            return Err(Error::NoIdentity(a));
        }
        if let Some((a, b, c)) = m.associativity_violation() {
            return Err(Error::NotAssociative(a, b, c));
        }
        Ok(m)
    }

    pub(crate) fn from_flat_unchecked(size: usize, table: Vec<Element>, identity: Element) -> Self {
        FiniteMonoid {
            size,
            table,
            identity,
            idempotent_power: OnceLock::new(),
            cyclic_order: OnceLock::new(),
        }
    }

    /// Builds a monoid from a product function on `0..size`, validating the result.
    pub fn from_fn(size: usize, identity: Element, f: impl Fn(Element, Element) -> Element) -> Result<Self> {
        let table = (0..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Self::from_flat(size, table, identity)
    }

    fn associativity_violation(&self) -> Option<(Element, Element, Element)> {
        for a in 0..self.size {
            for b in 0..self.size {
                let ab = self.mul(a, b);
                for c in 0..self.size {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn identity(&self) -> Element {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.table[a * self.size + b]
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<Element>> {
        self.table.chunks(self.size).map(<[Element]>::to_vec).collect()
    }

    /// Product of a sequence of elements, left to right; identity for an empty sequence.
    pub fn product<I: IntoIterator<Item = Element>>(&self, elements: I) -> Element {
        elements.into_iter().fold(self.identity, |acc, x| self.mul(acc, x))
    }

    /// `a^n`, with `a^0 = e`.
    pub fn pow(&self, a: Element, n: usize) -> Element {
        let mut result = self.identity;
        let mut base = a;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        result
    }

    pub fn commutativity_violation(&self) -> Option<(Element, Element)> {
        for a in 0..self.size {
            for b in a + 1..self.size {
                if self.mul(a, b) != self.mul(b, a) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_commutative(&self) -> bool {
        self.commutativity_violation().is_none()
    }

    pub(crate) fn require_commutative(&self) -> Result<()> {
        match self.commutativity_violation() {
            Some((a, b)) => Err(Error::NotCommutative(a, b)),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn is_idempotent(&self, a: Element) -> bool {
        self.mul(a, a) == a
    }

    pub fn idempotents(&self) -> Subset {
        Subset::from_elements(self.size, self.elements().filter(|&a| self.is_idempotent(a)))
    }

    pub fn is_semilattice(&self) -> bool {
        self.is_commutative() && self.elements().all(|a| self.is_idempotent(a))
    }

    /// Green's preorder: `a ⪯ b` iff `c1·b = a` and `b·c2 = a` for some `c1, c2`.
    pub fn green_leq(&self, a: Element, b: Element) -> bool {
        let left = self.elements().any(|c| self.mul(c, b) == a);
        left && self.elements().any(|c| self.mul(b, c) == a)
    }

    pub fn green_equiv(&self, a: Element, b: Element) -> bool {
        self.green_leq(a, b) && self.green_leq(b, a)
    }

    /// The `∼`-classes, each sorted, listed by their smallest element.
    pub fn green_classes(&self) -> Vec<Vec<Element>> {
        let mut class_of: Vec<Option<usize>> = vec![None; self.size];
        let mut classes: Vec<Vec<Element>> = Vec::new();
        for a in self.elements() {
            if class_of[a].is_some() {
                continue;
            }
            let idx = classes.len();
            let members: Vec<Element> = (a..self.size)
                .filter(|&b| class_of[b].is_none() && self.green_equiv(a, b))
                .collect();
            for &b in &members {
                class_of[b] = Some(idx);
            }
            classes.push(members);
        }
        classes
    }

    fn idempotent_power_table(&self) -> &[Element] {
        self.idempotent_power.get_or_init(|| {
            self.elements()
                .map(|a| {
                    let mut x = a;
                    while !self.is_idempotent(x) {
                        x = self.mul(x, a);
                    }
                    x
                })
                .collect()
        })
    }

    /// Least `m ≥ 1` with `a^m` idempotent.
    fn cyclic_orders(&self) -> &[usize] {
        self.cyclic_order.get_or_init(|| {
            self.elements()
                .map(|a| {
                    let mut x = a;
                    let mut m = 1;
                    while !self.is_idempotent(x) {
                        x = self.mul(x, a);
                        m += 1;
                    }
                    m
                })
                .collect()
        })
    }

    /// The unique idempotent among the positive powers of `a`.
    pub fn d_of(&self, a: Element) -> Element {
        self.idempotent_power_table()[a]
    }

    /// Smallest `C > 1` such that `a^C` is idempotent for every element.
    pub fn idempotent_constant(&self) -> usize {
        // a^n is idempotent iff n ≥ index(a) and period(a) | n.
        let mut params = Vec::with_capacity(self.size);
        for a in self.elements() {
            let mut seen = vec![usize::MAX; self.size];
            let mut x = a;
            let mut k = 1;
            while seen[x] == usize::MAX {
                seen[x] = k;
                x = self.mul(x, a);
                k += 1;
            }
            let index = seen[x];
            let period = k - index;
            params.push((index, period));
        }
        (2..)
            .find(|&c| params.iter().all(|&(index, period)| c >= index && c % period == 0))
            .expect("finite monoid has an idempotent constant")
    }

    /// Regular in the completely-regular sense: `a` lies in a subgroup, i.e. `a ∼ d_a`.
    pub fn is_regular_element(&self, a: Element) -> bool {
        self.green_equiv(a, self.d_of(a))
    }

    /// `a` lies in a subgroup, via `a^(m+1) = a` for the cyclic order `m`; agrees with
    /// [`is_regular_element`](Self::is_regular_element) and is cheaper on large tables.
    pub(crate) fn in_subgroup(&self, a: Element) -> bool {
        self.mul(self.d_of(a), a) == a
    }

    pub fn is_completely_regular(&self) -> bool {
        self.elements().all(|a| self.in_subgroup(a))
    }

    pub fn is_regular_set(&self, s: &Subset) -> bool {
        s.iter().all(|a| self.in_subgroup(a))
    }

    /// Inverse of a regular element inside its maximal subgroup; equals `a^(C-1)`.
    pub fn inverse(&self, a: Element) -> Result<Element> {
        if !self.in_subgroup(a) {
            return Err(Error::NotRegular(a));
        }
        let m = self.cyclic_orders()[a];
        Ok(self.pow(a, 2 * m - 1))
    }

    /// `a^n` for any integer `n`, computed inside the maximal subgroup of `a`
    /// (so `a^0 = d_a` and negative powers use the group inverse).
    pub fn group_pow(&self, a: Element, n: &num_bigint::BigInt) -> Result<Element> {
        use num_integer::Integer;
        if !self.in_subgroup(a) {
            return Err(Error::NotRegular(a));
        }
        let m = self.cyclic_orders()[a];
        let r: usize = n
            .mod_floor(&num_bigint::BigInt::from(m))
            .try_into()
            .expect("residue below the cyclic order");
        Ok(self.pow(a, r + m))
    }

    /// `a_† = a·d_a`.
    pub fn dagger(&self, a: Element) -> Element {
        self.mul(a, self.d_of(a))
    }

    /// `π_I : a ↦ d_a`, a homomorphism onto the idempotents for commutative monoids.
    pub fn pi_idempotent(&self) -> Result<MonoidHom> {
        self.require_commutative()?;
        Ok(MonoidHom::new(self.elements().map(|a| self.d_of(a)).collect()))
    }

    /// `π_† : a ↦ a·d_a`, a homomorphism onto the regular part for commutative monoids.
    pub fn pi_dagger(&self) -> Result<MonoidHom> {
        self.require_commutative()?;
        Ok(MonoidHom::new(self.elements().map(|a| self.dagger(a)).collect()))
    }

    /// The submonoid generated by `s`.
    pub fn generated_submonoid(&self, s: &Subset) -> Subset {
        let gens: Vec<Element> = s.iter().collect();
        let mut closure = Subset::singleton(self.size, self.identity);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = self.mul(x, g);
                if closure.insert(y) {
                    frontier.push(y);
                }
            }
        }
        closure
    }

    pub fn generates(&self, s: &Subset) -> bool {
        self.generated_submonoid(s).len() == self.size
    }

    /// A smallest generating set, found by increasing-size search; the
    /// lexicographically first one of that size.
    pub fn minimal_generating_set(&self) -> Vec<Element> {
        let candidates: Vec<Element> = self.elements().filter(|&a| a != self.identity).collect();
        for k in 0..=candidates.len() {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                let set = Subset::from_elements(self.size, combo.iter().map(|&i| candidates[i]));
                if self.generates(&set) {
                    return set.to_vec();
                }
                if !next_combination(&mut combo, candidates.len()) {
                    break;
                }
            }
        }
        unreachable!("the full element set generates the monoid")
    }

    /// Restricts the table to a submonoid, re-indexed in increasing element order.
    /// Returns the submonoid and its embedding into `self`.
    pub fn submonoid(&self, members: &Subset) -> Result<(FiniteMonoid, Vec<Element>)> {
        let embedding: Vec<Element> = members.iter().collect();
        let mut index = vec![usize::MAX; self.size];
        for (i, &a) in embedding.iter().enumerate() {
            index[a] = i;
        }
        if index[self.identity] == usize::MAX {
            return Err(Error::Validation("submonoid must contain the identity".into()));
        }
        let n = embedding.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in &embedding {
            for &b in &embedding {
                let ab = index[self.mul(a, b)];
                if ab == usize::MAX {
                    return Err(Error::Validation(format!("{a}*{b} leaves the subset")));
                }
                table.push(ab);
            }
        }
        Ok((
            FiniteMonoid::from_flat_unchecked(n, table, index[self.identity]),
            embedding,
        ))
    }

    /// Direct product, with `(a, b)` encoded as `a * other.size() + b`.
    pub fn direct_product(&self, other: &FiniteMonoid) -> FiniteMonoid {
        let n = self.size * other.size;
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            let (a1, b1) = (x / other.size, x % other.size);
            for y in 0..n {
                let (a2, b2) = (y / other.size, y % other.size);
                table.push(self.mul(a1, a2) * other.size + other.mul(b1, b2));
            }
        }
        FiniteMonoid::from_flat_unchecked(n, table, self.identity * other.size + other.identity)
    }

    /// The same monoid with elements renamed by the permutation `perm` (old → new).
    pub fn relabel(&self, perm: &[Element]) -> FiniteMonoid {
        let n = self.size;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a] * n + perm[b]] = perm[self.mul(a, b)];
            }
        }
        FiniteMonoid::from_flat_unchecked(n, table, perm[self.identity])
    }
}

/// Advances `combo` (strictly increasing indices below `n`) to the next combination.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
