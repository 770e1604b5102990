use std::fmt;

use fixedbitset::FixedBitSet;

use super::Element;

/// A set of element indices of some monoid with `universe` elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    bits: FixedBitSet,
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Subset {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Subset { bits }
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(universe: usize, elements: I) -> Self {
        let mut s = Subset::empty(universe);
        for a in elements {
            s.insert(a);
        }
        s
    }

    /// Subset whose members are the set bits of `mask` (universe ≤ 64).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Subset::from_elements(universe, (0..universe).filter(|&i| mask >> i & 1 == 1))
    }

    pub fn singleton(universe: usize, a: Element) -> Self {
        Subset::from_elements(universe, [a])
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, a: Element) -> bool {
        assert!(a < self.bits.len(), "element {a} outside universe");
        !self.bits.put(a)
    }

    pub fn contains(&self, a: Element) -> bool {
        self.bits.contains(a)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union_with(&mut self, other: &Subset) {
        self.bits.union_with(&other.bits);
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.bits.intersect_with(&other.bits);
        s
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.bits.difference_with(&other.bits);
        s
    }

    /// Iterate every subset of a universe of at most 20 elements, in mask order.
    pub fn all(universe: usize) -> impl Iterator<Item = Subset> {
        assert!(universe <= 20, "subset enumeration over {universe} elements");
        (0u64..1 << universe).map(move |m| Subset::from_mask(universe, m))
    }

    /// Non-empty subsets, in mask order.
    pub fn all_nonempty(universe: usize) -> impl Iterator<Item = Subset> {
        Subset::all(universe).skip(1)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}
