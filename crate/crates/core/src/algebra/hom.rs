use super::{Element, FiniteMonoid, Subset};

/// A map between finite monoids, stored as the image of every source element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidHom {
    images: Vec<Element>,
}

impl MonoidHom {
    pub fn new(images: Vec<Element>) -> Self {
        MonoidHom { images }
    }

    pub fn identity(size: usize) -> Self {
        MonoidHom::new((0..size).collect())
    }

    #[inline]
    pub fn apply(&self, a: Element) -> Element {
        self.images[a]
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn into_images(self) -> Vec<Element> {
        self.images
    }

    /// Whether the map preserves the identity and all products.
    pub fn is_hom(&self, source: &FiniteMonoid, target: &FiniteMonoid) -> bool {
        is_hom(source, target, &self.images)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &MonoidHom) -> MonoidHom {
        MonoidHom::new(first.images.iter().map(|&a| self.images[a]).collect())
    }

    pub fn image_set(&self, target_size: usize) -> Subset {
        Subset::from_elements(target_size, self.images.iter().copied())
    }

    pub fn apply_set(&self, s: &Subset, target_size: usize) -> Subset {
        Subset::from_elements(target_size, s.iter().map(|a| self.images[a]))
    }

    pub fn apply_tuple(&self, t: &[Element]) -> Vec<Element> {
        t.iter().map(|&a| self.images[a]).collect()
    }
}

pub fn is_hom(source: &FiniteMonoid, target: &FiniteMonoid, images: &[Element]) -> bool {
    if images.len() != source.size() || images.iter().any(|&x| x >= target.size()) {
        return false;
    }
    if images[source.identity()] != target.identity() {
        return false;
    }
    source.elements().all(|a| {
        source
            .elements()
            .all(|b| images[source.mul(a, b)] == target.mul(images[a], images[b]))
    })
}

/// Extends an assignment of generator images to the whole monoid, if it extends to a
/// homomorphism. `generators` must generate `source`.
pub fn extend_from_generators(
    source: &FiniteMonoid,
    target: &FiniteMonoid,
    generators: &[Element],
    generator_images: &[Element],
) -> Option<MonoidHom> {
    debug_assert_eq!(generators.len(), generator_images.len());
    let mut images = vec![usize::MAX; source.size()];
    images[source.identity()] = target.identity();
    let mut queue = std::collections::VecDeque::from([source.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &gi) in generators.iter().zip(generator_images) {
            let y = source.mul(x, g);
            let fy = target.mul(images[x], gi);
            if images[y] == usize::MAX {
                images[y] = fy;
                queue.push_back(y);
            } else if images[y] != fy {
                return None;
            }
        }
    }
    if images.contains(&usize::MAX) {
        return None;
    }
    Some(MonoidHom::new(images))
}

/// All homomorphisms `source → target`, sorted lexicographically by their image vectors.
///
/// Images are assigned to a minimal generating set of `source` and extended along the
/// right Cayley graph; an assignment survives iff every edge relation holds.
pub fn enumerate_homs(source: &FiniteMonoid, target: &FiniteMonoid) -> Vec<MonoidHom> {
    let generators = source.minimal_generating_set();
    let mut homs = Vec::new();
    for_each_tuple(target.size(), generators.len(), |gi| {
        if let Some(h) = extend_from_generators(source, target, &generators, gi) {
            homs.push(h);
        }
    });
    homs.sort();
    homs
}

/// Calls `f` on every tuple in `0..base` of length `len`, in lexicographic order.
pub(crate) fn for_each_tuple(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; len];
    if base == 0 && len > 0 {
        return;
    }
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < base {
                break;
            }
            t[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtins;

    fn brute_force(source: &FiniteMonoid, target: &FiniteMonoid) -> Vec<MonoidHom> {
        let mut out = Vec::new();
        for_each_tuple(target.size(), source.size(), |imgs| {
            if is_hom(source, target, imgs) {
                out.push(MonoidHom::new(imgs.to_vec()));
            }
        });
        out
    }

    #[test]
    fn z2_to_z2() {
        let z2 = builtins::cyclic(2);
        let homs = enumerate_homs(&z2, &z2);
        assert_eq!(homs, vec![MonoidHom::new(vec![0, 0]), MonoidHom::new(vec![0, 1])]);
        assert_eq!(homs, brute_force(&z2, &z2));
    }

    #[test]
    fn z3_to_z2_only_constant() {
        let homs = enumerate_homs(&builtins::cyclic(3), &builtins::cyclic(2));
        assert_eq!(homs, vec![MonoidHom::new(vec![0, 0, 0])]);
    }

    #[test]
    fn into_trivial() {
        for m in [builtins::cyclic(4), builtins::flipflop1(), builtins::nilpotent(3)] {
            assert_eq!(enumerate_homs(&m, &builtins::trivial()).len(), 1);
        }
    }

    #[test]
    fn matches_brute_force_on_builtins() {
        let ms = [
            builtins::trivial(),
            builtins::cyclic(2),
            builtins::cyclic(3),
            builtins::chain(3),
            builtins::nilpotent(2),
            builtins::flipflop1(),
            builtins::monogenic(2, 2),
        ];
        for a in &ms {
            for b in &ms {
                assert_eq!(enumerate_homs(a, b), brute_force(a, b), "{a:?} -> {b:?}");
            }
        }
    }

    #[test]
    fn tuple_order() {
        let mut seen = Vec::new();
        for_each_tuple(2, 2, |t| seen.push(t.to_vec()));
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let mut count = 0;
        for_each_tuple(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }
}
