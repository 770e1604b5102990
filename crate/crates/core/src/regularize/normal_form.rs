use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{builtins, enumerate_homs, Element, FiniteMonoid, Subset};
use crate::error::{Error, Result};
use crate::text::{join, read_table_body, write_table, Lines};
use crate::zlinalg::{vec_add, zero_vector, IntVector, Lattice};

/// A finitely generated commutative regular monoid `N ×_λ^Ξ ℤ`.
///
/// Elements are pairs `[d, v]` with `d` in the finite semilattice `N` and `v ∈ ℤ^λ(d)`
/// modulo the lattice `Ξ(d)`; the product is `[d, v]·[d', v'] = [dd', v + v']`.
/// Coordinates `α` each carry an anchor idempotent `d(α)` and `λ(d) = {α : d·d(α) = d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormMonoid {
    semilattice: FiniteMonoid,
    coords: usize,
    lambda: Vec<Vec<usize>>,
    xi: Vec<Lattice>,
    anchors: Vec<Element>,
}

/// An element `[d, v]`; `v` has one entry per coordinate, zero off `λ(d)`, and is kept
/// canonically reduced modulo `Ξ(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NFElement {
    pub d: Element,
    pub v: IntVector,
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(ToString::to_string).collect();
        write!(f, "d:{} v:({})", self.d, v.join(","))
    }
}

impl NormalFormMonoid {
    /// Validates the data: `N` a semilattice, `λ(d) = {α : d·d(α) = d}`, `Ξ(d)` supported
    /// on `λ(d)`, and `Ξ(a) ⊆ Ξ(b)` whenever `b ⪯ a`.
    pub fn new(
        semilattice: FiniteMonoid,
        coords: usize,
        lambda: Vec<Vec<usize>>,
        xi_generators: Vec<Vec<IntVector>>,
        anchors: Vec<Element>,
    ) -> Result<Self> {
        let n = semilattice.size();
        if !semilattice.is_semilattice() {
            return Err(Error::Validation("normal form base is not a semilattice".into()));
        }
        if anchors.len() != coords || anchors.iter().any(|&d| d >= n) {
            return Err(Error::Validation("every coordinate needs an anchor idempotent".into()));
        }
        if lambda.len() != n || xi_generators.len() != n {
            return Err(Error::Validation("lambda and xi must be given for every idempotent".into()));
        }
        let mut lambda = lambda;
        for (d, l) in lambda.iter_mut().enumerate() {
            l.sort_unstable();
            l.dedup();
            let expected: Vec<usize> = (0..coords)
                .filter(|&a| semilattice.mul(d, anchors[a]) == d)
                .collect();
            if *l != expected {
                return Err(Error::Validation(format!(
                    "lambda({d}) = {l:?}, but the anchors force {expected:?}"
                )));
            }
        }
        let mut xi = Vec::with_capacity(n);
        for (d, gens) in xi_generators.iter().enumerate() {
            for g in gens {
                if g.len() != coords {
                    return Err(Error::DimensionMismatch(format!(
                        "xi({d}) vector of length {}, expected {coords}",
                        g.len()
                    )));
                }
                if let Some(a) = (0..coords).find(|&a| !g[a].is_zero() && !lambda[d].contains(&a)) {
                    return Err(Error::Validation(format!(
                        "xi({d}) generator uses coordinate {a} outside lambda({d})"
                    )));
                }
            }
            xi.push(Lattice::from_generators(coords, gens)?);
        }
        for a in 0..n {
            for b in 0..n {
                if semilattice.mul(a, b) == b && !xi[b].contains_lattice(&xi[a])? {
                    return Err(Error::Validation(format!("xi({a}) is not contained in xi({b})")));
                }
            }
        }
        Ok(NormalFormMonoid {
            semilattice,
            coords,
            lambda,
            xi,
            anchors,
        })
    }

    /// `ℤ` under addition: trivial semilattice, one coordinate, `Ξ = 0`.
    pub fn integers() -> Self {
        Self::new(builtins::trivial(), 1, vec![vec![0]], vec![vec![]], vec![0])
            .expect("integers normal form")
    }

    /// `integers`, or the normal form of a finite commutative regular built-in keyword.
    pub fn by_name(name: &str) -> Result<Self> {
        if name == "integers" {
            return Ok(Self::integers());
        }
        let m = builtins::by_name(name)?;
        let gens = m.minimal_generating_set();
        Ok(to_normal_form(&m, &gens)?.into_nf())
    }

    pub fn semilattice(&self) -> &FiniteMonoid {
        &self.semilattice
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn lambda(&self, d: Element) -> &[usize] {
        &self.lambda[d]
    }

    pub fn xi(&self, d: Element) -> &Lattice {
        &self.xi[d]
    }

    pub fn anchor(&self, alpha: usize) -> Element {
        self.anchors[alpha]
    }

    pub fn anchors(&self) -> &[Element] {
        &self.anchors
    }

    /// Whether every group `G_d` is finite, i.e. `Ξ(d)` has full rank on `λ(d)`.
    pub fn is_finite(&self) -> bool {
        (0..self.semilattice.size()).all(|d| self.xi[d].rank() == self.lambda[d].len())
    }

    pub fn identity(&self) -> NFElement {
        self.idempotent(self.semilattice.identity())
    }

    pub fn idempotent(&self, d: Element) -> NFElement {
        NFElement {
            d,
            v: zero_vector(self.coords),
        }
    }

    /// `[d, v]` after support validation and canonical reduction.
    pub fn element(&self, d: Element, v: IntVector) -> Result<NFElement> {
        if d >= self.semilattice.size() {
            return Err(Error::Validation(format!("idempotent {d} out of range")));
        }
        if v.len() != self.coords {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {}, expected {}",
                v.len(),
                self.coords
            )));
        }
        if let Some(a) = (0..self.coords).find(|&a| !v[a].is_zero() && !self.lambda[d].contains(&a)) {
            return Err(Error::Validation(format!("coordinate {a} is outside lambda({d})")));
        }
        Ok(NFElement {
            d,
            v: self.xi[d].reduce(&v)?,
        })
    }

    /// The generator `α = [d(α), e_α]`.
    pub fn generator(&self, alpha: usize) -> NFElement {
        let mut v = zero_vector(self.coords);
        v[alpha] = BigInt::one();
        self.canonical(self.anchors[alpha], v)
    }

    fn canonical(&self, d: Element, v: IntVector) -> NFElement {
        let v = self.xi[d].reduce(&v).expect("dimension checked");
        NFElement { d, v }
    }

    pub fn mul(&self, x: &NFElement, y: &NFElement) -> NFElement {
        self.canonical(self.semilattice.mul(x.d, y.d), vec_add(&x.v, &y.v))
    }

    pub fn product<'a>(&self, xs: impl IntoIterator<Item = &'a NFElement>) -> NFElement {
        xs.into_iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    /// The inverse of `x` inside its group `G_d`.
    pub fn inverse(&self, x: &NFElement) -> NFElement {
        self.canonical(x.d, x.v.iter().map(|c| -c).collect())
    }

    pub fn eq(&self, x: &NFElement, y: &NFElement) -> bool {
        x == y
    }

    /// Parses the `nf` text block, or a keyword line (`integers`, `cyclic:3`, …).
    pub fn read(lines: &mut Lines) -> Result<Self> {
        let header = lines.next_line()?;
        if header.keyword() != "nf" {
            header.expect_args(0)?;
            return Self::by_name(header.keyword()).map_err(|e| header.error(e.to_string()));
        }
        if let [name] = header.args() {
            // `nf cyclic:6`: the normal form of a finite built-in.
            return Self::by_name(name).map_err(|e| header.error(e.to_string()));
        }
        header.expect_args(0)?;
        let sl_header = lines.expect("semilattice")?;
        let semilattice = read_table_body(lines, &sl_header)?;
        let coords_line = lines.expect("coords")?;
        coords_line.expect_args(1)?;
        let coords: usize = coords_line.parse_arg(0)?;
        let n = semilattice.size();
        let mut lambda: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut xi: Vec<Vec<IntVector>> = vec![Vec::new(); n];
        let mut anchors: Vec<Option<Element>> = vec![None; coords];
        while let Some(kw) = lines.peek_keyword() {
            match kw {
                "lambda" => {
                    let line = lines.next_line()?;
                    let args = line.usizes()?;
                    let (&d, rest) = args
                        .split_first()
                        .ok_or_else(|| line.error("lambda needs an idempotent"))?;
                    if d >= n || lambda[d].is_some() {
                        return Err(line.error(format!("bad or repeated lambda for {d}")));
                    }
                    lambda[d] = Some(rest.to_vec());
                }
                "xi" => {
                    let line = lines.next_line()?;
                    line.expect_args(2)?;
                    let d: usize = line.parse_arg(0)?;
                    let k: usize = line.parse_arg(1)?;
                    if d >= n {
                        return Err(line.error(format!("idempotent {d} out of range")));
                    }
                    for _ in 0..k {
                        let row = lines.next_line()?;
                        let v: Vec<BigInt> = row.parse_all(&row.tokens)?;
                        if v.len() != coords {
                            return Err(row.error(format!("expected {coords} entries")));
                        }
                        xi[d].push(v);
                    }
                }
                "anchor" => {
                    let line = lines.next_line()?;
                    line.expect_args(2)?;
                    let a: usize = line.parse_arg(0)?;
                    let d: usize = line.parse_arg(1)?;
                    if a >= coords {
                        return Err(line.error(format!("coordinate {a} out of range")));
                    }
                    anchors[a] = Some(d);
                }
                _ => break,
            }
        }
        let anchors: Vec<Element> = anchors
            .into_iter()
            .enumerate()
            .map(|(a, d)| d.ok_or_else(|| Error::parse(header.number, format!("coordinate {a} has no anchor"))))
            .collect::<Result<_>>()?;
        // Omitted lambda lines default to what the anchors force.
        let lambda = lambda
            .into_iter()
            .enumerate()
            .map(|(d, l)| {
                l.unwrap_or_else(|| (0..coords).filter(|&a| semilattice.mul(d, anchors[a]) == d).collect())
            })
            .collect();
        Self::new(semilattice, coords, lambda, xi, anchors).map_err(|e| header.error(e.to_string()))
    }

    pub fn write(&self, out: &mut String) {
        let _ = writeln!(out, "nf");
        write_table(out, "semilattice", &self.semilattice);
        let _ = writeln!(out, "coords {}", self.coords);
        for (d, l) in self.lambda.iter().enumerate() {
            let _ = writeln!(out, "lambda {d}{}{}", if l.is_empty() { "" } else { " " }, join(l));
        }
        for (d, x) in self.xi.iter().enumerate() {
            let _ = writeln!(out, "xi {d} {}", x.rank());
            for b in x.basis() {
                let _ = writeln!(out, "{}", join(b));
            }
        }
        for (a, d) in self.anchors.iter().enumerate() {
            let _ = writeln!(out, "anchor {a} {d}");
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let nf = Self::read(&mut lines)?;
        lines.finish()?;
        Ok(nf)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }
}

/// A finite commutative regular monoid together with its normal form and the
/// isomorphism between them.
#[derive(Debug, Clone)]
pub struct NormalFormIso {
    nf: NormalFormMonoid,
    monoid: FiniteMonoid,
    generators: Vec<Element>,
    idempotent_embedding: Vec<Element>,
    encoding: Vec<NFElement>,
}

impl NormalFormIso {
    pub fn nf(&self) -> &NormalFormMonoid {
        &self.nf
    }

    pub fn into_nf(self) -> NormalFormMonoid {
        self.nf
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Semilattice index → idempotent of the finite monoid.
    pub fn idempotent_embedding(&self) -> &[Element] {
        &self.idempotent_embedding
    }

    pub fn encode(&self, a: Element) -> &NFElement {
        &self.encoding[a]
    }

    /// `[d, v] ↦ d·∏ α^{v_α}`, powers taken inside the maximal subgroups.
    pub fn decode(&self, x: &NFElement) -> Result<Element> {
        let m = &self.monoid;
        let mut acc = *self
            .idempotent_embedding
            .get(x.d)
            .ok_or_else(|| Error::Validation(format!("idempotent {} out of range", x.d)))?;
        for (alpha, c) in x.v.iter().enumerate() {
            if !c.is_zero() {
                acc = m.mul(acc, m.group_pow(self.generators[alpha], c)?);
            }
        }
        Ok(acc)
    }

    /// Exhaustive check that encoding is a bijective homomorphism with inverse `decode`.
    pub fn is_isomorphism(&self) -> bool {
        let m = &self.monoid;
        m.elements().all(|a| self.decode(self.encode(a)).ok() == Some(a))
            && m.elements().all(|a| {
                m.elements().all(|b| {
                    *self.encode(m.mul(a, b)) == self.nf.mul(self.encode(a), self.encode(b))
                })
            })
            && *self.encode(m.identity()) == self.nf.identity()
    }
}

/// Normal form of a finite commutative completely regular monoid with respect to a
/// generating sequence, which becomes the coordinate set.
pub fn to_normal_form(m: &FiniteMonoid, generators: &[Element]) -> Result<NormalFormIso> {
    m.require_commutative()?;
    if let Some(a) = m.elements().find(|&a| !m.is_regular_element(a)) {
        return Err(Error::NotRegular(a));
    }
    if !m.generates(&Subset::from_elements(m.size(), generators.iter().copied())) {
        return Err(Error::NotGenerating);
    }
    let q = generators.len();
    let (semilattice, embedding) = m.submonoid(&m.idempotents())?;
    let mut index_of = vec![usize::MAX; m.size()];
    for (i, &d) in embedding.iter().enumerate() {
        index_of[d] = i;
    }
    let anchors: Vec<Element> = generators.iter().map(|&g| index_of[m.d_of(g)]).collect();
    let lambda: Vec<Vec<usize>> = embedding
        .iter()
        .map(|&d| (0..q).filter(|&a| m.mul(d, m.d_of(generators[a])) == d).collect())
        .collect();

    // Ξ(d): relators of a spanning tree of the Cayley graph of G_d on the generators d·α.
    let mut xi = Vec::with_capacity(embedding.len());
    for (i, &d) in embedding.iter().enumerate() {
        let mut word: Vec<Option<IntVector>> = vec![None; m.size()];
        word[d] = Some(zero_vector(q));
        let mut queue = VecDeque::from([d]);
        let mut relators = Vec::new();
        while let Some(x) = queue.pop_front() {
            let wx = word[x].clone().expect("visited");
            for &a in &lambda[i] {
                let y = m.mul(x, generators[a]);
                let mut wy = wx.clone();
                wy[a] += 1;
                match &word[y] {
                    None => {
                        word[y] = Some(wy);
                        queue.push_back(y);
                    }
                    Some(existing) => {
                        let r: IntVector = wy.iter().zip(existing).map(|(p, q)| p - q).collect();
                        if r.iter().any(|c| !c.is_zero()) {
                            relators.push(r);
                        }
                    }
                }
            }
        }
        xi.push(relators);
    }
    let nf = NormalFormMonoid::new(semilattice, q, lambda, xi, anchors)?;

    // Exponent vectors of every element along a BFS from the identity.
    let mut exps: Vec<Option<IntVector>> = vec![None; m.size()];
    exps[m.identity()] = Some(zero_vector(q));
    let mut queue = VecDeque::from([m.identity()]);
    while let Some(x) = queue.pop_front() {
        for (a, &g) in generators.iter().enumerate() {
            let y = m.mul(x, g);
            if exps[y].is_none() {
                let mut w = exps[x].clone().expect("visited");
                w[a] += 1;
                exps[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    let encoding = m
        .elements()
        .map(|a| {
            let v = exps[a].clone().expect("generators generate");
            nf.element(index_of[m.d_of(a)], v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalFormIso {
        nf,
        monoid: m.clone(),
        generators: generators.to_vec(),
        idempotent_embedding: embedding,
        encoding,
    })
}

/// A homomorphism from a normal-form monoid into a finite monoid, given by its values
/// on the idempotents and on the coordinate generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NfHom {
    pub idempotent_images: Vec<Element>,
    pub generator_images: Vec<Element>,
}

impl NfHom {
    pub fn apply(&self, target: &FiniteMonoid, x: &NFElement) -> Element {
        let mut acc = self.idempotent_images[x.d];
        for (alpha, c) in x.v.iter().enumerate() {
            if !c.is_zero() {
                let g = target
                    .group_pow(self.generator_images[alpha], c)
                    .expect("generator images lie in subgroups");
                acc = target.mul(acc, g);
            }
        }
        acc
    }

    /// The image, generated by the idempotent images and the generator images with their
    /// group inverses.
    pub fn image(&self, target: &FiniteMonoid) -> Subset {
        let mut gens: Vec<Element> = self.idempotent_images.clone();
        for &g in &self.generator_images {
            gens.push(g);
            gens.push(target.inverse(g).expect("generator images lie in subgroups"));
        }
        target.generated_submonoid(&Subset::from_elements(target.size(), gens))
    }
}

/// Every homomorphism `nf → target`, in lexicographic order of
/// `(idempotent images, generator images)`.
///
/// A choice is a homomorphism iff the idempotent part is a monoid homomorphism of the
/// semilattice, each generator image `g_α` lies in a subgroup with `d_{g_α} = φ(d(α))`,
/// all images pairwise commute, and `φ(d)·∏ g^w = φ(d)` for each basis vector `w` of `Ξ(d)`.
pub fn nf_homs_to_finite(nf: &NormalFormMonoid, target: &FiniteMonoid) -> Vec<NfHom> {
    let commute = |a: Element, b: Element| target.mul(a, b) == target.mul(b, a);
    let mut out = Vec::new();
    for phi in enumerate_homs(nf.semilattice(), target) {
        let phi = phi.into_images();
        let candidates: Vec<Vec<Element>> = (0..nf.coords())
            .map(|alpha| {
                target
                    .elements()
                    .filter(|&g| {
                        target.in_subgroup(g)
                            && target.d_of(g) == phi[nf.anchor(alpha)]
                            && phi.iter().all(|&p| commute(p, g))
                    })
                    .collect()
            })
            .collect();
        let mut chosen = Vec::with_capacity(nf.coords());
        search_generators(nf, target, &phi, &candidates, &mut chosen, &mut out);
    }
    out.sort();
    out
}

fn search_generators(
    nf: &NormalFormMonoid,
    target: &FiniteMonoid,
    phi: &[Element],
    candidates: &[Vec<Element>],
    chosen: &mut Vec<Element>,
    out: &mut Vec<NfHom>,
) {
    if chosen.len() == candidates.len() {
        let h = NfHom {
            idempotent_images: phi.to_vec(),
            generator_images: chosen.clone(),
        };
        let relators_hold = (0..nf.semilattice().size()).all(|d| {
            nf.xi(d).basis().iter().all(|w| {
                h.apply(target, &NFElement { d, v: w.clone() }) == phi[d]
            })
        });
        if relators_hold {
            out.push(h);
        }
        return;
    }
    for &g in &candidates[chosen.len()] {
        if chosen
            .iter()
            .all(|&c| target.mul(c, g) == target.mul(g, c))
        {
            chosen.push(g);
            search_generators(nf, target, phi, candidates, chosen, out);
            chosen.pop();
        }
    }
}
