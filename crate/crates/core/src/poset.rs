//! Finite posets, order complexes, edgewise subdivision, cones, joins and
//! poset maps.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::guard::{self, GuardError};

/// Default cap on the number of simplices an order complex may have.
pub const SIMPLEX_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("relation matrix has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("relation is not reflexive at element {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric on elements {0} and {1}")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive on {0} <= {1} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("assignment is not order-preserving: {0} <= {1} but images are incomparable or reversed")]
    NotMonotone(usize, usize),
    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("index {index} out of range for {len} elements")]
    OutOfRange { index: usize, len: usize },
    #[error("subset {subset} is not closed downward in the union: {below} <= {element}")]
    ClosureViolated { subset: &'static str, element: usize, below: usize },
    #[error("nerve of the union differs from the union of the nerves")]
    NerveMismatch,
    #[error("image of simplex {0:?} is not a simplex of the target")]
    ImageNotSimplex(Vec<usize>),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// A finite poset with opaque element labels and a dense `≤` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset<L> {
    labels: Vec<L>,
    leq: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Apex {
    Top,
    Bottom,
}

impl<L> FinPoset<L> {
    /// Builds a poset from a relation given as a row-major `n × n` matrix.
    pub fn from_matrix(labels: Vec<L>, leq: Vec<bool>) -> Result<Self, PosetError> {
        let n = labels.len();
        if leq.len() != n * n {
            return Err(PosetError::DimensionMismatch { expected: n * n, got: leq.len() });
        }
        let poset = FinPoset { labels, leq };
        poset.validate()?;
        Ok(poset)
    }

    /// Builds a poset from a comparison predicate on labels.
    pub fn from_relation(labels: Vec<L>, leq: impl Fn(&L, &L) -> bool) -> Result<Self, PosetError> {
        let n = labels.len();
        let mut m = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = leq(&labels[i], &labels[j]);
            }
        }
        Self::from_matrix(labels, m)
    }

    pub fn antichain(labels: Vec<L>) -> Self {
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        FinPoset { labels, leq }
    }

    /// Total order in the order of `labels`.
    pub fn chain(labels: Vec<L>) -> Self {
        let n = labels.len();
        let leq = (0..n * n).map(|c| c / n <= c % n).collect();
        FinPoset { labels, leq }
    }

    pub fn validate(&self) -> Result<(), PosetError> {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(PosetError::NotReflexive(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.leq(i, j) && self.leq(j, i) {
                    return Err(PosetError::NotAntisymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                for l in 0..n {
                    if self.leq(j, l) && !self.leq(i, l) {
                        return Err(PosetError::NotTransitive(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &L {
        &self.labels[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// Pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|m| self.lt(i, m) && self.lt(m, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !(0..self.len()).any(|j| self.lt(j, i))).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !(0..self.len()).any(|j| self.lt(i, j))).collect()
    }

    /// Whether every element of the union below an element of `subset` lies in `subset`.
    pub fn is_down_closed_within(&self, subset: &[usize], union: &[usize]) -> Option<(usize, usize)> {
        let members: BTreeSet<usize> = subset.iter().copied().collect();
        for &x in subset {
            for &y in union {
                if self.leq(y, x) && !members.contains(&y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn map_labels<M>(&self, f: impl FnMut(&L) -> M) -> FinPoset<M> {
        FinPoset { labels: self.labels.iter().map(f).collect(), leq: self.leq.clone() }
    }

    /// Relation matrix restricted to the given indices (sorted, deduplicated).
    pub fn subposet(&self, indices: &[usize]) -> FinPoset<L>
    where
        L: Clone,
    {
        let idx: Vec<usize> = indices.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let m = idx.len();
        let mut leq = vec![false; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                leq[a * m + b] = self.leq(i, j);
            }
        }
        FinPoset { labels: idx.iter().map(|&i| self.labels[i].clone()).collect(), leq }
    }

    /// Poset of intervals `(x ≤ y)`, with `(x ≤ y) ≤ (c ≤ d)` iff `c ≤ x` and `y ≤ d`.
    pub fn edgewise_subdivision(&self) -> FinPoset<(L, L)>
    where
        L: Clone,
    {
        let n = self.len();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| self.leq(x, y)).collect();
        let m = pairs.len();
        let mut leq = vec![false; m * m];
        for (a, &(x, y)) in pairs.iter().enumerate() {
            for (b, &(c, d)) in pairs.iter().enumerate() {
                leq[a * m + b] = self.leq(c, x) && self.leq(y, d);
            }
        }
        let labels = pairs.iter().map(|&(x, y)| (self.labels[x].clone(), self.labels[y].clone())).collect();
        FinPoset { labels, leq }
    }

    /// Adds an apex (label `None`) above or below every element.
    pub fn cone(&self, apex: Apex) -> FinPoset<Option<L>>
    where
        L: Clone,
    {
        let n = self.len();
        let m = n + 1;
        let mut leq = vec![false; m * m];
        for i in 0..n {
            for j in 0..n {
                leq[i * m + j] = self.leq(i, j);
            }
            match apex {
                Apex::Top => leq[i * m + n] = true,
                Apex::Bottom => leq[n * m + i] = true,
            }
        }
        leq[n * m + n] = true;
        let mut labels: Vec<Option<L>> = self.labels.iter().cloned().map(Some).collect();
        labels.push(None);
        FinPoset { labels, leq }
    }

    /// All chains `x_0 < … < x_d` inside `subset`, as sorted index tuples.
    pub fn chains_within(&self, subset: &[usize]) -> Result<Vec<Vec<usize>>, PosetError> {
        let members: Vec<usize> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let up: BTreeMap<usize, Vec<usize>> = members
            .iter()
            .map(|&i| (i, members.iter().copied().filter(|&j| self.lt(i, j)).collect()))
            .collect();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = members.iter().map(|&i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().expect("chains are nonempty");
            for &j in &up[&last] {
                let mut longer = chain.clone();
                longer.push(j);
                stack.push(longer);
            }
            let mut simplex = chain;
            simplex.sort_unstable();
            out.push(simplex);
            guard::check("order complex simplices", out.len() as u128, SIMPLEX_LIMIT)?;
        }
        Ok(out)
    }

    /// The order complex; vertices are the element indices.
    pub fn order_complex(&self) -> Result<SimplicialComplex, PosetError> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.order_complex_on(&all)
    }

    /// Order complex of the induced subposet, keeping the ambient vertex numbering.
    pub fn order_complex_on(&self, subset: &[usize]) -> Result<SimplicialComplex, PosetError> {
        let chains = self.chains_within(subset)?;
        Ok(SimplicialComplex::from_closed(self.len(), chains))
    }
}

impl<L: Ord> FinPoset<L> {
    /// Index lookup by label.
    pub fn index_map(&self) -> BTreeMap<&L, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l, i)).collect()
    }
}

/// Random poset on `n` elements: a random DAG on `0..n` (edges `i → j`, `i < j`,
/// each with probability `density`) closed transitively.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinPoset<usize> {
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
        for j in i + 1..n {
            leq[i * n + j] = rng.gen_bool(density);
        }
    }
    for m in 0..n {
        for i in 0..n {
            if leq[i * n + m] {
                for j in 0..n {
                    if leq[m * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    FinPoset { labels: (0..n).collect(), leq }
}

/// Searches for an order isomorphism `a → b`, returned as an index assignment.
pub fn find_isomorphism<L, M>(a: &FinPoset<L>, b: &FinPoset<M>) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    let signature = |p: &dyn Fn(usize, usize) -> bool, i: usize| {
        let below = (0..n).filter(|&j| p(j, i)).count();
        let above = (0..n).filter(|&j| p(i, j)).count();
        (below, above)
    };
    let sig_a: Vec<(usize, usize)> = (0..n).map(|i| signature(&|x, y| a.leq(x, y), i)).collect();
    let sig_b: Vec<(usize, usize)> = (0..n).map(|i| signature(&|x, y| b.leq(x, y), i)).collect();
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return None;
    }
    // Assign rarest signatures first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (sig_a.iter().filter(|&&s| s == sig_a[i]).count(), i));

    fn extend<L, M>(
        a: &FinPoset<L>,
        b: &FinPoset<M>,
        sig_a: &[(usize, usize)],
        sig_b: &[(usize, usize)],
        order: &[usize],
        depth: usize,
        assignment: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        for y in 0..b.len() {
            if used[y] || sig_b[y] != sig_a[x] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&u| {
                let v = assignment[u].expect("assigned earlier");
                a.leq(u, x) == b.leq(v, y) && a.leq(x, u) == b.leq(y, v)
            });
            if !consistent {
                continue;
            }
            assignment[x] = Some(y);
            used[y] = true;
            if extend(a, b, sig_a, sig_b, order, depth + 1, assignment, used) {
                return true;
            }
            assignment[x] = None;
            used[y] = false;
        }
        false
    }

    let mut assignment = vec![None; n];
    let mut used = vec![false; n];
    if extend(a, b, &sig_a, &sig_b, &order, 0, &mut assignment, &mut used) {
        Some(assignment.into_iter().map(|x| x.expect("complete assignment")).collect())
    } else {
        None
    }
}

/// Whether `map` is a bijection with `x ≤ y ⟺ map(x) ≤ map(y)`.
pub fn is_isomorphism<L, M>(a: &FinPoset<L>, b: &FinPoset<M>, map: &[usize]) -> bool {
    let n = a.len();
    if n != b.len() || map.len() != n || map.iter().any(|&y| y >= n) {
        return false;
    }
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    distinct.len() == n && (0..n).all(|x| (0..n).all(|y| a.leq(x, y) == b.leq(map[x], map[y])))
}

/// An order-preserving map between posets, by element index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetMap {
    source_len: usize,
    target_len: usize,
    assignment: Vec<usize>,
}

impl PosetMap {
    pub fn new<L, M>(source: &FinPoset<L>, target: &FinPoset<M>, assignment: Vec<usize>) -> Result<Self, PosetError> {
        if assignment.len() != source.len() {
            return Err(PosetError::AssignmentLength { expected: source.len(), got: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(PosetError::OutOfRange { index: bad, len: target.len() });
        }
        for x in 0..source.len() {
            for y in 0..source.len() {
                if source.leq(x, y) && !target.leq(assignment[x], assignment[y]) {
                    return Err(PosetError::NotMonotone(x, y));
                }
            }
        }
        Ok(PosetMap { source_len: source.len(), target_len: target.len(), assignment })
    }

    pub fn identity<L>(poset: &FinPoset<L>) -> Self {
        PosetMap { source_len: poset.len(), target_len: poset.len(), assignment: (0..poset.len()).collect() }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// The induced simplicial map of order complexes.
    pub fn simplicial_map<L, M>(&self, source: &FinPoset<L>, target: &FinPoset<M>) -> Result<SimplicialMap, PosetError> {
        debug_assert_eq!(source.len(), self.source_len);
        debug_assert_eq!(target.len(), self.target_len);
        SimplicialMap::new(source.order_complex()?, target.order_complex()?, self.assignment.clone())
    }
}

/// A finite abstract simplicial complex; vertices are `0..vertex_count` and
/// `simplices[d]` lists the `d`-simplices as strictly increasing tuples, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    pub fn empty(vertex_count: usize) -> Self {
        SimplicialComplex { vertex_count, simplices: Vec::new() }
    }

    /// Grouping of an already face-closed family of sorted tuples.
    fn from_closed(vertex_count: usize, family: Vec<Vec<usize>>) -> Self {
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for s in family {
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        for layer in by_dim.iter_mut() {
            layer.sort();
            layer.dedup();
        }
        SimplicialComplex { vertex_count, simplices: by_dim }
    }

    /// The smallest complex containing the given simplices.
    pub fn from_simplices(
        vertex_count: usize,
        generators: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, PosetError> {
        let mut family = BTreeSet::new();
        for mut s in generators {
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(PosetError::OutOfRange { index: v, len: vertex_count });
            }
            if s.is_empty() {
                continue;
            }
            guard::check("simplex dimension", s.len() as u128, 24)?;
            for mask in 1u32..(1 << s.len()) {
                let face: Vec<usize> = s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                family.insert(face);
            }
            guard::check("simplices", family.len() as u128, SIMPLEX_LIMIT)?;
        }
        Ok(Self::from_closed(vertex_count, family.into_iter().collect()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn simplices(&self, d: usize) -> &[Vec<usize>] {
        self.simplices.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        self.simplices.get(d)?.binary_search_by(|s| s.as_slice().cmp(simplex)).ok()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index_of(simplex).is_some()
    }

    /// Maximal simplices, sorted lexicographically.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (d, layer) in self.simplices.iter().enumerate() {
            let above = self.simplices.get(d + 1);
            for s in layer {
                let covered = above.is_some_and(|up| {
                    up.iter().any(|t| s.iter().all(|v| t.binary_search(v).is_ok()))
                });
                if !covered {
                    out.push(s.clone());
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_closed_under_faces(&self) -> bool {
        self.simplices.iter().enumerate().all(|(d, layer)| {
            layer.iter().all(|s| {
                s.windows(2).all(|w| w[0] < w[1])
                    && s.iter().all(|&v| v < self.vertex_count)
                    && (d == 0
                        || (0..s.len()).all(|i| {
                            let mut face = s.clone();
                            face.remove(i);
                            self.contains(&face)
                        }))
            })
        })
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.iter().flatten().all(|s| other.contains(s))
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let family = self.simplices.iter().chain(&other.simplices).flatten().cloned().collect();
        Self::from_closed(self.vertex_count.max(other.vertex_count), family)
    }

    /// Simplices `σ ⊔ τ`; vertices of `other` are shifted past those of `self`.
    pub fn join(&self, other: &SimplicialComplex) -> Result<SimplicialComplex, PosetError> {
        let shift = self.vertex_count;
        let left: Vec<Vec<usize>> = std::iter::once(Vec::new()).chain(self.simplices.iter().flatten().cloned()).collect();
        let right: Vec<Vec<usize>> = std::iter::once(Vec::new())
            .chain(other.simplices.iter().flatten().map(|t| t.iter().map(|v| v + shift).collect()))
            .collect();
        guard::check("join simplices", left.len() as u128 * right.len() as u128, SIMPLEX_LIMIT)?;
        let mut family = Vec::with_capacity(left.len() * right.len());
        for s in &left {
            for t in &right {
                if s.is_empty() && t.is_empty() {
                    continue;
                }
                let mut u = s.clone();
                u.extend_from_slice(t);
                family.push(u);
            }
        }
        Ok(Self::from_closed(shift + other.vertex_count, family))
    }

    /// `Σ (-1)^d #d-simplices`, minus one when reduced.
    pub fn euler_characteristic(&self, reduced: bool) -> i64 {
        let chi: i64 = self
            .simplices
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum();
        if reduced {
            chi - 1
        } else {
            chi
        }
    }

    /// Facet list for export.
    pub fn facets_json(&self) -> Vec<Vec<usize>> {
        self.facets()
    }
}

/// A vertex map carrying simplices of `source` to simplices of `target`.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(source: SimplicialComplex, target: SimplicialComplex, vertex_map: Vec<usize>) -> Result<Self, PosetError> {
        if vertex_map.len() != source.vertex_count {
            return Err(PosetError::AssignmentLength { expected: source.vertex_count, got: vertex_map.len() });
        }
        let map = SimplicialMap { source, target, vertex_map };
        for s in map.source.simplices.iter().flatten() {
            let mut image: Vec<usize> = s.iter().map(|&v| map.vertex_map[v]).collect();
            image.sort_unstable();
            image.dedup();
            if !map.target.contains(&image) {
                return Err(PosetError::ImageNotSimplex(s.clone()));
            }
        }
        Ok(map)
    }

    pub fn identity(complex: SimplicialComplex) -> Self {
        let vertex_map = (0..complex.vertex_count).collect();
        SimplicialMap { source: complex.clone(), target: complex, vertex_map }
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Chain-level image of an oriented simplex: the target simplex index and a
    /// sign, or `None` when the image is degenerate.
    pub fn chain_image(&self, simplex: &[usize]) -> Option<(usize, i32)> {
        let image: Vec<usize> = simplex.iter().map(|&v| self.vertex_map[v]).collect();
        let mut sorted = image.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let index = self.target.index_of(&sorted).expect("images of simplices are simplices");
        let mut inversions = 0;
        for i in 0..image.len() {
            for j in i + 1..image.len() {
                if image[i] > image[j] {
                    inversions += 1;
                }
            }
        }
        Some((index, if inversions % 2 == 0 { 1 } else { -1 }))
    }
}

/// Nerves of a union of two subposets, of each piece and of their intersection,
/// all on the ambient vertex numbering.
#[derive(Clone, Debug)]
pub struct MayerVietorisTriple {
    pub union: SimplicialComplex,
    pub first: SimplicialComplex,
    pub second: SimplicialComplex,
    pub intersection: SimplicialComplex,
}

/// Requires each subset to be downward closed inside the union, so that every
/// chain of the union lies in one of the pieces.
pub fn union_and_intersection<L>(
    poset: &FinPoset<L>,
    first: &[usize],
    second: &[usize],
) -> Result<MayerVietorisTriple, PosetError> {
    for &i in first.iter().chain(second) {
        if i >= poset.len() {
            return Err(PosetError::OutOfRange { index: i, len: poset.len() });
        }
    }
    let a: BTreeSet<usize> = first.iter().copied().collect();
    let b: BTreeSet<usize> = second.iter().copied().collect();
    let union: Vec<usize> = a.union(&b).copied().collect();
    let meet: Vec<usize> = a.intersection(&b).copied().collect();
    let a: Vec<usize> = a.into_iter().collect();
    let b: Vec<usize> = b.into_iter().collect();
    if let Some((element, below)) = poset.is_down_closed_within(&a, &union) {
        return Err(PosetError::ClosureViolated { subset: "first", element, below });
    }
    if let Some((element, below)) = poset.is_down_closed_within(&b, &union) {
        return Err(PosetError::ClosureViolated { subset: "second", element, below });
    }
    let triple = MayerVietorisTriple {
        union: poset.order_complex_on(&union)?,
        first: poset.order_complex_on(&a)?,
        second: poset.order_complex_on(&b)?,
        intersection: poset.order_complex_on(&meet)?,
    };
    if triple.first.union(&triple.second) != triple.union {
        return Err(PosetError::NerveMismatch);
    }
    Ok(triple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn divisibility(n: u32) -> FinPoset<u32> {
        FinPoset::from_relation((1..=n).collect(), |a, b| b % a == 0).unwrap()
    }

    #[test]
    fn validation_rejects_non_orders() {
        assert_eq!(
            FinPoset::from_matrix(vec![0, 1], vec![true, true, true, true]),
            Err(PosetError::NotAntisymmetric(0, 1))
        );
        assert_eq!(FinPoset::from_matrix(vec![0], vec![false]), Err(PosetError::NotReflexive(0)));
        let not_transitive = vec![true, true, false, false, true, true, false, false, true];
        assert_eq!(FinPoset::from_matrix(vec![0, 1, 2], not_transitive), Err(PosetError::NotTransitive(0, 1, 2)));
        assert!(divisibility(12).validate().is_ok());
    }

    #[test]
    fn antichain_and_chain_complexes() {
        let a = FinPoset::antichain(vec!['a', 'b', 'c', 'd']).order_complex().unwrap();
        assert_eq!(a.f_vector(), vec![4]);
        let c = FinPoset::chain(vec![0, 1, 2]).order_complex().unwrap();
        assert_eq!(c.f_vector(), vec![3, 3, 1]);
        assert_eq!(c.facets(), vec![vec![0, 1, 2]]);
        assert!(c.is_closed_under_faces());
    }

    #[test]
    fn subdivision_examples() {
        let sd = FinPoset::antichain(vec![0, 1, 2]).edgewise_subdivision();
        assert_eq!(sd.len(), 3);
        assert!(sd.covering_pairs().is_empty());

        let sd = FinPoset::chain(vec!['a', 'b']).edgewise_subdivision();
        assert_eq!(sd.labels(), &[('a', 'a'), ('a', 'b'), ('b', 'b')]);
        assert!(sd.lt(0, 1) && sd.lt(2, 1) && !sd.comparable(0, 2));
    }

    #[test]
    fn cone_adds_apex() {
        let p = FinPoset::antichain(vec![1, 2]).cone(Apex::Top);
        assert_eq!(p.len(), 3);
        assert_eq!(p.maximal_elements(), vec![2]);
        assert_eq!(p.order_complex().unwrap().f_vector(), vec![3, 2]);
        let empty: FinPoset<u8> = FinPoset::antichain(vec![]);
        assert_eq!(empty.cone(Apex::Bottom).order_complex().unwrap().f_vector(), vec![1]);
    }

    #[test]
    fn join_of_two_zero_spheres_is_a_square() {
        let s0 = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]]).unwrap();
        let j = s0.join(&s0).unwrap();
        assert_eq!(j.f_vector(), vec![4, 4]);
        assert_eq!(j.euler_characteristic(true), -1);
    }

    #[test]
    fn from_simplices_closes_faces() {
        let k = SimplicialComplex::from_simplices(4, vec![vec![2, 0, 1], vec![3]]).unwrap();
        assert_eq!(k.f_vector(), vec![4, 3, 1]);
        assert!(k.is_closed_under_faces());
        assert_eq!(k.facets(), vec![vec![0, 1, 2], vec![3]]);
        assert!(SimplicialComplex::from_simplices(2, vec![vec![5]]).is_err());
    }

    #[test]
    fn isomorphism_search() {
        let a = divisibility(6);
        let b = FinPoset::from_relation(vec![1u32, 2, 3, 6, 4, 5], |x, y| y % x == 0).unwrap();
        let map = find_isomorphism(&a, &b).unwrap();
        assert!(is_isomorphism(&a, &b, &map));
        assert!(find_isomorphism(&a, &divisibility(5)).is_none());
        let chain = FinPoset::chain(vec![0, 1, 2]);
        assert!(find_isomorphism(&chain, &FinPoset::antichain(vec![0, 1, 2])).is_none());
    }

    #[test]
    fn poset_maps_must_be_monotone() {
        let chain = FinPoset::chain(vec![0, 1]);
        assert!(PosetMap::new(&chain, &chain, vec![1, 0]).is_err());
        assert!(PosetMap::new(&chain, &chain, vec![0, 0]).is_ok());
        assert!(PosetMap::new(&chain, &chain, vec![0]).is_err());
    }

    #[test]
    fn chain_images_and_signs() {
        let edge = SimplicialComplex::from_simplices(2, vec![vec![0, 1]]).unwrap();
        let swap = SimplicialMap::new(edge.clone(), edge.clone(), vec![1, 0]).unwrap();
        assert_eq!(swap.chain_image(&[0, 1]), Some((0, -1)));
        let collapse = SimplicialMap::new(edge.clone(), edge.clone(), vec![0, 0]).unwrap();
        assert_eq!(collapse.chain_image(&[0, 1]), None);
        let points = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]]).unwrap();
        assert!(SimplicialMap::new(edge, points, vec![0, 1]).is_err());
    }

    #[test]
    fn union_requires_down_closure() {
        let chain = FinPoset::chain(vec![0, 1, 2]);
        assert!(matches!(
            union_and_intersection(&chain, &[1, 2], &[0]),
            Err(PosetError::ClosureViolated { .. })
        ));
        let triple = union_and_intersection(&chain, &[0, 1], &[0, 1, 2]).unwrap();
        assert_eq!(triple.intersection, triple.first);
        let anti = FinPoset::antichain(vec![0, 1, 2, 3]);
        let triple = union_and_intersection(&anti, &[0, 1], &[2, 3]).unwrap();
        assert!(triple.intersection.is_empty());
        assert_eq!(triple.union.f_vector(), vec![4]);
    }

    #[test]
    fn random_posets_are_posets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 0..8 {
            assert!(random_poset(&mut rng, n, 0.4).validate().is_ok());
        }
    }
}
