//! The finite Heisenberg group of order `p^{2k+1}` acting on C^{p^k}, orthogonal
//! decompositions, and the operations relating them to coisotropic subspaces
//! and to pairs of subspaces of F_p^k.
//!
//! Group elements are triples `(a, b, c)` with `a, b ∈ F_p^k`, `c ∈ F_p` and
//! product `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+b·a')`. The representation is
//! `ρ(a,b,c) e_x = ζ_p^{c + b·x} e_{x+a}`, with `e_x` indexed little-endian.
//! Scalars live in Q(ζ_p), or Q(i) when `p = 2`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::buildings::{
    all_partitions, index_vector, suspension_model, tits_gl, tits_sp, vector_index, BuildingError,
};
use crate::cyclolin::{field_order_for_prime, orthogonal_projector, CycloError, CycloMatrix, CycloScalar, CycloSubspace};
use crate::gflin::{is_prime, GFSubspace, GFVector, GfError, SymplecticSpace};
use crate::guard::{self, GuardError};
use crate::homology::{homology, induced_maps, ChainMap, HomologyError, InducedMap};
use crate::poset::{is_isomorphism, FinPoset, PosetError, PosetMap};

/// Limit on the group order `p^{2k+1}`.
pub const GROUP_LIMIT: u128 = 100_000;
/// Limit on `p^k` for the subspace-pair verification.
pub const PAIR_LIMIT: u128 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("element {0} does not fix the decomposition")]
    NotFixed(String),
    #[error("component {component} is not invariant under {element}")]
    NonInvariant { component: usize, element: String },
    #[error("elements {0} and {1} do not commute")]
    NonAbelian(String, String),
    #[error("operation produced a single-component decomposition")]
    Improper,
    #[error("{0} is not a proper coisotropic subspace")]
    NotCoisotropic(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("the pair (0 ⊆ F_p^k) is excluded")]
    ExcludedPair,
    #[error("check failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), RepError> {
    if cond {
        Ok(())
    } else {
        Err(RepError::Assertion(msg()))
    }
}

/// An element `(a, b, c)` of the Heisenberg group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeisElement {
    pub a: GFVector,
    pub b: GFVector,
    pub c: u32,
}

impl std::fmt::Display for HeisElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?},{:?},{})", self.a.coords(), self.b.coords(), self.c)
    }
}

impl HeisElement {
    /// The image `(a, b)` in F_p^{2k}.
    pub fn projection(&self) -> Vec<u32> {
        let mut v = self.a.coords().to_vec();
        v.extend_from_slice(self.b.coords());
        v
    }

    pub fn is_central(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

/// A monomial matrix: `e_x ↦ ζ_m^{exps[x]} e_{perm[x]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    order: u32,
    perm: Vec<usize>,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn apply(&self, v: &[CycloScalar]) -> Vec<CycloScalar> {
        let mut out = vec![CycloScalar::zero(self.order); v.len()];
        for (x, vx) in v.iter().enumerate() {
            if !vx.is_zero() {
                out[self.perm[x]] = vx.mul_root(self.exps[x] as i64);
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Monomial) -> Monomial {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut exps = vec![0; n];
        for x in 0..n {
            let y = other.perm[x];
            perm[x] = self.perm[y];
            exps[x] = (other.exps[x] + self.exps[y]) % self.order;
        }
        Monomial { order: self.order, perm, exps }
    }

    pub fn trace(&self) -> CycloScalar {
        let mut t = CycloScalar::zero(self.order);
        for x in 0..self.perm.len() {
            if self.perm[x] == x {
                t = &t + &CycloScalar::root(self.order, self.exps[x] as i64);
            }
        }
        t
    }

    /// `tr(P · M)` for a dense matrix `P`.
    pub fn trace_against(&self, p: &CycloMatrix) -> CycloScalar {
        let mut t = CycloScalar::zero(self.order);
        for x in 0..self.perm.len() {
            let entry = p.get(x, self.perm[x]);
            if !entry.is_zero() {
                t = &t + &entry.mul_root(self.exps[x] as i64);
            }
        }
        t
    }

    pub fn to_matrix(&self) -> CycloMatrix {
        let n = self.perm.len();
        let mut m = CycloMatrix::zeros(self.order, n, n);
        for x in 0..n {
            m.set(self.perm[x], x, CycloScalar::root(self.order, self.exps[x] as i64));
        }
        m
    }
}

/// The Heisenberg group of order `p^{2k+1}` with its representation on C^{p^k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisGroup {
    p: u32,
    k: usize,
    order: u32,
    n: usize,
}

impl HeisGroup {
    pub fn new(p: u32, k: usize) -> Result<Self, RepError> {
        if !is_prime(p) {
            return Err(RepError::NotPrime(p));
        }
        if k == 0 {
            return Err(RepError::ZeroDimension);
        }
        guard::check("group order p^(2k+1)", guard::pow(p as u64, 2 * k as u32 + 1), GROUP_LIMIT)?;
        guard::check("representation dimension p^k", guard::pow(p as u64, k as u32), crate::cyclolin::AMBIENT_LIMIT)?;
        Ok(HeisGroup { p, k, order: field_order_for_prime(p), n: (p as usize).pow(k as u32) })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Order of the root of unity generating the scalar field.
    pub fn field_order(&self) -> u32 {
        self.order
    }

    /// Dimension `p^k` of the representation.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn group_order(&self) -> usize {
        self.n * self.n * self.p as usize
    }

    pub fn element(&self, a: &[u32], b: &[u32], c: u32) -> HeisElement {
        HeisElement {
            a: GFVector::new(self.p, a.iter().map(|&x| x as i64)),
            b: GFVector::new(self.p, b.iter().map(|&x| x as i64)),
            c: c % self.p,
        }
    }

    pub fn identity(&self) -> HeisElement {
        self.lift(&vec![0; 2 * self.k])
    }

    pub fn central(&self, c: u32) -> HeisElement {
        let zero = vec![0; self.k];
        self.element(&zero, &zero, c)
    }

    /// The element `(a, b, 0)` over `v = (a, b) ∈ F_p^{2k}`.
    pub fn lift(&self, v: &[u32]) -> HeisElement {
        self.element(&v[..self.k], &v[self.k..], 0)
    }

    /// The element `(a, 0, 0)` of the translation subgroup.
    pub fn translation(&self, a: &[u32]) -> HeisElement {
        self.element(a, &vec![0; self.k], 0)
    }

    pub fn mul(&self, g: &HeisElement, h: &HeisElement) -> HeisElement {
        let c = (g.c + h.c + g.b.dot(&h.a)) % self.p;
        HeisElement { a: g.a.add(&h.a), b: g.b.add(&h.b), c }
    }

    pub fn inv(&self, g: &HeisElement) -> HeisElement {
        let p = self.p;
        let c = (g.b.dot(&g.a) + p - g.c) % p;
        HeisElement { a: g.a.scale(p - 1), b: g.b.scale(p - 1), c }
    }

    /// Central residue of `g h g⁻¹ h⁻¹`.
    pub fn commutator_residue(&self, g: &HeisElement, h: &HeisElement) -> u32 {
        let x = self.mul(&self.mul(g, h), &self.mul(&self.inv(g), &self.inv(h)));
        debug_assert!(x.is_central());
        x.c
    }

    /// All `p^{2k+1}` elements.
    pub fn elements(&self) -> Vec<HeisElement> {
        let mut out = Vec::with_capacity(self.group_order());
        for v in self.class_vectors() {
            for c in 0..self.p {
                let mut g = self.lift(&v);
                g.c = c;
                out.push(g);
            }
        }
        out
    }

    /// All `(a, b) ∈ F_p^{2k}`, in little-endian index order.
    pub fn class_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.n * self.n).map(|i| index_vector(self.p, 2 * self.k, i)).collect()
    }

    /// Elements `(a, b, c)` with `(a, b) ∈ w`, all `c`.
    pub fn preimage(&self, w: &GFSubspace) -> Vec<HeisElement> {
        let mut out = Vec::new();
        for v in w.elements() {
            for c in 0..self.p {
                let mut g = self.lift(v.coords());
                g.c = c;
                out.push(g);
            }
        }
        out
    }

    pub fn rep(&self, g: &HeisElement) -> Monomial {
        let scale = self.order / self.p;
        let mut perm = vec![0; self.n];
        let mut exps = vec![0; self.n];
        for (idx, slot) in perm.iter_mut().enumerate() {
            let x = index_vector(self.p, self.k, idx);
            let y: Vec<u32> = x.iter().zip(g.a.coords()).map(|(u, v)| (u + v) % self.p).collect();
            *slot = vector_index(self.p, &y);
            let phase = (g.c + crate::gflin::dot(self.p, g.b.coords(), &x)) % self.p;
            exps[idx] = phase * scale;
        }
        Monomial { order: self.order, perm, exps }
    }

    /// Dense matrix of `ρ(g)`.
    pub fn matrix_rep(&self, g: &HeisElement) -> CycloMatrix {
        self.rep(g).to_matrix()
    }

    /// The decomposition into basis lines `C e_x`.
    pub fn basis_lines(&self) -> Decomposition {
        let components = (0..self.n)
            .map(|i| CycloSubspace::coordinate(self.order, self.n, [i]))
            .collect();
        Decomposition::from_sorted(self.order, self.n, components)
    }

    /// The whole space as a single component.
    pub fn whole(&self) -> Decomposition {
        Decomposition::from_sorted(self.order, self.n, vec![CycloSubspace::full(self.order, self.n)])
    }

    /// Lifts of a basis of a subspace of F_p^{2k}.
    pub fn generators_of(&self, w: &GFSubspace) -> Vec<HeisElement> {
        w.basis().iter().map(|v| self.lift(v)).collect()
    }

    /// Lifts `(a, 0, 0)` of a basis of a subspace of F_p^k.
    pub fn translation_generators(&self, h: &GFSubspace) -> Vec<HeisElement> {
        h.basis().iter().map(|a| self.translation(a)).collect()
    }
}

/// An orthogonal decomposition of C^n, components sorted canonically. A single
/// component (the whole space) is allowed as an intermediate value; proper
/// decompositions have at least two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Decomposition {
    order: u32,
    n: usize,
    components: Vec<CycloSubspace>,
}

impl Decomposition {
    fn from_sorted(order: u32, n: usize, mut components: Vec<CycloSubspace>) -> Self {
        components.sort();
        Decomposition { order, n, components }
    }

    /// Validates that the components are nonzero, pairwise orthogonal and
    /// span C^n.
    pub fn new(order: u32, n: usize, components: Vec<CycloSubspace>) -> Result<Self, RepError> {
        let bad = |m: &str| Err(RepError::InvalidDecomposition(m.to_string()));
        if components.iter().any(|c| c.order() != order || c.ambient_dim() != n) {
            return bad("component in a different ambient space");
        }
        if components.iter().any(CycloSubspace::is_zero) {
            return bad("zero component");
        }
        if components.iter().map(CycloSubspace::dim).sum::<usize>() != n {
            return bad("dimensions do not sum to the ambient dimension");
        }
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                if !crate::cyclolin::hermitian_orthogonal(&components[i], &components[j])? {
                    return bad("components are not orthogonal");
                }
            }
        }
        Ok(Self::from_sorted(order, n, components))
    }

    pub fn components(&self) -> &[CycloSubspace] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        self.components.len() >= 2
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(CycloSubspace::dim).collect()
    }

    fn locate(&self, v: &[CycloScalar], dim: Option<usize>) -> Option<usize> {
        self.components
            .iter()
            .position(|c| dim.is_none_or(|d| c.dim() == d) && c.contains_vector(v))
    }

    /// Every component of `self` lies inside a component of `coarser`.
    pub fn refines(&self, coarser: &Decomposition) -> bool {
        if self.n != coarser.n || self.len() < coarser.len() {
            return false;
        }
        self.components.iter().all(|v| {
            let first = &v.basis()[0];
            match coarser.locate(first, None) {
                Some(j) => v.basis()[1..].iter().all(|row| coarser.components[j].contains_vector(row)),
                None => false,
            }
        })
    }

    pub fn coarsens(&self, finer: &Decomposition) -> bool {
        finer.refines(self)
    }

    /// Component index `i ↦ j` with `ρ(g) V_i = V_j`, or `None` if `g` does not
    /// permute the components.
    pub fn component_permutation(&self, m: &Monomial) -> Option<Vec<usize>> {
        let mut perm = Vec::with_capacity(self.len());
        let mut hit = vec![false; self.len()];
        for v in &self.components {
            let images: Vec<Vec<CycloScalar>> = v.basis().iter().map(|row| m.apply(row)).collect();
            let j = self.locate(&images[0], Some(v.dim()))?;
            if hit[j] || !images[1..].iter().all(|w| self.components[j].contains_vector(w)) {
                return None;
            }
            hit[j] = true;
            perm.push(j);
        }
        Some(perm)
    }

    fn text(&self) -> Vec<Vec<Vec<String>>> {
        self.components
            .iter()
            .map(|c| c.basis().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect())
            .collect()
    }
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .text()
            .into_iter()
            .map(|rows| {
                let rows: Vec<String> = rows.into_iter().map(|r| format!("({})", r.join(", "))).collect();
                format!("span{{{}}}", rows.join(", "))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Whether `ρ(g)` permutes the components of `λ`.
pub fn fixes(group: &HeisGroup, g: &HeisElement, lambda: &Decomposition) -> bool {
    lambda.component_permutation(&group.rep(g)).is_some()
}

fn orbits(count: usize, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for perm in perms {
        for (i, &j) in perm.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..count {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Sums components over orbits of the subgroup generated by `generators`; the
/// result may have a single component.
pub fn glom_any(group: &HeisGroup, lambda: &Decomposition, generators: &[HeisElement]) -> Result<Decomposition, RepError> {
    let mut perms = Vec::new();
    for g in generators {
        let perm = lambda.component_permutation(&group.rep(g)).ok_or_else(|| RepError::NotFixed(g.to_string()))?;
        perms.push(perm);
    }
    let mut components = Vec::new();
    for orbit in orbits(lambda.len(), &perms) {
        let rows = orbit.iter().flat_map(|&i| lambda.components[i].basis().iter().cloned()).collect();
        components.push(CycloSubspace::span(lambda.order, lambda.n, rows)?);
    }
    Ok(Decomposition::from_sorted(lambda.order, lambda.n, components))
}

/// The coarsening `λ/H`: components summed over orbits of `H = ⟨generators⟩`.
pub fn glom(group: &HeisGroup, lambda: &Decomposition, generators: &[HeisElement]) -> Result<Decomposition, RepError> {
    let out = glom_any(group, lambda, generators)?;
    if !out.is_proper() {
        return Err(RepError::Improper);
    }
    Ok(out)
}

/// Splits every component into simultaneous eigenspaces of the commuting
/// elements `generators`. For an abelian group this is the isotypical
/// decomposition, the images of the projectors `|H|⁻¹ Σ_h χ(h)⁻¹ ρ(h)`.
pub fn isorefine(group: &HeisGroup, mu: &Decomposition, generators: &[HeisElement]) -> Result<Decomposition, RepError> {
    for (i, g) in generators.iter().enumerate() {
        for h in &generators[i + 1..] {
            if group.commutator_residue(g, h) != 0 {
                return Err(RepError::NonAbelian(g.to_string(), h.to_string()));
            }
        }
    }
    let reps: Vec<Monomial> = generators.iter().map(|g| group.rep(g)).collect();
    for (g, m) in generators.iter().zip(&reps) {
        for (i, v) in mu.components.iter().enumerate() {
            if !v.basis().iter().all(|row| v.contains_vector(&m.apply(row))) {
                return Err(RepError::NonInvariant { component: i, element: g.to_string() });
            }
        }
    }
    let order = group.order;
    let mut pieces: Vec<CycloSubspace> = mu.components.clone();
    for m in &reps {
        let mut next = Vec::new();
        for piece in pieces {
            next.extend(eigenspaces(order, m, &piece)?);
        }
        pieces = next;
    }
    Ok(Decomposition::from_sorted(mu.order, mu.n, pieces))
}

/// Eigenspaces of an invariant subspace under a monomial of order dividing `m`.
fn eigenspaces(order: u32, m: &Monomial, piece: &CycloSubspace) -> Result<Vec<CycloSubspace>, RepError> {
    let n = piece.ambient_dim();
    let orbits: Vec<Vec<Vec<CycloScalar>>> = piece
        .basis()
        .iter()
        .map(|row| {
            let mut seq = vec![row.clone()];
            for _ in 1..order {
                let next = m.apply(seq.last().expect("nonempty"));
                seq.push(next);
            }
            seq
        })
        .collect();
    let mut out = Vec::new();
    let mut total = 0;
    for t in 0..order as i64 {
        let rows: Vec<Vec<CycloScalar>> = orbits
            .iter()
            .map(|seq| {
                let mut acc = vec![CycloScalar::zero(order); n];
                for (j, v) in seq.iter().enumerate() {
                    for (a, x) in acc.iter_mut().zip(v) {
                        if !x.is_zero() {
                            *a = &*a + &x.mul_root(-t * j as i64);
                        }
                    }
                }
                acc
            })
            .collect();
        let space = CycloSubspace::span(order, n, rows)?;
        if !space.is_zero() {
            total += space.dim();
            out.push(space);
        }
    }
    ensure(total == piece.dim(), || format!("eigenspaces of dimension {total} in a piece of dimension {}", piece.dim()))?;
    Ok(out)
}

/// Which elements act, as subspaces of F_p^{2k} (the whole group modulo its
/// centre) or of F_p^k (the translation subgroup).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Gamma,
    Delta,
}

/// Stabilizer data of a decomposition under the elements of a scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotropyReport {
    pub scope: Scope,
    /// Every element of the scope permutes the components.
    pub fixed: bool,
    /// Elements stabilizing every component.
    pub group: GFSubspace,
    pub per_component: Vec<GFSubspace>,
    pub uniform: bool,
    /// Number of orbits of the scope on the components (when fixed).
    pub orbit_count: usize,
}

pub fn isotropy(group: &HeisGroup, lambda: &Decomposition, scope: Scope) -> Result<IsotropyReport, RepError> {
    let (dim, vectors): (usize, Vec<Vec<u32>>) = match scope {
        Scope::Gamma => (2 * group.k, group.class_vectors()),
        Scope::Delta => (group.k, (0..group.n).map(|i| index_vector(group.p, group.k, i)).collect()),
    };
    let mut fixed = true;
    let mut perms = Vec::new();
    let mut stabilizing: Vec<Vec<Vec<u32>>> = vec![Vec::new(); lambda.len()];
    for v in &vectors {
        let g = match scope {
            Scope::Gamma => group.lift(v),
            Scope::Delta => group.translation(v),
        };
        match lambda.component_permutation(&group.rep(&g)) {
            Some(perm) => {
                for (i, &j) in perm.iter().enumerate() {
                    if i == j {
                        stabilizing[i].push(v.clone());
                    }
                }
                perms.push(perm);
            }
            None => fixed = false,
        }
    }
    let mut per_component = Vec::new();
    for members in &stabilizing {
        let span = crate::gflin::rref(group.p, dim, members)?;
        ensure(span.elements().len() == members.len(), || "stabilizer is not a subgroup".to_string())?;
        per_component.push(span);
    }
    let mut all = per_component.first().cloned().unwrap_or_else(|| GFSubspace::full(group.p, dim));
    for s in &per_component[1.min(per_component.len())..] {
        all = all.intersection(s)?;
    }
    let uniform = per_component.windows(2).all(|w| w[0] == w[1]);
    let orbit_count = if fixed { orbits(lambda.len(), &perms).len() } else { 0 };
    Ok(IsotropyReport { scope, fixed, group: all, per_component, uniform, orbit_count })
}

/// Subspace of elements stabilizing every component.
pub fn isotropy_group(group: &HeisGroup, lambda: &Decomposition, scope: Scope) -> Result<GFSubspace, RepError> {
    Ok(isotropy(group, lambda, scope)?.group)
}

/// Gloms `λ` by the span of all component stabilizers inside `h ⊆ F_p^{2k}`.
pub fn uniformize(group: &HeisGroup, lambda: &Decomposition, h: &GFSubspace) -> Result<Decomposition, RepError> {
    let reps: Vec<Monomial> = h.elements().iter().map(|v| group.rep(&group.lift(v.coords()))).collect();
    let mut j = GFSubspace::zero(group.p, 2 * group.k);
    let elements = h.elements();
    for (v, m) in elements.iter().zip(&reps) {
        let perm = lambda.component_permutation(m).ok_or_else(|| RepError::NotFixed(group.lift(v.coords()).to_string()))?;
        if perm.iter().enumerate().any(|(i, &t)| i == t) {
            j = j.sum(&GFSubspace::span(group.p, 2 * group.k, std::slice::from_ref(v))?)?;
        }
    }
    glom(group, lambda, &group.generators_of(&j))
}

/// `Δ_k`-orbit facts about a decomposition fixed by the translations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub uniform: bool,
    pub moving: bool,
    pub nontransitive: bool,
}

pub fn membership_predicates(group: &HeisGroup, lambda: &Decomposition) -> Result<Membership, RepError> {
    let iso = isotropy(group, lambda, Scope::Delta)?;
    if !iso.fixed {
        return Err(RepError::NotFixed("some translation".to_string()));
    }
    Ok(Membership {
        uniform: iso.uniform,
        moving: !iso.per_component.iter().all(GFSubspace::is_full),
        nontransitive: iso.orbit_count > 1,
    })
}

/// Character values `tr(P_V ρ(h))` of each component over a list of elements.
pub fn component_characters(group: &HeisGroup, lambda: &Decomposition, elements: &[HeisElement]) -> Vec<Vec<CycloScalar>> {
    let reps: Vec<Monomial> = elements.iter().map(|h| group.rep(h)).collect();
    lambda
        .components
        .iter()
        .map(|v| {
            let p = orthogonal_projector(v);
            reps.iter().map(|m| m.trace_against(&p)).collect()
        })
        .collect()
}

/// `|H|⁻¹ Σ_h χ(h) conj(ψ(h))`, which must be rational.
pub fn inner_product(chi: &[CycloScalar], psi: &[CycloScalar]) -> Result<BigRational, RepError> {
    let order = chi.first().map_or(3, CycloScalar::order);
    let mut acc = CycloScalar::zero(order);
    for (a, b) in chi.iter().zip(psi) {
        acc = &acc + &(a * &b.conj());
    }
    let q = acc.to_rational().ok_or_else(|| RepError::Assertion(format!("inner product {acc} is not rational")))?;
    Ok(q / BigRational::from_integer((chi.len() as i64).into()))
}

/// `⟨χ_V, χ_W⟩_H` for `H`-invariant subspaces.
pub fn char_inner_product(
    group: &HeisGroup,
    v: &CycloSubspace,
    w: &CycloSubspace,
    h: &[HeisElement],
) -> Result<BigRational, RepError> {
    for (idx, s) in [v, w].into_iter().enumerate() {
        for g in h {
            let m = group.rep(g);
            if !s.basis().iter().all(|row| s.contains_vector(&m.apply(row))) {
                return Err(RepError::NonInvariant { component: idx, element: g.to_string() });
            }
        }
    }
    let reps: Vec<Monomial> = h.iter().map(|g| group.rep(g)).collect();
    let (pv, pw) = (orthogonal_projector(v), orthogonal_projector(w));
    let chi: Vec<CycloScalar> = reps.iter().map(|m| m.trace_against(&pv)).collect();
    let psi: Vec<CycloScalar> = reps.iter().map(|m| m.trace_against(&pw)).collect();
    inner_product(&chi, &psi)
}

/// Traces of `ρ` on all group elements: zero off the centre, `p^k ζ^c` on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterReport {
    pub p: u32,
    pub k: usize,
    pub elements_checked: usize,
    pub noncentral_traceless: usize,
    pub central_correct: usize,
    pub commutator_pairs_checked: usize,
    pub commutator_matches_form: bool,
    pub failures: Vec<String>,
}

impl CharacterReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `tr ρ(g)` on every element and, for groups of order at most
/// `p^5`, that commutator residues reproduce the symplectic form.
pub fn gamma_character_check(p: u32, k: usize) -> Result<CharacterReport, RepError> {
    let group = HeisGroup::new(p, k)?;
    let mut failures = Vec::new();
    let (mut noncentral, mut central) = (0, 0);
    let elements = group.elements();
    for g in &elements {
        let t = group.rep(g).trace();
        if g.is_central() {
            let scale = (group.order / p) as i64;
            let expected = CycloScalar::root(group.order, g.c as i64 * scale)
                .scale(&BigRational::from_integer((group.n as i64).into()));
            if t == expected {
                central += 1;
            } else {
                failures.push(format!("trace of {g} is {t}"));
            }
        } else if t.is_zero() {
            noncentral += 1;
        } else {
            failures.push(format!("trace of {g} is {t}"));
        }
    }
    let space = SymplecticSpace::new(p, k)?;
    let classes = group.class_vectors();
    let mut pairs = 0;
    if classes.len() <= 81 {
        for u in &classes {
            for v in &classes {
                pairs += 1;
                let r = group.commutator_residue(&group.lift(u), &group.lift(v));
                // g h g⁻¹ h⁻¹ has residue b·a' − a·b' = −⟨g, h⟩.
                if (r + space.form(u, v)) % p != 0 {
                    failures.push(format!("commutator of {u:?}, {v:?} has residue {r}"));
                }
            }
        }
    }
    Ok(CharacterReport {
        p,
        k,
        elements_checked: elements.len(),
        noncentral_traceless: noncentral,
        central_correct: central,
        commutator_pairs_checked: pairs,
        commutator_matches_form: failures.iter().all(|f| !f.starts_with("commutator")),
        failures,
    })
}

/// Checks `ρ(g)ρ(h) = ρ(gh)` on random pairs; returns the number of failures.
pub fn check_homomorphism<R: Rng>(group: &HeisGroup, rng: &mut R, pairs: usize) -> usize {
    let p = group.p;
    let random = |rng: &mut R| {
        let a: Vec<u32> = (0..group.k).map(|_| rng.gen_range(0..p)).collect();
        let b: Vec<u32> = (0..group.k).map(|_| rng.gen_range(0..p)).collect();
        group.element(&a, &b, rng.gen_range(0..p))
    };
    (0..pairs)
        .filter(|_| {
            let (g, h) = (random(rng), random(rng));
            group.rep(&g).compose(&group.rep(&h)) != group.rep(&group.mul(&g, &h))
        })
        .count()
}

/// The decomposition attached to a proper coisotropic `W`, with the facts
/// checked while building it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotypicalComponents {
    pub w: GFSubspace,
    pub radical: GFSubspace,
    /// `dim W = 2s + t`, `s + t = k`.
    pub s: usize,
    pub t: usize,
    pub decomposition: Decomposition,
    pub component_count: usize,
    pub component_dim: usize,
    /// `⟨χ_V, χ_V⟩` over the preimage of `W`, one per component.
    pub self_products: Vec<String>,
    /// All `⟨χ_V, χ_V'⟩`, `V ≠ V'`, vanish.
    pub cross_products_zero: bool,
    /// `⟨χ_V, tr ρ⟩` over the preimage of `W`, one per component.
    pub multiplicities: Vec<String>,
}

/// Builds `λ_W` as the refinement of the whole space by the radical of `W`
/// and checks component count `p^t`, dimension `p^s`, irreducibility and
/// pairwise distinctness of the component characters over the preimage of `W`.
pub fn isotypical_components(group: &HeisGroup, w: &GFSubspace) -> Result<IsotypicalComponents, RepError> {
    let space = SymplecticSpace::new(group.p, group.k)?;
    if w.ambient_dim() != 2 * group.k || w.is_full() || !space.is_coisotropic(w)? {
        return Err(RepError::NotCoisotropic(w.to_string()));
    }
    let radical = space.radical(w)?;
    let t = radical.dim();
    let s = (w.dim() - t) / 2;
    ensure(2 * s + t == w.dim() && s + t == group.k, || format!("dim {} with radical {t}", w.dim()))?;
    ensure(space.form_rank_on(w)? == 2 * s, || "form rank on W".to_string())?;

    let lambda = isorefine(group, &group.whole(), &group.generators_of(&radical))?;
    let p = group.p as usize;
    let count = p.pow(t as u32);
    let dim = p.pow(s as u32);
    ensure(lambda.len() == count, || format!("{} components for {w}, expected {count}", lambda.len()))?;
    ensure(lambda.dims().iter().all(|&d| d == dim), || format!("component dimensions {:?}, expected {dim}", lambda.dims()))?;

    let h = group.preimage(w);
    let chars = component_characters(group, &lambda, &h);
    let full: Vec<CycloScalar> = h.iter().map(|g| group.rep(g).trace()).collect();
    let one = BigRational::one();
    let mut self_products = Vec::new();
    let mut multiplicities = Vec::new();
    let mut cross_zero = true;
    for i in 0..chars.len() {
        let sp = inner_product(&chars[i], &chars[i])?;
        ensure(sp == one, || format!("component {i} of λ_W for {w} has ⟨χ,χ⟩ = {sp}"))?;
        self_products.push(sp.to_string());
        let mult = inner_product(&chars[i], &full)?;
        ensure(mult == one, || format!("component {i} of λ_W for {w} has multiplicity {mult}"))?;
        multiplicities.push(mult.to_string());
        for j in i + 1..chars.len() {
            let cp = inner_product(&chars[i], &chars[j])?;
            if !cp.is_zero() {
                cross_zero = false;
            }
        }
    }
    ensure(cross_zero, || format!("λ_W for {w} has isomorphic components"))?;
    Ok(IsotypicalComponents {
        w: w.clone(),
        radical,
        s,
        t,
        decomposition: lambda.clone(),
        component_count: lambda.len(),
        component_dim: dim,
        self_products,
        cross_products_zero: cross_zero,
        multiplicities,
    })
}

/// `λ_W`, the isotypical decomposition for the preimage of `W`.
pub fn f_gamma(group: &HeisGroup, w: &GFSubspace) -> Result<Decomposition, RepError> {
    Ok(isotypical_components(group, w)?.decomposition)
}

/// The isotropy of a decomposition fixed by the whole group, which must be a
/// proper coisotropic subspace.
pub fn g_gamma(group: &HeisGroup, lambda: &Decomposition) -> Result<GFSubspace, RepError> {
    let iso = isotropy(group, lambda, Scope::Gamma)?;
    if !iso.fixed {
        return Err(RepError::NotFixed("some element of the group".to_string()));
    }
    let space = SymplecticSpace::new(group.p, group.k)?;
    if iso.group.is_full() || !space.is_coisotropic(&iso.group)? {
        return Err(RepError::NotCoisotropic(iso.group.to_string()));
    }
    Ok(iso.group)
}

/// `isorefine(glom(ε, K), H)` for `H ⊆ K ⊆ F_p^k`, with a check that every
/// component has translation isotropy exactly `K`.
pub fn f_delta(group: &HeisGroup, h: &GFSubspace, k: &GFSubspace) -> Result<Decomposition, RepError> {
    if !h.is_subspace_of(k) {
        return Err(RepError::Assertion(format!("{h} is not contained in {k}")));
    }
    if h.is_zero() && k.is_full() {
        return Err(RepError::ExcludedPair);
    }
    let glommed = glom_any(group, &group.basis_lines(), &group.translation_generators(k))?;
    let lambda = isorefine(group, &glommed, &group.translation_generators(h))?;
    ensure(lambda.is_proper(), || format!("F({h} ⊆ {k}) is improper"))?;
    let iso = isotropy(group, &lambda, Scope::Delta)?;
    ensure(iso.fixed, || format!("F({h} ⊆ {k}) is not fixed by translations"))?;
    ensure(iso.uniform && &iso.group == k, || format!("F({h} ⊆ {k}) has translation isotropy {:?}", iso.per_component))?;
    Ok(lambda)
}

/// Refinement relation among decompositions, `m[i][j] = λ_i refines λ_j`.
fn refinement_matrix(ds: &[Decomposition]) -> Vec<Vec<bool>> {
    ds.iter().map(|a| ds.iter().map(|b| a == b || a.refines(b)).collect()).collect()
}

fn flatten(m: &[Vec<bool>]) -> Vec<bool> {
    m.iter().flatten().copied().collect()
}

/// Outcome of the coisotropic-subspace / fixed-decomposition correspondence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoisotropicCorrespondenceReport {
    pub theorem: &'static str,
    pub p: u32,
    pub k: usize,
    pub coisotropic_count: usize,
    pub fixed_decompositions: usize,
    /// Every `λ_W` is permuted by all `p^{2k}` classes.
    pub gamma_fixed: bool,
    /// `G(F(W)) = W`.
    pub gf_identity: bool,
    /// `F(G(λ)) = λ` on the image of `F`.
    pub fg_identity: bool,
    pub injective: bool,
    /// `W ⊆ W'` iff `λ_W` refines `λ_{W'}`.
    pub order_isomorphism: bool,
    pub poset_isomorphic_to_tits_sp: bool,
    pub homology: Option<String>,
    pub failures: Vec<String>,
}

impl CoisotropicCorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.gamma_fixed
            && self.gf_identity
            && self.fg_identity
            && self.injective
            && self.order_isomorphism
            && self.poset_isomorphic_to_tits_sp
    }
}

/// Checks that `W ↦ λ_W` and `λ ↦ isotropy(λ)` are inverse order isomorphisms
/// between proper coisotropic subspaces and their decompositions.
pub fn verify_coisotropic_correspondence(p: u32, k: usize, with_homology: bool) -> Result<CoisotropicCorrespondenceReport, RepError> {
    let group = HeisGroup::new(p, k)?;
    let tits = tits_sp(p, k)?;
    let ws = tits.poset().labels().to_vec();
    let mut failures = Vec::new();
    let mut lambdas = Vec::new();
    let mut gamma_fixed = true;
    let mut gf = true;
    let mut images = Vec::new();
    for w in &ws {
        match isotypical_components(&group, w) {
            Ok(data) => {
                let iso = isotropy(&group, &data.decomposition, Scope::Gamma)?;
                if !iso.fixed {
                    gamma_fixed = false;
                    failures.push(format!("λ_W for {w} is not fixed by the group"));
                }
                if &iso.group != w {
                    gf = false;
                    failures.push(format!("G(F({w})) = {}", iso.group));
                }
                images.push(iso.group);
                lambdas.push(data.decomposition);
            }
            Err(e) => {
                failures.push(format!("F({w}): {e}"));
                return Ok(CoisotropicCorrespondenceReport {
                    theorem: "1.1",
                    p,
                    k,
                    coisotropic_count: ws.len(),
                    fixed_decompositions: 0,
                    gamma_fixed: false,
                    gf_identity: false,
                    fg_identity: false,
                    injective: false,
                    order_isomorphism: false,
                    poset_isomorphic_to_tits_sp: false,
                    homology: None,
                    failures,
                });
            }
        }
    }
    let distinct: BTreeSet<&Decomposition> = lambdas.iter().collect();
    let injective = distinct.len() == lambdas.len();
    if !injective {
        failures.push("two coisotropic subspaces give the same decomposition".to_string());
    }
    let index: BTreeMap<&GFSubspace, usize> = ws.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut fg = true;
    for (i, g) in images.iter().enumerate() {
        match index.get(g) {
            Some(&j) if lambdas[j] == lambdas[i] => {}
            _ => {
                fg = false;
                failures.push(format!("F(G(λ)) differs from λ for λ = λ_W, W = {}", ws[i]));
            }
        }
    }
    let refine = refinement_matrix(&lambdas);
    let mut order_ok = true;
    for i in 0..ws.len() {
        for j in 0..ws.len() {
            if tits.poset().leq(i, j) != refine[i][j] {
                order_ok = false;
                failures.push(format!("inclusion {} ⊆ {} is {} but refinement is {}", ws[i], ws[j], tits.poset().leq(i, j), refine[i][j]));
            }
        }
    }
    let fixed_poset = FinPoset::from_matrix(lambdas.clone(), flatten(&refine));
    let iso = match &fixed_poset {
        Ok(fp) => is_isomorphism(tits.poset(), fp, &(0..ws.len()).collect::<Vec<_>>()),
        Err(e) => {
            failures.push(format!("refinement is not a partial order: {e}"));
            false
        }
    };
    if !iso {
        failures.push("fixed decompositions are not isomorphic to the symplectic building".to_string());
    }
    let homology = match (&fixed_poset, with_homology) {
        (Ok(fp), true) => Some(homology(&fp.order_complex()?, true)?.summary()),
        _ => None,
    };
    Ok(CoisotropicCorrespondenceReport {
        theorem: "1.1",
        p,
        k,
        coisotropic_count: ws.len(),
        fixed_decompositions: distinct.len(),
        gamma_fixed,
        gf_identity: gf,
        fg_identity: fg,
        injective,
        order_isomorphism: order_ok,
        poset_isomorphic_to_tits_sp: iso,
        homology,
        failures,
    })
}

/// Outcome of the suspension / translation-fixed-decomposition comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspacePairReport {
    pub theorem: &'static str,
    pub p: u32,
    pub k: usize,
    pub tdiamond_size: usize,
    pub subdivision_size: usize,
    /// `F(H ⊆ K)` is a proper decomposition with uniform isotropy `K` for every pair.
    pub well_defined: bool,
    pub order_preserving: bool,
    /// Cone⁻ lands in Moving, Cone⁺ in Nontransitive.
    pub corners: bool,
    /// On pairs of proper nontrivial subspaces the isotropy of `F(H ⊆ K)` is `K`.
    pub gf_is_projection: bool,
    pub homology_iso: bool,
    pub induced: Vec<InducedMap>,
    pub subdivision_homology: String,
    pub building_homology: String,
    pub failures: Vec<String>,
}

impl SubspacePairReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.well_defined
            && self.order_preserving
            && self.corners
            && self.gf_is_projection
            && self.homology_iso
    }
}

/// Builds `F(H ⊆ K)` on all of `T^◇`, checks it is order preserving and lands
/// in the expected corners, and checks that `(H ⊆ K) ↦ isotropy(F(H ⊆ K))`
/// is a homology isomorphism `Sd(T(k)) → T(k)`.
pub fn verify_subspace_pair_retraction(p: u32, k: usize) -> Result<SubspacePairReport, RepError> {
    guard::check("translation group p^k", guard::pow(p as u64, k as u32), PAIR_LIMIT)?;
    let group = HeisGroup::new(p, k)?;
    let model = suspension_model(p, k)?;
    let td = model.tdiamond();
    let mut failures = Vec::new();

    let mut lambdas = Vec::with_capacity(td.len());
    let mut well_defined = true;
    for (h, kk) in td.labels() {
        match f_delta(&group, h, kk) {
            Ok(l) => lambdas.push(Some(l)),
            Err(e) => {
                well_defined = false;
                failures.push(format!("F({h} ⊆ {kk}): {e}"));
                lambdas.push(None);
            }
        }
    }
    let mut order_preserving = well_defined;
    let mut corners = well_defined;
    if well_defined {
        let ls: Vec<&Decomposition> = lambdas.iter().map(|l| l.as_ref().expect("well defined")).collect();
        for x in 0..td.len() {
            for y in 0..td.len() {
                if td.lt(x, y) && !ls[x].refines(ls[y]) {
                    order_preserving = false;
                    failures.push(format!("F does not take {:?} ≤ {:?} to a coarsening", td.label(x), td.label(y)));
                }
            }
        }
        let plus: BTreeSet<usize> = model.cone_plus().iter().copied().collect();
        let minus: BTreeSet<usize> = model.cone_minus().iter().copied().collect();
        for (x, l) in ls.iter().enumerate() {
            let m = membership_predicates(&group, l)?;
            if minus.contains(&x) && !m.moving {
                corners = false;
                failures.push(format!("F{:?} is not moving", td.label(x)));
            }
            if plus.contains(&x) && !m.nontransitive {
                corners = false;
                failures.push(format!("F{:?} is transitive", td.label(x)));
            }
            if !m.uniform {
                corners = false;
                failures.push(format!("F{:?} has non-uniform isotropy", td.label(x)));
            }
        }
    }

    // G∘F on the subdivision, computed from the decompositions themselves.
    let base = tits_gl(p, k)?;
    let sd = base.poset().edgewise_subdivision();
    let base_index = base.poset().index_map();
    let td_index = td.index_map();
    let mut assignment = Vec::with_capacity(sd.len());
    let mut gf_is_projection = well_defined;
    for (h, kk) in sd.labels() {
        let x = td_index[&(h.clone(), kk.clone())];
        let Some(l) = &lambdas[x] else {
            gf_is_projection = false;
            assignment.push(0);
            continue;
        };
        let iso = isotropy(&group, l, Scope::Delta)?;
        match base_index.get(&iso.group) {
            Some(&t) if iso.uniform && &iso.group == kk => assignment.push(t),
            _ => {
                gf_is_projection = false;
                failures.push(format!("G(F({h} ⊆ {kk})) = {}", iso.group));
                assignment.push(0);
            }
        }
    }
    let sd_h = homology(&sd.order_complex()?, true)?;
    let base_h = homology(&base.order_complex()?, true)?;
    let mut induced = Vec::new();
    let mut homology_iso = false;
    if gf_is_projection && sd.len() == assignment.len() {
        let map = PosetMap::new(&sd, base.poset(), assignment)?;
        let chain = ChainMap::from_simplicial(&map.simplicial_map(&sd, base.poset())?, true)?;
        induced = induced_maps(&chain)?;
        homology_iso = induced.iter().all(|m| m.is_iso);
        if !homology_iso {
            failures.push("projection is not a homology isomorphism".to_string());
        }
    }
    Ok(SubspacePairReport {
        theorem: "1.2",
        p,
        k,
        tdiamond_size: td.len(),
        subdivision_size: sd.len(),
        well_defined,
        order_preserving,
        corners,
        gf_is_projection,
        homology_iso,
        induced,
        subdivision_homology: sd_h.summary(),
        building_homology: base_h.summary(),
        failures,
    })
}

/// Glom and refinement on C^4 under the swap `(1,2)(3,4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapRefinementReport {
    pub glommed: String,
    pub refined: String,
    pub expected: String,
    pub matches: bool,
}

pub fn verify_swap_refinement() -> Result<SwapRefinementReport, RepError> {
    let group = HeisGroup::new(2, 2)?;
    let order = group.order;
    let swap = group.translation(&[1, 0]);
    ensure(group.rep(&swap).perm == vec![1, 0, 3, 2], || "translation by (1,0) is not (1,2)(3,4)".to_string())?;
    let eps = group.basis_lines();
    let glommed = glom(&group, &eps, std::slice::from_ref(&swap))?;
    let refined = isorefine(&group, &glommed, std::slice::from_ref(&swap))?;
    let line = |v: [i64; 4]| {
        let row: Vec<CycloScalar> = v.iter().map(|&x| CycloScalar::from_int(order, x)).collect();
        CycloSubspace::span(order, 4, vec![row])
    };
    let expected = Decomposition::new(
        order,
        4,
        vec![line([1, 1, 0, 0])?, line([1, -1, 0, 0])?, line([0, 0, 1, 1])?, line([0, 0, 1, -1])?],
    )?;
    let halves = Decomposition::new(
        order,
        4,
        vec![CycloSubspace::coordinate(order, 4, [0, 1]), CycloSubspace::coordinate(order, 4, [2, 3])],
    )?;
    Ok(SwapRefinementReport {
        glommed: glommed.to_string(),
        refined: refined.to_string(),
        expected: expected.to_string(),
        matches: refined == expected && glommed == halves,
    })
}

/// Facts about decompositions of C^p fixed by translations, at `k = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneTranslationReport {
    pub p: u32,
    /// Decompositions whose components are all translation invariant.
    pub trivial_action_count: usize,
    pub trivial_action_homology: String,
    pub trivial_action_contractible: bool,
    /// The trivial-action decompositions form the partition poset of the characters.
    pub matches_partition_poset: bool,
    /// Coisotropic `W` whose `λ_W` has free translation action.
    pub free_action: Vec<String>,
    /// Translation isotropy classes among the free-action decompositions.
    pub free_isotropy_classes: usize,
    /// Index of the full isotropy in F_p^2, per free-action decomposition.
    pub free_stabilizer_indices: Vec<usize>,
    pub failures: Vec<String>,
}

impl RankOneTranslationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.trivial_action_contractible && self.matches_partition_poset
    }
}

pub fn verify_rank_one_translation_fixed(p: u32) -> Result<RankOneTranslationReport, RepError> {
    let group = HeisGroup::new(p, 1)?;
    let order = group.order;
    let partitions = crate::buildings::delta1_trivial_action_subposet(p)?;
    let mut failures = Vec::new();

    // Character lines of the translation action.
    let chars = isorefine(&group, &group.whole(), &[group.translation(&[1])])?;
    ensure(chars.len() == p as usize, || format!("{} character lines", chars.len()))?;
    let lines = chars.components().to_vec();
    let mut decompositions = Vec::new();
    for part in partitions.labels() {
        let comps = part
            .blocks()
            .iter()
            .map(|b| CycloSubspace::span(order, p as usize, b.iter().flat_map(|&i| lines[i].basis().to_vec()).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        let d = Decomposition::new(order, p as usize, comps)?;
        let iso = isotropy(&group, &d, Scope::Delta)?;
        if !iso.fixed || !iso.per_component.iter().all(GFSubspace::is_full) {
            failures.push(format!("{d} is not fixed componentwise by translations"));
        }
        decompositions.push(d);
    }
    let refine = refinement_matrix(&decompositions);
    let matches = FinPoset::from_matrix(decompositions.clone(), flatten(&refine))
        .map(|dp| is_isomorphism(&partitions, &dp, &(0..partitions.len()).collect::<Vec<_>>()))
        .unwrap_or(false);
    if !matches {
        failures.push("trivial-action decompositions differ from the partition poset".to_string());
    }
    let h = homology(&partitions.order_complex()?, true)?;
    let contractible = h.is_acyclic();
    if !contractible {
        failures.push(format!("trivial-action poset has {}", h.summary()));
    }
    let all_partitions_checked = all_partitions(p as usize).len() - 1 == partitions.len();
    if !all_partitions_checked {
        failures.push("partition count mismatch".to_string());
    }

    let tits = tits_sp(p, 1)?;
    let mut free = Vec::new();
    let mut classes = BTreeSet::new();
    let mut indices = Vec::new();
    for w in tits.poset().labels() {
        let lambda = f_gamma(&group, w)?;
        let delta = isotropy(&group, &lambda, Scope::Delta)?;
        if delta.fixed && delta.per_component.iter().all(GFSubspace::is_zero) {
            free.push(w.to_string());
            classes.insert(delta.group.clone());
            let gamma = isotropy_group(&group, &lambda, Scope::Gamma)?;
            indices.push((p as usize).pow((2 - gamma.dim()) as u32));
        }
    }
    if classes.len() != 1 || indices.iter().any(|&i| i != p as usize) {
        failures.push(format!("free-action decompositions: {} isotropy classes, indices {indices:?}", classes.len()));
    }
    Ok(RankOneTranslationReport {
        p,
        trivial_action_count: decompositions.len(),
        trivial_action_homology: h.summary(),
        trivial_action_contractible: contractible,
        matches_partition_poset: matches,
        free_action: free,
        free_isotropy_classes: classes.len(),
        free_stabilizer_indices: indices,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sub(p: u32, n: usize, rows: &[&[u32]]) -> GFSubspace {
        let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
        crate::gflin::rref(p, n, &rows).unwrap()
    }

    #[test]
    fn group_law_and_inverse() {
        let g = HeisGroup::new(3, 2).unwrap();
        let x = g.element(&[1, 2], &[0, 1], 2);
        assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        assert_eq!(g.mul(&g.inv(&x), &x), g.identity());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(check_homomorphism(&g, &mut rng, 50), 0);
    }

    #[test]
    fn translations_are_permutations_and_diagonal_is_characters() {
        let g = HeisGroup::new(3, 1).unwrap();
        let m = g.rep(&g.translation(&[1]));
        assert_eq!(m.perm, vec![1, 2, 0]);
        assert!(m.exps.iter().all(|&e| e == 0));
        let d = g.rep(&g.element(&[0], &[1], 0));
        assert_eq!(d.perm, vec![0, 1, 2]);
        assert_eq!(d.exps, vec![0, 1, 2]);
    }

    #[test]
    fn central_element_fixes_everything() {
        let g = HeisGroup::new(2, 2).unwrap();
        let eps = g.basis_lines();
        assert!(fixes(&g, &g.central(1), &eps));
        assert!(fixes(&g, &g.translation(&[1, 1]), &eps));
        assert!(fixes(&g, &g.element(&[0, 0], &[1, 0], 0), &eps));
        let w = sub(2, 4, &[&[1, 0, 0, 0]]);
        let lambda = isorefine(&g, &g.whole(), &g.generators_of(&w)).unwrap();
        assert!(fixes(&g, &g.element(&[0, 0], &[1, 0], 0), &lambda));
        let comps = vec![
            CycloSubspace::coordinate(4, 4, [0, 1]),
            CycloSubspace::coordinate(4, 4, [2]),
            CycloSubspace::coordinate(4, 4, [3]),
        ];
        let mixed = Decomposition::new(4, 4, comps).unwrap();
        assert!(fixes(&g, &g.translation(&[1, 0]), &mixed));
        assert!(!fixes(&g, &g.translation(&[0, 1]), &mixed));
    }

    #[test]
    fn glom_examples() {
        let g = HeisGroup::new(2, 2).unwrap();
        let eps = g.basis_lines();
        assert_eq!(glom(&g, &eps, &[]).unwrap(), eps);
        let all = g.translation_generators(&GFSubspace::full(2, 2));
        assert_eq!(glom(&g, &eps, &all), Err(RepError::Improper));
    }

    #[test]
    fn refinement_of_character_lines() {
        let g = HeisGroup::new(3, 1).unwrap();
        let lines = isorefine(&g, &g.whole(), &[g.translation(&[1])]).unwrap();
        assert_eq!(lines.len(), 3);
        let z = CycloScalar::root(3, 1);
        let expected_member = vec![CycloScalar::one(3), z.clone(), &z * &z];
        assert!(lines.components().iter().any(|c| c.contains_vector(&expected_member)));
        assert_eq!(isorefine(&g, &lines, &[]).unwrap(), lines);
    }

    #[test]
    fn non_invariant_or_non_abelian_refinement_fails() {
        let g = HeisGroup::new(2, 1).unwrap();
        let eps = g.basis_lines();
        assert!(matches!(isorefine(&g, &eps, &[g.translation(&[1])]), Err(RepError::NonInvariant { .. })));
        let pair = [g.translation(&[1]), g.element(&[0], &[1], 0)];
        assert!(matches!(isorefine(&g, &g.whole(), &pair), Err(RepError::NonAbelian(..))));
    }

    #[test]
    fn swap_eigenlines_at_p2_k1() {
        let g = HeisGroup::new(2, 1).unwrap();
        let w = sub(2, 2, &[&[1, 0]]);
        let lambda = f_gamma(&g, &w).unwrap();
        let line = |b: i64| CycloSubspace::span(4, 2, vec![vec![CycloScalar::one(4), CycloScalar::from_int(4, b)]]).unwrap();
        assert_eq!(lambda, Decomposition::new(4, 2, vec![line(1), line(-1)]).unwrap());
        assert_eq!(g_gamma(&g, &lambda).unwrap(), w);
    }

    #[test]
    fn basis_lines_have_diagonal_isotropy() {
        let g = HeisGroup::new(2, 1).unwrap();
        let eps = g.basis_lines();
        assert_eq!(g_gamma(&g, &eps).unwrap(), sub(2, 2, &[&[0, 1]]));
        let iso = isotropy(&g, &eps, Scope::Delta).unwrap();
        assert!(iso.group.is_zero());
        assert!(g_gamma(&g, &g.whole()).is_err());
    }

    #[test]
    fn lagrangian_at_p2_k2_gives_four_lines() {
        let g = HeisGroup::new(2, 2).unwrap();
        let w = sub(2, 4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let data = isotypical_components(&g, &w).unwrap();
        assert_eq!((data.component_count, data.component_dim), (4, 1));
        assert_eq!((data.s, data.t), (0, 2));
        assert!(isotypical_components(&g, &GFSubspace::zero(2, 4)).is_err());
    }

    #[test]
    fn f_delta_examples() {
        let g = HeisGroup::new(2, 2).unwrap();
        let zero = GFSubspace::zero(2, 2);
        let full = GFSubspace::full(2, 2);
        let line = sub(2, 2, &[&[1, 0]]);
        let l = f_delta(&g, &zero, &line).unwrap();
        assert_eq!(l.dims(), vec![2, 2]);
        let l = f_delta(&g, &line, &full).unwrap();
        assert_eq!(l.dims(), vec![2, 2]);
        let l = f_delta(&g, &line, &line).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(f_delta(&g, &zero, &full), Err(RepError::ExcludedPair));
    }

    #[test]
    fn membership_examples() {
        let g = HeisGroup::new(2, 2).unwrap();
        let m = membership_predicates(&g, &g.basis_lines()).unwrap();
        assert!(m.moving && !m.nontransitive && m.uniform);
        let line = sub(2, 2, &[&[1, 0]]);
        let lh = isorefine(&g, &g.whole(), &g.translation_generators(&line)).unwrap();
        let m = membership_predicates(&g, &lh).unwrap();
        assert!(m.nontransitive && !m.moving);
    }

    #[test]
    fn uniformize_mixed_coarsening() {
        let g = HeisGroup::new(2, 2).unwrap();
        let eps = g.basis_lines();
        // Merge e_0 and e_1 only.
        let mut comps = vec![CycloSubspace::coordinate(4, 4, [0, 1])];
        comps.push(CycloSubspace::coordinate(4, 4, [2]));
        comps.push(CycloSubspace::coordinate(4, 4, [3]));
        let mixed = Decomposition::new(4, 4, comps).unwrap();
        let delta = GFSubspace::span(2, 4, &[GFVector::new(2, [1, 0, 0, 0]), GFVector::new(2, [0, 1, 0, 0])]).unwrap();
        // The mixed decomposition is not fixed by (0,1) translations.
        assert!(uniformize(&g, &mixed, &delta).is_err());
        let diag = GFSubspace::span(2, 4, &[GFVector::new(2, [1, 0, 0, 0])]).unwrap();
        let u = uniformize(&g, &mixed, &diag).unwrap();
        let halves = Decomposition::new(
            4,
            4,
            vec![CycloSubspace::coordinate(4, 4, [0, 1]), CycloSubspace::coordinate(4, 4, [2, 3])],
        )
        .unwrap();
        assert_eq!(u, halves);
        assert!(isotropy(&g, &u, Scope::Delta).unwrap().uniform);
        assert!(!isotropy(&g, &mixed, Scope::Delta).unwrap().uniform);
        assert_eq!(uniformize(&g, &u, &diag).unwrap(), u);
        assert_eq!(uniformize(&g, &eps, &delta).unwrap(), eps);
    }

    #[test]
    fn swap_refinement() {
        let r = verify_swap_refinement().unwrap();
        assert!(r.matches, "{r:?}");
    }

    #[test]
    fn serialization_of_decompositions() {
        let g = HeisGroup::new(3, 1).unwrap();
        let text = serde_json::to_string(&g.basis_lines()).unwrap();
        assert!(text.contains("\"1\""));
    }
}
