//! Tits buildings of F_p^k and of symplectic F_p^{2k}, the twisted-arrow model
//! of the unreduced suspension, and translation-invariant set partitions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gflin::{enumerate_subspaces, is_prime, GFSubspace, GfError, SymplecticSpace};
use crate::guard::{self, GuardError};
use crate::homology::{homology, HomologyError, HomologyReport};
use crate::poset::{union_and_intersection, FinPoset, MayerVietorisTriple, PosetError, SimplicialComplex};

/// Limit on `p^k` for the general linear building.
pub const GL_LIMIT: u128 = 512;
/// Limit on `p^k` for the partition model.
pub const PARTITION_LIMIT: u128 = 8;
/// Limit on the number of poset elements built here.
pub const ELEMENT_LIMIT: u128 = 6_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildingError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("reduced homology of {kind} building (p={p}, k={k}) is not concentrated in degree {expected}: {summary}")]
    NotConcentrated { kind: BuildingKind, p: u32, k: usize, expected: i64, summary: String },
    #[error("homology of {kind} building (p={p}, k={k}) has torsion")]
    Torsion { kind: BuildingKind, p: u32, k: usize },
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildingKind {
    Gl,
    Sp,
}

impl fmt::Display for BuildingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuildingKind::Gl => "gl",
            BuildingKind::Sp => "sp",
        })
    }
}

fn check_params(p: u32, k: usize) -> Result<(), BuildingError> {
    if !is_prime(p) {
        return Err(BuildingError::NotPrime(p));
    }
    if k == 0 {
        return Err(BuildingError::ZeroDimension);
    }
    Ok(())
}

fn inclusion_poset(subspaces: Vec<GFSubspace>) -> Result<FinPoset<GFSubspace>, BuildingError> {
    guard::check("poset elements", subspaces.len() as u128, ELEMENT_LIMIT)?;
    Ok(FinPoset::from_relation(subspaces, |a, b| a.is_subspace_of(b))?)
}

/// A Tits building: subspaces ordered by inclusion.
#[derive(Clone, Debug)]
pub struct BuildingPoset {
    kind: BuildingKind,
    p: u32,
    k: usize,
    poset: FinPoset<GFSubspace>,
}

/// Proper nontrivial subspaces of F_p^k.
pub fn tits_gl(p: u32, k: usize) -> Result<BuildingPoset, BuildingError> {
    check_params(p, k)?;
    guard::check("general linear building p^k", guard::pow(p as u64, k as u32), GL_LIMIT)?;
    let mut subspaces = Vec::new();
    for d in 1..k {
        subspaces.extend(enumerate_subspaces(p, k, Some(d))?);
    }
    Ok(BuildingPoset { kind: BuildingKind::Gl, p, k, poset: inclusion_poset(subspaces)? })
}

/// Proper coisotropic subspaces of the standard symplectic F_p^{2k}.
pub fn tits_sp(p: u32, k: usize) -> Result<BuildingPoset, BuildingError> {
    check_params(p, k)?;
    let subspaces = SymplecticSpace::new(p, k)?.proper_coisotropic_subspaces()?;
    Ok(BuildingPoset { kind: BuildingKind::Sp, p, k, poset: inclusion_poset(subspaces)? })
}

pub fn building(kind: BuildingKind, p: u32, k: usize) -> Result<BuildingPoset, BuildingError> {
    match kind {
        BuildingKind::Gl => tits_gl(p, k),
        BuildingKind::Sp => tits_sp(p, k),
    }
}

impl BuildingPoset {
    pub fn kind(&self) -> BuildingKind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn poset(&self) -> &FinPoset<GFSubspace> {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn order_complex(&self) -> Result<SimplicialComplex, BuildingError> {
        Ok(self.poset.order_complex()?)
    }

    pub fn reduced_homology(&self) -> Result<HomologyReport, BuildingError> {
        Ok(homology(&self.order_complex()?, true)?)
    }

    /// Degree in which the reduced homology should live: `k−2` for GL, `k−1` for Sp.
    pub fn expected_degree(&self) -> i64 {
        match self.kind {
            BuildingKind::Gl => self.k as i64 - 2,
            BuildingKind::Sp => self.k as i64 - 1,
        }
    }

    /// `p^{k(k−1)/2}` for GL and `p^{k²}` for Sp; used only as a cross-check.
    pub fn steinberg_rank(&self) -> u128 {
        let k = self.k as u32;
        match self.kind {
            BuildingKind::Gl => guard::pow(self.p as u64, k * (k - 1) / 2),
            BuildingKind::Sp => guard::pow(self.p as u64, k * k),
        }
    }

    /// Computes reduced homology and checks it is a torsion-free group in one degree.
    pub fn sphere_count_report(&self) -> Result<SphereCountReport, BuildingError> {
        let h = self.reduced_homology()?;
        let expected = self.expected_degree();
        let concentrated = h.concentrated_in() == Some(expected);
        if !concentrated {
            return Err(BuildingError::NotConcentrated {
                kind: self.kind,
                p: self.p,
                k: self.k,
                expected,
                summary: h.summary(),
            });
        }
        if !h.is_torsion_free() {
            return Err(BuildingError::Torsion { kind: self.kind, p: self.p, k: self.k });
        }
        let rank = h.betti(expected);
        let complex = self.order_complex()?;
        Ok(SphereCountReport {
            kind: self.kind,
            p: self.p,
            k: self.k,
            elements: self.len(),
            degree: expected,
            rank,
            euler_characteristic: complex.euler_characteristic(true),
            homology: h.groups.clone(),
            summary: h.summary(),
            expected_rank_formula_matched: rank as u128 == self.steinberg_rank(),
        })
    }
}

/// Reduced homology of a building, which must be a free group in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereCountReport {
    pub kind: BuildingKind,
    pub p: u32,
    pub k: usize,
    pub elements: usize,
    pub degree: i64,
    pub rank: usize,
    pub euler_characteristic: i64,
    pub homology: Vec<crate::homology::HomologyGroup>,
    pub summary: String,
    pub expected_rank_formula_matched: bool,
}

/// The pairs `(H ⊆ K)` over the full subspace lattice of F_p^k with the pair
/// `(0 ⊆ F_p^k)` removed, ordered by interval containment.
#[derive(Clone, Debug)]
pub struct SuspensionModel {
    base: BuildingPoset,
    tdiamond: FinPoset<(GFSubspace, GFSubspace)>,
    cone_plus: Vec<usize>,
    cone_minus: Vec<usize>,
}

pub fn suspension_model(p: u32, k: usize) -> Result<SuspensionModel, BuildingError> {
    let base = tits_gl(p, k)?;
    let lattice = inclusion_poset(enumerate_subspaces(p, k, None)?)?;
    let pairs = lattice.edgewise_subdivision();
    guard::check("poset elements", pairs.len() as u128, ELEMENT_LIMIT)?;
    let keep: Vec<usize> = (0..pairs.len())
        .filter(|&i| {
            let (h, kk) = pairs.label(i);
            !(h.is_zero() && kk.is_full())
        })
        .collect();
    let tdiamond = pairs.subposet(&keep);
    let cone_plus = (0..tdiamond.len()).filter(|&i| !tdiamond.label(i).0.is_zero()).collect();
    let cone_minus = (0..tdiamond.len()).filter(|&i| !tdiamond.label(i).1.is_full()).collect();
    Ok(SuspensionModel { base, tdiamond, cone_plus, cone_minus })
}

impl SuspensionModel {
    pub fn base(&self) -> &BuildingPoset {
        &self.base
    }

    pub fn tdiamond(&self) -> &FinPoset<(GFSubspace, GFSubspace)> {
        &self.tdiamond
    }

    /// Pairs with `H ≠ 0`.
    pub fn cone_plus(&self) -> &[usize] {
        &self.cone_plus
    }

    /// Pairs with `K ≠ F_p^k`.
    pub fn cone_minus(&self) -> &[usize] {
        &self.cone_minus
    }

    pub fn intersection(&self) -> Vec<usize> {
        let minus: BTreeSet<usize> = self.cone_minus.iter().copied().collect();
        self.cone_plus.iter().copied().filter(|i| minus.contains(i)).collect()
    }

    /// Nerves of `T^◇`, the two cones and their intersection.
    pub fn mayer_vietoris(&self) -> Result<MayerVietorisTriple, BuildingError> {
        Ok(union_and_intersection(&self.tdiamond, &self.cone_plus, &self.cone_minus)?)
    }

    /// Whether the cone intersection is, with its order, the edgewise
    /// subdivision of the base building.
    pub fn intersection_is_subdivision(&self) -> bool {
        let meet = self.tdiamond.subposet(&self.intersection());
        let sd = self.base.poset.edgewise_subdivision();
        meet == sd
    }
}

/// A partition of `{0, …, n−1}` with sorted blocks in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// From a restricted growth string (block label per element).
    pub fn from_labels(labels: &[usize]) -> Self {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (x, &b) in labels.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        SetPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        self.blocks.iter().all(|b| other.blocks.iter().any(|c| b.iter().all(|x| c.binary_search(x).is_ok())))
    }

    /// The image partition under a permutation of the ground set.
    pub fn permuted(&self, perm: &[usize]) -> SetPartition {
        let mut blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut img: Vec<usize> = b.iter().map(|&x| perm[x]).collect();
                img.sort_unstable();
                img
            })
            .collect();
        blocks.sort();
        SetPartition { blocks }
    }
}

/// All set partitions of an `n`-set, via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<SetPartition> {
    fn go(n: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<SetPartition>) {
        if labels.len() == n {
            out.push(SetPartition::from_labels(labels));
            return;
        }
        let next = if labels.is_empty() { 0 } else { max + 1 };
        for b in 0..=next {
            labels.push(b);
            go(n, labels, max.max(b), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(SetPartition { blocks: Vec::new() });
        return out;
    }
    go(n, &mut Vec::with_capacity(n), 0, &mut out);
    out.sort();
    out
}

/// Index of `x ∈ F_p^k` in little-endian base `p`.
pub fn vector_index(p: u32, x: &[u32]) -> usize {
    x.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

/// Inverse of [`vector_index`].
pub fn index_vector(p: u32, k: usize, mut index: usize) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = (index % p as usize) as u32;
            index /= p as usize;
            c
        })
        .collect()
}

/// The permutation `x ↦ x + t` of F_p^k, on indices.
pub fn translation(p: u32, k: usize, t: &[u32]) -> Vec<usize> {
    let n = (p as usize).pow(k as u32);
    (0..n)
        .map(|i| {
            let x = index_vector(p, k, i);
            let y: Vec<u32> = x.iter().zip(t).map(|(a, b)| (a + b) % p).collect();
            vector_index(p, &y)
        })
        .collect()
}

/// Translation-invariant proper nontrivial partitions of F_p^k, with the number
/// of proper nontrivial partitions examined.
#[derive(Clone, Debug)]
pub struct PartitionFixedPoints {
    pub candidates: usize,
    pub poset: FinPoset<SetPartition>,
}

/// Partitions of F_p^k (as a set of `p^k` points) whose blocks are permuted by
/// every translation, ordered by refinement.
pub fn partition_fixed_points(p: u32, k: usize) -> Result<PartitionFixedPoints, BuildingError> {
    check_params(p, k)?;
    let n = guard::pow(p as u64, k as u32);
    guard::check("partition ground set p^k", n, PARTITION_LIMIT)?;
    let n = n as usize;
    let translations: Vec<Vec<usize>> = (0..n).map(|i| translation(p, k, &index_vector(p, k, i))).collect();
    let proper: Vec<SetPartition> =
        all_partitions(n).into_iter().filter(|q| q.block_count() > 1 && q.block_count() < n).collect();
    let candidates = proper.len();
    let fixed: Vec<SetPartition> =
        proper.into_iter().filter(|q| translations.iter().all(|t| &q.permuted(t) == q)).collect();
    let poset = FinPoset::from_relation(fixed, SetPartition::refines)?;
    Ok(PartitionFixedPoints { candidates, poset })
}

/// The coset partition of F_p^k by a subspace `h`.
pub fn coset_partition(h: &GFSubspace) -> SetPartition {
    let p = h.p();
    let k = h.ambient_dim();
    let n = (p as usize).pow(k as u32);
    let members: Vec<Vec<u32>> = h.elements().into_iter().map(|v| v.coords().to_vec()).collect();
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if labels[i] != usize::MAX {
            continue;
        }
        let x = index_vector(p, k, i);
        for m in &members {
            let y: Vec<u32> = x.iter().zip(m).map(|(a, b)| (a + b) % p).collect();
            labels[vector_index(p, &y)] = next;
        }
        next += 1;
    }
    // Relabel as a restricted growth string.
    SetPartition::from_labels(&labels)
}

/// Decompositions of the set of `p` characters of Z/p that are not the
/// one-block partition, ordered by refinement; the discrete partition is the
/// bottom element.
pub fn delta1_trivial_action_subposet(p: u32) -> Result<FinPoset<SetPartition>, BuildingError> {
    if !is_prime(p) {
        return Err(BuildingError::NotPrime(p));
    }
    guard::check("character set size p", p as u128, 5)?;
    let parts: Vec<SetPartition> = all_partitions(p as usize).into_iter().filter(|q| q.block_count() > 1).collect();
    Ok(FinPoset::from_relation(parts, SetPartition::refines)?)
}

/// Reduced homology of the join of the nerve of `T(t)^◇` with the nerve of `T_Sp(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinReport {
    pub p: u32,
    pub t: usize,
    pub s: usize,
    pub suspension_rank: usize,
    pub symplectic_rank: usize,
    pub degree: Option<i64>,
    pub rank: usize,
    pub homology: Vec<crate::homology::HomologyGroup>,
    pub summary: String,
}

pub fn join_suspension_with_symplectic(p: u32, t: usize, s: usize) -> Result<JoinReport, BuildingError> {
    let susp = suspension_model(p, t)?;
    let sym = tits_sp(p, s)?;
    let a = susp.tdiamond().order_complex()?;
    let b = sym.order_complex()?;
    let ha = homology(&a, true)?;
    let hb = homology(&b, true)?;
    let joined = a.join(&b)?;
    let h = homology(&joined, true)?;
    let degree = h.concentrated_in();
    let top = |r: &HomologyReport| r.concentrated_in().map_or(0, |d| r.betti(d));
    Ok(JoinReport {
        p,
        t,
        s,
        suspension_rank: top(&ha),
        symplectic_rank: top(&hb),
        degree,
        rank: degree.map_or(0, |d| h.betti(d)),
        homology: h.groups.clone(),
        summary: h.summary(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_gl_buildings() {
        let t = tits_gl(2, 2).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.poset().covering_pairs().is_empty());
        assert!(tits_gl(2, 1).unwrap().is_empty());
        let fano = tits_gl(2, 3).unwrap();
        assert_eq!(fano.len(), 14);
        assert_eq!(fano.poset().covering_pairs().len(), 21);
    }

    #[test]
    fn small_sp_buildings() {
        for p in [2, 3, 5] {
            let t = tits_sp(p, 1).unwrap();
            assert_eq!(t.len(), p as usize + 1);
            assert!(t.poset().covering_pairs().is_empty());
        }
        let t = tits_sp(2, 2).unwrap();
        assert_eq!(t.len(), 30);
        let lagrangians = t.poset().labels().iter().filter(|w| w.dim() == 2).count();
        assert_eq!(lagrangians, 15);
        let complex = t.order_complex().unwrap();
        assert_eq!(complex.f_vector(), vec![30, 45]);
    }

    #[test]
    fn sphere_reports() {
        let r = tits_sp(2, 2).unwrap().sphere_count_report().unwrap();
        assert_eq!((r.degree, r.rank), (1, 16));
        assert_eq!(r.euler_characteristic, -16);
        let r = tits_gl(2, 1).unwrap().sphere_count_report().unwrap();
        assert_eq!((r.degree, r.rank), (-1, 1));
        let r = tits_sp(3, 1).unwrap().sphere_count_report().unwrap();
        assert_eq!((r.degree, r.rank), (0, 3));
        assert!(r.expected_rank_formula_matched);
    }

    #[test]
    fn suspension_examples() {
        let s = suspension_model(2, 1).unwrap();
        assert_eq!(s.tdiamond().len(), 2);
        assert!(s.tdiamond().covering_pairs().is_empty());
        let s = suspension_model(2, 2).unwrap();
        assert!(s.intersection_is_subdivision());
        let h = homology(&s.tdiamond().order_complex().unwrap(), true).unwrap();
        assert_eq!(h.betti_numbers(), std::collections::BTreeMap::from([(1, 2)]));
        let triple = s.mayer_vietoris().unwrap();
        assert_eq!(triple.union, s.tdiamond().order_complex().unwrap());
    }

    #[test]
    fn partition_counts() {
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(all_partitions(8).len(), 4140);
        let f = partition_fixed_points(2, 2).unwrap();
        assert_eq!(f.candidates, 13);
        assert_eq!(f.poset.len(), 3);
        assert!(f.poset.labels().iter().all(|q| q.blocks().iter().all(|b| b.len() == 2)));
        assert!(partition_fixed_points(2, 1).unwrap().poset.is_empty());
        assert!(matches!(partition_fixed_points(3, 2), Err(BuildingError::Guard(_))));
    }

    #[test]
    fn coset_partitions_match_translation_invariant_ones() {
        let t = tits_gl(2, 2).unwrap();
        let f = partition_fixed_points(2, 2).unwrap();
        let mut cosets: Vec<SetPartition> = t.poset().labels().iter().map(coset_partition).collect();
        cosets.sort();
        assert_eq!(cosets, f.poset.labels());
    }

    #[test]
    fn indices_are_little_endian() {
        assert_eq!(vector_index(2, &[1, 0]), 1);
        assert_eq!(vector_index(3, &[0, 1]), 3);
        assert_eq!(index_vector(3, 2, 5), vec![2, 1]);
        assert_eq!(translation(2, 2, &[1, 0]), vec![1, 0, 3, 2]);
    }

    #[test]
    fn delta1_posets() {
        assert_eq!(delta1_trivial_action_subposet(2).unwrap().len(), 1);
        let p3 = delta1_trivial_action_subposet(3).unwrap();
        assert_eq!(p3.len(), 4);
        assert_eq!(p3.minimal_elements().len(), 1);
        assert!(delta1_trivial_action_subposet(7).is_err());
    }

    #[test]
    fn join_with_symplectic_points() {
        let r = join_suspension_with_symplectic(2, 1, 1).unwrap();
        assert_eq!((r.degree, r.rank), (Some(1), 2));
        assert_eq!((r.suspension_rank, r.symplectic_rank), (1, 2));
    }
}
