//! Integer simplicial homology via Smith normal form, and maps induced on
//! homology by chain maps.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::guard::{self, GuardError};
use crate::poset::{MayerVietorisTriple, SimplicialComplex, SimplicialMap};

/// Largest number of cells per degree for which dense transforms are tracked.
pub const DENSE_LIMIT: u128 = 1_500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundarySquare(i64),
    #[error("map does not commute with boundaries in degree {0}")]
    NotChainMap(i64),
    #[error("matrix shape mismatch in degree {degree}: expected {expected:?}, got {got:?}")]
    Shape { degree: i64, expected: (usize, usize), got: (usize, usize) },
    #[error("Euler characteristic mismatch: cells give {cells}, homology gives {homology}")]
    EulerMismatch { cells: i64, homology: i64 },
    #[error("Mayer-Vietoris bookkeeping fails in degree {0}")]
    MayerVietoris(i64),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// Sparse integer matrix stored by columns; each column sorted by row index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrixZ {
    nrows: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, BigInt)>>,
}

impl SparseMatrixZ {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrixZ { nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    pub fn from_dense(rows: &[Vec<BigInt>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    m.cols[j].push((i, x.clone()));
                }
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_dense(&big)
    }

    /// Builds from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, entries: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); ncols];
        for (i, j, x) in entries {
            debug_assert!(i < nrows && j < ncols);
            *acc[j].entry(i).or_insert_with(BigInt::zero) += x;
        }
        let cols = acc.into_iter().map(|c| c.into_iter().filter(|(_, x)| !x.is_zero()).collect()).collect();
        SparseMatrixZ { nrows, ncols, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                out[*i][j] = x.clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrixZ) -> SparseMatrixZ {
        debug_assert_eq!(self.ncols, other.nrows);
        let mut entries = Vec::new();
        for (j, col) in other.cols.iter().enumerate() {
            for (l, b) in col {
                for (i, a) in &self.cols[*l] {
                    entries.push((*i, j, a * b));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, entries)
    }

    /// Applies the matrix to a dense vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, a) in col {
                out[*i] += a * &v[j];
            }
        }
        out
    }
}

/// Nonzero invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

/// Normalizes a list of nonzero diagonal entries to the divisibility chain
/// `d_1 | d_2 | …`.
pub fn normalize_diagonal(diag: Vec<BigInt>) -> Vec<BigInt> {
    let mut ones = 0usize;
    let mut rest: Vec<BigInt> = Vec::new();
    for d in diag {
        let d = d.abs();
        if d.is_one() {
            ones += 1;
        } else if !d.is_zero() {
            rest.push(d);
        }
    }
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let g = rest[i].gcd(&rest[j]);
            let l = &rest[i] / &g * &rest[j];
            rest[i] = g;
            rest[j] = l;
        }
    }
    let mut out = vec![BigInt::one(); ones];
    out.extend(rest);
    let first_big = out.iter().position(|d| !d.is_one()).unwrap_or(out.len());
    out[first_big..].sort();
    out
}

/// Smith normal form invariants by sparse elimination with smallest-pivot choice.
pub fn smith_normal_form(m: &SparseMatrixZ) -> SmithForm {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.nrows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.ncols];
    for (j, col) in m.cols.iter().enumerate() {
        for (i, x) in col {
            rows[*i].insert(j, x.clone());
            col_rows[j].insert(*i);
        }
    }
    let mut diag = Vec::new();
    while let Some((mut r, mut c)) = choose_pivot(&rows, &col_rows) {
        loop {
            // Clear the pivot column by row operations.
            let pivot = rows[r][&c].clone();
            let pivot_row: Vec<(usize, BigInt)> = rows[r].iter().map(|(j, x)| (*j, x.clone())).collect();
            let others: Vec<usize> = col_rows[c].iter().copied().filter(|&i| i != r).collect();
            let mut smaller: Option<(usize, BigInt)> = None;
            for i in others {
                let a = rows[i][&c].clone();
                let q = &a / &pivot;
                if !q.is_zero() {
                    row_sub(&mut rows, &mut col_rows, i, &pivot_row, &q);
                }
                if let Some(rem) = rows[i].get(&c) {
                    if smaller.as_ref().is_none_or(|(_, s)| rem.abs() < s.abs()) {
                        smaller = Some((i, rem.clone()));
                    }
                }
            }
            if let Some((i, _)) = smaller {
                r = i;
                continue;
            }
            // The column is clear; reduce the rest of the pivot row by column
            // operations, which touch only this row.
            let entries: Vec<usize> = rows[r].keys().copied().filter(|&j| j != c).collect();
            let mut next: Option<(usize, BigInt)> = None;
            for j in entries {
                let a = rows[r][&j].clone();
                let rem = &a - (&a / &pivot) * &pivot;
                if rem.is_zero() {
                    rows[r].remove(&j);
                    col_rows[j].remove(&r);
                } else {
                    if next.as_ref().is_none_or(|(_, s)| rem.abs() < s.abs()) {
                        next = Some((j, rem.clone()));
                    }
                    rows[r].insert(j, rem);
                }
            }
            match next {
                Some((j, _)) => {
                    c = j;
                }
                None => {
                    diag.push(pivot);
                    rows[r].clear();
                    col_rows[c].clear();
                    break;
                }
            }
        }
    }
    SmithForm { invariant_factors: normalize_diagonal(diag) }
}

fn choose_pivot(rows: &[BTreeMap<usize, BigInt>], col_rows: &[BTreeSet<usize>]) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize, usize)> = None;
    for (i, row) in rows.iter().enumerate() {
        for (&j, x) in row {
            let size = x.abs();
            let fill = row.len() * col_rows[j].len();
            let better = match &best {
                None => true,
                Some((s, f, _, _)) => size < *s || (size == *s && fill < *f),
            };
            if better {
                best = Some((size, fill, i, j));
            }
        }
    }
    best.map(|(_, _, i, j)| (i, j))
}

fn row_sub(
    rows: &mut [BTreeMap<usize, BigInt>],
    col_rows: &mut [BTreeSet<usize>],
    target: usize,
    pivot_row: &[(usize, BigInt)],
    q: &BigInt,
) {
    for (j, x) in pivot_row {
        let entry = rows[target].entry(*j).or_insert_with(BigInt::zero);
        *entry -= q * x;
        if entry.is_zero() {
            rows[target].remove(j);
            col_rows[*j].remove(&target);
        } else {
            col_rows[*j].insert(target);
        }
    }
}

/// A chain complex of free abelian groups `C_d`, `d ≥ lowest_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexZ {
    lowest_degree: i64,
    ranks: Vec<usize>,
    /// `boundaries[i]` is `∂ : C_{lowest+i} → C_{lowest+i-1}`.
    boundaries: Vec<SparseMatrixZ>,
}

impl ChainComplexZ {
    pub fn new(lowest_degree: i64, ranks: Vec<usize>, boundaries: Vec<SparseMatrixZ>) -> Result<Self, HomologyError> {
        let c = ChainComplexZ { lowest_degree, ranks, boundaries };
        for (i, b) in c.boundaries.iter().enumerate() {
            let d = lowest_degree + i as i64;
            let expected = (if i == 0 { 0 } else { c.ranks[i - 1] }, c.ranks[i]);
            if (b.nrows, b.ncols) != expected {
                return Err(HomologyError::Shape { degree: d, expected, got: (b.nrows, b.ncols) });
            }
        }
        c.check_boundary_square()?;
        Ok(c)
    }

    pub fn lowest_degree(&self) -> i64 {
        self.lowest_degree
    }

    pub fn top_degree(&self) -> i64 {
        self.lowest_degree + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lowest_degree..=self.top_degree()
    }

    pub fn rank(&self, d: i64) -> usize {
        self.slot(d).map_or(0, |i| self.ranks[i])
    }

    fn slot(&self, d: i64) -> Option<usize> {
        let i = d - self.lowest_degree;
        (i >= 0 && (i as usize) < self.ranks.len()).then_some(i as usize)
    }

    /// `∂_d : C_d → C_{d-1}` (a zero matrix outside the stored range).
    pub fn boundary(&self, d: i64) -> SparseMatrixZ {
        match self.slot(d) {
            Some(i) => self.boundaries[i].clone(),
            None => SparseMatrixZ::zeros(self.rank(d - 1), self.rank(d)),
        }
    }

    fn boundary_ref(&self, d: i64) -> Option<&SparseMatrixZ> {
        self.slot(d).map(|i| &self.boundaries[i])
    }

    pub fn check_boundary_square(&self) -> Result<(), HomologyError> {
        for i in 1..self.boundaries.len() {
            if !self.boundaries[i - 1].mul(&self.boundaries[i]).is_zero() {
                return Err(HomologyError::BoundarySquare(self.lowest_degree + i as i64));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|d| sign(d) * self.rank(d) as i64).sum()
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &ChainComplexZ) -> ChainComplexZ {
        let low = self.lowest_degree.min(other.lowest_degree);
        let high = self.top_degree().max(other.top_degree());
        let mut ranks = Vec::new();
        let mut boundaries = Vec::new();
        for d in low..=high {
            ranks.push(self.rank(d) + other.rank(d));
            let (a, b) = (self.boundary(d), other.boundary(d));
            let rows = if d == low { 0 } else { self.rank(d - 1) + other.rank(d - 1) };
            let mut entries = Vec::new();
            if d != low {
                for (j, col) in a.cols.iter().enumerate() {
                    entries.extend(col.iter().map(|(i, x)| (*i, j, x.clone())));
                }
                for (j, col) in b.cols.iter().enumerate() {
                    entries.extend(col.iter().map(|(i, x)| (i + self.rank(d - 1), j + self.rank(d), x.clone())));
                }
            }
            boundaries.push(SparseMatrixZ::from_triplets(rows, ranks[ranks.len() - 1], entries));
        }
        ChainComplexZ { lowest_degree: low, ranks, boundaries }
    }
}

fn sign(d: i64) -> i64 {
    if d.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Simplicial boundary matrices; with `reduced`, degree −1 carries the augmentation.
pub fn boundary_matrices(k: &SimplicialComplex, reduced: bool) -> ChainComplexZ {
    let top = k.dim().map_or(-1, |d| d as i64);
    let lowest = if reduced { -1 } else { 0 };
    let mut ranks = Vec::new();
    let mut boundaries = Vec::new();
    for d in lowest..=top.max(lowest) {
        let n = if d == -1 { 1 } else { k.count(d as usize) };
        ranks.push(n);
        let m = if d == lowest {
            SparseMatrixZ::zeros(0, n)
        } else if d == 0 {
            SparseMatrixZ { nrows: 1, ncols: n, cols: vec![vec![(0, BigInt::one())]; n] }
        } else {
            let faces = k.count(d as usize - 1);
            let cols = k
                .simplices(d as usize)
                .iter()
                .map(|s| {
                    let mut col: Vec<(usize, BigInt)> = (0..s.len())
                        .map(|i| {
                            let mut face = s.clone();
                            face.remove(i);
                            let idx = k.index_of(&face).expect("complex is closed under faces");
                            (idx, BigInt::from(if i % 2 == 0 { 1 } else { -1 }))
                        })
                        .collect();
                    col.sort_by_key(|(i, _)| *i);
                    col
                })
                .collect();
            SparseMatrixZ { nrows: faces, ncols: n, cols }
        };
        boundaries.push(m);
    }
    ChainComplexZ { lowest_degree: lowest, ranks, boundaries }
}

/// `H_d ≅ Z^betti ⊕ ⊕ Z/t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: i64,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl Serialize for HomologyGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HomologyGroup", 3)?;
        s.serialize_field("degree", &self.degree)?;
        s.serialize_field("betti", &self.betti)?;
        let torsion: Vec<u64> = self.torsion.iter().map(|t| t.to_u64().unwrap_or(u64::MAX)).collect();
        s.serialize_field("torsion", &torsion)?;
        s.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub reduced: bool,
    pub groups: Vec<HomologyGroup>,
}

impl HomologyReport {
    pub fn group(&self, d: i64) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.degree == d)
    }

    pub fn betti(&self, d: i64) -> usize {
        self.group(d).map_or(0, |g| g.betti)
    }

    pub fn betti_numbers(&self) -> BTreeMap<i64, usize> {
        self.groups.iter().filter(|g| g.betti > 0).map(|g| (g.degree, g.betti)).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }

    pub fn nonzero_degrees(&self) -> Vec<i64> {
        self.groups.iter().filter(|g| !g.is_zero()).map(|g| g.degree).collect()
    }

    /// All homology vanishes.
    pub fn is_acyclic(&self) -> bool {
        self.nonzero_degrees().is_empty()
    }

    /// The unique degree carrying homology, if exactly one does.
    pub fn concentrated_in(&self) -> Option<i64> {
        match self.nonzero_degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups.iter().map(|g| sign(g.degree) * g.betti as i64).sum()
    }

    /// Compact text such as `H̃_1 = Z^16`.
    pub fn summary(&self) -> String {
        let mark = if self.reduced { "H̃" } else { "H" };
        let parts: Vec<String> = self
            .groups
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| {
                let mut terms = Vec::new();
                if g.betti > 0 {
                    terms.push(if g.betti == 1 { "Z".to_string() } else { format!("Z^{}", g.betti) });
                }
                terms.extend(g.torsion.iter().map(|t| format!("Z/{t}")));
                format!("{mark}_{} = {}", g.degree, terms.join(" + "))
            })
            .collect();
        if parts.is_empty() {
            format!("{mark}_* = 0")
        } else {
            parts.join(", ")
        }
    }
}

/// Homology of an abstract chain complex.
pub fn chain_homology(c: &ChainComplexZ) -> HomologyReport {
    let forms: BTreeMap<i64, SmithForm> = c
        .degrees()
        .map(|d| (d, c.boundary_ref(d).map_or(SmithForm { invariant_factors: Vec::new() }, smith_normal_form)))
        .collect();
    let groups = c
        .degrees()
        .map(|d| {
            let rank_d = forms.get(&d).map_or(0, SmithForm::rank);
            let next = forms.get(&(d + 1));
            let rank_up = next.map_or(0, SmithForm::rank);
            let torsion = next.map_or(Vec::new(), |f| f.invariant_factors.iter().filter(|x| !x.is_one()).cloned().collect());
            HomologyGroup { degree: d, betti: c.rank(d) - rank_d - rank_up, torsion }
        })
        .collect();
    HomologyReport { reduced: c.lowest_degree < 0, groups }
}

/// Integer homology of a simplicial complex, cross-checked against the Euler
/// characteristic of the cell counts.
pub fn homology(k: &SimplicialComplex, reduced: bool) -> Result<HomologyReport, HomologyError> {
    let c = boundary_matrices(k, reduced);
    c.check_boundary_square()?;
    let report = chain_homology(&c);
    let cells = c.euler_characteristic();
    let hom = report.euler_characteristic();
    if cells != hom {
        return Err(HomologyError::EulerMismatch { cells, homology: hom });
    }
    Ok(report)
}

/// A chain map, one matrix `f_d : C_d → D_d` per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: ChainComplexZ,
    target: ChainComplexZ,
    maps: BTreeMap<i64, SparseMatrixZ>,
}

impl ChainMap {
    pub fn new(source: ChainComplexZ, target: ChainComplexZ, maps: BTreeMap<i64, SparseMatrixZ>) -> Result<Self, HomologyError> {
        let f = ChainMap { source, target, maps };
        let low = f.source.lowest_degree.min(f.target.lowest_degree);
        let high = f.source.top_degree().max(f.target.top_degree());
        for d in low..=high {
            let fd = f.map(d);
            if (fd.nrows, fd.ncols) != (f.target.rank(d), f.source.rank(d)) {
                return Err(HomologyError::Shape {
                    degree: d,
                    expected: (f.target.rank(d), f.source.rank(d)),
                    got: (fd.nrows, fd.ncols),
                });
            }
            let left = f.target.boundary(d).mul(&fd);
            let right = f.map(d - 1).mul(&f.source.boundary(d));
            if left != right {
                return Err(HomologyError::NotChainMap(d));
            }
        }
        Ok(f)
    }

    /// Chain map of a simplicial map; degenerate simplices go to zero and the
    /// augmentation degree maps by the identity.
    pub fn from_simplicial(map: &SimplicialMap, reduced: bool) -> Result<Self, HomologyError> {
        let source = boundary_matrices(map.source(), reduced);
        let target = boundary_matrices(map.target(), reduced);
        let mut maps = BTreeMap::new();
        for d in source.degrees() {
            let m = if d == -1 {
                SparseMatrixZ::from_i64(&[vec![1]])
            } else {
                let simplices = map.source().simplices(d as usize);
                let entries = simplices.iter().enumerate().filter_map(|(j, s)| {
                    map.chain_image(s).map(|(i, sg)| (i, j, BigInt::from(sg)))
                });
                SparseMatrixZ::from_triplets(target.rank(d), source.rank(d), entries)
            };
            maps.insert(d, m);
        }
        Self::new(source, target, maps)
    }

    pub fn source(&self) -> &ChainComplexZ {
        &self.source
    }

    pub fn target(&self) -> &ChainComplexZ {
        &self.target
    }

    pub fn map(&self, d: i64) -> SparseMatrixZ {
        self.maps.get(&d).cloned().unwrap_or_else(|| SparseMatrixZ::zeros(self.target.rank(d), self.source.rank(d)))
    }

    /// Mapping cone: `Cone_d = C_{d-1} ⊕ D_d`, `∂(x, y) = (−∂x, f x + ∂y)`.
    pub fn mapping_cone(&self) -> ChainComplexZ {
        let low = self.source.lowest_degree.min(self.target.lowest_degree);
        let high = (self.source.top_degree() + 1).max(self.target.top_degree());
        let mut ranks = Vec::new();
        let mut boundaries = Vec::new();
        for d in low..=high {
            let (c_prev, d_here) = (self.source.rank(d - 1), self.target.rank(d));
            ranks.push(c_prev + d_here);
            if d == low {
                boundaries.push(SparseMatrixZ::zeros(0, c_prev + d_here));
                continue;
            }
            let (c_prev2, d_prev) = (self.source.rank(d - 2), self.target.rank(d - 1));
            let mut entries = Vec::new();
            let dc = self.source.boundary(d - 1);
            for (j, col) in dc.cols.iter().enumerate() {
                entries.extend(col.iter().map(|(i, x)| (*i, j, -x)));
            }
            let f = self.map(d - 1);
            for (j, col) in f.cols.iter().enumerate() {
                entries.extend(col.iter().map(|(i, x)| (c_prev2 + i, j, x.clone())));
            }
            let dd = self.target.boundary(d);
            for (j, col) in dd.cols.iter().enumerate() {
                entries.extend(col.iter().map(|(i, x)| (c_prev2 + i, c_prev + j, x.clone())));
            }
            boundaries.push(SparseMatrixZ::from_triplets(c_prev2 + d_prev, c_prev + d_here, entries));
        }
        ChainComplexZ { lowest_degree: low, ranks, boundaries }
    }
}

type Dense = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Diagonalization `U A V = S` with unimodular `U`, `V` and their inverses.
struct Diagonalized {
    diag: Vec<BigInt>,
    u: Dense,
    u_inv: Dense,
    v: Dense,
    v_inv: Dense,
}

fn diagonalize(mut a: Dense, nrows: usize, ncols: usize) -> Diagonalized {
    let mut u = identity(nrows);
    let mut u_inv = identity(nrows);
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);

    // row_i += q row_j on A and U; U_inv gets col_j -= q col_i.
    let row_add = |a: &mut Dense, u: &mut Dense, u_inv: &mut Dense, i: usize, j: usize, q: &BigInt| {
        for c in 0..ncols {
            if !a[j][c].is_zero() {
                let t = q * &a[j][c];
                a[i][c] += t;
            }
        }
        for c in 0..nrows {
            if !u[j][c].is_zero() {
                let t = q * &u[j][c];
                u[i][c] += t;
            }
        }
        for row in u_inv.iter_mut() {
            if !row[i].is_zero() {
                let t = q * &row[i];
                row[j] -= t;
            }
        }
    };
    // col_j += q col_i on A and V; V_inv gets row_i -= q row_j.
    let col_add = |a: &mut Dense, v: &mut Dense, v_inv: &mut Dense, j: usize, i: usize, q: &BigInt| {
        for row in a.iter_mut() {
            if !row[i].is_zero() {
                let t = q * &row[i];
                row[j] += t;
            }
        }
        for row in v.iter_mut() {
            if !row[i].is_zero() {
                let t = q * &row[i];
                row[j] += t;
            }
        }
        for c in 0..ncols {
            if !v_inv[j][c].is_zero() {
                let t = q * &v_inv[j][c];
                v_inv[i][c] -= t;
            }
        }
    };
    let row_swap = |a: &mut Dense, u: &mut Dense, u_inv: &mut Dense, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
        for row in u_inv.iter_mut() {
            row.swap(i, j);
        }
    };
    let col_swap = |a: &mut Dense, v: &mut Dense, v_inv: &mut Dense, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    };

    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.as_ref().is_none_or(|(s, _, _)| x.abs() < *s) {
                    best = Some((x.abs(), i, j));
                }
            }
        }
        let Some((_, bi, bj)) = best else { break };
        row_swap(&mut a, &mut u, &mut u_inv, t, bi);
        col_swap(&mut a, &mut v, &mut v_inv, t, bj);
        loop {
            let pivot = a[t][t].clone();
            for i in t + 1..nrows {
                if !a[i][t].is_zero() {
                    let q = -(&a[i][t] / &pivot);
                    if !q.is_zero() {
                        row_add(&mut a, &mut u, &mut u_inv, i, t, &q);
                    }
                }
            }
            for j in t + 1..ncols {
                if !a[t][j].is_zero() {
                    let q = -(&a[t][j] / &pivot);
                    if !q.is_zero() {
                        col_add(&mut a, &mut v, &mut v_inv, j, t, &q);
                    }
                }
            }
            let mut smaller: Option<(BigInt, bool, usize)> = None;
            for i in t + 1..nrows {
                if !a[i][t].is_zero() && smaller.as_ref().is_none_or(|(s, _, _)| a[i][t].abs() < *s) {
                    smaller = Some((a[i][t].abs(), true, i));
                }
            }
            for j in t + 1..ncols {
                if !a[t][j].is_zero() && smaller.as_ref().is_none_or(|(s, _, _)| a[t][j].abs() < *s) {
                    smaller = Some((a[t][j].abs(), false, j));
                }
            }
            match smaller {
                None => break,
                Some((_, true, i)) => row_swap(&mut a, &mut u, &mut u_inv, t, i),
                Some((_, false, j)) => col_swap(&mut a, &mut v, &mut v_inv, t, j),
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    Diagonalized { diag, u, u_inv, v, v_inv }
}

fn mat_vec(m: &Dense, x: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(x).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
        .collect()
}

/// Coordinates for `H_d` of a chain complex: cycles are `K y`, and `y` has
/// class coordinates `U' y`, the first `r'` of them taken modulo `diag'`.
struct HomologyBasis {
    n: usize,
    rank_boundary: usize,
    v: Dense,
    v_inv: Dense,
    u_prime: Dense,
    u_prime_inv: Dense,
    diag: Vec<BigInt>,
    generators: Vec<usize>,
}

impl HomologyBasis {
    fn new(c: &ChainComplexZ, d: i64) -> Result<Self, HomologyError> {
        let n = c.rank(d);
        guard::check("cells per degree for induced maps", n as u128, DENSE_LIMIT)?;
        let a = c.boundary(d);
        let diag_a = diagonalize(a.to_dense(), a.nrows, a.ncols);
        let r = diag_a.diag.len();
        let z = n - r;
        let b = c.boundary(d + 1).to_dense();
        let q = b.first().map_or(c.rank(d + 1), Vec::len);
        // Boundaries in kernel coordinates: rows r.. of V^{-1} B.
        let b_prime: Dense = (r..n)
            .map(|i| (0..q).map(|j| (0..n).map(|l| &diag_a.v_inv[i][l] * &b[l][j]).sum()).collect())
            .collect();
        let diag_b = diagonalize(b_prime, z, q);
        let generators = (0..z).filter(|&j| j >= diag_b.diag.len() || !diag_b.diag[j].abs().is_one()).collect();
        Ok(HomologyBasis {
            n,
            rank_boundary: r,
            v: diag_a.v,
            v_inv: diag_a.v_inv,
            u_prime: diag_b.u,
            u_prime_inv: diag_b.u_inv,
            diag: diag_b.diag,
            generators,
        })
    }

    fn is_free(&self, j: usize) -> bool {
        j >= self.diag.len()
    }

    /// A cycle representing generator `j`.
    fn generator(&self, j: usize) -> Vec<BigInt> {
        let y: Vec<BigInt> = self.u_prime_inv.iter().map(|row| row[j].clone()).collect();
        (0..self.n)
            .map(|i| y.iter().enumerate().map(|(l, yl)| &self.v[i][self.rank_boundary + l] * yl).sum())
            .collect()
    }

    /// Class coordinates of a cycle, over `generators`.
    fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let full = mat_vec(&self.v_inv, x);
        debug_assert!(full[..self.rank_boundary].iter().all(Zero::is_zero), "input is a cycle");
        let y = &full[self.rank_boundary..];
        let c = mat_vec(&self.u_prime, y);
        self.generators
            .iter()
            .map(|&j| if self.is_free(j) { c[j].clone() } else { c[j].mod_floor(&self.diag[j].abs()) })
            .collect()
    }

    fn invariants(&self) -> (usize, Vec<BigInt>) {
        let free = self.generators.iter().filter(|&&j| self.is_free(j)).count();
        let torsion = normalize_diagonal(self.generators.iter().filter(|&&j| !self.is_free(j)).map(|&j| self.diag[j].clone()).collect());
        (free, torsion)
    }
}

/// The map on `H_d` induced by a chain map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedMap {
    pub degree: i64,
    /// Rank over Q.
    pub rank: usize,
    pub is_iso: bool,
}

/// Computes `f_* : H_d(C) → H_d(D)` over Z: its rational rank and whether it is
/// an isomorphism of abelian groups.
pub fn induced_map_rank(f: &ChainMap, d: i64) -> Result<InducedMap, HomologyError> {
    let src = HomologyBasis::new(&f.source, d)?;
    let tgt = HomologyBasis::new(&f.target, d)?;
    let fd = f.map(d);
    let columns: Vec<Vec<BigInt>> = src.generators.iter().map(|&j| tgt.coordinates(&fd.apply(&src.generator(j)))).collect();
    let m = tgt.generators.len();

    // Rational rank: free rows against free columns.
    let free_rows: Vec<usize> = (0..m).filter(|&i| tgt.is_free(tgt.generators[i])).collect();
    let free_block: Vec<Vec<BigInt>> = free_rows
        .iter()
        .map(|&i| {
            src.generators
                .iter()
                .zip(&columns)
                .filter(|(&j, _)| src.is_free(j))
                .map(|(_, col)| col[i].clone())
                .collect()
        })
        .collect();
    let rank = if free_block.first().is_none_or(Vec::is_empty) {
        0
    } else {
        smith_normal_form(&SparseMatrixZ::from_dense(&free_block)).rank()
    };

    // Surjectivity: image together with the torsion relations generates Z^m.
    let relations: Vec<usize> = (0..m).filter(|&i| !tgt.is_free(tgt.generators[i])).collect();
    let mut entries = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            entries.push((i, c, x.clone()));
        }
    }
    for (k, &i) in relations.iter().enumerate() {
        entries.push((i, columns.len() + k, tgt.diag[tgt.generators[i]].clone()));
    }
    let stacked = SparseMatrixZ::from_triplets(m, columns.len() + relations.len(), entries);
    let form = smith_normal_form(&stacked);
    let surjective = form.rank() == m && form.invariant_factors.iter().all(One::is_one);
    let is_iso = surjective && src.invariants() == tgt.invariants();
    Ok(InducedMap { degree: d, rank, is_iso })
}

/// Induced maps in every degree of the source.
pub fn induced_maps(f: &ChainMap) -> Result<Vec<InducedMap>, HomologyError> {
    let low = f.source.lowest_degree.min(f.target.lowest_degree);
    let high = f.source.top_degree().max(f.target.top_degree());
    (low..=high).map(|d| induced_map_rank(f, d)).collect()
}

/// Ranks in the Mayer–Vietoris sequence of a union `U = A ∪ B` (unreduced,
/// rational), derived from the mapping cone of `A ∩ B → A ⊕ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MayerVietorisReport {
    pub union: BTreeMap<i64, usize>,
    pub first: BTreeMap<i64, usize>,
    pub second: BTreeMap<i64, usize>,
    pub intersection: BTreeMap<i64, usize>,
    /// Rank of `H_d(A ∩ B) → H_d(A) ⊕ H_d(B)`.
    pub alpha_ranks: BTreeMap<i64, usize>,
    pub consistent: bool,
}

fn inclusion(sub: &SimplicialComplex, sup: &SimplicialComplex, d: usize) -> Vec<(usize, usize, BigInt)> {
    sub.simplices(d)
        .iter()
        .enumerate()
        .map(|(j, s)| (sup.index_of(s).expect("subcomplex"), j, BigInt::one()))
        .collect()
}

/// Checks exactness of the Mayer–Vietoris sequence at the level of ranks:
/// `dim H_d(U) = (dim H_d(A) + dim H_d(B) − rank α_d) + (dim H_{d−1}(A∩B) − rank α_{d−1})`.
pub fn mayer_vietoris_check(mv: &MayerVietorisTriple) -> Result<MayerVietorisReport, HomologyError> {
    let cx = |k: &SimplicialComplex| boundary_matrices(k, false);
    let (ci, ca, cb) = (cx(&mv.intersection), cx(&mv.first), cx(&mv.second));
    let sum = ca.direct_sum(&cb);
    let mut maps = BTreeMap::new();
    for d in sum.degrees() {
        let du = d as usize;
        let mut entries = inclusion(&mv.intersection, &mv.first, du);
        let shift = ca.rank(d);
        entries.extend(inclusion(&mv.intersection, &mv.second, du).into_iter().map(|(i, j, x)| (i + shift, j, -x)));
        maps.insert(d, SparseMatrixZ::from_triplets(sum.rank(d), ci.rank(d), entries));
    }
    let alpha = ChainMap::new(ci.clone(), sum.clone(), maps)?;
    let cone = chain_homology(&alpha.mapping_cone());

    let betti = |c: &ChainComplexZ| chain_homology(c).groups.iter().map(|g| (g.degree, g.betti)).collect::<BTreeMap<_, _>>();
    let get = |m: &BTreeMap<i64, usize>, d: i64| m.get(&d).copied().unwrap_or(0);
    let (bu, ba, bb, bi) = (betti(&cx(&mv.union)), betti(&ca), betti(&cb), betti(&ci));
    let top = [&bu, &ba, &bb, &bi].iter().filter_map(|m| m.keys().max().copied()).max().unwrap_or(0) + 1;

    let mut alpha_ranks = BTreeMap::new();
    let mut consistent = true;
    let mut prev = 0i64;
    for d in 0..=top {
        // Cone sequence: b_d(cone) = (b_d(A⊕B) − r_d) + (b_{d−1}(I) − r_{d−1}).
        let r = (get(&ba, d) + get(&bb, d) + get(&bi, d - 1)) as i64 - prev - cone.betti(d) as i64;
        if r < 0 || r as usize > get(&bi, d).min(get(&ba, d) + get(&bb, d)) {
            consistent = false;
        }
        let expected = (get(&ba, d) + get(&bb, d)) as i64 - r + get(&bi, d - 1) as i64 - prev;
        if expected != get(&bu, d) as i64 {
            consistent = false;
        }
        alpha_ranks.insert(d, r.max(0) as usize);
        prev = r;
    }
    if !consistent {
        return Err(HomologyError::MayerVietoris(top));
    }
    Ok(MayerVietorisReport { union: bu, first: ba, second: bb, intersection: bi, alpha_ranks, consistent })
}
