//! Exact linear algebra over the prime field F_p.
//!
//! Subspaces are stored by their reduced row echelon basis, so two subspaces
//! are equal exactly when their basis matrices are identical. The symplectic
//! form on F_p^{2k} is the standard one, `<(a,b),(a',b')> = a.b' - b.a'`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::guard::{self, GuardError};

/// Largest `p^n` that [`enumerate_subspaces`] will walk.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("ambient dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),
    #[error("subspace is not coisotropic")]
    NotCoisotropic,
    #[error(transparent)]
    Guard(#[from] GuardError),
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<(), GfError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(GfError::NotPrime(p))
    }
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    (a + p - b) % p
}

fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    // Fermat: a^(p-2)
    let mut result = 1u32;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

/// Dot product of two residue vectors.
pub fn dot(p: u32, u: &[u32], v: &[u32]) -> u32 {
    let s: u64 = u.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
    (s % p as u64) as u32
}

/// A vector of residues mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GFVector {
    p: u32,
    coords: Vec<u32>,
}

impl GFVector {
    /// Reduces every coordinate mod `p`.
    pub fn new(p: u32, coords: impl IntoIterator<Item = i64>) -> Self {
        let coords = coords
            .into_iter()
            .map(|c| c.rem_euclid(p as i64) as u32)
            .collect();
        GFVector { p, coords }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        GFVector { p, coords: vec![0; n] }
    }

    /// The `i`-th standard basis vector of F_p^n.
    pub fn unit(p: u32, n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        GFVector { p, coords }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &GFVector) -> u32 {
        dot(self.p, &self.coords, &other.coords)
    }

    pub fn add(&self, other: &GFVector) -> GFVector {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        GFVector { p: self.p, coords }
    }

    pub fn scale(&self, c: u32) -> GFVector {
        let coords = self.coords.iter().map(|&a| mul_mod(a, c, self.p)).collect();
        GFVector { p: self.p, coords }
    }

    /// Splits a vector of F_p^{2k} into its `(a, b)` halves.
    pub fn halves(&self) -> (&[u32], &[u32]) {
        self.coords.split_at(self.coords.len() / 2)
    }
}

impl From<GFVector> for Vec<u32> {
    fn from(v: GFVector) -> Self {
        v.coords
    }
}

/// Row-reduces `rows` in place to RREF and returns the pivot columns.
/// Zero rows are dropped.
fn row_reduce(p: u32, ncols: usize, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod(rows[r][col], p);
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                let (pivot_row, other) = if i < r {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = rows.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, &y) in other.iter_mut().zip(pivot_row.iter()) {
                    *x = sub_mod(*x, mul_mod(f, y, p), p);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A subspace of F_p^n held as its canonical RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GFSubspace {
    p: u32,
    ambient_dim: usize,
    basis: Vec<Vec<u32>>,
}

impl Ord for GFSubspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.ambient_dim, self.basis.len(), &self.basis).cmp(&(
            other.p,
            other.ambient_dim,
            other.basis.len(),
            &other.basis,
        ))
    }
}

impl PartialOrd for GFSubspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical row space of an F_p matrix whose rows have length `ambient_dim`.
/// Entries are reduced mod `p` first.
pub fn rref(p: u32, ambient_dim: usize, rows: &[Vec<u32>]) -> Result<GFSubspace, GfError> {
    check_prime(p)?;
    let mut m = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != ambient_dim {
            return Err(GfError::DimensionMismatch { expected: ambient_dim, got: row.len() });
        }
        m.push(row.iter().map(|&x| x % p).collect::<Vec<_>>());
    }
    row_reduce(p, ambient_dim, &mut m);
    Ok(GFSubspace { p, ambient_dim, basis: m })
}

/// `{x : M x = 0}` for the matrix with the given rows, each of length `ncols`.
pub fn kernel(p: u32, ncols: usize, rows: &[Vec<u32>]) -> Result<GFSubspace, GfError> {
    let reduced = rref(p, ncols, rows)?;
    let pivots = reduced.pivots();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; ncols];
        v[free] = 1;
        for (row, &pc) in reduced.basis.iter().zip(&pivots) {
            v[pc] = sub_mod(0, row[free], p);
        }
        basis.push(v);
    }
    rref(p, ncols, &basis)
}

impl GFSubspace {
    pub fn zero(p: u32, n: usize) -> Self {
        GFSubspace { p, ambient_dim: n, basis: Vec::new() }
    }

    pub fn full(p: u32, n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        GFSubspace { p, ambient_dim: n, basis }
    }

    pub fn span(p: u32, n: usize, vectors: &[GFVector]) -> Result<Self, GfError> {
        let rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.coords.clone()).collect();
        rref(p, n, &rows)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<GFVector> {
        self.basis
            .iter()
            .map(|r| GFVector { p: self.p, coords: r.clone() })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("RREF rows are nonzero"))
            .collect()
    }

    fn same_space(&self, other: &GFSubspace) -> Result<(), GfError> {
        if self.p != other.p {
            return Err(GfError::FieldMismatch(self.p, other.p));
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(GfError::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        let mut rest: Vec<u32> = v.iter().map(|&x| x % self.p).collect();
        for (row, pc) in self.basis.iter().zip(self.pivots()) {
            let f = rest[pc];
            if f != 0 {
                for (x, &y) in rest.iter_mut().zip(row) {
                    *x = sub_mod(*x, mul_mod(f, y, self.p), self.p);
                }
            }
        }
        rest.iter().all(|&x| x == 0)
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &GFSubspace) -> bool {
        self.p == other.p
            && self.ambient_dim == other.ambient_dim
            && self.dim() <= other.dim()
            && self.basis.iter().all(|r| other.contains_vector(r))
    }

    pub fn sum(&self, other: &GFSubspace) -> Result<GFSubspace, GfError> {
        self.same_space(other)?;
        let rows: Vec<Vec<u32>> = self.basis.iter().chain(&other.basis).cloned().collect();
        rref(self.p, self.ambient_dim, &rows)
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self) -> GFSubspace {
        kernel(self.p, self.ambient_dim, &self.basis).expect("shape is consistent")
    }

    pub fn intersection(&self, other: &GFSubspace) -> Result<GFSubspace, GfError> {
        self.same_space(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Every vector of the subspace, `p^dim` of them, in a fixed order.
    pub fn elements(&self) -> Vec<GFVector> {
        let d = self.dim();
        let count = (self.p as usize).pow(d as u32);
        let mut out = Vec::with_capacity(count);
        let mut coeffs = vec![0u32; d];
        for _ in 0..count {
            let mut v = vec![0u32; self.ambient_dim];
            for (c, row) in coeffs.iter().zip(&self.basis) {
                if *c != 0 {
                    for (x, &y) in v.iter_mut().zip(row) {
                        *x = (*x + mul_mod(*c, y, self.p)) % self.p;
                    }
                }
            }
            out.push(GFVector { p: self.p, coords: v });
            for c in coeffs.iter_mut() {
                *c += 1;
                if *c < self.p {
                    break;
                }
                *c = 0;
            }
        }
        out
    }

    /// Row-major flattening of the canonical basis.
    pub fn flattened(&self) -> Vec<u32> {
        self.basis.iter().flatten().copied().collect()
    }
}

impl fmt::Display for GFSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}} in F_{}^{}", self.p, self.ambient_dim)
    }
}

/// All subspaces of F_p^n (optionally of one dimension), sorted by
/// dimension and then lexicographically on the canonical basis.
pub fn enumerate_subspaces(p: u32, n: usize, dim: Option<usize>) -> Result<Vec<GFSubspace>, GfError> {
    check_prime(p)?;
    guard::check("subspace enumeration p^n", guard::pow(p as u64, n as u32), ENUMERATION_LIMIT)?;
    let dims: Vec<usize> = match dim {
        Some(d) if d > n => return Ok(Vec::new()),
        Some(d) => vec![d],
        None => (0..=n).collect(),
    };
    let mut out = Vec::new();
    for d in dims {
        let mut batch = Vec::new();
        for pivots in combinations(n, d) {
            // free slots: (row, col) with col > pivot[row] and col not a pivot
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| {
                    let pivots = &pivots;
                    (pc + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
                })
                .collect();
            let mut values = vec![0u32; free.len()];
            loop {
                let mut basis = vec![vec![0u32; n]; d];
                for (r, &pc) in pivots.iter().enumerate() {
                    basis[r][pc] = 1;
                }
                for (&(r, c), &v) in free.iter().zip(&values) {
                    basis[r][c] = v;
                }
                batch.push(GFSubspace { p, ambient_dim: n, basis });
                let mut i = 0;
                while i < values.len() {
                    values[i] += 1;
                    if values[i] < p {
                        break;
                    }
                    values[i] = 0;
                    i += 1;
                }
                if i == values.len() {
                    break;
                }
            }
        }
        batch.sort();
        out.extend(batch);
    }
    Ok(out)
}

/// Increasing `d`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn go(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < d - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, d, cur, out);
            cur.pop();
        }
    }
    go(0, n, d, &mut cur, &mut out);
    out
}

/// F_p^{2k} with the standard alternating form `a.b' - b.a'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticSpace {
    p: u32,
    k: usize,
}

impl SymplecticSpace {
    pub fn new(p: u32, k: usize) -> Result<Self, GfError> {
        check_prime(p)?;
        Ok(SymplecticSpace { p, k })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        2 * self.k
    }

    pub fn form(&self, u: &[u32], v: &[u32]) -> u32 {
        let k = self.k;
        let ab = dot(self.p, &u[..k], &v[k..]);
        let ba = dot(self.p, &u[k..], &v[..k]);
        sub_mod(ab, ba, self.p)
    }

    /// Gram matrix of the form in the standard basis.
    pub fn form_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let ei = GFVector::unit(self.p, n, i);
                        let ej = GFVector::unit(self.p, n, j);
                        self.form(ei.coords(), ej.coords())
                    })
                    .collect()
            })
            .collect()
    }

    fn check(&self, w: &GFSubspace) -> Result<(), GfError> {
        if w.p != self.p {
            return Err(GfError::FieldMismatch(self.p, w.p));
        }
        if w.ambient_dim != self.dim() {
            return Err(GfError::DimensionMismatch { expected: self.dim(), got: w.ambient_dim });
        }
        Ok(())
    }

    /// `{z : <z, w> = 0 for all w in W}`.
    pub fn perp(&self, w: &GFSubspace) -> Result<GFSubspace, GfError> {
        self.check(w)?;
        let k = self.k;
        // <z, w> = z_a.w_b - z_b.w_a, so the functional has coefficients (w_b, -w_a)
        let functionals: Vec<Vec<u32>> = w
            .basis
            .iter()
            .map(|row| {
                let mut f = Vec::with_capacity(2 * k);
                f.extend_from_slice(&row[k..]);
                f.extend(row[..k].iter().map(|&x| sub_mod(0, x, self.p)));
                f
            })
            .collect();
        kernel(self.p, self.dim(), &functionals)
    }

    pub fn is_coisotropic(&self, w: &GFSubspace) -> Result<bool, GfError> {
        Ok(self.perp(w)?.is_subspace_of(w))
    }

    pub fn is_isotropic(&self, w: &GFSubspace) -> Result<bool, GfError> {
        Ok(w.is_subspace_of(&self.perp(w)?))
    }

    /// `W ∩ W^⊥` for coisotropic `W`.
    pub fn radical(&self, w: &GFSubspace) -> Result<GFSubspace, GfError> {
        let perp = self.perp(w)?;
        if !perp.is_subspace_of(w) {
            return Err(GfError::NotCoisotropic);
        }
        w.intersection(&perp)
    }

    /// Rank of the form restricted to `W`.
    pub fn form_rank_on(&self, w: &GFSubspace) -> Result<usize, GfError> {
        self.check(w)?;
        let gram: Vec<Vec<u32>> = w
            .basis
            .iter()
            .map(|u| w.basis.iter().map(|v| self.form(u, v)).collect())
            .collect();
        Ok(rref(self.p, w.dim(), &gram)?.dim())
    }

    /// Proper coisotropic subspaces, in enumeration order.
    pub fn proper_coisotropic_subspaces(&self) -> Result<Vec<GFSubspace>, GfError> {
        let all = enumerate_subspaces(self.p, self.dim(), None)?;
        let mut out = Vec::new();
        for w in all {
            if w.dim() < self.dim() && self.is_coisotropic(&w)? {
                out.push(w);
            }
        }
        Ok(out)
    }
}
