//! Exact arithmetic in cyclotomic fields Q(ζ_m) and linear algebra over them.
//!
//! An element is a vector of rational coefficients over the power basis
//! `ζ^0, …, ζ^{φ(m)-1}`. Supported orders are primes and `m = 4`; the field
//! attached to a prime `p` is Q(ζ_p) for odd `p` and Q(ζ_4) = Q(i) for `p = 2`,
//! since the order-8 Heisenberg group has elements of order 4.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gflin::is_prime;
use crate::guard::{self, GuardError};

/// Largest ambient dimension accepted by [`CycloSubspace`] constructors.
pub const AMBIENT_LIMIT: u128 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("unsupported cyclotomic order {0} (primes and 4 only)")]
    UnsupportedOrder(u32),
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse cyclotomic scalar {0:?}")]
    Parse(String),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// Order of the root of unity adjoined for the Heisenberg model at prime `p`.
pub fn field_order_for_prime(p: u32) -> u32 {
    if p == 2 {
        4
    } else {
        p
    }
}

fn check_order(order: u32) -> Result<(), CycloError> {
    if order == 4 || is_prime(order) {
        Ok(())
    } else {
        Err(CycloError::UnsupportedOrder(order))
    }
}

fn degree(order: u32) -> usize {
    if order == 4 {
        2
    } else {
        order as usize - 1
    }
}

fn units(order: u32) -> impl Iterator<Item = u32> {
    (1..order).filter(move |&j| num_integer::gcd(j, order) == 1)
}

/// An exact element of Q(ζ_m).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycloScalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycloScalar {
    pub fn zero(order: u32) -> Self {
        CycloScalar { order, coeffs: vec![BigRational::zero(); degree(order)] }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u32, q: BigRational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = q;
        s
    }

    pub fn from_int(order: u32, n: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(n)))
    }

    /// `ζ^j`.
    pub fn root(order: u32, j: i64) -> Self {
        Self::one(order).mul_root(j)
    }

    /// Checked constructor from a coefficient vector of length `φ(order)`.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Self, CycloError> {
        check_order(order)?;
        if coeffs.len() != degree(order) {
            return Err(CycloError::DimensionMismatch { expected: degree(order), got: coeffs.len() });
        }
        Ok(CycloScalar { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Reduces a coefficient vector over `ζ^0 … ζ^{m-1}` modulo Φ_m.
    fn reduce(order: u32, mut full: Vec<BigRational>) -> Self {
        let m = order as usize;
        debug_assert_eq!(full.len(), m);
        if order == 4 {
            // ζ^2 = -1
            let c3 = full.pop().unwrap();
            let c2 = full.pop().unwrap();
            full[0] -= c2;
            full[1] -= c3;
        } else {
            // ζ^{m-1} = -(1 + ζ + … + ζ^{m-2})
            let top = full.pop().unwrap();
            if !top.is_zero() {
                for c in full.iter_mut() {
                    *c -= &top;
                }
            }
        }
        CycloScalar { order, coeffs: full }
    }

    fn spread(&self, f: impl Fn(usize) -> usize) -> Vec<BigRational> {
        let m = self.order as usize;
        let mut full = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                full[f(i) % m] += c;
            }
        }
        full
    }

    /// Multiplication by `ζ^j`.
    pub fn mul_root(&self, j: i64) -> Self {
        let m = self.order as i64;
        let shift = j.rem_euclid(m) as usize;
        Self::reduce(self.order, self.spread(|i| i + shift))
    }

    /// The Galois automorphism `ζ ↦ ζ^j`, `gcd(j, m) = 1`.
    pub fn galois(&self, j: u32) -> Self {
        debug_assert_eq!(num_integer::gcd(j, self.order), 1);
        Self::reduce(self.order, self.spread(|i| i * j as usize))
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::ZeroInverse);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(self.order, q.recip()));
        }
        // a * Π_{σ ≠ id} σ(a) = N(a) ∈ Q
        let mut cofactor = Self::one(self.order);
        for j in units(self.order).filter(|&j| j != 1) {
            cofactor = &cofactor * &self.galois(j);
        }
        let norm = (self * &cofactor)
            .to_rational()
            .expect("field norm is rational");
        Ok(cofactor.scale(&norm.recip()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycloScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Parses the textual form produced by `Display`, e.g. `1/3 + 2/3*z`.
    pub fn parse(order: u32, text: &str) -> Result<Self, CycloError> {
        check_order(order)?;
        let err = || CycloError::Parse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);

        let m = order as usize;
        let mut full = vec![BigRational::zero(); m];
        for term in terms {
            let (negative, body) = match term.as_bytes()[0] {
                b'+' => (false, &term[1..]),
                b'-' => (true, &term[1..]),
                _ => (false, term),
            };
            let (coef_text, power) = match body.find('z') {
                None => (body, 0usize),
                Some(pos) => {
                    let coef = body[..pos].trim_end_matches('*');
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(err)?.parse().map_err(|_| err())?
                    };
                    (coef, power)
                }
            };
            let mut c = if coef_text.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef_text).ok_or_else(err)?
            };
            if negative {
                c = -c;
            }
            full[power % m] += c;
        }
        Ok(Self::reduce(order, full))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = if first { c.clone() } else { c.abs() };
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            let power = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if i == 0 {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{power}")?;
            } else if first && (-&magnitude).is_one() {
                write!(f, "-{power}")?;
            } else {
                write!(f, "{magnitude}*{power}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'a> Add for &'a CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: &'a CycloScalar) -> CycloScalar {
        debug_assert_eq!(self.order, rhs.order);
        CycloScalar {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub for &'a CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: &'a CycloScalar) -> CycloScalar {
        debug_assert_eq!(self.order, rhs.order);
        CycloScalar {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul for &'a CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: &'a CycloScalar) -> CycloScalar {
        debug_assert_eq!(self.order, rhs.order);
        let m = self.order as usize;
        let mut full = vec![BigRational::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % m] += a * b;
                }
            }
        }
        CycloScalar::reduce(self.order, full)
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: CycloScalar) -> CycloScalar {
        &self + &rhs
    }
}

impl Sub for CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: CycloScalar) -> CycloScalar {
        &self - &rhs
    }
}

impl Mul for CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: CycloScalar) -> CycloScalar {
        &self * &rhs
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -&self
    }
}

/// Hermitian inner product `Σ u_i conj(v_i)`.
pub fn hermitian_dot(u: &[CycloScalar], v: &[CycloScalar]) -> CycloScalar {
    let order = u.first().map_or(3, |x| x.order);
    let mut acc = CycloScalar::zero(order);
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * &b.conj());
        }
    }
    acc
}

/// Dense row-major matrix over Q(ζ_m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloMatrix {
    order: u32,
    rows: usize,
    cols: usize,
    data: Vec<CycloScalar>,
}

impl CycloMatrix {
    pub fn zeros(order: u32, rows: usize, cols: usize) -> Self {
        CycloMatrix { order, rows, cols, data: vec![CycloScalar::zero(order); rows * cols] }
    }

    pub fn identity(order: u32, n: usize) -> Self {
        let mut m = Self::zeros(order, n, n);
        for i in 0..n {
            m.set(i, i, CycloScalar::one(order));
        }
        m
    }

    pub fn from_rows(order: u32, rows: Vec<Vec<CycloScalar>>) -> Result<Self, CycloError> {
        check_order(order)?;
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(CycloError::DimensionMismatch { expected: cols, got: row.len() });
            }
            for x in row {
                if x.order != order {
                    return Err(CycloError::OrderMismatch(order, x.order));
                }
                data.push(x);
            }
        }
        Ok(CycloMatrix { order, rows: nrows, cols, data })
    }

    /// Convenience constructor from rationals given as `(numerator, denominator)`.
    pub fn from_rational_rows(order: u32, rows: &[Vec<(i64, i64)>]) -> Result<Self, CycloError> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(n, d)| {
                        CycloScalar::from_rational(order, BigRational::new(n.into(), d.into()))
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(order, rows)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: CycloScalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[CycloScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<CycloScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    pub fn mul(&self, other: &CycloMatrix) -> Result<CycloMatrix, CycloError> {
        if self.cols != other.rows {
            return Err(CycloError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.order, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[CycloScalar]) -> Vec<CycloScalar> {
        (0..self.rows)
            .map(|i| {
                let mut acc = CycloScalar::zero(self.order);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> CycloScalar {
        let mut acc = CycloScalar::zero(self.order);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycloScalar::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.to_rows();
        row_reduce(self.order, self.cols, &mut rows).len()
    }

    pub fn inverse(&self) -> Option<CycloMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vec<CycloScalar>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        CycloScalar::one(self.order)
                    } else {
                        CycloScalar::zero(self.order)
                    }
                }));
                r
            })
            .collect();
        let pivots = row_reduce(self.order, 2 * n, &mut aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(CycloMatrix { order: self.order, rows: n, cols: n, data: flatten(rows) })
    }
}

fn flatten(rows: Vec<Vec<CycloScalar>>) -> Vec<CycloScalar> {
    rows.into_iter().flatten().collect()
}

/// Row-reduces to RREF in place, dropping zero rows; returns the pivot columns.
fn row_reduce(order: u32, ncols: usize, rows: &mut Vec<Vec<CycloScalar>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        if !rows[r][col].is_one() {
            let inv = rows[r][col].inv().expect("pivot is nonzero");
            for x in rows[r][col..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    debug_assert!(rows.iter().all(|row| row.iter().all(|x| x.order == order)));
    pivots
}

/// A subspace of Q(ζ_m)^n held as its canonical RREF basis (rows).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloSubspace {
    order: u32,
    ambient_dim: usize,
    basis: Vec<Vec<CycloScalar>>,
}

impl Ord for CycloSubspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.order, self.ambient_dim, self.basis.len(), &self.basis).cmp(&(
            other.order,
            other.ambient_dim,
            other.basis.len(),
            &other.basis,
        ))
    }
}

impl PartialOrd for CycloSubspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for CycloSubspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl CycloSubspace {
    /// Canonical row space of the given vectors.
    pub fn span(order: u32, ambient_dim: usize, rows: Vec<Vec<CycloScalar>>) -> Result<Self, CycloError> {
        check_order(order)?;
        guard::check("cyclotomic ambient dimension", ambient_dim as u128, AMBIENT_LIMIT)?;
        for row in &rows {
            if row.len() != ambient_dim {
                return Err(CycloError::DimensionMismatch { expected: ambient_dim, got: row.len() });
            }
            if let Some(x) = row.iter().find(|x| x.order != order) {
                return Err(CycloError::OrderMismatch(order, x.order));
            }
        }
        let mut basis = rows;
        row_reduce(order, ambient_dim, &mut basis);
        Ok(CycloSubspace { order, ambient_dim, basis })
    }

    pub fn zero(order: u32, ambient_dim: usize) -> Self {
        CycloSubspace { order, ambient_dim, basis: Vec::new() }
    }

    pub fn full(order: u32, ambient_dim: usize) -> Self {
        Self::coordinate(order, ambient_dim, 0..ambient_dim)
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(order: u32, ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        let basis = idx
            .into_iter()
            .map(|i| {
                (0..ambient_dim)
                    .map(|j| if i == j { CycloScalar::one(order) } else { CycloScalar::zero(order) })
                    .collect()
            })
            .collect();
        CycloSubspace { order, ambient_dim, basis }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<CycloScalar>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("RREF rows are nonzero"))
            .collect()
    }

    pub fn contains_vector(&self, v: &[CycloScalar]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut rest = v.to_vec();
        for (row, pc) in self.basis.iter().zip(self.pivots()) {
            if rest[pc].is_zero() {
                continue;
            }
            let f = rest[pc].clone();
            for (x, y) in rest.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rest.iter().all(CycloScalar::is_zero)
    }

    pub fn is_subspace_of(&self, other: &CycloSubspace) -> bool {
        self.order == other.order
            && self.ambient_dim == other.ambient_dim
            && self.dim() <= other.dim()
            && self.basis.iter().all(|r| other.contains_vector(r))
    }

    pub fn sum(&self, other: &CycloSubspace) -> Result<CycloSubspace, CycloError> {
        if self.order != other.order {
            return Err(CycloError::OrderMismatch(self.order, other.order));
        }
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::span(self.order, self.ambient_dim, rows)
    }

    /// Basis matrix (rows = basis vectors).
    pub fn basis_matrix(&self) -> CycloMatrix {
        CycloMatrix {
            order: self.order,
            rows: self.basis.len(),
            cols: self.ambient_dim,
            data: flatten(self.basis.clone()),
        }
    }
}

/// Column space of `m`, a subspace of Q(ζ)^{rows}.
pub fn colspace(m: &CycloMatrix) -> Result<CycloSubspace, CycloError> {
    CycloSubspace::span(m.order, m.rows, m.transpose().to_rows())
}

/// `{x : m x = 0}`, a subspace of Q(ζ)^{cols}.
pub fn kernel(m: &CycloMatrix) -> Result<CycloSubspace, CycloError> {
    let mut rows = m.to_rows();
    let pivots = row_reduce(m.order, m.cols, &mut rows);
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CycloScalar::zero(m.order); m.cols];
        v[free] = CycloScalar::one(m.order);
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        basis.push(v);
    }
    CycloSubspace::span(m.order, m.cols, basis)
}

/// One solution of `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &CycloMatrix, b: &[CycloScalar]) -> Result<Option<Vec<CycloScalar>>, CycloError> {
    if b.len() != m.rows {
        return Err(CycloError::DimensionMismatch { expected: m.rows, got: b.len() });
    }
    let mut aug: Vec<Vec<CycloScalar>> = (0..m.rows)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let pivots = row_reduce(m.order, m.cols + 1, &mut aug);
    if pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![CycloScalar::zero(m.order); m.cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[m.cols].clone();
    }
    Ok(Some(x))
}

/// `B_V conj(B_W)^T = 0`.
pub fn hermitian_orthogonal(v: &CycloSubspace, w: &CycloSubspace) -> Result<bool, CycloError> {
    if v.ambient_dim != w.ambient_dim {
        return Err(CycloError::DimensionMismatch { expected: v.ambient_dim, got: w.ambient_dim });
    }
    if v.order != w.order {
        return Err(CycloError::OrderMismatch(v.order, w.order));
    }
    Ok(v.basis.iter().all(|a| w.basis.iter().all(|b| hermitian_dot(a, b).is_zero())))
}

/// The Hermitian orthogonal projector onto `v`, `A (A* A)^{-1} A*` with `A = B^T`.
pub fn orthogonal_projector(v: &CycloSubspace) -> CycloMatrix {
    let n = v.ambient_dim;
    if v.is_zero() {
        return CycloMatrix::zeros(v.order, n, n);
    }
    let b = v.basis_matrix();
    let a = b.transpose();
    let a_star = a.conj_transpose();
    let gram = a_star.mul(&a).expect("shapes agree");
    let gram_inv = gram.inverse().expect("Gram matrix of a basis is invertible");
    a.mul(&gram_inv).and_then(|m| m.mul(&a_star)).expect("shapes agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn root_of_unity_identities() {
        let z = CycloScalar::root(3, 1);
        assert!((&z.conj() * &z).is_one());
        let sum = &(&CycloScalar::one(3) + &z) + &CycloScalar::root(3, 2);
        assert!(sum.is_zero());
        let i = CycloScalar::root(4, 1);
        assert_eq!(&i * &i, CycloScalar::from_int(4, -1));
        assert_eq!(CycloScalar::root(2, 1), CycloScalar::from_int(2, -1));
    }

    #[test]
    fn inverse_of_one_minus_zeta() {
        let one = CycloScalar::one(3);
        let x = &one - &CycloScalar::root(3, 1);
        let inv = x.inv().unwrap();
        let expected = CycloScalar::from_coeffs(3, vec![q(2, 3), q(1, 3)]).unwrap();
        assert_eq!(inv, expected);
        assert!((&x * &inv).is_one());
        assert_eq!(CycloScalar::zero(5).inv(), Err(CycloError::ZeroInverse));
    }

    #[test]
    fn inverses_in_degree_four() {
        let x = CycloScalar::parse(5, "2 - z + 3*z^3").unwrap();
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn text_form() {
        let x = CycloScalar::from_coeffs(3, vec![q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(x.to_string(), "1/3 + 2/3*z");
        assert_eq!(CycloScalar::parse(3, "1/3 + 2/3*z").unwrap(), x);
        assert_eq!(CycloScalar::zero(5).to_string(), "0");
        assert_eq!(CycloScalar::root(5, 2).to_string(), "z^2");
        assert_eq!((-CycloScalar::root(5, 1)).to_string(), "-z");
        // ζ^2 in Q(ζ_3) reduces to -1 - ζ
        assert_eq!(CycloScalar::parse(3, "z^2").unwrap().to_string(), "-1 - z");
        assert!(CycloScalar::parse(3, "1/0").is_err());
        assert!(CycloScalar::parse(3, "").is_err());
        assert!(CycloScalar::parse(6, "1").is_err());
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let id = CycloMatrix::identity(3, 4);
        assert!(kernel(&id).unwrap().is_zero());
    }

    #[test]
    fn colspace_of_invertible_is_full() {
        let m = CycloMatrix::from_rational_rows(2, &[vec![(1, 1), (1, 1)], vec![(1, 1), (-1, 1)]]).unwrap();
        assert_eq!(colspace(&m).unwrap(), CycloSubspace::full(2, 2));
    }

    #[test]
    fn kernel_of_rank_one_projector() {
        let p = CycloMatrix::from_rational_rows(2, &[vec![(1, 2), (1, 2)], vec![(1, 2), (1, 2)]]).unwrap();
        let k = kernel(&p).unwrap();
        let expected = CycloSubspace::span(2, 2, vec![vec![CycloScalar::one(2), CycloScalar::from_int(2, -1)]]).unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = CycloMatrix::from_rational_rows(3, &[vec![(1, 1), (2, 1)], vec![(2, 1), (4, 1)]]).unwrap();
        let b = vec![CycloScalar::from_int(3, 1), CycloScalar::from_int(3, 2)];
        let x = solve(&m, &b).unwrap().unwrap();
        assert_eq!(m.apply(&x), b);
        let bad = vec![CycloScalar::from_int(3, 1), CycloScalar::from_int(3, 3)];
        assert_eq!(solve(&m, &bad).unwrap(), None);
    }

    #[test]
    fn orthogonality_examples() {
        let e1 = CycloSubspace::coordinate(3, 2, [0]);
        let e2 = CycloSubspace::coordinate(3, 2, [1]);
        assert!(hermitian_orthogonal(&e1, &e2).unwrap());
        let plus = CycloSubspace::span(2, 2, vec![vec![CycloScalar::one(2), CycloScalar::one(2)]]).unwrap();
        let minus = CycloSubspace::span(2, 2, vec![vec![CycloScalar::one(2), CycloScalar::from_int(2, -1)]]).unwrap();
        assert!(hermitian_orthogonal(&plus, &minus).unwrap());
        let v = CycloSubspace::span(3, 2, vec![vec![CycloScalar::one(3), CycloScalar::root(3, 1)]]).unwrap();
        assert!(!hermitian_orthogonal(&v, &v).unwrap());
        assert!(hermitian_orthogonal(&e1, &CycloSubspace::coordinate(3, 3, [1])).is_err());
    }

    #[test]
    fn projector_examples() {
        let full = CycloSubspace::full(3, 3);
        assert_eq!(orthogonal_projector(&full), CycloMatrix::identity(3, 3));
        let plus = CycloSubspace::span(2, 2, vec![vec![CycloScalar::one(2), CycloScalar::one(2)]]).unwrap();
        let expected = CycloMatrix::from_rational_rows(2, &[vec![(1, 2), (1, 2)], vec![(1, 2), (1, 2)]]).unwrap();
        assert_eq!(orthogonal_projector(&plus), expected);
    }

    #[test]
    fn projector_properties_on_complex_line() {
        let z = CycloScalar::root(3, 1);
        let v = CycloSubspace::span(3, 3, vec![vec![CycloScalar::one(3), z.clone(), &z * &z]]).unwrap();
        let p = orthogonal_projector(&v);
        assert_eq!(p.mul(&p).unwrap(), p);
        assert_eq!(p.conj_transpose(), p);
        assert_eq!(p.trace(), CycloScalar::one(3));
        for row in v.basis() {
            assert_eq!(&p.apply(row), row);
        }
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let i = CycloScalar::root(4, 1);
        let m = CycloMatrix::from_rows(
            4,
            vec![vec![CycloScalar::one(4), i.clone()], vec![i.clone(), CycloScalar::from_int(4, 2)]],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), CycloMatrix::identity(4, 2));
        let singular = CycloMatrix::from_rational_rows(3, &[vec![(1, 1), (2, 1)], vec![(2, 1), (4, 1)]]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn ambient_guard() {
        if std::env::var(crate::guard::MAX_CELLS_ENV).is_ok() {
            return;
        }
        assert!(matches!(CycloSubspace::span(3, 40, vec![]), Err(CycloError::Guard(_))));
    }
}
