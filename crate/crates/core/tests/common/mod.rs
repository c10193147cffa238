//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use decomp_lab::poset::SimplicialComplex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank over Q by plain Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = BigRational::one() / rows[rank][col].clone();
        let pivot_row: Vec<BigRational> = rows[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn boundary_rank(k: &SimplicialComplex, d: usize) -> usize {
    // Rank of ∂_d : C_d → C_{d-1}, with ∂_0 the augmentation.
    let cells = k.simplices(d);
    if cells.is_empty() {
        return 0;
    }
    if d == 0 {
        return 1;
    }
    let faces = k.simplices(d - 1);
    let index: BTreeMap<&Vec<usize>, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut rows = vec![vec![BigRational::zero(); cells.len()]; faces.len()];
    for (j, s) in cells.iter().enumerate() {
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            rows[index[&f]][j] = BigRational::from_integer(BigInt::from(sign));
        }
    }
    rational_rank(rows)
}

/// Reduced Betti numbers over Q, nonzero entries only.
pub fn reduced_betti(k: &SimplicialComplex) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    if k.count(0) == 0 {
        out.insert(-1, 1);
        return out;
    }
    let top = k.dim().unwrap_or(0);
    let ranks: Vec<usize> = (0..=top + 1).map(|d| boundary_rank(k, d)).collect();
    for d in 0..=top {
        let b = k.count(d) - ranks[d] - ranks[d + 1];
        if b > 0 {
            out.insert(d as i64, b);
        }
    }
    out
}

/// Number of `j`-dimensional subspaces of F_p^n.
pub fn gaussian_binomial(n: u32, j: u32, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..j {
        num *= p.pow(n - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

/// Proper nontrivial subspaces of F_p^k.
pub fn tits_gl_size(p: u64, k: u32) -> u64 {
    (1..k).map(|j| gaussian_binomial(k, j, p)).sum()
}

/// Proper coisotropic subspaces of F_p^{2k}, counted through their
/// perpendiculars, the nonzero isotropic subspaces.
pub fn tits_sp_size(p: u64, k: u32) -> u64 {
    (1..=k)
        .map(|j| {
            let mut num = 1u64;
            let mut den = 1u64;
            for i in 0..j {
                num *= p.pow(2 * (k - i)) - 1;
                den *= p.pow(i + 1) - 1;
            }
            num / den
        })
        .sum()
}

/// Bell numbers by the triangle recurrence.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}
