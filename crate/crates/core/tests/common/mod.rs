//! Brute-force oracles that share no code path with row reduction.

#![allow(dead_code)]

use fredholm_core::{RatMatrix, Rational};
use num_traits::{One, Zero};

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &RatMatrix) -> Rational {
    let n = m.rows();
    assert!(m.is_square());
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        let entry = m.get(0, j);
        if entry.is_zero() {
            continue;
        }
        let minor = RatMatrix::from_fn(n - 1, n - 1, |r, c| {
            m.get(r + 1, if c < j { c } else { c + 1 }).clone()
        });
        let term = entry * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with_last: Vec<Vec<usize>> = subsets(n - 1, k - 1)
        .into_iter()
        .map(|mut s| {
            s.push(n - 1);
            s
        })
        .collect();
    with_last.extend(subsets(n - 1, k));
    with_last
}

/// Largest `k` with a nonzero `k x k` minor.
pub fn minor_rank(m: &RatMatrix) -> usize {
    for k in (1..=m.rows().min(m.cols())).rev() {
        for rows in subsets(m.rows(), k) {
            for cols in subsets(m.cols(), k) {
                let minor = RatMatrix::from_fn(k, k, |i, j| m.get(rows[i], cols[j]).clone());
                if !det(&minor).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// Dimension of the span of the rows of `a` and `b` stacked.
pub fn joint_rank(a: &RatMatrix, b: &RatMatrix) -> usize {
    minor_rank(&a.vstack(b).unwrap())
}
