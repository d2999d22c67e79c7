//! Dense matrices over the rationals.
//!
//! A map `A: Q^n -> Q^m` is stored as an `m x n` row-major grid acting on
//! column vectors. Zero-sized shapes (`0 x n`, `m x 0`) are legal everywhere
//! and model maps into or out of the zero space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::subspace::Subspace;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: RatMatrix,
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

/// `A = left * right` with `left` of full column rank and `right` of full
/// row rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFactorization {
    pub left: RatMatrix,
    pub right: RatMatrix,
    pub rank: usize,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(
                "from_vec",
                format!("{} entries for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    /// Builds from nested rows; every row must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dim(
                    "from_rows",
                    format!("row {i} has {} entries, expected {cols}", row.len()),
                ));
            }
            data.extend(row);
        }
        Ok(RatMatrix {
            rows: n,
            cols,
            data,
        })
    }

    /// Integer matrix from a literal grid. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let grid = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                r.iter().map(|&v| crate::rational::int(v)).collect()
            })
            .collect();
        Self::from_rows(grid, cols).expect("shape checked above")
    }

    /// Column matrix whose columns are `vectors` (each of length `len`).
    pub fn from_columns(len: usize, vectors: &[Vec<Rational>]) -> Self {
        Self::from_fn(len, vectors.len(), |i, j| vectors[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dim(
                "multiply",
                format!("{:?} * {:?}", self.shape(), rhs.shape()),
            ));
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        rhs: &RatMatrix,
        op: &'static str,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<RatMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dim(
                op,
                format!("{:?} vs {:?}", self.shape(), rhs.shape()),
            ));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::dim(
                "apply",
                format!(
                    "{:?} applied to a vector of length {}",
                    self.shape(),
                    v.len()
                ),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::dim(
                "hstack",
                format!("{:?} | {:?}", self.shape(), rhs.shape()),
            ));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        }))
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.cols {
            return Err(Error::dim(
                "vstack",
                format!("{:?} over {:?}", self.shape(), rhs.shape()),
            ));
        }
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Ok(RatMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Assembles a block matrix. Every block in a block row must share its row
    /// count, and every block in a block column its column count.
    pub fn block(blocks: &[Vec<RatMatrix>]) -> Result<RatMatrix> {
        let Some(first) = blocks.first() else {
            return Ok(RatMatrix::zeros(0, 0));
        };
        let ncols = first.len();
        let col_widths: Vec<usize> = first.iter().map(RatMatrix::cols).collect();
        let mut out: Option<RatMatrix> = None;
        for (bi, block_row) in blocks.iter().enumerate() {
            if block_row.len() != ncols {
                return Err(Error::dim(
                    "block",
                    format!(
                        "block row {bi} has {} blocks, expected {ncols}",
                        block_row.len()
                    ),
                ));
            }
            let height = block_row.first().map_or(0, RatMatrix::rows);
            let mut strip = RatMatrix::zeros(height, 0);
            for (bj, b) in block_row.iter().enumerate() {
                if b.rows != height || b.cols != col_widths[bj] {
                    return Err(Error::dim(
                        "block",
                        format!("block ({bi},{bj}) has shape {:?}", b.shape()),
                    ));
                }
                strip = strip.hstack(b)?;
            }
            out = Some(match out {
                None => strip,
                Some(acc) => acc.vstack(&strip)?,
            });
        }
        Ok(out.expect("at least one block row"))
    }

    /// Block-diagonal `A ⊕ B`.
    pub fn direct_sum(&self, rhs: &RatMatrix) -> RatMatrix {
        Self::from_fn(self.rows + rhs.rows, self.cols + rhs.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => rhs.get(i - self.rows, j - self.cols).clone(),
                _ => Rational::zero(),
            }
        })
    }

    /// Overwrites the block whose top-left corner is `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &RatMatrix) {
        assert!(
            row + block.rows <= self.rows && col + block.cols <= self.cols,
            "block {:?} at ({row}, {col}) exceeds {:?}",
            block.shape(),
            self.shape()
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j).clone());
            }
        }
    }

    /// Columns `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> RatMatrix {
        Self::from_fn(self.rows, end - start, |i, j| {
            self.get(i, start + j).clone()
        })
    }

    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> RatMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows.start + i, cols.start + j).clone()
        })
    }

    pub fn select_columns(&self, columns: &[usize]) -> RatMatrix {
        Self::from_fn(self.rows, columns.len(), |i, j| {
            self.get(i, columns[j]).clone()
        })
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            let inv = m.get(pivot_row, col).recip();
            for j in col..m.cols {
                let v = m.get(pivot_row, j) * &inv;
                m.set(pivot_row, j, v);
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let delta = &factor * m.get(pivot_row, j);
                    if !delta.is_zero() {
                        let v = m.get(r, j) - delta;
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let rank = pivots.len();
        Rref {
            reduced: m,
            pivot_columns: pivots,
            rank,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// `{x : Ax = 0}` as a canonical subspace of the domain.
    pub fn kernel_basis(&self) -> Subspace {
        let Rref {
            reduced,
            pivot_columns,
            ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivot_columns {
            is_pivot[p] = true;
        }
        let vectors: Vec<Vec<Rational>> = (0..self.cols)
            .filter(|&free| !is_pivot[free])
            .map(|free| {
                let mut v = vec![Rational::zero(); self.cols];
                v[free] = Rational::one();
                for (row, &p) in pivot_columns.iter().enumerate() {
                    v[p] = -reduced.get(row, free).clone();
                }
                v
            })
            .collect();
        Subspace::span(self.cols, &vectors).expect("kernel vectors have ambient length")
    }

    /// Column span as a canonical subspace of the codomain.
    pub fn image_basis(&self) -> Subspace {
        Subspace::from_rows(self.transpose())
    }

    pub fn rank_factorization(&self) -> RankFactorization {
        let Rref {
            reduced,
            pivot_columns,
            rank,
        } = self.rref();
        RankFactorization {
            left: self.select_columns(&pivot_columns),
            right: reduced.submatrix(0..rank, 0..self.cols),
            rank,
        }
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self
            .hstack(&RatMatrix::identity(n))
            .expect("same row count");
        let r = aug.rref();
        if r.pivot_columns.iter().take_while(|&&p| p < n).count() < n {
            return None;
        }
        Some(r.reduced.submatrix(0..n, n..2 * n))
    }

    /// Moore–Penrose pseudoinverse from the full rank factorization
    /// `A = CR`: `A⁺ = Rᵀ(RRᵀ)⁻¹(CᵀC)⁻¹Cᵀ`.
    pub fn pseudoinverse(&self) -> RatMatrix {
        let RankFactorization { left, right, rank } = self.rank_factorization();
        if rank == 0 {
            return RatMatrix::zeros(self.cols, self.rows);
        }
        let ct = left.transpose();
        let rt = right.transpose();
        let gram_right = (&right * &rt)
            .inverse()
            .expect("full row rank gives an invertible Gram matrix");
        let gram_left = (&ct * &left)
            .inverse()
            .expect("full column rank gives an invertible Gram matrix");
        &(&(&rt * &gram_right) * &gram_left) * &ct
    }

    /// Whether `gi` satisfies `A·gi·A = A`.
    pub fn is_generalized_inverse(&self, gi: &RatMatrix) -> bool {
        gi.shape() == (self.cols, self.rows) && &(self * gi) * self == *self
    }

    /// Whether `gi` satisfies both `A·gi·A = A` and `gi·A·gi = gi`.
    pub fn is_normalized_inverse(&self, gi: &RatMatrix) -> bool {
        self.is_generalized_inverse(gi) && &(gi * self) * gi == *gi
    }

    /// Nested grid of canonical entry strings, mainly for diagnostics.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.row_vectors()
            .map(|r| r.iter().map(format_rational).collect())
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RatMatrix{}x{}{:?}",
            self.rows,
            self.cols,
            self.to_strings()
        )
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_strings().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods for
// user-supplied shapes.
impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.scale(&-Rational::one())
    }
}

/// JSON entry: integers as numbers, everything else as `"p/q"` strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Int(i64),
    Text(String),
}

struct Entry<'a>(&'a Rational);

impl Serialize for Entry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(v) = i64::try_from(self.0.numer()) {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&format_rational(self.0))
    }
}

struct Row<'a>(&'a [Rational]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in self.0 {
            seq.serialize_element(&Entry(v))?;
        }
        seq.end()
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for row in self.row_vectors() {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    /// An empty array decodes as `0 x 0`; callers that know the intended
    /// column count should use [`RatMatrix::with_shape`].
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let grid: Vec<Vec<EntryRepr>> = Vec::deserialize(d)?;
        let cols = grid.first().map_or(0, Vec::len);
        let rows = grid
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        EntryRepr::Int(v) => Ok(crate::rational::int(v)),
                        EntryRepr::Text(t) => parse_rational(&t),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        RatMatrix::from_rows(rows, cols).map_err(de::Error::custom)
    }
}

impl RatMatrix {
    /// Checks a decoded matrix against an expected shape. A decoded `0 x 0`
    /// stands for any shape with no entries.
    pub fn with_shape(self, rows: usize, cols: usize, what: &str) -> Result<RatMatrix> {
        if self.shape() == (rows, cols) {
            return Ok(self);
        }
        if self.data.is_empty() && rows * cols == 0 && (self.rows == rows || self.rows == 0) {
            return Ok(RatMatrix::zeros(rows, cols));
        }
        Err(Error::dim(
            "decode",
            format!(
                "{what} has shape {:?}, expected ({rows}, {cols})",
                self.shape()
            ),
        ))
    }
}
