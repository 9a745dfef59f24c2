//! Dense square matrices: real, row-stochastic and boolean.
//!
//! Matrices act on row vectors: entry `(s, t)` is the weight of the edge `s -> t`,
//! and the product `M · N` reads `M` first.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Rows of a stochastic matrix must sum to 1 within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A dense square matrix over the reals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from its rows. Fails unless every row has `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn product(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_dim(other.dim)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn difference(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_dim(other.dim)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SquareMatrix {
            dim: self.dim,
            data,
        })
    }

    /// Induced norm for row-vector action: the largest absolute row sum.
    pub fn norm(&self) -> f64 {
        self.rows()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `norm(self - other)`.
    pub fn distance(&self, other: &SquareMatrix) -> Result<f64> {
        Ok(self.difference(other)?.norm())
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other,
            })
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &SquareMatrix) -> SquareMatrix {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        SquareMatrix { dim: n, data: out }
    }
}

/// Maximum absolute row sum of `m`.
pub fn matrix_norm(m: &SquareMatrix) -> f64 {
    m.norm()
}

/// A square matrix with non-negative entries whose rows each sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(SquareMatrix);

impl StochasticMatrix {
    pub fn identity(dim: usize) -> Self {
        StochasticMatrix(SquareMatrix::identity(dim))
    }

    /// Validates `rows`; `context` names the matrix in diagnostics.
    pub fn from_rows(rows: &[Vec<f64>], context: &str) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Format(format!("{context}: empty matrix")));
        }
        let m = SquareMatrix::from_rows(rows)?;
        Self::try_from_matrix(m, context)
    }

    pub fn try_from_matrix(m: SquareMatrix, context: &str) -> Result<Self> {
        for (i, row) in m.rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidEntry {
                        context: context.to_string(),
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::RowSum {
                    context: context.to_string(),
                    row: i,
                    sum,
                });
            }
        }
        Ok(StochasticMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0.get(row, col)
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    pub fn product(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        Ok(StochasticMatrix(self.0.product(&other.0)?))
    }

    pub fn distance(&self, other: &StochasticMatrix) -> Result<f64> {
        self.0.distance(&other.0)
    }

    /// `self^exponent` by binary exponentiation; `self^0` is the identity.
    pub fn pow(&self, exponent: &BigUint) -> StochasticMatrix {
        let mut result: Option<SquareMatrix> = None;
        let mut square = self.0.clone();
        let bits = exponent.bits();
        for i in 0..bits {
            if exponent.bit(i) {
                result = Some(match result {
                    None => square.clone(),
                    Some(r) => r.mul_unchecked(&square),
                });
            }
            if i + 1 < bits {
                square = square.mul_unchecked(&square);
            }
        }
        StochasticMatrix(result.unwrap_or_else(|| SquareMatrix::identity(self.dim())))
    }

    pub fn pow_u64(&self, exponent: u64) -> StochasticMatrix {
        self.pow(&BigUint::from(exponent))
    }

    /// Boolean matrix of the entries strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> BooleanMatrix {
        let n = self.dim();
        BooleanMatrix::from_fn(n, |i, j| self.get(i, j) > threshold)
    }

    /// True when every entry is 0, 1/2 or 1.
    pub fn is_strict(&self) -> bool {
        self.0
            .data
            .iter()
            .all(|&v| v == 0.0 || v == 0.5 || v == 1.0)
    }

    pub(crate) fn mul_unchecked(&self, other: &StochasticMatrix) -> StochasticMatrix {
        StochasticMatrix(self.0.mul_unchecked(&other.0))
    }
}

/// A square 0/1 matrix, each row packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BooleanMatrix {
    dim: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BooleanMatrix {
    pub fn zeros(dim: usize) -> Self {
        let words_per_row = dim.div_ceil(64);
        BooleanMatrix {
            dim,
            words_per_row,
            bits: vec![0; dim * words_per_row],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| i == j)
    }

    pub fn ones(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| true)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    /// Parses a row-major bitstring such as `"1101"`; its length must be a perfect square.
    pub fn from_bitstring(text: &str) -> Result<Self> {
        let len = text.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim * dim != len || dim == 0 {
            return Err(Error::Format(format!(
                "bitstring of length {len} is not a square matrix"
            )));
        }
        let bytes = text.as_bytes();
        if let Some(p) = bytes.iter().position(|b| *b != b'0' && *b != b'1') {
            return Err(Error::Syntax {
                position: p,
                message: "expected 0 or 1".into(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| bytes[i * dim + j] == b'1'))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        let w = self.bits[row * self.words_per_row + col / 64];
        (w >> (col % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let w = &mut self.bits[row * self.words_per_row + col / 64];
        let mask = 1u64 << (col % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    /// Column indices set in `row`.
    pub fn row_support(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&j| self.get(row, j))
    }

    /// Boolean product: `(M·N)(s,t) = OR_k M(s,k) AND N(k,t)`.
    pub fn product(&self, other: &BooleanMatrix) -> Result<BooleanMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &BooleanMatrix) -> BooleanMatrix {
        let mut out = Self::zeros(self.dim);
        let wpr = self.words_per_row;
        for i in 0..self.dim {
            for k in 0..self.dim {
                if self.get(i, k) {
                    let src = other.row_words(k);
                    let dst = &mut out.bits[i * wpr..(i + 1) * wpr];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d |= s;
                    }
                }
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul_unchecked(self) == *self
    }

    /// `self^exponent` under the boolean product, for `exponent >= 1`.
    pub fn power(&self, exponent: usize) -> BooleanMatrix {
        assert!(exponent >= 1, "boolean power needs a positive exponent");
        let mut acc = self.clone();
        for _ in 1..exponent {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Row-major `0`/`1` string.
    pub fn to_bitstring(&self) -> String {
        let mut s = String::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
        }
        s
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

impl fmt::Display for BooleanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.dim {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn absorbing() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]], "m").unwrap()
    }

    #[test]
    fn identity_product() {
        let m = absorbing();
        let id = StochasticMatrix::identity(2);
        assert_eq!(id.product(&m).unwrap(), m);
    }

    #[test]
    fn hand_product() {
        let m = absorbing();
        let sq = m.product(&m).unwrap();
        assert_eq!(sq.to_rows(), vec![vec![0.25, 0.75], vec![0.0, 1.0]]);
    }

    #[test]
    fn dimension_mismatch() {
        let m = absorbing();
        let id3 = StochasticMatrix::identity(3);
        assert!(matches!(
            m.product(&id3),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
        assert!(BooleanMatrix::identity(2)
            .product(&BooleanMatrix::identity(3))
            .is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        let err = StochasticMatrix::from_rows(&[vec![0.5, 0.4], vec![0.0, 1.0]], "a").unwrap_err();
        assert!(matches!(err, Error::RowSum { row: 0, .. }));
        let err = StochasticMatrix::from_rows(&[vec![1.5, -0.5], vec![0.0, 1.0]], "a").unwrap_err();
        assert!(matches!(err, Error::InvalidEntry { row: 0, col: 0, .. }));
        assert!(SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(SquareMatrix::identity(3).norm(), 1.0);
        assert_eq!(absorbing().as_matrix().norm(), 1.0);
        let m = SquareMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(matrix_norm(&m), 2.0);
        let m = SquareMatrix::from_rows(&[vec![-1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(m.norm(), 1.5);
    }

    #[test]
    fn trivial_powers() {
        let m = absorbing();
        assert_eq!(m.pow_u64(0), StochasticMatrix::identity(2));
        assert_eq!(m.pow_u64(1), m);
    }

    #[test]
    fn geometric_absorption() {
        // closed form: (0,1) entry of [[1/2,1/2],[0,1]]^k is 1 - 2^-k
        let m = absorbing();
        for k in 1..=10u64 {
            let p = m.pow_u64(k);
            let expected = 1.0 - 0.5f64.powi(k as i32);
            assert!((p.get(0, 1) - expected).abs() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn huge_exponent() {
        let m = absorbing();
        let e = BigUint::from(2u32).pow(200);
        let p = m.pow(&e);
        assert_eq!(p.get(0, 0), 0.0);
        assert!((p.get(0, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boolean_basics() {
        let upper = BooleanMatrix::from_bitstring("1101").unwrap();
        assert_eq!(upper.product(&upper).unwrap(), upper);
        assert!(upper.is_idempotent());
        let swap = BooleanMatrix::from_bitstring("0110").unwrap();
        assert_eq!(swap.product(&swap).unwrap(), BooleanMatrix::identity(2));
        assert!(!swap.is_idempotent());
        assert_eq!(swap.power(3), swap);
        assert_eq!(upper.to_bitstring(), "1101");
        assert_eq!(upper.to_string(), "11/01");
        assert!(BooleanMatrix::from_bitstring("110").is_err());
        assert!(BooleanMatrix::from_bitstring("1201").is_err());
    }

    #[test]
    fn wide_boolean_rows() {
        // more than 64 columns spills into a second word per row
        let n = 70;
        let shift = BooleanMatrix::from_fn(n, |i, j| j == (i + 1) % n);
        let id = BooleanMatrix::identity(n);
        assert_eq!(shift.product(&id).unwrap(), shift);
        assert_eq!(shift.power(n), id);
        assert!(shift.power(2).get(68, 0));
    }

    #[test]
    fn support_threshold() {
        let m = absorbing();
        assert_eq!(m.support(0.0).to_bitstring(), "1101");
        assert_eq!(m.support(0.6).to_bitstring(), "0001");
        assert!(m.is_strict());
    }
}
