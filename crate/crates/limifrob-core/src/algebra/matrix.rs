//! Row-major matrices generic over the crate's exact scalar types.

use super::laurent::LaurentPoly;
use super::poly::{Coeff, UniPoly};
use super::ratfunc::RatFunc;
use super::Rat;
use num_traits::{One, Zero};
use std::ops::{Index, IndexMut};

/// Minimal ring interface shared by the scalar types that appear in
/// matrices (ℚ, ℚ[t], ℚ(t), Laurent polynomials, p-adic scalars).
pub trait Scalar: Clone + PartialEq {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn s_is_zero(&self) -> bool;
    fn s_add(&self, other: &Self) -> Self;
    fn s_sub(&self, other: &Self) -> Self;
    fn s_mul(&self, other: &Self) -> Self;
    fn s_neg(&self) -> Self;
}

impl Scalar for Rat {
    fn s_zero() -> Self {
        Rat::zero()
    }
    fn s_one() -> Self {
        Rat::one()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn s_add(&self, other: &Self) -> Self {
        self + other
    }
    fn s_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn s_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn s_neg(&self) -> Self {
        -self
    }
}

impl<C: Coeff> Scalar for UniPoly<C> {
    fn s_zero() -> Self {
        UniPoly::zero()
    }
    fn s_one() -> Self {
        UniPoly::one()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn s_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn s_sub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn s_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
}

impl Scalar for RatFunc {
    fn s_zero() -> Self {
        RatFunc::zero()
    }
    fn s_one() -> Self {
        RatFunc::one()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn s_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn s_sub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn s_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
}

impl Scalar for LaurentPoly {
    fn s_zero() -> Self {
        LaurentPoly::zero()
    }
    fn s_one() -> Self {
        LaurentPoly::one()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn s_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn s_sub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn s_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R> Matrix<R> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<R>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix<R>
    where
        R: Clone,
    {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<R>
    where
        R: Clone,
    {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }
}

impl<R> Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        debug_assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        debug_assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<R: Scalar> Matrix<R> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![R::s_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = R::s_one();
        }
        m
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(R::s_is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.s_add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.s_sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.s_neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|a| a.s_mul(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::<R>::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.s_is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.s_is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].s_add(&a.s_mul(b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = R::s_zero();
                for j in 0..self.cols {
                    if !self[(i, j)].s_is_zero() && !v[j].s_is_zero() {
                        acc = acc.s_add(&self[(i, j)].s_mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> R {
        assert!(self.is_square());
        let mut acc = R::s_zero();
        for i in 0..self.rows {
            acc = acc.s_add(&self[(i, i)]);
        }
        acc
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows.start + i, cols.start + j)].clone()
        })
    }

    /// Matrix with the given columns (in order).
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }
}

impl<R: std::fmt::Debug> std::fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rint;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Matrix<Rat> {
        Matrix::from_vec(2, 2, vec![rint(a), rint(b), rint(c), rint(d)])
    }

    #[test]
    fn product_and_identity() {
        let a = m2(1, 2, 3, 4);
        let i = Matrix::<Rat>::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(a.mul(&m2(0, 1, 1, 0)), m2(2, 1, 4, 3));
    }

    #[test]
    fn trace_and_transpose() {
        let a = m2(1, 2, 3, 4);
        assert_eq!(a.trace(), rint(5));
        assert_eq!(a.transpose(), m2(1, 3, 2, 4));
    }
}
