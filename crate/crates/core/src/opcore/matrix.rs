use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{abs2, cone, creal, czero, Real, C};

/// Dense complex matrix stored row-major.
///
/// Most operators in this crate are square, but subspace bases are tall
/// `n × k` matrices, so the carrier itself is rectangular.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T: Real = f64> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from row-major entries; rejects a length mismatch and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_row_major",
                left: rows * cols,
                right: data.len(),
            });
        }
        let m = Self { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(m)
    }

    /// Square matrix from real row slices. Handy for literals in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| {
            creal(T::lit(rows[i][j]))
        })
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = creal(d);
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length; only meaningful for square matrices.
    #[inline]
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C<T>]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        self.diagonal().into_iter().fold(czero(), |a, b| a + b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(creal(s))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &z| acc + abs2(z))
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                left: self.cols,
                right: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(C<T>, C<T>) -> C<T>,
    ) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                op,
                left: self.rows * self.cols,
                right: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Convert to a different real field.
    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| C::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch, like ndarray; use the `try_*`
// methods where shapes come from user input.

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        self.try_add(rhs).expect("shape mismatch in add")
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        self.try_sub(rhs).expect("shape mismatch in sub")
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.map(|z| -z)
    }
}

/// Helpers on plain state vectors.
pub mod vector {
    use super::*;

    pub fn norm<T: Real>(v: &[C<T>]) -> T {
        v.iter().fold(T::zero(), |acc, &z| acc + abs2(z)).sqrt()
    }

    /// `⟨a|b⟩`, conjugate-linear in `a`.
    pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
        a.iter()
            .zip(b)
            .fold(czero(), |acc, (&x, &y)| acc + x.conj() * y)
    }

    pub fn scale<T: Real>(v: &[C<T>], s: C<T>) -> Vec<C<T>> {
        v.iter().map(|&z| z * s).collect()
    }

    pub fn sub<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
        a.iter().zip(b).map(|(&x, &y)| x - y).collect()
    }

    pub fn normalized<T: Real>(v: &[C<T>]) -> Vec<C<T>> {
        let n = norm(v);
        v.iter().map(|&z| z.unscale(n)).collect()
    }

    /// Kronecker product of two vectors, same index convention as matrices.
    pub fn kron<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| x * y))
            .collect()
    }
}
