//! Dense complex operator kernel.
//!
//! Index convention for tensor products: for `A` of size `m` and `B` of size
//! `n`, the row of `A ⊗ B` for the pair `(i_A, i_B)` is `i_A·n + i_B`, so
//! `|j⟩_A ⊗ |k⟩_B` is the standard basis vector `j·n + k`.

mod jacobi;
pub mod matrix;

use std::cmp::Ordering;

pub use matrix::{vector, CMatrix};

use crate::error::{Error, Result};
use crate::scalar::{creal, czero, Real, C};
use crate::tolerance::Tolerances;

/// Self-adjoint operator. Construction checks Hermiticity and then stores the
/// exact Hermitian part, so downstream code can rely on `M = M†` bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian<T: Real = f64>(CMatrix<T>);

impl<T: Real> Hermitian<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        Self::with_tolerances(m, &T::default_tolerances())
    }

    pub fn with_tolerances(m: CMatrix<T>, tol: &Tolerances) -> Result<Self> {
        m.require_square()?;
        if !m.is_finite() {
            return Err(Error::NonFinite("hermitian operator"));
        }
        let adj = m.adjoint();
        if adj != m {
            let residual = operator_norm(&(&m - &adj));
            let scale = T::one().max(operator_norm(&m));
            if residual > T::lit(tol.herm) * scale {
                return Err(Error::NotHermitian {
                    residual: residual.as_f64(),
                });
            }
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Wrap a matrix that is Hermitian by construction.
    pub(crate) fn assume(m: CMatrix<T>) -> Self {
        debug_assert!(m.is_square());
        Self(m.hermitian_part())
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self(CMatrix::from_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Real linear combination of Hermitian operators stays Hermitian.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_sub(&other.0)?))
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(tensor_product(&self.0, &other.0))
    }
}

impl<T: Real> AsRef<CMatrix<T>> for Hermitian<T> {
    fn as_ref(&self) -> &CMatrix<T> {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T: Real = f64>(CMatrix<T>);

impl<T: Real> Unitary<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        Self::with_tolerances(m, &T::default_tolerances())
    }

    pub fn with_tolerances(m: CMatrix<T>, tol: &Tolerances) -> Result<Self> {
        m.require_square()?;
        if !m.is_finite() {
            return Err(Error::NonFinite("unitary matrix"));
        }
        let residual = unitarity_residual(&m);
        let dim = T::from_usize(m.dim().max(1)).unwrap();
        if residual > T::lit(tol.unitary) * dim {
            return Err(Error::NotUnitary {
                residual: residual.as_f64(),
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn assume(m: CMatrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.matmul(&other.0)?))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(tensor_product(&self.0, &other.0))
    }
}

impl<T: Real> AsRef<CMatrix<T>> for Unitary<T> {
    fn as_ref(&self) -> &CMatrix<T> {
        &self.0
    }
}

/// `‖U†U − I‖` in the spectral norm.
pub fn unitarity_residual<T: Real>(m: &CMatrix<T>) -> T {
    let g = &m.adjoint() * m;
    operator_norm(&(&g - &CMatrix::identity(m.cols())))
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real = f64> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: Unitary<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn apply_function(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let v = self.eigenvectors.matrix();
        let n = self.dim();
        let fl: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(czero(), |acc, k| acc + v[(i, k)] * fl[k] * v[(j, k)].conj())
        })
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.apply_function(creal)
    }

    /// `U(t) = e^{−iHt}` from the cached decomposition.
    pub fn evolve(&self, t: T) -> Unitary<T> {
        Unitary::assume(self.apply_function(|l| C::from_polar(T::one(), -l * t)))
    }

    /// `e^{−iHt}|ψ⟩` without forming the full propagator.
    pub fn evolve_state(&self, t: T, psi: &[C<T>]) -> Result<Vec<C<T>>> {
        let v = self.eigenvectors.matrix();
        let mut coeffs = v.adjoint().mul_vec(psi)?;
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c = *c * C::from_polar(T::one(), -l * t);
        }
        v.mul_vec(&coeffs)
    }
}

/// Orthonormal basis of a subspace of `C^ambient_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real = f64> {
    ambient_dim: usize,
    basis: CMatrix<T>,
    tol_used: T,
}

impl<T: Real> Subspace<T> {
    pub fn new(basis: CMatrix<T>, tol_used: T) -> Result<Self> {
        let tol = T::default_tolerances();
        if !basis.is_finite() {
            return Err(Error::NonFinite("subspace basis"));
        }
        let residual = unitarity_residual(&basis);
        if residual > T::lit(tol.ortho) {
            return Err(Error::NotOrthonormal {
                residual: residual.as_f64(),
            });
        }
        Ok(Self {
            ambient_dim: basis.rows(),
            basis,
            tol_used,
        })
    }

    pub(crate) fn assume(basis: CMatrix<T>, tol_used: T) -> Self {
        Self {
            ambient_dim: basis.rows(),
            basis,
            tol_used,
        }
    }

    pub fn full(dim: usize) -> Self {
        Self::assume(CMatrix::identity(dim), T::zero())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn tol_used(&self) -> T {
        self.tol_used
    }

    pub fn vectors(&self) -> Vec<Vec<C<T>>> {
        (0..self.dim()).map(|j| self.basis.column(j)).collect()
    }

    /// Direct sum with an orthogonal subspace; the result is re-validated.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                op: "direct_sum",
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        let mut cols = self.vectors();
        cols.extend(other.vectors());
        Self::new(
            CMatrix::from_columns(self.ambient_dim, &cols),
            self.tol_used.max(other.tol_used),
        )
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    a.require_square()?;
    b.require_square()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            op: "commutator",
            left: a.dim(),
            right: b.dim(),
        });
    }
    (a * b).try_sub(&(b * a))
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let mut s = jacobi::one_sided_svd(a).singular_values;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));
    s
}

/// Spectral norm (largest singular value).
pub fn operator_norm<T: Real>(a: &CMatrix<T>) -> T {
    if a.rows() == 0 || a.cols() == 0 {
        return T::zero();
    }
    // fast paths: zero and diagonal matrices
    let diagonal = (0..a.rows()).all(|i| (0..a.cols()).all(|j| i == j || a[(i, j)] == czero()));
    if diagonal {
        return a.diagonal().iter().fold(T::zero(), |m, z| m.max(z.norm()));
    }
    singular_values(a)[0]
}

/// Spectral norm of the commutator; shorthand used throughout.
pub fn commutator_norm<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    Ok(operator_norm(&commutator(a, b)?))
}

/// Hermitian eigen-decomposition with ascending eigenvalues.
///
/// Each eigenvector's phase is fixed so its largest-magnitude component is
/// real and positive (first such index on ties).
pub fn hermitian_eig<T: Real>(m: &Hermitian<T>) -> Spectrum<T> {
    let (vals, vecs) = jacobi::hermitian_jacobi(m.matrix());
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(Ordering::Equal));
    let mut v = vecs.select_columns(&order);
    for j in 0..n {
        let mut best = 0;
        let mut best_abs = T::zero();
        for i in 0..n {
            let a = v[(i, j)].norm();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if best_abs > T::zero() {
            let phase = v[(best, j)].conj().unscale(best_abs);
            for i in 0..n {
                v[(i, j)] = v[(i, j)] * phase;
            }
            v[(best, j)] = C::new(v[(best, j)].re, T::zero());
        }
    }
    Spectrum {
        eigenvalues: order.iter().map(|&i| vals[i]).collect(),
        eigenvectors: Unitary::assume(v),
    }
}

/// `e^{−iHt}` via the eigen-decomposition of `H`.
pub fn evolve<T: Real>(h: &Hermitian<T>, t: T) -> Unitary<T> {
    if t == T::zero() {
        return Unitary::identity(h.dim());
    }
    hermitian_eig(h).evolve(t)
}

/// Kernel of `a` with the default absolute fallback.
pub fn null_space<T: Real>(a: &CMatrix<T>, tol: T) -> Subspace<T> {
    null_space_with(a, tol, T::lit(T::default_tolerances().kernel_abs))
}

/// Right-singular vectors with `σ ≤ rel_tol·σ_max`; when `σ_max` underflows
/// the cutoff becomes `abs_tol`. Basis columns keep the Jacobi column order.
pub fn null_space_with<T: Real>(a: &CMatrix<T>, rel_tol: T, abs_tol: T) -> Subspace<T> {
    let n = a.cols();
    if a.rows() == 0 {
        return Subspace::full(n);
    }
    let svd = jacobi::one_sided_svd(a);
    let smax = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let cutoff = if smax < T::lit(1e-300) || smax == T::zero() {
        abs_tol
    } else {
        rel_tol * smax
    };
    let idx: Vec<usize> = (0..n)
        .filter(|&j| svd.singular_values[j] <= cutoff)
        .collect();
    Subspace::assume(svd.v.select_columns(&idx), cutoff)
}

/// Orthogonal projector `BB†` onto a subspace.
pub fn projector<T: Real>(s: &Subspace<T>) -> Hermitian<T> {
    let b = s.basis();
    Hermitian::assume(b * &b.adjoint())
}

/// Orthonormal basis of the column space of `m` by modified Gram–Schmidt
/// with column pivoting, stopping after `rank` columns.
pub fn column_basis<T: Real>(m: &CMatrix<T>, rank: usize) -> CMatrix<T> {
    let rows = m.rows();
    let mut cols: Vec<Vec<C<T>>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let mut used = vec![false; cols.len()];
    let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(rank);
    for _ in 0..rank.min(cols.len()) {
        let mut best = None;
        let mut best_norm = T::zero();
        for (j, c) in cols.iter().enumerate() {
            if used[j] {
                continue;
            }
            let nrm = vector::norm(c);
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        if best_norm == T::zero() {
            break;
        }
        used[j] = true;
        let mut q = vector::normalized(&cols[j]);
        // second pass of orthogonalization against earlier vectors
        for b in &basis {
            let proj = vector::inner(b, &q);
            for (x, &y) in q.iter_mut().zip(b) {
                *x = *x - proj * y;
            }
        }
        q = vector::normalized(&q);
        for (k, c) in cols.iter_mut().enumerate() {
            if used[k] {
                continue;
            }
            let proj = vector::inner(&q, c);
            for (x, &y) in c.iter_mut().zip(&q) {
                *x = *x - proj * y;
            }
        }
        basis.push(q);
    }
    CMatrix::from_columns(rows, &basis)
}

/// `‖(I − Π)·M·Π‖`: how far `M` maps the subspace out of itself.
pub fn leakage<T: Real>(m: &CMatrix<T>, proj: &Hermitian<T>) -> T {
    let p = proj.matrix();
    let comp = &CMatrix::identity(p.dim()) - p;
    operator_norm(&(&(&comp * m) * p))
}
