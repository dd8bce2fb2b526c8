//! Jacobi kernels for Hermitian eigenproblems and the SVD.
//!
//! Both routines use the same complex plane rotation. For a Hermitian 2×2
//! block `[[a_pp, a_pq], [conj(a_pq), a_qq]]` the rotation
//!
//! ```text
//! J = [[ c,          s         ],
//!      [ -s·e^{-iφ}, c·e^{-iφ} ]]      a_pq = |a_pq| e^{iφ}
//! ```
//!
//! satisfies `(J† A J)_pq = 0`. The SVD is the one-sided (Hestenes) variant:
//! the rotation is applied to column pairs of `A` so that the implicit Gram
//! matrix `A†A` is diagonalized, which keeps small singular values accurate.

use crate::scalar::{abs2, czero, Real, C};

use super::matrix::CMatrix;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone, Copy)]
struct Rotation<T: Real> {
    c: T,
    s: T,
    /// `e^{-iφ}`
    phase: C<T>,
}

impl<T: Real> Rotation<T> {
    fn annihilating(app: T, aqq: T, apq: C<T>) -> Option<Self> {
        let r = apq.norm();
        if r == T::zero() {
            return None;
        }
        let phase = apq.conj().unscale(r);
        let two = T::lit(2.0);
        let tau = (aqq - app) / (two * r);
        let t = if tau >= T::zero() {
            T::one() / (tau + (T::one() + tau * tau).sqrt())
        } else {
            -T::one() / (-tau + (T::one() + tau * tau).sqrt())
        };
        let c = T::one() / (T::one() + t * t).sqrt();
        Some(Self { c, s: t * c, phase })
    }

    #[inline]
    fn block(&self) -> [[C<T>; 2]; 2] {
        let c = C::new(self.c, T::zero());
        let s = C::new(self.s, T::zero());
        [[c, s], [-(s * self.phase), c * self.phase]]
    }

    /// `(x, y) ← (x, y)·J` for a pair of columns.
    #[inline]
    fn apply_right(&self, x: &mut C<T>, y: &mut C<T>) {
        let j = self.block();
        let (a, b) = (*x, *y);
        *x = a * j[0][0] + b * j[1][0];
        *y = a * j[0][1] + b * j[1][1];
    }

    /// `(x, y)ᵀ ← J†·(x, y)ᵀ` for a pair of rows.
    #[inline]
    fn apply_left_adjoint(&self, x: &mut C<T>, y: &mut C<T>) {
        let j = self.block();
        let (a, b) = (*x, *y);
        *x = j[0][0].conj() * a + j[1][0].conj() * b;
        *y = j[0][1].conj() * a + j[1][1].conj() * b;
    }
}

/// Eigen-decomposition of a Hermitian matrix: unsorted eigenvalues and the
/// matching eigenvector matrix (columns).
pub(crate) fn hermitian_jacobi<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon();
    let fro = a.frobenius_norm();
    let skip = T::lit(0.1) * eps * fro / T::from_usize(n.max(1)).unwrap();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + abs2(a[(i, j)]);
                }
            }
        }
        if off.sqrt() <= eps * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= skip {
                    continue;
                }
                let Some(rot) = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, apq) else {
                    continue;
                };
                for k in 0..n {
                    let (mut x, mut y) = (a[(k, p)], a[(k, q)]);
                    rot.apply_right(&mut x, &mut y);
                    a[(k, p)] = x;
                    a[(k, q)] = y;
                }
                for k in 0..n {
                    let (mut x, mut y) = (a[(p, k)], a[(q, k)]);
                    rot.apply_left_adjoint(&mut x, &mut y);
                    a[(p, k)] = x;
                    a[(q, k)] = y;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = C::new(a[(p, p)].re, T::zero());
                a[(q, q)] = C::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let (mut x, mut y) = (v[(k, p)], v[(k, q)]);
                    rot.apply_right(&mut x, &mut y);
                    v[(k, p)] = x;
                    v[(k, q)] = y;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Right-singular data of an arbitrary `m × n` matrix.
#[derive(Debug, Clone)]
pub(crate) struct JacobiSvd<T: Real> {
    /// Singular value for each column of `v`, unsorted.
    pub singular_values: Vec<T>,
    /// Right-singular vectors as columns (`n × n`, unitary).
    pub v: CMatrix<T>,
}

pub(crate) fn one_sided_svd<T: Real>(a: &CMatrix<T>) -> JacobiSvd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut u: Vec<Vec<C<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![czero(); n];
            e[j] = C::new(T::one(), T::zero());
            e
        })
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (up, uq) = (&u[p], &u[q]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = czero();
                    for k in 0..m {
                        alpha = alpha + abs2(up[k]);
                        beta = beta + abs2(uq[k]);
                        gamma = gamma + up[k].conj() * uq[k];
                    }
                    (alpha, beta, gamma)
                };
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                let Some(rot) = Rotation::annihilating(alpha, beta, gamma) else {
                    continue;
                };
                rotated = true;
                let (lo, hi) = u.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    rot.apply_right(x, y);
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    rot.apply_right(x, y);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let singular_values = u
        .iter()
        .map(|col| col.iter().fold(T::zero(), |s, &z| s + abs2(z)).sqrt())
        .collect();
    JacobiSvd {
        singular_values,
        v: CMatrix::from_columns(n, &v),
    }
}
