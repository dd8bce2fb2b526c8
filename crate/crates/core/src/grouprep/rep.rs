use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::opcore::{operator_norm, tensor_product, unitarity_residual, CMatrix};
use crate::random;
use crate::scalar::{creal, Real};

use super::group::FiniteGroup;

/// Matrix representation given extensionally: one matrix per group element.
///
/// Construction checks shapes only; [`validate_representation`] checks the
/// homomorphism and unitarity properties and reports the residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T: Real = f64> {
    group: FiniteGroup,
    matrices: Vec<CMatrix<T>>,
    dim: usize,
}

impl<T: Real> Representation<T> {
    pub fn new(group: FiniteGroup, matrices: Vec<CMatrix<T>>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::InvalidRepresentation(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices[0].rows();
        if dim == 0 {
            return Err(Error::InvalidRepresentation(
                "zero-dimensional representation".into(),
            ));
        }
        for (g, m) in matrices.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix for element '{}' is {}x{}, expected {dim}x{dim}",
                    group.labels()[g],
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite("representation matrix"));
            }
        }
        Ok(Self {
            group,
            matrices,
            dim,
        })
    }

    /// Expand generator images along the multiplication table:
    /// `ρ(g·s) = ρ(g)·ρ(s)`, breadth-first from the identity.
    pub fn from_generators(group: FiniteGroup, generators: &[(usize, CMatrix<T>)]) -> Result<Self> {
        let dim = generators.first().map(|(_, m)| m.rows()).ok_or_else(|| {
            if group.order() == 1 {
                Error::InvalidRepresentation("trivial group needs an explicit dimension".into())
            } else {
                Error::InvalidRepresentation("no generators given".into())
            }
        })?;
        for (s, m) in generators {
            if *s >= group.order() {
                return Err(Error::InvalidRepresentation(format!(
                    "generator index {s} out of range"
                )));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidRepresentation(
                    "generator matrices differ in size".into(),
                ));
            }
        }
        let mut images: Vec<Option<CMatrix<T>>> = vec![None; group.order()];
        images[group.identity()] = Some(CMatrix::identity(dim));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(g) = queue.pop_front() {
            for (s, m) in generators {
                let h = group.mul(g, *s);
                if images[h].is_none() {
                    images[h] = Some(images[g].as_ref().unwrap() * m);
                    queue.push_back(h);
                }
            }
        }
        let matrices = images
            .into_iter()
            .enumerate()
            .map(|(g, m)| {
                m.ok_or_else(|| {
                    Error::InvalidRepresentation(format!(
                        "generators do not reach element '{}'",
                        group.labels()[g]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, matrices)
    }

    pub fn trivial(group: FiniteGroup, dim: usize) -> Result<Self> {
        let n = group.order();
        Self::new(group, vec![CMatrix::identity(dim); n])
    }

    /// Left regular representation: `ρ(g) e_h = e_{gh}`.
    pub fn regular(group: FiniteGroup) -> Self {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = CMatrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = creal(T::one());
                }
                m
            })
            .collect();
        Self {
            group,
            matrices,
            dim: n,
        }
    }

    /// One-dimensional representation from real values per element.
    pub fn one_dimensional(group: FiniteGroup, values: impl Fn(usize) -> T) -> Result<Self> {
        let matrices = (0..group.order())
            .map(|g| CMatrix::from_diag(&[values(g)]))
            .collect();
        Self::new(group, matrices)
    }

    /// Block-diagonal `ρ_1 ⊕ ρ_2`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let (a, b) = (self.dim, other.dim);
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(x, y)| {
                CMatrix::from_fn(a + b, a + b, |i, j| match (i < a, j < a) {
                    (true, true) => x[(i, j)],
                    (false, false) => y[(i - a, j - a)],
                    _ => creal(T::zero()),
                })
            })
            .collect();
        Self::new(self.group.clone(), matrices)
    }

    /// Joint action `ρ_A(g) ⊗ ρ_B(g)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(x, y)| tensor_product(x, y))
            .collect();
        Self::new(self.group.clone(), matrices)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::InvalidRepresentation(
                "representations are over different groups".into(),
            ));
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMatrix<T> {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix<T>] {
        &self.matrices
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T: Real = f64> {
    /// `max ‖ρ(g)ρ(h) − ρ(gh)‖` over the checked pairs.
    pub homomorphism_residual: T,
    /// `max_g ‖ρ(g)†ρ(g) − I‖`
    pub unitarity_residual: T,
    /// `‖ρ(e) − I‖`
    pub identity_residual: T,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub homomorphism_ok: bool,
    pub unitarity_ok: bool,
    pub identity_ok: bool,
}

impl<T: Real> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.homomorphism_ok && self.unitarity_ok && self.identity_ok
    }
}

/// Homomorphism check is exhaustive up to order 24, otherwise 500 seeded
/// random pairs.
pub fn validate_representation<T: Real>(rho: &Representation<T>) -> ValidationReport<T> {
    let g = rho.group();
    let n = g.order();
    let pairs: Vec<(usize, usize)> = if n <= 24 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = random::rng(0);
        (0..500)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    let homomorphism_residual = pairs
        .iter()
        .map(|&(a, b)| {
            let prod = rho.matrix(a) * rho.matrix(b);
            operator_norm(&(&prod - rho.matrix(g.mul(a, b))))
        })
        .fold(T::zero(), |m, x| m.max(x));
    let unitarity_residual = rho
        .matrices()
        .iter()
        .map(unitarity_residual)
        .fold(T::zero(), |m, x| m.max(x));
    let identity_residual =
        operator_norm(&(rho.matrix(g.identity()) - &CMatrix::identity(rho.dim())));
    let tol = T::default_tolerances();
    let dim = T::from_usize(rho.dim()).unwrap();
    ValidationReport {
        homomorphism_ok: homomorphism_residual <= T::lit(tol.ortho),
        unitarity_ok: unitarity_residual <= T::lit(tol.unitary) * dim,
        identity_ok: identity_residual <= T::lit(tol.unitary),
        homomorphism_residual,
        unitarity_residual,
        identity_residual,
        pairs_checked: pairs.len(),
        exhaustive: n <= 24,
    }
}
