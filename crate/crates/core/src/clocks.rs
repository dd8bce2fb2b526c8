//! Clock observables and the Hamiltonians compatible with them.
//!
//! A clock is a Hermitian `T = Σ_j t_j |j⟩⟨j|` whose eigenvalues are time
//! labels. A Hamiltonian is compatible when `[H, T] = 0`; such Hamiltonians
//! are exactly the block-diagonal operators `H = Σ_λ P_λ H P_λ` over the
//! eigenspaces of `T`, and are diagonal when every eigenspace is a line.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::opcore::{commutator_norm, hermitian_eig, operator_norm, CMatrix, Hermitian, Unitary};
use crate::random;
use crate::scalar::{creal, Real};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct ClockObservable<T: Real = f64> {
    labels: Vec<T>,
    basis: Unitary<T>,
    label_sep: T,
    non_degenerate: bool,
    matrix: Hermitian<T>,
}

impl<T: Real> ClockObservable<T> {
    /// Clock diagonal in the standard basis.
    pub fn new(labels: Vec<T>) -> Result<Self> {
        let n = labels.len();
        Self::with_basis(labels, Unitary::identity(n))
    }

    /// Clock whose states `|j⟩` are the columns of `basis`.
    pub fn with_basis(labels: Vec<T>, basis: Unitary<T>) -> Result<Self> {
        Self::with_options(labels, basis, &T::default_tolerances())
    }

    pub fn with_options(labels: Vec<T>, basis: Unitary<T>, tol: &Tolerances) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabels);
        }
        if labels.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("clock labels"));
        }
        if basis.dim() != labels.len() {
            return Err(Error::DimensionMismatch {
                op: "clock basis",
                left: labels.len(),
                right: basis.dim(),
            });
        }
        let label_sep = T::lit(tol.label_sep);
        let non_degenerate = labels
            .iter()
            .enumerate()
            .all(|(i, &a)| labels[i + 1..].iter().all(|&b| (a - b).abs() > label_sep));
        let matrix = if basis == Unitary::identity(labels.len()) {
            Hermitian::from_real_diag(&labels)
        } else {
            let b = basis.matrix();
            let d = CMatrix::from_diag(&labels);
            Hermitian::with_tolerances(&(b * &d) * &b.adjoint(), tol)?
        };
        Ok(Self {
            labels,
            basis,
            label_sep,
            non_degenerate,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn basis(&self) -> &Unitary<T> {
        &self.basis
    }

    pub fn is_non_degenerate(&self) -> bool {
        self.non_degenerate
    }

    /// All labels coincide, so `T` is a multiple of the identity.
    pub fn is_trivial(&self) -> bool {
        let (lo, hi) = self
            .labels
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        hi - lo <= self.label_sep
    }

    pub fn label_sep(&self) -> T {
        self.label_sep
    }

    /// Matrix form `basis · diag(labels) · basis†`.
    pub fn matrix(&self) -> &Hermitian<T> {
        &self.matrix
    }

    /// `f(T)` for a real function on the spectrum.
    pub fn function(&self, f: impl Fn(T) -> T) -> Hermitian<T> {
        let b = self.basis.matrix();
        let d = CMatrix::from_diag(&self.labels.iter().map(|&x| f(x)).collect::<Vec<_>>());
        Hermitian::assume(&(b * &d) * &b.adjoint())
    }
}

/// Shorthand for [`ClockObservable::new`].
pub fn make_clock<T: Real>(labels: Vec<T>) -> Result<ClockObservable<T>> {
    ClockObservable::new(labels)
}

/// One eigenspace of a clock.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T: Real = f64> {
    pub eigenvalue: T,
    pub projector: Hermitian<T>,
    pub dim: usize,
    /// Orthonormal basis of the eigenspace (columns of the clock basis).
    pub basis: CMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure<T: Real = f64> {
    pub blocks: Vec<Block<T>>,
}

impl<T: Real> BlockStructure<T> {
    /// `Σ_λ P_λ M P_λ`.
    pub fn compress(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let n = m.rows();
        self.blocks.iter().fold(CMatrix::zeros(n, n), |acc, b| {
            let p = b.projector.matrix();
            &acc + &(&(p * m) * p)
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }
}

/// Eigenspace decomposition of `T`; labels within `label_sep` of their
/// neighbour in sorted order share a block. Blocks are in ascending order.
pub fn block_structure<T: Real>(clock: &ClockObservable<T>) -> BlockStructure<T> {
    let labels = clock.labels();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&i, &j| {
        labels[i]
            .partial_cmp(&labels[j])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if labels[i] - labels[*g.last().unwrap()] <= clock.label_sep => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let b = clock.basis().matrix();
    let blocks = groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            let sum = g.iter().fold(T::zero(), |s, &i| s + labels[i]);
            let eigenvalue = sum / T::from_usize(g.len()).unwrap();
            let basis = b.select_columns(&g);
            Block {
                eigenvalue,
                projector: Hermitian::assume(&basis * &basis.adjoint()),
                dim: g.len(),
                basis,
            }
        })
        .collect();
    BlockStructure { blocks }
}

/// `‖[H, T]‖`.
pub fn compatibility_residual<T: Real>(h: &Hermitian<T>, clock: &ClockObservable<T>) -> Result<T> {
    commutator_norm(h.matrix(), clock.matrix().matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompatClass {
    Diagonal,
    BlockDiagonal,
    Incompatible,
}

impl CompatClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Diagonal => "diagonal",
            Self::BlockDiagonal => "block_diagonal",
            Self::Incompatible => "incompatible",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diagonal" => Some(Self::Diagonal),
            "block_diagonal" => Some(Self::BlockDiagonal),
            "incompatible" => Some(Self::Incompatible),
            _ => None,
        }
    }
}

impl fmt::Display for CompatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityVerdict<T: Real = f64> {
    /// `‖[H, T]‖`
    pub residual: T,
    pub class: CompatClass,
    /// `‖H − Σ_λ P_λ H P_λ‖`
    pub off_block_mass: T,
}

pub fn classify_compatibility<T: Real>(
    h: &Hermitian<T>,
    clock: &ClockObservable<T>,
) -> Result<CompatibilityVerdict<T>> {
    classify_with(h, clock, &T::default_tolerances())
}

/// Threshold classification:
///
/// - `incompatible` when `‖[H,T]‖ > compat · max(1, ‖H‖‖T‖)`;
/// - otherwise `diagonal` when `T` is non-degenerate or `H` has no
///   off-diagonal mass in the clock basis;
/// - otherwise `block_diagonal`.
pub fn classify_with<T: Real>(
    h: &Hermitian<T>,
    clock: &ClockObservable<T>,
    tol: &Tolerances,
) -> Result<CompatibilityVerdict<T>> {
    let residual = compatibility_residual(h, clock)?;
    let hm = h.matrix();
    let h_norm = operator_norm(hm);
    let t_norm = operator_norm(clock.matrix().matrix());
    let compat = T::lit(tol.compat);
    let blocks = block_structure(clock);
    let off_block_mass = operator_norm(&(hm - &blocks.compress(hm)));

    let class = if residual > compat * T::one().max(h_norm * t_norm) {
        CompatClass::Incompatible
    } else if clock.is_non_degenerate() {
        CompatClass::Diagonal
    } else {
        let b = clock.basis().matrix();
        let in_basis = &(&b.adjoint() * hm) * b;
        let diag = CMatrix::from_fn(in_basis.rows(), in_basis.cols(), |i, j| {
            if i == j {
                in_basis[(i, j)]
            } else {
                creal(T::zero())
            }
        });
        let off_diagonal = operator_norm(&(&in_basis - &diag));
        if off_diagonal <= compat * T::one().max(h_norm) {
            CompatClass::Diagonal
        } else {
            CompatClass::BlockDiagonal
        }
    };
    Ok(CompatibilityVerdict {
        residual,
        class,
        off_block_mass,
    })
}

/// Random element of the commutant of `T`: an independent random Hermitian
/// block on each eigenspace. Deterministic per seed.
pub fn random_compatible<T: Real>(clock: &ClockObservable<T>, seed: u64) -> Hermitian<T> {
    let mut rng = random::rng(seed);
    let n = clock.dim();
    let h = block_structure(clock)
        .blocks
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, block| {
            let r = random::hermitian::<T>(block.dim, &mut rng);
            &acc + &(&(&block.basis * r.matrix()) * &block.basis.adjoint())
        });
    Hermitian::assume(h)
}

/// Canonical clock commuting with `H`: eigenvalues of `H` whose consecutive
/// gaps are `≤ gap_tol` form one cluster, and the k-th cluster's eigenspace
/// gets label `k`. A scalar `H` yields the trivial clock (all labels 0).
pub fn clock_from_hamiltonian<T: Real>(h: &Hermitian<T>, gap_tol: T) -> Result<ClockObservable<T>> {
    if gap_tol.is_nan() || gap_tol <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "gap_tol must be positive, got {gap_tol}"
        )));
    }
    let spectrum = hermitian_eig(h);
    let mut labels = Vec::with_capacity(spectrum.dim());
    let mut cluster = 0usize;
    for (i, &l) in spectrum.eigenvalues.iter().enumerate() {
        if i > 0 && l - spectrum.eigenvalues[i - 1] > gap_tol {
            cluster += 1;
        }
        labels.push(T::from_usize(cluster).unwrap());
    }
    ClockObservable::with_basis(labels, spectrum.eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::commutator;

    fn h4() -> Hermitian<f64> {
        Hermitian::new(CMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]))
        .unwrap()
    }

    #[test]
    fn make_clock_flags() {
        let t = make_clock(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(t.is_non_degenerate());
        assert_eq!(t.matrix().matrix(), &CMatrix::from_diag(&[0.0, 1.0, 2.0]));
        let z = make_clock(vec![1.0, -1.0]).unwrap();
        assert_eq!(z.matrix().matrix(), &CMatrix::from_diag(&[1.0, -1.0]));
        assert!(!make_clock(vec![1.0, 1.0, 2.0]).unwrap().is_non_degenerate());
    }

    #[test]
    fn make_clock_errors() {
        assert_eq!(make_clock::<f64>(vec![]), Err(Error::EmptyLabels));
        assert!(matches!(
            make_clock(vec![0.0, f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
        assert!(make_clock(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn residual_of_h4_is_one() {
        let t = make_clock(vec![0.0, 1.0, 2.0]).unwrap();
        let r = compatibility_residual(&h4(), &t).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let same = compatibility_residual(t.matrix(), &t).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn residual_dimension_mismatch() {
        let t = make_clock(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            compatibility_residual(&h4(), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn block_structures() {
        let dims = |labels: Vec<f64>| block_structure(&make_clock(labels).unwrap()).dims();
        assert_eq!(dims(vec![0.0, 1.0, 2.0]), vec![1, 1, 1]);
        assert_eq!(dims(vec![1.0, 1.0, 2.0]), vec![2, 1]);
        assert_eq!(dims(vec![3.0; 4]), vec![4]);
        // labels inside label_sep merge, outside do not
        assert_eq!(dims(vec![0.0, 1e-12, 1.0]), vec![2, 1]);
        assert_eq!(dims(vec![0.0, 1e-6, 1.0]), vec![1, 1, 1]);
    }

    #[test]
    fn classify_h4_and_h3() {
        let t = make_clock(vec![0.0, 1.0, 2.0]).unwrap();
        let v = classify_compatibility(&h4(), &t).unwrap();
        assert_eq!(v.class, CompatClass::Incompatible);
        assert!((v.off_block_mass - 1.0).abs() < 1e-12);
        let h3 = Hermitian::from_real_diag(&[0.0, 2f64.sqrt(), -1.0]);
        let v = classify_compatibility(&h3, &t).unwrap();
        assert_eq!(v.class, CompatClass::Diagonal);
        assert_eq!(v.residual, 0.0);
    }

    #[test]
    fn classify_block_on_degenerate_space() {
        let t = make_clock(vec![1.0, 1.0, 2.0]).unwrap();
        let blocks = block_structure(&t);
        let p = blocks.blocks[0].projector.matrix();
        for seed in 0..10 {
            let r = random::hermitian::<f64>(3, &mut random::rng(seed));
            let h = Hermitian::new(&(p * r.matrix()) * p).unwrap();
            let v = classify_compatibility(&h, &t).unwrap();
            assert!(v.residual <= 1e-12);
            assert_eq!(v.class, CompatClass::BlockDiagonal);
        }
    }

    #[test]
    fn random_compatible_is_deterministic_and_commutes() {
        let t = make_clock(vec![0.0, 1.0, 2.0, 3.5]).unwrap();
        let a = random_compatible(&t, 42);
        assert_eq!(a, random_compatible(&t, 42));
        assert_ne!(a, random_compatible(&t, 43));
        // non-degenerate clock: diagonal
        let m = a.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m[(i, j)], creal(0.0));
                }
            }
        }
        let id = make_clock(vec![2.0; 3]).unwrap();
        let full = random_compatible(&id, 1);
        assert!(full.matrix()[(0, 1)].norm() > 0.0);
    }

    #[test]
    fn clock_from_hamiltonian_clusters() {
        let h = Hermitian::from_real_diag(&[5.0, 5.0, 7.0]);
        let t = clock_from_hamiltonian(&h, 1e-9).unwrap();
        assert_eq!(t.labels(), &[0.0, 0.0, 1.0]);
        assert_eq!(t.matrix().matrix(), &CMatrix::from_diag(&[0.0, 0.0, 1.0]));
        let s = clock_from_hamiltonian(&Hermitian::from_real_diag(&[2.0; 3]), 1e-9).unwrap();
        assert!(s.is_trivial());
        assert!(clock_from_hamiltonian(&h, 0.0).is_err());
    }

    #[test]
    fn clock_from_hamiltonian_commutes_with_h() {
        for seed in 0..20 {
            let h = random::hermitian::<f64>(5, &mut random::rng(seed));
            let t = clock_from_hamiltonian(&h, 1e-9).unwrap();
            let c = operator_norm(&commutator(h.matrix(), t.matrix().matrix()).unwrap());
            let bound = 1e-10 * operator_norm(h.matrix()) * operator_norm(t.matrix().matrix());
            assert!(c <= bound, "seed {seed}: {c} > {bound}");
        }
    }
}
