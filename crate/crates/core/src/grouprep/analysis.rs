use crate::error::{Error, Result};
use crate::opcore::{
    column_basis, commutator_norm, hermitian_eig, null_space, operator_norm, tensor_product,
    vector, CMatrix, Hermitian, Subspace,
};
use crate::random;
use crate::scalar::{czero, Real, C};
use crate::tolerance::Tolerances;

use super::characters::CharacterTable;
use super::rep::Representation;

#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicity<T: Real = f64> {
    pub irrep: String,
    pub multiplicity: usize,
    /// The unrounded character inner product.
    pub raw: C<T>,
    pub rounding_error: T,
}

fn check_table<T: Real>(rho: &Representation<T>, chars: &CharacterTable<T>) -> Result<()> {
    let classes = rho.group().class_count();
    if chars.irreps().iter().any(|i| i.characters.len() != classes) || chars.len() != classes {
        return Err(Error::InvalidCharacterTable(
            "table does not match the representation's group".into(),
        ));
    }
    Ok(())
}

pub fn multiplicities<T: Real>(
    rho: &Representation<T>,
    chars: &CharacterTable<T>,
) -> Result<Vec<Multiplicity<T>>> {
    multiplicities_with(rho, chars, &T::default_tolerances())
}

/// `m_λ = round((1/|G|) Σ_g tr ρ(g) · conj χ_λ(g))`.
pub fn multiplicities_with<T: Real>(
    rho: &Representation<T>,
    chars: &CharacterTable<T>,
    tol: &Tolerances,
) -> Result<Vec<Multiplicity<T>>> {
    check_table(rho, chars)?;
    let group = rho.group();
    let n = T::from_usize(group.order()).unwrap();
    let traces: Vec<C<T>> = rho.matrices().iter().map(|m| m.trace()).collect();
    let mut out = Vec::with_capacity(chars.len());
    for (l, irrep) in chars.irreps().iter().enumerate() {
        let raw = traces
            .iter()
            .enumerate()
            .fold(czero::<T>(), |acc, (g, &tr)| {
                acc + tr * chars.character(group, l, g).conj()
            })
            .unscale(n);
        let rounded = raw.re.round().max(T::zero());
        let rounding_error = (raw - C::new(rounded, T::zero())).norm();
        if rounding_error > T::lit(tol.mult_round) {
            return Err(Error::MultiplicityRounding {
                irrep: irrep.name.clone(),
                value: raw.re.as_f64(),
                error: rounding_error.as_f64(),
            });
        }
        out.push(Multiplicity {
            irrep: irrep.name.clone(),
            multiplicity: rounded.to_usize().unwrap_or(0),
            raw,
            rounding_error,
        });
    }
    let total: usize = out
        .iter()
        .zip(chars.irreps())
        .map(|(m, i)| m.multiplicity * i.dim)
        .sum();
    if total != rho.dim() {
        return Err(Error::InvalidRepresentation(format!(
            "multiplicities account for dimension {total}, representation has {}",
            rho.dim()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsotypicComponent<T: Real = f64> {
    pub irrep: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    /// `P_λ = (d_λ/|G|) Σ_g conj χ_λ(g) ρ(g)`.
    pub projector: Hermitian<T>,
    /// `m_λ · d_λ`
    pub isotypic_dim: usize,
    /// Orthonormal basis of the range of `P_λ` (pivoted Gram–Schmidt).
    pub basis: CMatrix<T>,
    pub idempotence_residual: T,
}

/// Every irrep of the table appears, including those with `m_λ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotypicDecomposition<T: Real = f64> {
    pub dim: usize,
    pub components: Vec<IsotypicComponent<T>>,
}

impl<T: Real> IsotypicDecomposition<T> {
    pub fn component(&self, irrep: &str) -> Option<&IsotypicComponent<T>> {
        self.components.iter().find(|c| c.irrep == irrep)
    }

    /// `‖Σ_λ P_λ − I‖`
    pub fn completeness_residual(&self) -> T {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for c in &self.components {
            sum = &sum + c.projector.matrix();
        }
        operator_norm(&(&sum - &CMatrix::identity(self.dim)))
    }

    /// `max_{λ≠μ} ‖P_λ P_μ‖`
    pub fn orthogonality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                worst = worst.max(operator_norm(
                    &(a.projector.matrix() * b.projector.matrix()),
                ));
            }
        }
        worst
    }

    pub fn idempotence_residual(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |m, c| m.max(c.idempotence_residual))
    }
}

pub fn isotypic_projectors<T: Real>(
    rho: &Representation<T>,
    chars: &CharacterTable<T>,
) -> Result<IsotypicDecomposition<T>> {
    isotypic_projectors_with(rho, chars, &T::default_tolerances())
}

pub fn isotypic_projectors_with<T: Real>(
    rho: &Representation<T>,
    chars: &CharacterTable<T>,
    tol: &Tolerances,
) -> Result<IsotypicDecomposition<T>> {
    let mults = multiplicities_with(rho, chars, tol)?;
    let group = rho.group();
    let n = rho.dim();
    let order = T::from_usize(group.order()).unwrap();
    let mut components = Vec::with_capacity(chars.len());
    for (l, (irrep, mult)) in chars.irreps().iter().zip(mults).enumerate() {
        let d = T::from_usize(irrep.dim).unwrap();
        let mut p = CMatrix::zeros(n, n);
        for g in 0..group.order() {
            p = &p + &rho.matrix(g).scale(chars.character(group, l, g).conj());
        }
        let p = p.scale_real(d / order).hermitian_part();
        let idempotence_residual = operator_norm(&(&(&p * &p) - &p));
        if idempotence_residual > T::lit(1e-8) {
            return Err(Error::ProjectorNotIdempotent {
                irrep: irrep.name.clone(),
                residual: idempotence_residual.as_f64(),
            });
        }
        let projector = Hermitian::assume(p);
        let half = T::lit(0.5);
        let rank = hermitian_eig(&projector)
            .eigenvalues
            .iter()
            .filter(|&&e| e > half)
            .count();
        let isotypic_dim = mult.multiplicity * irrep.dim;
        if rank != isotypic_dim {
            return Err(Error::InvalidRepresentation(format!(
                "projector for '{}' has rank {rank}, expected m·d = {isotypic_dim}",
                irrep.name
            )));
        }
        let basis = column_basis(projector.matrix(), rank);
        components.push(IsotypicComponent {
            irrep: irrep.name.clone(),
            irrep_dim: irrep.dim,
            multiplicity: mult.multiplicity,
            projector,
            isotypic_dim,
            basis,
            idempotence_residual,
        });
    }
    Ok(IsotypicDecomposition { dim: n, components })
}

fn require_multiplicity_free<T: Real>(
    decomp: &IsotypicDecomposition<T>,
    side: &'static str,
) -> Result<()> {
    match decomp.components.iter().find(|c| c.multiplicity > 1) {
        Some(c) => Err(Error::NotMultiplicityFree {
            irrep: c.irrep.clone(),
            side,
            multiplicity: c.multiplicity,
        }),
        None => Ok(()),
    }
}

fn same_group<T: Real>(a: &Representation<T>, b: &Representation<T>) -> Result<()> {
    if a.group() != b.group() {
        return Err(Error::InvalidRepresentation(
            "representations are over different groups".into(),
        ));
    }
    Ok(())
}

/// Irreps shared by both sides, with one copy each; the pairs of
/// components, in table order.
fn shared_components<'a, T: Real>(
    da: &'a IsotypicDecomposition<T>,
    db: &'a IsotypicDecomposition<T>,
) -> Vec<(&'a IsotypicComponent<T>, &'a IsotypicComponent<T>)> {
    da.components
        .iter()
        .zip(&db.components)
        .filter(|(a, b)| a.multiplicity == 1 && b.multiplicity == 1)
        .collect()
}

fn pair_vectors<T: Real>(a: &IsotypicComponent<T>, b: &IsotypicComponent<T>) -> Vec<Vec<C<T>>> {
    let mut out = Vec::with_capacity(a.basis.cols() * b.basis.cols());
    for i in 0..a.basis.cols() {
        let u = a.basis.column(i);
        for j in 0..b.basis.cols() {
            out.push(vector::kron(&u, &b.basis.column(j)));
        }
    }
    out
}

/// `⊕_λ V_λ ⊗ V_λ` over irreps occurring once in both representations.
///
/// Multiplicities above one are rejected: which copies to pair is not
/// determined by the representations alone.
pub fn diagonal_isotypic_subspace<T: Real>(
    rho_a: &Representation<T>,
    rho_b: &Representation<T>,
    chars: &CharacterTable<T>,
) -> Result<Subspace<T>> {
    same_group(rho_a, rho_b)?;
    let da = isotypic_projectors(rho_a, chars)?;
    let db = isotypic_projectors(rho_b, chars)?;
    require_multiplicity_free(&da, "A")?;
    require_multiplicity_free(&db, "B")?;
    let cols: Vec<Vec<C<T>>> = shared_components(&da, &db)
        .into_iter()
        .flat_map(|(a, b)| pair_vectors(a, b))
        .collect();
    let ambient = rho_a.dim() * rho_b.dim();
    let basis = CMatrix::from_columns(ambient, &cols);
    if cols.is_empty() {
        return Ok(Subspace::assume(basis, T::zero()));
    }
    Subspace::new(basis, T::lit(T::default_tolerances().ortho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurEntry<T: Real = f64> {
    pub irrep: String,
    pub multiplicity: usize,
    /// `tr(T P_λ)/rank P_λ`; only claimed when `m_λ = 1`.
    pub scalar: Option<C<T>>,
    /// Eigenvalues of `T` on the isotypic block, one per copy (group means).
    pub block_eigenvalues: Vec<T>,
    /// `‖T P_λ − s P_λ‖` for `m_λ = 1`; for `m_λ > 1` the largest spread
    /// within a group of `d_λ` block eigenvalues.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurReport<T: Real = f64> {
    pub equivariance_residual: T,
    pub entries: Vec<SchurEntry<T>>,
}

impl<T: Real> SchurReport<T> {
    pub fn max_residual(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |m, e| m.max(e.residual))
    }

    pub fn entry(&self, irrep: &str) -> Option<&SchurEntry<T>> {
        self.entries.iter().find(|e| e.irrep == irrep)
    }
}

/// `max_g ‖[ρ(g), M]‖`.
pub fn equivariance_residual<T: Real>(m: &CMatrix<T>, rho: &Representation<T>) -> Result<T> {
    rho.matrices()
        .iter()
        .try_fold(T::zero(), |acc, r| Ok(acc.max(commutator_norm(r, m)?)))
}

pub fn schur_scalars<T: Real>(
    t: &Hermitian<T>,
    rho: &Representation<T>,
    decomp: &IsotypicDecomposition<T>,
) -> Result<SchurReport<T>> {
    schur_scalars_with(t, rho, decomp, &T::default_tolerances())
}

/// Scalars by which an equivariant observable acts on each irreducible
/// summand. Irreps absent from the representation are skipped.
pub fn schur_scalars_with<T: Real>(
    t: &Hermitian<T>,
    rho: &Representation<T>,
    decomp: &IsotypicDecomposition<T>,
    tol: &Tolerances,
) -> Result<SchurReport<T>> {
    let tm = t.matrix();
    if tm.dim() != rho.dim() || decomp.dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            op: "schur_scalars",
            left: tm.dim(),
            right: rho.dim(),
        });
    }
    let equivariance_residual = equivariance_residual(tm, rho)?;
    if equivariance_residual > T::lit(tol.equivar) * T::one().max(operator_norm(tm)) {
        return Err(Error::NotEquivariant {
            residual: equivariance_residual.as_f64(),
        });
    }
    let mut entries = Vec::new();
    for c in decomp.components.iter().filter(|c| c.multiplicity > 0) {
        let q = &c.basis;
        let block = Hermitian::assume((&(&q.adjoint() * tm) * q).hermitian_part());
        let eig = hermitian_eig(&block).eigenvalues;
        let d = c.irrep_dim;
        let groups: Vec<&[T]> = eig.chunks(d).collect();
        let block_eigenvalues = groups
            .iter()
            .map(|g| g.iter().fold(T::zero(), |s, &x| s + x) / T::from_usize(g.len()).unwrap())
            .collect();
        let (scalar, residual) = if c.multiplicity == 1 {
            let p = c.projector.matrix();
            let tp = tm * p;
            let s = tp.trace().unscale(T::from_usize(c.isotypic_dim).unwrap());
            (Some(s), operator_norm(&(&tp - &p.scale(s))))
        } else {
            let spread = groups
                .iter()
                .map(|g| g[g.len() - 1] - g[0])
                .fold(T::zero(), |m, x| m.max(x));
            (None, spread)
        };
        entries.push(SchurEntry {
            irrep: c.irrep.clone(),
            multiplicity: c.multiplicity,
            scalar,
            block_eigenvalues,
            residual,
        });
    }
    Ok(SchurReport {
        equivariance_residual,
        entries,
    })
}

/// `T = Σ_g f(class(g)) ρ(g)`, a central element of the group algebra
/// represented on the carrier space. `f` needs one real value per class
/// and must agree on inverse classes so that `T` is Hermitian.
pub fn observable_from_class_function<T: Real>(
    f: &[T],
    rho: &Representation<T>,
) -> Result<Hermitian<T>> {
    let group = rho.group();
    if f.len() != group.class_count() {
        return Err(Error::DimensionMismatch {
            op: "observable_from_class_function",
            left: f.len(),
            right: group.class_count(),
        });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("class function"));
    }
    let scale = f.iter().fold(T::one(), |m, x| m.max(x.abs()));
    for (c, &v) in f.iter().enumerate() {
        let ic = group.inverse_class(c);
        if (v - f[ic]).abs() > T::epsilon() * T::lit(16.0) * scale {
            return Err(Error::ClassFunctionNotInverseSymmetric {
                class: c,
                inverse_class: ic,
            });
        }
    }
    let n = rho.dim();
    let mut t = CMatrix::zeros(n, n);
    for g in 0..group.order() {
        t = &t + &rho.matrix(g).scale_real(f[group.class_of(g)]);
    }
    Hermitian::new(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsyncMembership<T: Real = f64> {
    pub equivariance_residual: T,
    pub kernel_commutation_residual: T,
    pub member: bool,
}

pub fn hsync_membership<T: Real>(
    h: &Hermitian<T>,
    rho: &Representation<T>,
    k: &Hermitian<T>,
) -> Result<HsyncMembership<T>> {
    hsync_membership_with(h, rho, k, &T::default_tolerances())
}

/// Member iff `H` commutes with every `ρ(g)` and with `K`.
pub fn hsync_membership_with<T: Real>(
    h: &Hermitian<T>,
    rho: &Representation<T>,
    k: &Hermitian<T>,
    tol: &Tolerances,
) -> Result<HsyncMembership<T>> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            op: "hsync_membership",
            left: h.dim(),
            right: rho.dim(),
        });
    }
    let equivariance_residual = equivariance_residual(h.matrix(), rho)?;
    let kernel_commutation_residual = commutator_norm(h.matrix(), k.matrix())?;
    let hn = operator_norm(h.matrix());
    let kn = operator_norm(k.matrix());
    let member = equivariance_residual <= T::lit(tol.equivar) * T::one().max(hn)
        && kernel_commutation_residual <= T::lit(tol.compat) * T::one().max(hn * kn);
    Ok(HsyncMembership {
        equivariance_residual,
        kernel_commutation_residual,
        member,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentEntry<T: Real = f64> {
    pub irrep: String,
    pub alpha: C<T>,
    pub beta: C<T>,
    /// `|α_λ − β_λ|`
    pub gap: T,
    pub matched: bool,
    /// `max_b ‖K b‖` over the basis of `V_λ ⊗ V_λ`.
    pub max_kernel_residual: T,
    /// `max_b |‖K b‖ − gap·‖b‖|`
    pub max_gap_deviation: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport<T: Real = f64> {
    pub entries: Vec<ContainmentEntry<T>>,
    /// Dimension of the matched part of the diagonal isotypic subspace.
    pub matched_dim: usize,
    /// Every matched block lies in `ker K`.
    pub contained: bool,
    /// Every block, matched or not, behaves as predicted.
    pub all_ok: bool,
}

pub fn verify_kernel_containment<T: Real>(
    rho_a: &Representation<T>,
    rho_b: &Representation<T>,
    t_a: &Hermitian<T>,
    t_b: &Hermitian<T>,
    chars: &CharacterTable<T>,
) -> Result<ContainmentReport<T>> {
    verify_kernel_containment_with(rho_a, rho_b, t_a, t_b, chars, &T::default_tolerances())
}

/// For each shared irrep, `K(v⊗w) = (α_λ − β_λ) v⊗w`: blocks with
/// `|α_λ − β_λ| ≤ match` must be annihilated by `K`, the others scaled by the
/// gap. Both checks use the Schur tolerance.
pub fn verify_kernel_containment_with<T: Real>(
    rho_a: &Representation<T>,
    rho_b: &Representation<T>,
    t_a: &Hermitian<T>,
    t_b: &Hermitian<T>,
    chars: &CharacterTable<T>,
    tol: &Tolerances,
) -> Result<ContainmentReport<T>> {
    same_group(rho_a, rho_b)?;
    let da = isotypic_projectors_with(rho_a, chars, tol)?;
    let db = isotypic_projectors_with(rho_b, chars, tol)?;
    require_multiplicity_free(&da, "A")?;
    require_multiplicity_free(&db, "B")?;
    let sa = schur_scalars_with(t_a, rho_a, &da, tol)?;
    let sb = schur_scalars_with(t_b, rho_b, &db, tol)?;
    let k = &tensor_product(t_a.matrix(), &CMatrix::identity(rho_b.dim()))
        - &tensor_product(&CMatrix::identity(rho_a.dim()), t_b.matrix());
    let check = T::lit(tol.schur);
    let mut entries = Vec::new();
    let mut matched_dim = 0;
    for (a, b) in shared_components(&da, &db) {
        let alpha = sa
            .entry(&a.irrep)
            .and_then(|e| e.scalar)
            .unwrap_or_else(czero);
        let beta = sb
            .entry(&b.irrep)
            .and_then(|e| e.scalar)
            .unwrap_or_else(czero);
        let gap = (alpha - beta).norm();
        let matched = gap <= T::lit(tol.match_);
        let mut max_kernel_residual = T::zero();
        let mut max_gap_deviation = T::zero();
        for v in pair_vectors(a, b) {
            let kv = vector::norm(&k.mul_vec(&v)?);
            max_kernel_residual = max_kernel_residual.max(kv);
            max_gap_deviation = max_gap_deviation.max((kv - gap * vector::norm(&v)).abs());
        }
        if matched {
            matched_dim += a.irrep_dim * b.irrep_dim;
        }
        let ok = if matched {
            max_kernel_residual <= check
        } else {
            max_gap_deviation <= check
        };
        entries.push(ContainmentEntry {
            irrep: a.irrep.clone(),
            alpha,
            beta,
            gap,
            matched,
            max_kernel_residual,
            max_gap_deviation,
            ok,
        });
    }
    let contained = entries.iter().filter(|e| e.matched).all(|e| e.ok);
    let all_ok = entries.iter().all(|e| e.ok);
    Ok(ContainmentReport {
        entries,
        matched_dim,
        contained,
        all_ok,
    })
}

/// Dimension of `{M : [M, ρ(g)] = 0 ∀g}` from the null space of
/// `Σ_g A_g† A_g`, where `A_g` is the row-major vectorization of
/// `M ↦ ρ(g)M − Mρ(g)`.
pub fn commutant_dimension<T: Real>(rho: &Representation<T>) -> usize {
    let n = rho.dim();
    let id = CMatrix::identity(n);
    let mut gram = CMatrix::zeros(n * n, n * n);
    for r in rho.matrices() {
        let a = &tensor_product(r, &id) - &tensor_product(&id, &r.transpose());
        gram = &gram + &(&a.adjoint() * &a);
    }
    null_space(&gram, T::lit(T::default_tolerances().kernel)).dim()
}

/// Group average `(1/|G|) Σ_g ρ(g) X ρ(g)†` of a random Hermitian `X`:
/// a random element of the commutant, deterministic per seed.
pub fn random_equivariant<T: Real>(rho: &Representation<T>, seed: u64) -> Hermitian<T> {
    let mut rng = random::rng(seed);
    let x = random::hermitian::<T>(rho.dim(), &mut rng);
    let n = rho.dim();
    let mut sum = CMatrix::zeros(n, n);
    for r in rho.matrices() {
        sum = &sum + &(&(r * x.matrix()) * &r.adjoint());
    }
    let order = T::from_usize(rho.group().order()).unwrap();
    Hermitian::assume(sum.scale_real(T::one() / order).hermitian_part())
}
