//! Synchronization operator `K = T_A ⊗ I − I ⊗ T_B`, its kernel, and the
//! behaviour of that kernel under exactly and approximately compatible
//! dynamics.
//!
//! For a Hamiltonian with `‖[H, K]‖ ≤ ε` and an initial state in `ker K`,
//! the evolved state obeys `‖K ψ(t)‖ ≤ ε|t|`. [`drift_trace`] measures both
//! sides of that inequality and of its fidelity counterpart
//! `‖Π_K ψ(t)‖² ≥ 1 − ε²t²` on an explicit time grid.

use crate::clocks::ClockObservable;
use crate::error::{Error, Result};
use crate::opcore::{
    commutator_norm, hermitian_eig, leakage, null_space_with, operator_norm, projector, vector,
    Hermitian, Spectrum, Subspace,
};
use crate::random;
use crate::scalar::{abs2, Real, C};
use crate::tolerance::Tolerances;

/// Bipartite clock system with a joint Hamiltonian on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncSystem<T: Real = f64> {
    clock_a: ClockObservable<T>,
    clock_b: ClockObservable<T>,
    hamiltonian: Hermitian<T>,
    locals: Option<(Hermitian<T>, Hermitian<T>)>,
}

impl<T: Real> SyncSystem<T> {
    pub fn new(
        clock_a: ClockObservable<T>,
        clock_b: ClockObservable<T>,
        hamiltonian: Hermitian<T>,
    ) -> Result<Self> {
        let dim = clock_a.dim() * clock_b.dim();
        if hamiltonian.dim() != dim {
            return Err(Error::DimensionMismatch {
                op: "sync system hamiltonian",
                left: dim,
                right: hamiltonian.dim(),
            });
        }
        Ok(Self {
            clock_a,
            clock_b,
            hamiltonian,
            locals: None,
        })
    }

    /// `H = H_A ⊗ I + I ⊗ H_B`.
    pub fn from_locals(
        clock_a: ClockObservable<T>,
        clock_b: ClockObservable<T>,
        h_a: Hermitian<T>,
        h_b: Hermitian<T>,
    ) -> Result<Self> {
        if h_a.dim() != clock_a.dim() {
            return Err(Error::DimensionMismatch {
                op: "local hamiltonian A",
                left: clock_a.dim(),
                right: h_a.dim(),
            });
        }
        if h_b.dim() != clock_b.dim() {
            return Err(Error::DimensionMismatch {
                op: "local hamiltonian B",
                left: clock_b.dim(),
                right: h_b.dim(),
            });
        }
        let left = h_a.kron(&Hermitian::identity(h_b.dim()));
        let right = Hermitian::identity(h_a.dim()).kron(&h_b);
        // disjoint supports commute; a failure here means broken arithmetic
        let c = commutator_norm(left.matrix(), right.matrix())?;
        let scale = operator_norm(h_a.matrix()) * operator_norm(h_b.matrix());
        if c > T::lit(1e-12) * scale.max(T::min_positive_value()) {
            return Err(Error::InvalidArgument(format!(
                "local terms fail to commute (residual {c})"
            )));
        }
        let hamiltonian = left.add(&right)?;
        Ok(Self {
            clock_a,
            clock_b,
            hamiltonian,
            locals: Some((h_a, h_b)),
        })
    }

    pub fn clock_a(&self) -> &ClockObservable<T> {
        &self.clock_a
    }

    pub fn clock_b(&self) -> &ClockObservable<T> {
        &self.clock_b
    }

    pub fn hamiltonian(&self) -> &Hermitian<T> {
        &self.hamiltonian
    }

    pub fn locals(&self) -> Option<(&Hermitian<T>, &Hermitian<T>)> {
        self.locals.as_ref().map(|(a, b)| (a, b))
    }

    pub fn dim_a(&self) -> usize {
        self.clock_a.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.clock_b.dim()
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_b()
    }

    pub fn sync_operator(&self) -> Hermitian<T> {
        sync_operator(&self.clock_a, &self.clock_b)
    }
}

/// `K = T_A ⊗ I − I ⊗ T_B`. The clocks may have different dimensions.
pub fn sync_operator<T: Real>(a: &ClockObservable<T>, b: &ClockObservable<T>) -> Hermitian<T> {
    let left = a.matrix().kron(&Hermitian::identity(b.dim()));
    let right = Hermitian::identity(a.dim()).kron(b.matrix());
    left.sub(&right).expect("equal dimensions by construction")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncOperatorBundle<T: Real = f64> {
    pub k: Hermitian<T>,
    pub kernel: Subspace<T>,
    pub projector: Hermitian<T>,
    /// Realized `‖[H, K]‖`.
    pub epsilon: T,
}

pub fn sync_bundle<T: Real>(sys: &SyncSystem<T>) -> Result<SyncOperatorBundle<T>> {
    sync_bundle_with(sys, &T::default_tolerances())
}

pub fn sync_bundle_with<T: Real>(
    sys: &SyncSystem<T>,
    tol: &Tolerances,
) -> Result<SyncOperatorBundle<T>> {
    let k = sys.sync_operator();
    let kernel = null_space_with(k.matrix(), T::lit(tol.kernel), T::lit(tol.kernel_abs));
    let projector = projector(&kernel);
    let epsilon = commutator_norm(sys.hamiltonian().matrix(), k.matrix())?;
    Ok(SyncOperatorBundle {
        k,
        kernel,
        projector,
        epsilon,
    })
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid"));
    }
    Ok(())
}

/// `max_t ‖(I − Π_K) U(t) Π_K‖`: how much of the kernel leaks out under
/// evolution. `t = 0` contributes nothing since `U(0) = I`.
pub fn preservation_residual<T: Real>(
    sys: &SyncSystem<T>,
    bundle: &SyncOperatorBundle<T>,
    times: &[T],
) -> Result<T> {
    check_times(times)?;
    if times.iter().all(|&t| t == T::zero()) {
        return Ok(T::zero());
    }
    let spectrum = hermitian_eig(sys.hamiltonian());
    Ok(times
        .iter()
        .filter(|&&t| t != T::zero())
        .map(|&t| leakage(spectrum.evolve(t).matrix(), &bundle.projector))
        .fold(T::zero(), |m, x| m.max(x)))
}

/// Largest deviation between the sorted spectra of `U(t)† O U(t)` and `O`
/// over the time grid.
pub fn spectrum_deviation<T: Real>(
    h: &Hermitian<T>,
    observable: &Hermitian<T>,
    times: &[T],
) -> Result<T> {
    check_times(times)?;
    if h.dim() != observable.dim() {
        return Err(Error::DimensionMismatch {
            op: "spectrum_deviation",
            left: h.dim(),
            right: observable.dim(),
        });
    }
    let reference = hermitian_eig(observable).eigenvalues;
    let spectrum = hermitian_eig(h);
    let mut worst = T::zero();
    for &t in times {
        let u = spectrum.evolve(t);
        let u = u.matrix();
        let moved = Hermitian::assume(&(&u.adjoint() * observable.matrix()) * u);
        let evolved = hermitian_eig(&moved).eigenvalues;
        for (a, b) in evolved.iter().zip(&reference) {
            worst = worst.max((*a - *b).abs());
        }
    }
    Ok(worst)
}

/// Drift and fidelity series for one initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport<T: Real = f64> {
    pub times: Vec<T>,
    /// `‖K ψ(t)‖`
    pub drift: Vec<T>,
    /// `‖Π_K ψ(t)‖²`
    pub fidelity: Vec<T>,
    /// `‖(I − Π_K) ψ(t)‖²`, computed from `ψ − Π_K ψ` directly.
    pub leakage: Vec<T>,
    pub epsilon: T,
    pub bound_slack: T,
    pub drift_bound_ok: bool,
    pub fidelity_bound_ok: bool,
    /// Largest excess of any sample over its bound; negative when every
    /// sample lies strictly inside both bounds.
    pub max_bound_slack: T,
}

impl<T: Real> DriftReport<T> {
    /// `ε|t|`
    pub fn drift_bound(&self, i: usize) -> T {
        self.epsilon * self.times[i].abs()
    }

    /// `1 − ε²t²`
    pub fn fidelity_bound(&self, i: usize) -> T {
        let et = self.epsilon * self.times[i];
        T::one() - et * et
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn drift_trace<T: Real>(
    sys: &SyncSystem<T>,
    psi0: &[C<T>],
    times: &[T],
) -> Result<DriftReport<T>> {
    let tol = T::default_tolerances();
    let bundle = sync_bundle_with(sys, &tol)?;
    drift_trace_with(sys, &bundle, psi0, times, &tol)
}

/// Evolves `psi0` under the system Hamiltonian and records drift and
/// fidelity at every listed time.
pub fn drift_trace_with<T: Real>(
    sys: &SyncSystem<T>,
    bundle: &SyncOperatorBundle<T>,
    psi0: &[C<T>],
    times: &[T],
    tol: &Tolerances,
) -> Result<DriftReport<T>> {
    check_times(times)?;
    if psi0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            op: "initial state",
            left: sys.dim(),
            right: psi0.len(),
        });
    }
    if psi0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let norm = vector::norm(psi0);
    if (norm - T::one()).abs() > T::lit(tol.unitary) {
        return Err(Error::NotNormalized {
            norm: norm.as_f64(),
        });
    }
    let k = bundle.k.matrix();
    let initial = vector::norm(&k.mul_vec(psi0)?);
    if initial > T::lit(tol.init) {
        return Err(Error::OutsideKernel {
            residual: initial.as_f64(),
        });
    }

    let spectrum: Spectrum<T> = hermitian_eig(sys.hamiltonian());
    let basis = bundle.kernel.basis();
    let basis_adj = basis.adjoint();
    let mut report = DriftReport {
        times: times.to_vec(),
        drift: Vec::with_capacity(times.len()),
        fidelity: Vec::with_capacity(times.len()),
        leakage: Vec::with_capacity(times.len()),
        epsilon: bundle.epsilon,
        bound_slack: T::lit(tol.bound_slack),
        drift_bound_ok: true,
        fidelity_bound_ok: true,
        max_bound_slack: T::neg_infinity(),
    };
    for &t in times {
        let psi = if t == T::zero() {
            psi0.to_vec()
        } else {
            spectrum.evolve_state(t, psi0)?
        };
        let drift = vector::norm(&k.mul_vec(&psi)?);
        let coeffs = basis_adj.mul_vec(&psi)?;
        let fidelity = coeffs.iter().fold(T::zero(), |s, &z| s + abs2(z));
        let inside = basis.mul_vec(&coeffs)?;
        let outside = vector::norm(&vector::sub(&psi, &inside));
        report.drift.push(drift);
        report.fidelity.push(fidelity);
        report.leakage.push(outside * outside);
    }
    for i in 0..report.len() {
        let over_drift = report.drift[i] - report.drift_bound(i);
        let over_fidelity = report.fidelity_bound(i) - report.fidelity[i];
        report.drift_bound_ok &= over_drift <= report.bound_slack;
        report.fidelity_bound_ok &= over_fidelity <= report.bound_slack;
        report.max_bound_slack = report.max_bound_slack.max(over_drift.max(over_fidelity));
    }
    Ok(report)
}

/// Guaranteed window `δ/ε` with drift at most `δ`; infinite when `ε` is
/// numerically zero.
pub fn stability_window<T: Real>(bundle: &SyncOperatorBundle<T>, delta: T) -> Result<T> {
    if delta.is_nan() || delta <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if bundle.epsilon <= T::lit(1e-15) {
        return Ok(T::infinity());
    }
    Ok(delta / bundle.epsilon)
}

/// Random unit vector in the kernel, deterministic per seed.
pub fn sample_kernel_state<T: Real>(
    bundle: &SyncOperatorBundle<T>,
    seed: u64,
) -> Result<Vec<C<T>>> {
    let k = bundle.kernel.dim();
    if k == 0 {
        return Err(Error::TrivialKernel);
    }
    let mut rng = random::rng(seed);
    let coeffs = vector::normalized(&random::complex_vector::<T>(k, &mut rng));
    let psi = bundle.kernel.basis().mul_vec(&coeffs)?;
    Ok(vector::normalized(&psi))
}

/// `H₀ + strength · V / ‖[V, K]‖`, so the perturbation contributes exactly
/// `strength` to the commutator with `K` when `H₀` commutes with `K`.
pub fn epsilon_compatible<T: Real>(
    base: &Hermitian<T>,
    k: &Hermitian<T>,
    direction: &Hermitian<T>,
    strength: T,
) -> Result<Hermitian<T>> {
    if strength.is_nan() || strength < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "strength must be non-negative, got {strength}"
        )));
    }
    if base.dim() != direction.dim() {
        return Err(Error::DimensionMismatch {
            op: "perturbation direction",
            left: base.dim(),
            right: direction.dim(),
        });
    }
    let c = commutator_norm(direction.matrix(), k.matrix())?;
    if c <= T::lit(1e-12) * T::one().max(operator_norm(direction.matrix())) {
        return Err(Error::DegenerateDirection);
    }
    base.add(&direction.scale(strength / c))
}

/// Columns of the kernel basis as vectors.
pub fn kernel_vectors<T: Real>(bundle: &SyncOperatorBundle<T>) -> Vec<Vec<C<T>>> {
    bundle.kernel.vectors()
}

/// `‖K b‖` for each basis vector `b` of a subspace.
pub fn kernel_residuals<T: Real>(k: &Hermitian<T>, s: &Subspace<T>) -> Result<Vec<T>> {
    s.vectors()
        .iter()
        .map(|b| Ok(vector::norm(&k.matrix().mul_vec(b)?)))
        .collect()
}
