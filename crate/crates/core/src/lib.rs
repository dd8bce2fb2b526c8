//! Operator-algebra toolkit for synchronization subspaces of bipartite
//! quantum clocks.
//!
//! The crate is organized bottom-up:
//!
//! - [`opcore`]: dense complex matrices, Kronecker products, commutators,
//!   Hermitian eigen-decomposition, unitary evolution, kernels and norms.
//! - [`clocks`]: clock observables and the algebra of Hamiltonians that
//!   commute with them.
//! - [`sync`]: the synchronization operator `K = T_A ⊗ I − I ⊗ T_B`, its
//!   kernel, and drift/fidelity traces under nearly-commuting dynamics.
//! - [`grouprep`]: finite groups, character tables, isotypic projectors and
//!   Schur-lemma checks for symmetry-protected synchronization.
//!
//! Numerical code is generic over the real field ([`Real`]); the aliases at
//! the crate root fix it to `f64`.

pub mod clocks;
pub mod error;
pub mod grouprep;
pub mod opcore;
pub mod random;
pub mod scalar;
pub mod sync;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use tolerance::Tolerances;

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexMatrix = opcore::CMatrix<f64>;
pub type HermitianOperator = opcore::Hermitian<f64>;
pub type UnitaryMatrix = opcore::Unitary<f64>;
pub type Spectrum = opcore::Spectrum<f64>;
pub type Subspace = opcore::Subspace<f64>;
pub type ClockObservable = clocks::ClockObservable<f64>;
pub type SyncSystem = sync::SyncSystem<f64>;
pub type SyncOperatorBundle = sync::SyncOperatorBundle<f64>;
pub type DriftReport = sync::DriftReport<f64>;
pub type Representation = grouprep::Representation<f64>;
pub type CharacterTable = grouprep::CharacterTable<f64>;
pub type StateVector = Vec<Complex64>;

/// Library version recorded in harness reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
