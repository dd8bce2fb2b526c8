//! Finite groups, characters and representations.
//!
//! Representations are stored extensionally, one matrix per element, so that
//! homomorphism checks are exhaustive for small groups. Isotypic projectors
//! come from the character table; the diagonal isotypic subspace is built
//! for multiplicity-free representations only.

mod analysis;
mod characters;
mod group;
mod rep;

pub use analysis::{
    commutant_dimension, diagonal_isotypic_subspace, equivariance_residual, hsync_membership,
    hsync_membership_with, isotypic_projectors, isotypic_projectors_with, multiplicities,
    multiplicities_with, observable_from_class_function, random_equivariant, schur_scalars,
    schur_scalars_with, verify_kernel_containment, verify_kernel_containment_with,
    ContainmentEntry, ContainmentReport, HsyncMembership, IsotypicComponent, IsotypicDecomposition,
    Multiplicity, SchurEntry, SchurReport,
};
pub use characters::{builtin_group, BuiltinGroup, CharacterTable, Irrep};
pub use group::FiniteGroup;
pub use rep::{validate_representation, Representation, ValidationReport};
