//! Seeded sampling. Every random draw in the crate comes from a ChaCha8
//! stream keyed by a `u64` seed, which gives identical sequences on every
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::opcore::{hermitian_eig, CMatrix, Hermitian, Unitary};
use crate::scalar::{Real, C};

/// Recorded in reports so a run can be reproduced.
pub const GENERATOR_ID: &str = "chacha8/seed_from_u64";

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[-1, 1)`.
pub fn uniform<T: Real>(rng: &mut impl Rng) -> T {
    T::lit(rng.gen_range(-1.0..1.0))
}

pub fn complex<T: Real>(rng: &mut impl Rng) -> C<T> {
    C::new(uniform(rng), uniform(rng))
}

pub fn complex_vector<T: Real>(n: usize, rng: &mut impl Rng) -> Vec<C<T>> {
    (0..n).map(|_| complex(rng)).collect()
}

pub fn complex_matrix<T: Real>(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

/// Hermitian matrix with independent uniform entries on and above the diagonal.
pub fn hermitian<T: Real>(dim: usize, rng: &mut impl Rng) -> Hermitian<T> {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = C::new(uniform(rng), T::zero());
        for j in i + 1..dim {
            let z = complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Hermitian::assume(m)
}

/// Unitary from the eigenvectors of a random Hermitian matrix.
pub fn unitary<T: Real>(dim: usize, rng: &mut impl Rng) -> Unitary<T> {
    hermitian_eig(&hermitian(dim, rng)).eigenvectors
}
