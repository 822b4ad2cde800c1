//! Shared inputs for the benchmark suite.

use paving::{gen_ensemble, random::uniform_matrix, DenseMatrix, EnsembleKind, Seed};

pub const BENCH_SEED: Seed = Seed(0x5eed);

/// Dense `n×n` matrix with uniform entries in `[-1, 1]`.
pub fn dense(n: usize) -> DenseMatrix {
    uniform_matrix(n, n, BENCH_SEED, n as u64)
}

/// Hollow unit-norm matrix of the kind paving targets.
pub fn hollow(n: usize) -> DenseMatrix {
    gen_ensemble(EnsembleKind::DiagonalFreeRandom, n, BENCH_SEED).expect("n > 0")
}
