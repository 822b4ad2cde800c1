//! Random paving of matrices: dense matrix primitives, seeded selector
//! models, random and exhaustive paving search, exact and Monte Carlo
//! moment computation with an inequality registry, and closed-form bounds.
//!
//! ```
//! use paving::{random_pave, gen_ensemble, EnsembleKind, Seed};
//!
//! let a = gen_ensemble(EnsembleKind::HadamardHollow, 8, Seed(1)).unwrap();
//! let best = random_pave(&a, 2, 200, Seed(7)).unwrap();
//! assert!(best.quality <= a.op_norm());
//! ```

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
mod linalg;
pub mod matrix;
pub mod moments;
pub mod paving;
pub mod random;

pub use bounds::{
    haagerup_constant, khintchine_constant, moment_order, mu_bound, paving_size_bound, rudelson_bound,
    step3_bound, theorem_pipeline, ChainReport, DeltaOrBlocks, KhintchineConstant,
};
pub use error::{PavingError, Result};
pub use linalg::symmetric_eigenvalues;
pub use matrix::{
    hollow_rescale, max_abs_entry, max_column_norm, paving_quality, restrict, schatten_norm, spectral_norm,
    CoordinateSet, DenseMatrix, Partition,
};
pub use moments::{
    exact_moment, exact_moments, mc_moment, mc_moments, verify_inequality, InequalityCase, InequalityReport,
    Instance, Method, MomentEstimate,
};
pub use paving::{exhaustive_pave, pad_to_multiple, partition_count, random_pave, verify_paving, PavingCheck, PavingResult};
pub use random::{
    binomial_median_bracket, gen_ensemble, sample_permutation_partition, sample_subset, BinomialMedian, Draw,
    EnsembleKind, ProjectorModel, Seed,
};
