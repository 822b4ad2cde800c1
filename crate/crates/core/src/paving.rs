//! Paving construction: best-of-`trials` random permutation pavings, and an
//! exhaustive oracle over all partitions for small `n`.

use rayon::prelude::*;

use crate::error::{PavingError, Result};
use crate::matrix::{quality_unchecked, spectral_norm, DenseMatrix, Partition};
use crate::random::{sample_permutation_partition, Seed};

/// Largest `n` the balanced exhaustive search accepts.
pub const EXHAUSTIVE_BALANCED_MAX_N: usize = 12;
/// Largest `n` the unrestricted exhaustive search accepts.
pub const EXHAUSTIVE_ANY_MAX_N: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct PavingResult {
    pub partition: Partition,
    /// `max_j ‖A[σ_j, σ_j]‖` for `partition`.
    pub quality: f64,
    /// Random draws (or enumerated partitions) evaluated.
    pub trials_used: u64,
    /// Index of the first draw achieving `quality`.
    pub best_trial_index: u64,
    /// `None` for the exhaustive oracle.
    pub seed: Option<Seed>,
}

fn require_square(a: &DenseMatrix) -> Result<usize> {
    if a.is_square() && !a.is_empty() {
        Ok(a.n_rows())
    } else {
        Err(PavingError::Dimension(format!(
            "paving needs a nonempty square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )))
    }
}

/// Best balanced permutation paving over `trials` independent draws.
///
/// Draw `i` depends only on `(seed, i)`, and ties resolve to the smallest
/// index, so the result is independent of thread scheduling.
pub fn random_pave(a: &DenseMatrix, m: usize, trials: u64, seed: Seed) -> Result<PavingResult> {
    let n = require_square(a)?;
    if trials == 0 {
        return Err(PavingError::Parameter("random paving needs at least one trial".into()));
    }
    if m == 0 || n % m != 0 {
        return Err(PavingError::Parameter(format!(
            "block count m = {m} must divide n = {n}; pad the matrix first"
        )));
    }
    let (quality, best) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let part = sample_permutation_partition(n, m, seed, i).expect("m divides n");
            (quality_unchecked(a, &part), i)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |x, y| match x.0.total_cmp(&y.0) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Greater => y,
                std::cmp::Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            },
        );
    Ok(PavingResult {
        partition: sample_permutation_partition(n, m, seed, best)?,
        quality,
        trials_used: trials,
        best_trial_index: best,
        seed: Some(seed),
    })
}

/// Number of partitions of `n` items into `m` unlabeled blocks, all of size
/// `n/m` when `balanced`. Saturates at `u128::MAX`.
pub fn partition_count(n: usize, m: usize, balanced: bool) -> u128 {
    if m == 0 || m > n {
        return 0;
    }
    if balanced {
        if !n.is_multiple_of(m) {
            return 0;
        }
        // Product over blocks of C(remaining - 1, k - 1): fix the smallest
        // unused element as the next block's leader.
        let k = n / m;
        let mut count: u128 = 1;
        let mut remaining = n;
        while remaining > 0 {
            count = count.saturating_mul(binomial(remaining - 1, k - 1));
            remaining -= k;
        }
        count
    } else {
        // Stirling numbers of the second kind.
        let mut s = vec![0u128; m + 1];
        s[0] = 1;
        for _ in 0..n {
            for j in (1..=m).rev() {
                s[j] = (j as u128).saturating_mul(s[j]).saturating_add(s[j - 1]);
            }
            s[0] = 0;
        }
        s[m]
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Enumerates set partitions of `0..n` into exactly `m` blocks (block sizes
/// capped at `cap`) as restricted growth strings, in lexicographic order.
struct PartitionEnumerator {
    n: usize,
    m: usize,
    cap: usize,
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl PartitionEnumerator {
    fn for_each(&mut self, visit: &mut impl FnMut(&[usize])) {
        self.recurse(0, 0, visit);
    }

    fn recurse(&mut self, i: usize, used: usize, visit: &mut impl FnMut(&[usize])) {
        if i == self.n {
            if used == self.m {
                visit(&self.labels);
            }
            return;
        }
        // Remaining items must be able to open the blocks still missing.
        if self.n - i < self.m - used {
            return;
        }
        let limit = if used < self.m { used + 1 } else { self.m };
        for b in 0..limit {
            if self.sizes[b] == self.cap {
                continue;
            }
            self.labels[i] = b;
            self.sizes[b] += 1;
            self.recurse(i + 1, used.max(b + 1), visit);
            self.sizes[b] -= 1;
        }
    }
}

fn labels_to_partition(n: usize, m: usize, labels: &[usize]) -> Partition {
    let mut blocks = vec![Vec::new(); m];
    for (i, &b) in labels.iter().enumerate() {
        blocks[b].push(i);
    }
    Partition::new(n, blocks).expect("labels cover every block")
}

/// Global optimum over all partitions into `m` blocks (balanced ones only
/// when `balanced_only`). Each unordered partition is visited once.
pub fn exhaustive_pave(a: &DenseMatrix, m: usize, balanced_only: bool) -> Result<PavingResult> {
    let n = require_square(a)?;
    if m == 0 || m > n {
        return Err(PavingError::Parameter(format!(
            "block count m = {m} must lie in 1..={n}"
        )));
    }
    if balanced_only && n % m != 0 {
        return Err(PavingError::Parameter(format!(
            "balanced paving needs m = {m} to divide n = {n}"
        )));
    }
    let count = partition_count(n, m, balanced_only);
    let max_n = if balanced_only {
        EXHAUSTIVE_BALANCED_MAX_N
    } else {
        EXHAUSTIVE_ANY_MAX_N
    };
    if n > max_n {
        return Err(PavingError::Capacity {
            what: format!(
                "exhaustive {}paving of n = {n} into m = {m} blocks (supported up to n = {max_n})",
                if balanced_only { "balanced " } else { "" }
            ),
            count,
        });
    }
    let cap = if balanced_only { n / m } else { n };
    let mut walker = PartitionEnumerator {
        n,
        m,
        cap,
        labels: vec![0; n],
        sizes: vec![0; m],
    };
    let mut best: Option<(f64, u64, Partition)> = None;
    let mut index = 0u64;
    walker.for_each(&mut |labels| {
        let part = labels_to_partition(n, m, labels);
        let q = quality_unchecked(a, &part);
        if best.as_ref().is_none_or(|(bq, _, _)| q < *bq) {
            best = Some((q, index, part));
        }
        index += 1;
    });
    debug_assert_eq!(u128::from(index), count);
    let (quality, best_trial_index, partition) = best.expect("at least one partition");
    Ok(PavingResult {
        partition,
        quality,
        trials_used: index,
        best_trial_index,
        seed: None,
    })
}

/// Zero-pads a square matrix to the smallest dimension divisible by `m`.
pub fn pad_to_multiple(a: &DenseMatrix, m: usize) -> Result<DenseMatrix> {
    let n = require_square(a)?;
    if m == 0 {
        return Err(PavingError::Parameter("block count must be positive".into()));
    }
    let padded = n.div_ceil(m) * m;
    if padded == n {
        return Ok(a.clone());
    }
    Ok(DenseMatrix::from_fn(padded, padded, |i, j| {
        if i < n && j < n {
            a.get(i, j)
        } else {
            0.0
        }
    }))
}

/// Both sides of `‖Σ_j P_j A P_j‖ ≤ ε‖A‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct PavingCheck {
    pub quality: f64,
    pub norm: f64,
    pub eps: f64,
    pub threshold: f64,
    pub holds: bool,
}

pub fn verify_paving(a: &DenseMatrix, part: &Partition, eps: f64) -> Result<PavingCheck> {
    let quality = crate::matrix::paving_quality(a, part)?;
    let norm = spectral_norm(a)?;
    let threshold = eps * norm;
    Ok(PavingCheck {
        quality,
        norm,
        eps,
        threshold,
        holds: quality <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::paving_quality;
    use crate::random::{gen_ensemble, EnsembleKind};

    fn hollow(n: usize, seed: u64) -> DenseMatrix {
        gen_ensemble(EnsembleKind::DiagonalFreeRandom, n, Seed(seed)).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(partition_count(8, 2, true), 35);
        assert_eq!(partition_count(12, 3, true), 5775);
        assert_eq!(partition_count(12, 4, true), 15400);
        assert_eq!(partition_count(6, 6, true), 1);
        assert_eq!(partition_count(10, 3, false), 9330);
        assert_eq!(partition_count(4, 2, false), 7);
        assert_eq!(partition_count(4, 3, true), 0);
    }

    #[test]
    fn enumeration_matches_count() {
        for (n, m, bal) in [(6, 2, true), (6, 3, true), (7, 3, false), (5, 2, false), (8, 4, true)] {
            let mut w = PartitionEnumerator {
                n,
                m,
                cap: if bal { n / m } else { n },
                labels: vec![0; n],
                sizes: vec![0; m],
            };
            let mut seen = std::collections::HashSet::new();
            w.for_each(&mut |l| {
                seen.insert(labels_to_partition(n, m, l));
            });
            assert_eq!(seen.len() as u128, partition_count(n, m, bal), "n={n} m={m}");
        }
    }

    #[test]
    fn random_pave_edges() {
        let a = hollow(6, 1);
        let one = random_pave(&a, 1, 5, Seed(2)).unwrap();
        assert_eq!(one.quality, spectral_norm(&a).unwrap());
        let sing = random_pave(&a, 6, 3, Seed(2)).unwrap();
        assert_eq!(sing.quality, 0.0);
        assert_eq!(sing.best_trial_index, 0);
        assert!(random_pave(&a, 4, 3, Seed(2)).is_err());
        assert!(random_pave(&a, 2, 0, Seed(2)).is_err());
    }

    #[test]
    fn random_pave_reports_a_consistent_partition() {
        let a = hollow(8, 3);
        let r = random_pave(&a, 2, 50, Seed(11)).unwrap();
        assert_eq!(paving_quality(&a, &r.partition).unwrap(), r.quality);
        let again = random_pave(&a, 2, 50, Seed(11)).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn exhaustive_small_cases() {
        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = exhaustive_pave(&swap, 2, true).unwrap();
        assert_eq!(r.quality, 0.0);
        assert_eq!(r.partition, Partition::singletons(2));

        let d = DenseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let r = exhaustive_pave(&d, 2, true).unwrap();
        assert_eq!(r.quality, 4.0);
        assert_eq!(r.trials_used, 3);
    }

    #[test]
    fn exhaustive_capacity_errors() {
        let big = hollow(13, 0);
        match exhaustive_pave(&big, 13, true) {
            Err(PavingError::Capacity { count, .. }) => assert_eq!(count, 1),
            other => panic!("unexpected {other:?}"),
        }
        let mid = hollow(11, 0);
        assert!(matches!(
            exhaustive_pave(&mid, 2, false),
            Err(PavingError::Capacity { count: 1023, .. })
        ));
        assert!(exhaustive_pave(&hollow(6, 0), 4, true).is_err());
    }

    #[test]
    fn unbalanced_optimum_never_worse_than_balanced() {
        for s in 0..5 {
            let a = hollow(6, s);
            let bal = exhaustive_pave(&a, 2, true).unwrap();
            let any = exhaustive_pave(&a, 2, false).unwrap();
            assert!(any.quality <= bal.quality);
        }
    }

    #[test]
    fn padding() {
        let a = hollow(4, 0);
        assert_eq!(pad_to_multiple(&a, 2).unwrap(), a);
        let b = hollow(5, 0);
        let p = pad_to_multiple(&b, 2).unwrap();
        assert_eq!(p.n_rows(), 6);
        assert!((0..6).all(|i| p.get(5, i) == 0.0 && p.get(i, 5) == 0.0));
        assert!((spectral_norm(&p).unwrap() - spectral_norm(&b).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn verify_paving_edges() {
        let a = hollow(5, 9);
        let c = verify_paving(&a, &Partition::singletons(5), 1e-9).unwrap();
        assert!(c.holds && c.quality == 0.0);
        let c = verify_paving(&a, &Partition::single_block(5), 1.0).unwrap();
        assert!(c.holds && c.quality == c.threshold);
        assert!(verify_paving(&a, &Partition::singletons(4), 1.0).is_err());
    }
}
