//! Seeded randomness: coordinate selector laws, permutation partitions,
//! Rademacher signs and test-matrix ensembles.
//!
//! Every draw is a pure function of `(master seed, stream label, index)`.
//! The triple is mixed with SplitMix64 into a 256-bit ChaCha8 key, so draw
//! `i` never depends on how many draws came before it or on which thread
//! produced it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PavingError, Result};
use crate::matrix::{CoordinateSet, DenseMatrix, Partition};

/// Master seed for a family of reproducible streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Seed {
    /// Independent generator for draw `index` of stream `label`.
    pub fn rng(&self, label: &str, index: u64) -> ChaCha8Rng {
        let mut state = splitmix64(self.0) ^ fnv1a64(label.as_bytes());
        state = splitmix64(state) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    /// A child seed, e.g. one per instance of a test suite.
    pub fn derive(&self, label: &str, index: u64) -> Seed {
        Seed(self.rng(label, index).random())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl FromStr for Seed {
    type Err = PavingError;

    /// Decimal or `0x`-prefixed hexadecimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
            None => s.replace('_', "").parse::<u64>(),
        };
        parsed
            .map(Seed)
            .map_err(|e| PavingError::Parameter(format!("bad seed '{s}': {e}")))
    }
}

/// Law of a random coordinate restriction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProjectorModel {
    /// Exactly `k` of `n` coordinates, uniformly.
    UniformK { n: usize, k: usize },
    /// Each coordinate independently with probability `rate`.
    Bernoulli { n: usize, rate: f64 },
    /// Two independent Bernoulli selectors.
    BernoulliPair { n: usize, rate: f64 },
    /// `n` independent ±1 signs.
    RademacherSigns { n: usize },
}

impl ProjectorModel {
    pub fn uniform_k(n: usize, k: usize) -> Result<Self> {
        let m = Self::UniformK { n, k };
        m.validate().map(|_| m)
    }

    pub fn bernoulli(n: usize, rate: f64) -> Result<Self> {
        let m = Self::Bernoulli { n, rate };
        m.validate().map(|_| m)
    }

    pub fn bernoulli_pair(n: usize, rate: f64) -> Result<Self> {
        let m = Self::BernoulliPair { n, rate };
        m.validate().map(|_| m)
    }

    pub fn rademacher(n: usize) -> Self {
        Self::RademacherSigns { n }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::UniformK { n, k } if k > n => Err(PavingError::Parameter(format!(
                "uniform-k model needs k <= n, got k = {k}, n = {n}"
            ))),
            Self::Bernoulli { rate, .. } | Self::BernoulliPair { rate, .. }
                if !(0.0..=1.0).contains(&rate) =>
            {
                Err(PavingError::Parameter(format!("selector rate {rate} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::UniformK { n, .. }
            | Self::Bernoulli { n, .. }
            | Self::BernoulliPair { n, .. }
            | Self::RademacherSigns { n } => n,
        }
    }

    /// Short label used in reports.
    pub fn describe(&self) -> String {
        match *self {
            Self::UniformK { n, k } => format!("uniform-k(n={n},k={k})"),
            Self::Bernoulli { n, rate } => format!("bernoulli(n={n},rate={rate})"),
            Self::BernoulliPair { n, rate } => format!("bernoulli-pair(n={n},rate={rate})"),
            Self::RademacherSigns { n } => format!("rademacher(n={n})"),
        }
    }
}

/// One realization of a [`ProjectorModel`].
#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Subset(CoordinateSet),
    Pair(CoordinateSet, CoordinateSet),
    /// Entries are exactly `+1.0` or `-1.0`.
    Signs(Vec<f64>),
}

impl Draw {
    pub fn subset(&self) -> Option<&CoordinateSet> {
        match self {
            Draw::Subset(s) => Some(s),
            _ => None,
        }
    }
}

fn bernoulli_set<R: Rng>(n: usize, rate: f64, rng: &mut R) -> CoordinateSet {
    let idx = (0..n).filter(|_| rng.random::<f64>() < rate).collect();
    CoordinateSet::new(n, idx).expect("increasing by construction")
}

/// Partial Fisher–Yates: the first `k` slots of a uniformly shuffled `0..n`.
fn partial_shuffle<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n.saturating_sub(1)) {
        let j = i + rng.random_range(0..(n - i) as u64) as usize;
        v.swap(i, j);
    }
    v
}

/// Draw number `index` from `model`.
pub fn sample_subset(model: &ProjectorModel, seed: Seed, index: u64) -> Draw {
    let mut rng = seed.rng("sample_subset", index);
    match *model {
        ProjectorModel::UniformK { n, k } => {
            let mut v = partial_shuffle(n, k, &mut rng);
            v.truncate(k);
            Draw::Subset(CoordinateSet::from_unsorted(n, v).expect("distinct by construction"))
        }
        ProjectorModel::Bernoulli { n, rate } => Draw::Subset(bernoulli_set(n, rate, &mut rng)),
        ProjectorModel::BernoulliPair { n, rate } => {
            let a = bernoulli_set(n, rate, &mut rng);
            let b = bernoulli_set(n, rate, &mut rng);
            Draw::Pair(a, b)
        }
        ProjectorModel::RademacherSigns { n } => Draw::Signs(
            (0..n)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
        ),
    }
}

/// Balanced partition `σ_j = {π(jk−k), …, π(jk−1)}` for a uniform permutation `π`.
pub fn sample_permutation_partition(n: usize, m: usize, seed: Seed, index: u64) -> Result<Partition> {
    if m == 0 || n == 0 || !n.is_multiple_of(m) {
        return Err(PavingError::Parameter(format!(
            "block count m = {m} must divide n = {n}"
        )));
    }
    let k = n / m;
    let mut rng = seed.rng("permutation_partition", index);
    let perm = partial_shuffle(n, n, &mut rng);
    let blocks = perm.chunks(k).map(<[usize]>::to_vec).collect();
    Partition::new(n, blocks)
}

/// Exact median(s) of `Binomial(n, k/n)` against the bracket `[k−1, k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialMedian {
    pub n: u32,
    pub k: u32,
    /// Smallest `m` with `P(X ≤ m) ≥ 1/2`.
    pub median_low: u32,
    /// Largest median; differs from `median_low` only when `P(X ≤ median_low) = 1/2` exactly.
    pub median_high: u32,
    pub lower: u32,
    pub upper: u32,
    pub holds: bool,
}

/// Computes the binomial median in exact integer arithmetic.
///
/// `P(X = j) = C(n,j)·k^j·(n−k)^(n−j) / n^n`, so every comparison with one
/// half is a comparison of big integers.
pub fn binomial_median_bracket(n: u32, k: u32) -> Result<BinomialMedian> {
    if k == 0 || k > n {
        return Err(PavingError::Parameter(format!(
            "binomial median bracket needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let total = BigUint::from(n).pow(n);
    let mut cumulative = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    let mut median = None;
    for j in 0..=n {
        if j > 0 {
            binom = binom * BigUint::from(n - j + 1) / BigUint::from(j);
        }
        cumulative += &binom * BigUint::from(k).pow(j) * BigUint::from(n - k).pow(n - j);
        let twice = &cumulative * 2u32;
        if twice >= total {
            let high = if twice == total { j + 1 } else { j };
            median = Some((j, high));
            break;
        }
    }
    let (median_low, median_high) = median.expect("cdf reaches one");
    let lower = k - 1;
    Ok(BinomialMedian {
        n,
        k,
        median_low,
        median_high,
        lower,
        upper: k,
        holds: lower <= median_low && median_high <= k,
    })
}

/// Named random-matrix families used as test inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnsembleKind {
    /// ±1 entries divided by the spectral norm.
    SignNormalized,
    /// Orthonormal Sylvester–Hadamard matrix, entries `±n^{-1/2}`.
    Hadamard,
    /// Hadamard matrix with its diagonal removed.
    HadamardHollow,
    /// Uniform entries in `[−μ, μ]`, divided by `max(1, ‖A‖)`.
    BoundedRandom { mu: f64 },
    /// Uniform off-diagonal entries, zero diagonal, unit spectral norm.
    DiagonalFreeRandom,
}

impl EnsembleKind {
    pub fn from_name(name: &str, mu: Option<f64>) -> Result<Self> {
        let kind = match name.replace('-', "_").as_str() {
            "sign" | "sign_normalized" => Self::SignNormalized,
            "hadamard" => Self::Hadamard,
            "hadamard_hollow" => Self::HadamardHollow,
            "bounded" | "bounded_random" => Self::BoundedRandom {
                mu: mu.ok_or_else(|| {
                    PavingError::Parameter("bounded ensemble needs a value for mu".into())
                })?,
            },
            "diagonal_free" | "diagonal_free_random" | "hollow" => Self::DiagonalFreeRandom,
            other => {
                return Err(PavingError::Parameter(format!("unknown ensemble '{other}'")));
            }
        };
        Ok(kind)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SignNormalized => "sign_normalized",
            Self::Hadamard => "hadamard",
            Self::HadamardHollow => "hadamard_hollow",
            Self::BoundedRandom { .. } => "bounded_random",
            Self::DiagonalFreeRandom => "diagonal_free_random",
        }
    }
}

fn hadamard(n: usize) -> Result<DenseMatrix> {
    if n == 0 || !n.is_power_of_two() {
        return Err(PavingError::Parameter(format!(
            "Hadamard ensemble needs a power of two, got n = {n}"
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}

/// Matrix with i.i.d. entries uniform on `[−1, 1]`.
pub fn uniform_matrix(rows: usize, cols: usize, seed: Seed, index: u64) -> DenseMatrix {
    let mut rng = seed.rng("uniform_matrix", index);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0))
}

/// Symmetric matrix with uniform entries, scaled to unit spectral norm.
pub fn symmetric_unit_matrix(n: usize, seed: Seed, index: u64) -> DenseMatrix {
    let a = uniform_matrix(n, n, seed, index);
    let s = a.add(&a.transpose()).scale(0.5);
    let norm = s.op_norm();
    if norm == 0.0 {
        s
    } else {
        s.scale(1.0 / norm)
    }
}

pub fn gen_ensemble(kind: EnsembleKind, n: usize, seed: Seed) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(PavingError::Parameter("ensemble dimension must be positive".into()));
    }
    let mut rng = seed.rng(kind.name(), 0);
    match kind {
        EnsembleKind::SignNormalized => {
            let a = DenseMatrix::from_fn(n, n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
            Ok(a.scale(1.0 / a.op_norm()))
        }
        EnsembleKind::Hadamard => hadamard(n),
        EnsembleKind::HadamardHollow => {
            let h = hadamard(n)?;
            Ok(DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { h.get(i, j) }))
        }
        EnsembleKind::BoundedRandom { mu } => {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(PavingError::Parameter(format!("mu = {mu} must be positive")));
            }
            let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-mu..=mu));
            Ok(a.scale(1.0 / a.op_norm().max(1.0)))
        }
        EnsembleKind::DiagonalFreeRandom => {
            let a = DenseMatrix::from_fn(n, n, |i, j| {
                let x = rng.random_range(-1.0..=1.0);
                if i == j {
                    0.0
                } else {
                    x
                }
            });
            let norm = a.op_norm();
            Ok(if norm == 0.0 { a } else { a.scale(1.0 / norm) })
        }
    }
}
