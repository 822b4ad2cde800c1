//! Dense real matrices, coordinate sets and partitions, plus the norms used
//! throughout the crate.
//!
//! Four norms appear everywhere:
//!
//! * the spectral norm `‖A‖` (largest singular value),
//! * the Schatten `p`-norm (`ℓ_p` norm of the singular values),
//! * the `ℓ₁ → ℓ₂` operator norm, which is the largest Euclidean column norm,
//! * the largest absolute entry.
//!
//! Empty matrices (a zero-row or zero-column selection) are representable.
//! [`spectral_norm`] rejects them, while [`DenseMatrix::op_norm`] treats them
//! as having norm zero, which is what the enumeration code needs when a
//! random selector keeps no coordinates.

use std::fmt;

use crate::error::{PavingError, Result};
use crate::linalg;

/// Row-major real matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(PavingError::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(PavingError::Parameter(format!(
                "entry ({}, {}) is not finite",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(PavingError::Dimension("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: self.rows,
            cols: other.cols,
            data: out,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).abs())
            .fold(0.0, f64::max)
    }

    /// Submatrix on the given row and column indices, in the given order.
    /// Panics if an index is out of range; see [`restrict`] for the checked form.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Spectral norm with the empty-matrix convention `‖·‖ = 0`.
    pub fn op_norm(&self) -> f64 {
        linalg::spectral_norm(self)
    }

    /// Parses the matrix text format: a header line `n_rows n_cols` followed by
    /// one whitespace-separated line per row. Blank lines are ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(PavingError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(PavingError::Parse {
                line: hline,
                msg: format!("header must be 'n_rows n_cols', got '{header}'"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|e| PavingError::Parse {
                line: hline,
                msg: format!("bad dimension '{s}': {e}"),
            })
        };
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0;
        for (lno, line) in lines {
            if seen_rows == rows {
                return Err(PavingError::Parse {
                    line: lno,
                    msg: format!("more than {rows} rows"),
                });
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|e| PavingError::Parse {
                    line: lno,
                    msg: format!("bad number '{tok}': {e}"),
                })?;
                if !v.is_finite() {
                    return Err(PavingError::Parse {
                        line: lno,
                        msg: format!("non-finite entry '{tok}'"),
                    });
                }
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(PavingError::Parse {
                    line: lno,
                    msg: format!("expected {cols} entries, got {}", data.len() - before),
                });
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(PavingError::Parse {
                line: hline,
                msg: format!("header promises {rows} rows, found {seen_rows}"),
            });
        }
        Self::new(rows, cols, data)
    }

    /// Writes the matrix text format with 17 significant digits per entry.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Sorted, duplicate-free subset of `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateSet {
    n: usize,
    indices: Vec<usize>,
}

impl CoordinateSet {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(PavingError::Index { index: bad, dim: n });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PavingError::Parameter(
                "coordinate indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { n, indices })
    }

    /// Sorts the indices first; duplicates are still rejected.
    pub fn from_unsorted(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        Self::new(n, indices)
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            indices: (0..n).collect(),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indices: Vec::new(),
        }
    }

    /// Coordinates whose bit is set in `mask` (bit `i` ↔ coordinate `i`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            n,
            indices: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// Partition of `{0, …, n-1}` into nonempty blocks. Blocks are sorted
/// internally and ordered by their smallest element, so equal partitions
/// compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<CoordinateSet>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut sets = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(PavingError::Parameter("partition blocks must be nonempty".into()));
            }
            let set = CoordinateSet::from_unsorted(n, block)?;
            for &i in set.indices() {
                if std::mem::replace(&mut seen[i], true) {
                    return Err(PavingError::Parameter(format!(
                        "coordinate {i} appears in more than one block"
                    )));
                }
            }
            sets.push(set);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(PavingError::Parameter(format!(
                "coordinate {missing} is not covered by any block"
            )));
        }
        sets.sort_by_key(|b| b.indices()[0]);
        Ok(Self { n, blocks: sets })
    }

    pub fn single_block(n: usize) -> Self {
        Self {
            n,
            blocks: if n == 0 { vec![] } else { vec![CoordinateSet::full(n)] },
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n)
                .map(|i| CoordinateSet { n, indices: vec![i] })
                .collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[CoordinateSet] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// True iff every block has the same size.
    pub fn is_balanced(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Drops coordinates `>= n` and any blocks left empty.
    pub fn restricted_to(&self, n: usize) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| CoordinateSet {
                n,
                indices: b.indices().iter().copied().filter(|&i| i < n).collect(),
            })
            .filter(|b| !b.is_empty())
            .collect();
        Self { n, blocks }
    }

    /// One line per block, space-separated indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let line: Vec<String> = b.indices().iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(n: usize, text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for (lno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| PavingError::Parse {
                        line: lno + 1,
                        msg: format!("bad index '{t}': {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Self::new(n, blocks)
    }
}

fn require_nonempty(a: &DenseMatrix) -> Result<()> {
    if a.is_empty() {
        Err(PavingError::Dimension(format!(
            "operation needs a nonempty matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )))
    } else {
        Ok(())
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a)?;
    Ok(a.op_norm())
}

/// `ℓ_p` norm of the singular-value vector, `p >= 1`.
pub fn schatten_norm(a: &DenseMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(PavingError::Parameter(format!("Schatten index p = {p} must be >= 1")));
    }
    require_nonempty(a)?;
    let sv = linalg::singular_values(a);
    Ok(lp_norm(&sv, p))
}

pub(crate) fn lp_norm(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let scale = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// Largest Euclidean column norm (the `ℓ₁ → ℓ₂` operator norm).
pub fn max_column_norm(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a)?;
    Ok(column_norm_unchecked(a))
}

pub(crate) fn column_norm_unchecked(a: &DenseMatrix) -> f64 {
    let mut sums = vec![0.0; a.n_cols()];
    for i in 0..a.n_rows() {
        for (s, x) in sums.iter_mut().zip(a.row(i)) {
            *s += x * x;
        }
    }
    sums.into_iter().fold(0.0, f64::max).sqrt()
}

pub fn max_abs_entry(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a)?;
    Ok(a.data().iter().fold(0.0, |m, x| m.max(x.abs())))
}

/// `(A − diag A) / (1 + μ)`: a hollow matrix with entries strictly below `μ`
/// whenever those of `A` are at most `μ`.
pub fn hollow_rescale(a: &DenseMatrix, mu: f64) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(PavingError::Dimension(format!(
            "hollow rescale needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(PavingError::Parameter(format!("mu = {mu} must be positive")));
    }
    let factor = 1.0 + mu;
    Ok(DenseMatrix::from_fn(a.n_rows(), a.n_cols(), |i, j| {
        if i == j {
            0.0
        } else {
            a.get(i, j) / factor
        }
    }))
}

/// The submatrix `A[rows, cols]`, whose spectral norm equals that of the
/// projected matrix `P_rows A P_cols`.
pub fn restrict(a: &DenseMatrix, rows: &CoordinateSet, cols: &CoordinateSet) -> Result<DenseMatrix> {
    if let Some(&i) = rows.indices().iter().find(|&&i| i >= a.n_rows()) {
        return Err(PavingError::Index { index: i, dim: a.n_rows() });
    }
    if let Some(&j) = cols.indices().iter().find(|&&j| j >= a.n_cols()) {
        return Err(PavingError::Index { index: j, dim: a.n_cols() });
    }
    Ok(a.submatrix(rows.indices(), cols.indices()))
}

/// `‖Σ_j P_j A P_j‖`, computed blockwise as `max_j ‖A[σ_j, σ_j]‖`.
pub fn paving_quality(a: &DenseMatrix, part: &Partition) -> Result<f64> {
    if !a.is_square() || a.n_rows() != part.ambient() {
        return Err(PavingError::Dimension(format!(
            "partition of {} coordinates does not fit a {}x{} matrix",
            part.ambient(),
            a.n_rows(),
            a.n_cols()
        )));
    }
    Ok(quality_unchecked(a, part))
}

pub(crate) fn quality_unchecked(a: &DenseMatrix, part: &Partition) -> f64 {
    part.blocks()
        .iter()
        .map(|b| a.submatrix(b.indices(), b.indices()).op_norm())
        .fold(0.0, f64::max)
}
