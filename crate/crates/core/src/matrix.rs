//! Dense row-major matrices plus the small numeric kernels everything else
//! builds on: Gram products, SPD inversion through Cholesky, principal
//! submatrices, Schur reduction of the trailing row/column, row
//! diagonal-dominance classification, and mutual coherence.
//!
//! Matrices are immutable value objects; every operation returns a new
//! value, so instances are safe to share across threads.

use serde::Serialize;

use crate::error::{Error, Result};

/// Immutable dense matrix with finite entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a `rows x cols` matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite matrix entry {bad}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("no rows given".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, entries)
    }

    /// Builds entries from a function of (row, col). Internal convenience;
    /// still validates finiteness.
    pub(crate) fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }).expect("identity")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i)).expect("transpose")
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    /// `Aᵀv` without materializing the transpose.
    pub fn matvec_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, vector has length {}",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * vi;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Symmetry check with an absolute tolerance scaled by the largest
    /// entry; exact inputs (hand-written or Gram products) pass at 0.
    pub fn is_symmetric_within(&self, rel: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel * self.max_abs();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Strictly increasing list of 0-based indices into some ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "index set must be strictly increasing".into(),
            ));
        }
        Ok(Self { indices })
    }

    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Indices in `0..n` not present in the set, in increasing order.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet {
            indices: (0..n).filter(|i| !self.contains(*i)).collect(),
        }
    }
}

/// Row diagonal-dominance classes, strongest tag wins. The plain `DD` tag
/// means dominant but with equality in every row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum DominanceClass {
    NotDD,
    DD,
    IDD,
    SDD,
}

impl DominanceClass {
    /// Dominant at all, i.e. anything but `NotDD`.
    pub fn is_dominant(self) -> bool {
        self != DominanceClass::NotDD
    }
}

impl std::fmt::Display for DominanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DominanceClass::NotDD => "NotDD",
            DominanceClass::DD => "DD",
            DominanceClass::IDD => "IDD",
            DominanceClass::SDD => "SDD",
        };
        f.write_str(s)
    }
}

/// Classifies row diagonal dominance with exact float comparisons.
pub fn classify_dominance(h: &DenseMatrix) -> Result<DominanceClass> {
    classify_dominance_eps(h, 0.0)
}

/// Classification with slack: a row passes dominance if
/// `h_ii >= off_sum - eps` and counts as strict if `h_ii > off_sum + eps`.
/// A negative diagonal entry forces `NotDD` regardless of slack, since a
/// dominant row implies a nonnegative diagonal.
pub fn classify_dominance_eps(h: &DenseMatrix, eps: f64) -> Result<DominanceClass> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "dominance classification needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("slack must be >= 0, got {eps}")));
    }
    let n = h.rows();
    let mut strict_rows = 0usize;
    for i in 0..n {
        let diag = h.get(i, i);
        if diag < 0.0 {
            return Ok(DominanceClass::NotDD);
        }
        let off: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| h.get(i, j).abs())
            .sum();
        if !(diag >= off - eps) {
            return Ok(DominanceClass::NotDD);
        }
        if diag > off + eps {
            strict_rows += 1;
        }
    }
    Ok(if strict_rows == n {
        DominanceClass::SDD
    } else if strict_rows > 0 {
        DominanceClass::IDD
    } else {
        DominanceClass::DD
    })
}

/// `AᵀA`, exactly symmetric: each pair dot product is computed once and
/// mirrored.
pub fn gram(a: &DenseMatrix) -> DenseMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for r in 0..m {
                s += a.get(r, i) * a.get(r, j);
            }
            entries[i * n + j] = s;
            entries[j * n + i] = s;
        }
    }
    DenseMatrix::new(n, n, entries).expect("gram product overflowed to non-finite")
}

/// Cholesky factorization `G = L·Lᵀ` with explicit pivot floor.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Vec<f64>,
    n: usize,
    pivots: Vec<f64>,
}

/// Pivot floor used by [`invert_spd`]: `1e-12` times the largest diagonal
/// magnitude.
pub fn spd_pivot_floor(g: &DenseMatrix) -> f64 {
    let maxd = (0..g.rows()).fold(0.0f64, |m, i| m.max(g.get(i, i).abs()));
    1e-12 * maxd
}

/// Factors a symmetric positive-definite matrix; only the lower triangle of
/// `g` is read. Fails with a singularity error when a pivot does not clear
/// `pivot_floor`.
pub fn cholesky(g: &DenseMatrix, pivot_floor: f64) -> Result<Cholesky> {
    if !g.is_square() {
        return Err(Error::Dimension(format!(
            "cholesky needs a square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows();
    let mut l = vec![0.0; n * n];
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let mut d = g.get(k, k);
        for j in 0..k {
            d -= l[k * n + j] * l[k * n + j];
        }
        pivots.push(d);
        if !(d > pivot_floor) {
            return Err(Error::Singular(format!(
                "pivot {d:.6e} at index {k} is not above floor {pivot_floor:.6e}"
            )));
        }
        let lkk = d.sqrt();
        l[k * n + k] = lkk;
        for i in (k + 1)..n {
            let mut s = g.get(i, k);
            for j in 0..k {
                s -= l[i * n + j] * l[k * n + j];
            }
            l[i * n + k] = s / lkk;
        }
    }
    Ok(Cholesky { lower: l, n, pivots })
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal pivots `d_k = l_kk²` in elimination order.
    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    /// The lower-triangular factor as a matrix.
    pub fn lower(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, n, |i, j| if j <= i { self.lower[i * n + j] } else { 0.0 })
            .expect("cholesky factor")
    }

    /// Solves `G x = b` by forward/back substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "solve expects length {n}, got {}",
                b.len()
            )));
        }
        let l = &self.lower;
        let mut x = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                x[i] -= l[i * n + j] * x[j];
            }
            x[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= l[j * n + i] * x[j];
            }
            x[i] /= l[i * n + i];
        }
        Ok(x)
    }

    /// Full inverse, symmetrized by averaging mirror entries.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            cols.push(self.solve(&e)?);
        }
        DenseMatrix::from_fn(n, n, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
    }
}

/// Inverse of a symmetric positive-definite matrix via Cholesky, pivot
/// floor `1e-12 x max |diagonal|`. Result is symmetrized.
pub fn invert_spd(g: &DenseMatrix) -> Result<DenseMatrix> {
    cholesky(g, spd_pivot_floor(g))?.inverse()
}

/// `H` restricted to the rows and columns named by `s`.
pub fn principal_submatrix(h: &DenseMatrix, s: &IndexSet) -> Result<DenseMatrix> {
    if !h.is_square() {
        return Err(Error::Dimension("principal submatrix of a non-square matrix".into()));
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    let idx = s.indices();
    if let Some(&bad) = idx.iter().find(|&&i| i >= h.rows()) {
        return Err(Error::InvalidArgument(format!(
            "index {bad} out of range for dimension {}",
            h.rows()
        )));
    }
    DenseMatrix::from_fn(idx.len(), idx.len(), |a, b| h.get(idx[a], idx[b]))
}

/// Eliminates the last row and column by one Schur step:
/// `r_ij = h_ij − h_in·h_jn / h_nn`. Equals the inverse of the leading
/// (n−1)×(n−1) block of `H⁻¹` when `H` is invertible.
pub fn schur_reduce_last(h: &DenseMatrix) -> Result<DenseMatrix> {
    if !h.is_square() {
        return Err(Error::Dimension("schur reduction of a non-square matrix".into()));
    }
    let n = h.rows();
    if n < 2 {
        return Err(Error::Dimension("schur reduction needs dimension >= 2".into()));
    }
    let pivot = h.get(n - 1, n - 1);
    if pivot == 0.0 {
        return Err(Error::Singular("zero trailing pivot in schur reduction".into()));
    }
    let mut entries = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..(n - 1) {
        for j in 0..(n - 1) {
            let r = h.get(i, j) - h.get(i, n - 1) * h.get(j, n - 1) / pivot;
            if !r.is_finite() {
                return Err(Error::Singular(
                    "schur reduction produced a non-finite entry".into(),
                ));
            }
            entries.push(r);
        }
    }
    DenseMatrix::new(n - 1, n - 1, entries)
}

/// `(principal_submatrix(H⁻¹, S))⁻¹` without forming `H⁻¹`: permutes the
/// complement of `S` to the tail and Schur-reduces it away one index at a
/// time. Requires `H` symmetric and full rank.
pub fn inverse_of_submatrix_inverse(h: &DenseMatrix, s: &IndexSet) -> Result<DenseMatrix> {
    if !h.is_square() {
        return Err(Error::Dimension("expected a square matrix".into()));
    }
    if !h.is_symmetric_within(1e-12) {
        return Err(Error::Hypothesis("matrix is not symmetric".into()));
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    let n = h.rows();
    if let Some(&bad) = s.indices().iter().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "index {bad} out of range for dimension {n}"
        )));
    }
    let mut order: Vec<usize> = s.indices().to_vec();
    order.extend(s.complement(n).indices());
    let mut cur = DenseMatrix::from_fn(n, n, |i, j| h.get(order[i], order[j]))?;
    while cur.rows() > s.len() {
        cur = schur_reduce_last(&cur)?;
    }
    Ok(cur)
}

/// Largest absolute inner product between distinct unit-normalized columns,
/// clamped to [0, 1].
pub fn mutual_coherence(a: &DenseMatrix) -> Result<f64> {
    let (m, n) = (a.rows(), a.cols());
    if n < 2 {
        return Err(Error::InvalidArgument(
            "mutual coherence needs at least two columns".into(),
        ));
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let col = a.column(j);
        let norm = dot(&col, &col).sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateColumn { index: j });
        }
        cols.push(col.iter().map(|v| v / norm).collect::<Vec<_>>());
    }
    let mut mu = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d = 0.0;
            for r in 0..m {
                d += cols[i][r] * cols[j][r];
            }
            mu = mu.max(d.abs());
        }
    }
    Ok(mu.min(1.0))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn norm2_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}
