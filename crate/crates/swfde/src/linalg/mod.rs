//! Dense small-matrix algebra for the certificate machinery: Metzler
//! projection, Hurwitz testing, and positive-vector feasibility for systems of
//! strict linear inequalities `M_k ξ ≪ 0`.
//!
//! Everything here is a pure function on immutable inputs; no shared state.

mod simplex;

use crate::error::{Error, Result};
use crate::tol;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::Deref;

/// Dense matrix with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. All entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows in matrix literal".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise maximum of two equally shaped matrices.
    pub fn sup(a: &Matrix, b: &Matrix) -> Result<Matrix> {
        a.check_same_shape(b)?;
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x.max(*y)).collect();
        Ok(Matrix { rows: a.rows, cols: a.cols, data })
    }

    /// Right-multiplies by `diag(d)`, scaling column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[f64]) -> Result<Matrix> {
        if d.len() != self.cols {
            return Err(Error::Dimension("diagonal length does not match columns".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j) * d[j]);
            }
        }
        Ok(out)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonneg(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    /// Entrywise linear interpolation `(1-u)·a + u·b`.
    pub fn lerp(a: &Matrix, b: &Matrix, u: f64) -> Matrix {
        debug_assert_eq!(a.rows, b.rows);
        debug_assert_eq!(a.cols, b.cols);
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| x + u * (y - x))
            .collect();
        Matrix { rows: a.rows, cols: a.cols, data }
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:>12.6}", self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Square matrix with nonnegative off-diagonal entries.
///
/// Metzler matrices generate monotone flows; for them Hurwitz stability is
/// equivalent to the existence of `ξ ≫ 0` with `Mξ ≪ 0`, which is the test
/// this crate's certificates are built on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MetzlerMatrix(Matrix);

impl MetzlerMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("Metzler matrix must be square".into()));
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j && m.get(i, j) < 0.0 {
                    return Err(Error::Argument(format!(
                        "off-diagonal entry ({i},{j}) = {} is negative",
                        m.get(i, j)
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }

    /// Adds an entrywise-nonnegative matrix; the sum stays Metzler.
    pub fn add_nonneg(&self, v: &Matrix) -> Result<MetzlerMatrix> {
        if !v.is_nonneg() {
            return Err(Error::Argument("expected an entrywise nonnegative matrix".into()));
        }
        MetzlerMatrix::new(self.0.add(v)?)
    }
}

impl Deref for MetzlerMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl<'de> Deserialize<'de> for MetzlerMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = Matrix::deserialize(deserializer)?;
        MetzlerMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Vector with strictly positive, finite entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Dimension("positive vector must be non-empty".into()));
        }
        if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::Argument("entries of a positive vector must be finite and > 0".into()));
        }
        Ok(Self(v))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inf_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(*v))
    }

    /// Rescales to unit sup-norm. Certificates are scale-invariant, so this is
    /// the canonical representative.
    pub fn normalized(&self) -> PositiveVector {
        let m = self.inf_norm();
        Self(self.0.iter().map(|v| v / m).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PositiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for PositiveVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(deserializer)?;
        PositiveVector::new(v).map_err(serde::de::Error::custom)
    }
}

/// Keeps the diagonal, takes absolute values off the diagonal.
pub fn metzler_projection(a: &Matrix) -> Result<MetzlerMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("metzler_projection needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.set(i, j, a.get(i, j).abs());
            }
        }
    }
    MetzlerMatrix::new(m)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot is negligible relative to the matrix scale
/// (singular or numerically singular input).
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    if !a.is_square() || a.rows() != b.len() {
        return None;
    }
    let n = a.rows();
    let mut aug = vec![0.0; n * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            aug[i * (n + 1) + j] = a.get(i, j);
        }
        aug[i * (n + 1) + n] = b[i];
    }
    let scale = a.max_abs().max(1e-30);
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = aug[col * (n + 1) + col].abs();
        for r in col + 1..n {
            let v = aug[r * (n + 1) + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= 1e-12 * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..=n {
                aug.swap(col * (n + 1) + j, pivot_row * (n + 1) + j);
            }
        }
        let pv = aug[col * (n + 1) + col];
        for r in col + 1..n {
            let f = aug[r * (n + 1) + col] / pv;
            if f == 0.0 {
                continue;
            }
            for j in col..=n {
                aug[r * (n + 1) + j] -= f * aug[col * (n + 1) + j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = aug[i * (n + 1) + n];
        for j in i + 1..n {
            acc -= aug[i * (n + 1) + j] * x[j];
        }
        x[i] = acc / aug[i * (n + 1) + i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn strict_margin_ok(m: &Matrix, xi: &[f64]) -> bool {
    let residual = m.mul_vec(xi);
    let xi_norm = xi.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let bound = -tol::FEASIBILITY_MARGIN * (1.0 + m.inf_norm() * xi_norm);
    residual.iter().all(|&r| r <= bound)
}

/// Searches for `ξ ≫ 0` with `Mξ ≪ 0`.
///
/// Canonical construction: solve `Mξ = −1`. For a Hurwitz Metzler matrix,
/// `−M⁻¹ ≥ 0` and nonsingular, so the solution is strictly positive; any
/// non-positive component or a singular solve reports infeasibility (the
/// boundary of the Hurwitz region is a legitimate query, not an error).
pub fn find_positive_vector(m: &MetzlerMatrix) -> Option<PositiveVector> {
    let n = m.dim();
    let xi = solve_dense(m.as_matrix(), &vec![-1.0; n])?;
    if xi.iter().any(|&v| v <= 0.0) {
        return None;
    }
    if !strict_margin_ok(m.as_matrix(), &xi) {
        return None;
    }
    PositiveVector::new(xi).ok()
}

/// Hurwitz test for Metzler matrices via the certificate equivalence:
/// a Metzler `M` is Hurwitz iff some `ξ ≫ 0` satisfies `Mξ ≪ 0`.
pub fn is_hurwitz_metzler(m: &MetzlerMatrix) -> bool {
    find_positive_vector(m).is_some()
}

/// Searches for a single `ξ ≫ 0` with `M_k ξ ≪ 0` for every `k`.
///
/// Solved as a linear program: maximize `s` subject to `(M_k ξ)_i + s ≤ 0` and
/// `1 ≤ ξ_j ≤ U` (`U` = [`tol::XI_BOX_MAX`]); strict feasibility is accepted
/// only when the recomputed margin beats the scale-aware tolerance, so an
/// optimum of `s = 0` (boundary-only intersection) is classified infeasible.
pub fn find_common_positive_vector(ms: &[MetzlerMatrix]) -> Result<Option<PositiveVector>> {
    if ms.is_empty() {
        return Err(Error::Argument("common-vector search needs at least one matrix".into()));
    }
    let n = ms[0].dim();
    if ms.iter().any(|m| m.dim() != n) {
        return Err(Error::Dimension("all matrices must share one dimension".into()));
    }

    // Variables: y_0..y_{n-1} with ξ = 1 + y, then s⁺, s⁻ for the free margin
    // s = s⁺ − s⁻. Rows: one per (k, i) inequality plus the upper box bounds.
    let nv = n + 2;
    let mut a_ub: Vec<Vec<f64>> = Vec::with_capacity(ms.len() * n + n);
    let mut b_ub: Vec<f64> = Vec::with_capacity(ms.len() * n + n);
    for m in ms {
        for i in 0..n {
            let mut row = vec![0.0; nv];
            let mut rhs = 0.0;
            for j in 0..n {
                row[j] = m.get(i, j);
                rhs -= m.get(i, j);
            }
            row[n] = 1.0;
            row[n + 1] = -1.0;
            a_ub.push(row);
            b_ub.push(rhs);
        }
    }
    for j in 0..n {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        a_ub.push(row);
        b_ub.push(tol::XI_BOX_MAX - 1.0);
    }
    let mut c = vec![0.0; nv];
    c[n] = 1.0;
    c[n + 1] = -1.0;

    let sol = match simplex::maximize(&c, &a_ub, &b_ub) {
        simplex::LpResult::Optimal { x, objective } => {
            log::debug!("common-vector LP margin s = {objective:.3e}");
            if objective <= 0.0 {
                return Ok(None);
            }
            x
        }
        // ξ = 1, s very negative is always feasible and the box keeps the
        // program bounded, so these arms signal numerical failure only.
        simplex::LpResult::Infeasible | simplex::LpResult::Unbounded => return Ok(None),
    };

    let xi: Vec<f64> = (0..n).map(|j| 1.0 + sol[j].max(0.0)).collect();
    if ms.iter().all(|m| strict_margin_ok(m.as_matrix(), &xi)) {
        Ok(Some(PositiveVector::new(xi)?))
    } else {
        Ok(None)
    }
}

/// Residual rows `M_k ξ` for each matrix; all components are negative exactly
/// when `ξ` is a common certificate vector.
pub fn feasibility_residuals(ms: &[MetzlerMatrix], xi: &PositiveVector) -> Result<Vec<Vec<f64>>> {
    if ms.is_empty() {
        return Err(Error::Argument("no matrices given".into()));
    }
    if ms.iter().any(|m| m.dim() != xi.len()) {
        return Err(Error::Dimension("vector length does not match matrix dimension".into()));
    }
    Ok(ms.iter().map(|m| m.mul_vec(xi)).collect())
}
