//! Minimal dense linear algebra: vectors, matrices, and the elementwise
//! operations every other module is built on.
//!
//! Everything is `f64` and row-major. Each row reduction runs strictly left
//! to right, so the dense and row-sparse matvec paths are bit-identical —
//! the selective-update equivalence checks depend on that.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Logistic sigmoid. Saturates cleanly at 0/1 for large |x|.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Dot product of two equal-length slices, summed left to right.
#[inline]
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

/// Dense vector of 64-bit floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn zeros(len: usize) -> Self {
        Vector {
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        Vector { data }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        Vector {
            data: (0..len).map(&mut f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Elementwise logistic sigmoid; output strictly inside (0, 1).
    pub fn sigmoid(&self) -> Vector {
        Vector::from_vec(self.data.iter().map(|&x| sigmoid(x)).collect())
    }

    /// Elementwise hyperbolic tangent; output in (-1, 1).
    pub fn tanh(&self) -> Vector {
        Vector::from_vec(self.data.iter().map(|&x| x.tanh()).collect())
    }

    /// Elementwise (Hadamard) product.
    pub fn hadamard(&self, other: &Vector) -> Result<Vector> {
        self.check_len("hadamard", other)?;
        Ok(Vector::from_vec(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a * b)
                .collect(),
        ))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_len("add", other)?;
        Ok(Vector::from_vec(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_len("sub", other)?;
        Ok(Vector::from_vec(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        ))
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector::from_vec(self.data.iter().map(|&a| alpha * a).collect())
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: f64, x: &Vector) -> Result<()> {
        self.check_len("axpy", x)?;
        for (s, &v) in self.data.iter_mut().zip(x.data.iter()) {
            *s += alpha * v;
        }
        Ok(())
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        self.check_len("dot", other)?;
        Ok(dot_slices(&self.data, &other.data))
    }

    fn check_len(&self, op: &'static str, other: &Vector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::dim(
                op,
                format!("len {}", self.len()),
                format!("len {}", other.len()),
            ));
        }
        Ok(())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Vector { data }
    }
}

/// Result of a row-restricted matvec: values only for the requested rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    full_len: usize,
}

impl SparseVector {
    /// `(row, value)` pairs in strictly increasing row order.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length of the dense vector this is a restriction of.
    pub fn full_len(&self) -> usize {
        self.full_len
    }

    pub fn get(&self, row: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&row, |&(r, _)| r)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Dense row-major matrix of 64-bit floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn from_vec(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(
                "matrix from_vec",
                format!("data len {}", data.len()),
                format!("{rows}x{cols}"),
            ));
        }
        Ok(Matrix { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dim(
                    "matrix from_rows",
                    format!("row len {}", row.len()),
                    format!("expected {c}"),
                ));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { data, rows: r, cols: c })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { data, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Contiguous view of row `r`.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Dense matrix-vector product; row `i` of the result is the dot product
    /// of row `i` with `v`, summed left to right.
    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::dim(
                "matvec",
                format!("{}x{}", self.rows, self.cols),
                format!("len {}", v.len()),
            ));
        }
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            out.push(dot_slices(self.row(r), v.as_slice()));
        }
        Ok(Vector::from_vec(out))
    }

    /// Matvec restricted to `rows` (strictly increasing indices). Each value
    /// is bit-identical to the corresponding dense matvec row; exactly
    /// `rows.len() * cols` multiply-accumulates are performed.
    pub fn matvec_rows(&self, v: &Vector, rows: &[usize]) -> Result<SparseVector> {
        if self.cols != v.len() {
            return Err(Error::dim(
                "matvec_rows",
                format!("{}x{}", self.rows, self.cols),
                format!("len {}", v.len()),
            ));
        }
        let mut prev: Option<usize> = None;
        for &r in rows {
            if r >= self.rows {
                return Err(Error::RowOutOfRange {
                    op: "matvec_rows",
                    index: r,
                    rows: self.rows,
                });
            }
            if prev.is_some_and(|p| p >= r) {
                return Err(Error::RowsNotIncreasing { op: "matvec_rows" });
            }
            prev = Some(r);
        }
        let entries = rows
            .iter()
            .map(|&r| (r, dot_slices(self.row(r), v.as_slice())))
            .collect();
        Ok(SparseVector {
            entries,
            full_len: self.rows,
        })
    }

    /// Transposed matvec: `out[k] = sum_r self[r, k] * v[r]`.
    pub fn matvec_t(&self, v: &Vector) -> Result<Vector> {
        if self.rows != v.len() {
            return Err(Error::dim(
                "matvec_t",
                format!("{}x{}", self.rows, self.cols),
                format!("len {}", v.len()),
            ));
        }
        let mut out = Vector::zeros(self.cols);
        for r in 0..self.rows {
            let w = v[r];
            for (o, &m) in out.data.iter_mut().zip(self.row(r).iter()) {
                *o += w * m;
            }
        }
        Ok(out)
    }

    /// Rank-one update `self += a * b^T`; used for weight gradients.
    pub fn add_outer(&mut self, a: &Vector, b: &Vector) -> Result<()> {
        if self.rows != a.len() || self.cols != b.len() {
            return Err(Error::dim(
                "add_outer",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", a.len(), b.len()),
            ));
        }
        for r in 0..self.rows {
            let ar = a[r];
            for (m, &bv) in self.row_mut(r).iter_mut().zip(b.as_slice().iter()) {
                *m += ar * bv;
            }
        }
        Ok(())
    }

    /// `self += alpha * other`.
    pub fn scaled_add(&mut self, alpha: f64, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(
                "scaled_add",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        for (s, &o) in self.data.iter_mut().zip(other.data.iter()) {
            *s += alpha * o;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matvec_identity() {
        let m = Matrix::identity(3);
        let v = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(m.matvec(&v).unwrap(), v);
    }

    #[test]
    fn matvec_zeros() {
        let m = Matrix::zeros(2, 3);
        let v = Vector::from_vec(vec![5.0, 5.0, 5.0]);
        assert_eq!(
            m.matvec(&v).unwrap(),
            Vector::from_vec(vec![0.0, 0.0])
        );
    }

    #[test]
    fn matvec_hand_expanded() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(m.matvec(&v).unwrap(), Vector::from_vec(vec![3.0, 7.0]));
    }

    #[test]
    fn matvec_dimension_mismatch_reports_both_shapes() {
        let m = Matrix::zeros(2, 3);
        let v = Vector::zeros(4);
        let err = m.matvec(&v).unwrap_err().to_string();
        assert!(err.contains("2x3") && err.contains("len 4"), "{err}");
    }

    #[test]
    fn matvec_rows_full_selection_matches_dense() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = Vector::from_vec(vec![1.0, 1.0]);
        let sparse = m.matvec_rows(&v, &[0, 1]).unwrap();
        assert_eq!(sparse.entries(), &[(0, 3.0), (1, 7.0)]);
    }

    #[test]
    fn matvec_rows_empty_selection() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = Vector::from_vec(vec![1.0, 1.0]);
        let sparse = m.matvec_rows(&v, &[]).unwrap();
        assert!(sparse.is_empty());
        assert_eq!(sparse.full_len(), 2);
    }

    #[test]
    fn matvec_rows_single_row() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = Vector::from_vec(vec![1.0, 1.0]);
        let sparse = m.matvec_rows(&v, &[1]).unwrap();
        assert_eq!(sparse.entries(), &[(1, 7.0)]);
        assert_eq!(sparse.get(1), Some(7.0));
        assert_eq!(sparse.get(0), None);
    }

    #[test]
    fn matvec_rows_out_of_range_names_index() {
        let m = Matrix::zeros(2, 2);
        let v = Vector::zeros(2);
        let err = m.matvec_rows(&v, &[0, 5]).unwrap_err().to_string();
        assert!(err.contains('5'), "{err}");
    }

    #[test]
    fn matvec_rows_requires_increasing_indices() {
        let m = Matrix::zeros(3, 2);
        let v = Vector::zeros(2);
        assert!(m.matvec_rows(&v, &[1, 1]).is_err());
        assert!(m.matvec_rows(&v, &[2, 0]).is_err());
    }

    #[test]
    fn sigmoid_and_tanh_at_zero() {
        assert_eq!(Vector::from_vec(vec![0.0]).sigmoid()[0], 0.5);
        assert_eq!(Vector::from_vec(vec![0.0]).tanh()[0], 0.0);
    }

    #[test]
    fn sigmoid_saturates_without_nan() {
        let v = Vector::from_vec(vec![-1e6, 1e6]).sigmoid();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 1.0);
        assert!(v.is_finite());
    }

    #[test]
    fn hadamard_hand_expanded() {
        let a = Vector::from_vec(vec![2.0, 3.0]);
        let b = Vector::from_vec(vec![4.0, 5.0]);
        assert_eq!(a.hadamard(&b).unwrap(), Vector::from_vec(vec![8.0, 15.0]));
        assert!(a.hadamard(&Vector::zeros(3)).is_err());
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-10.0f64..10.0, r * c)
                .prop_map(move |data| Matrix::from_vec(data, r, c).unwrap())
        })
    }

    proptest! {
        /// Row-restricted products agree bit-exactly with the dense path.
        #[test]
        fn sparse_rows_match_dense(m in arb_matrix(12), mask in proptest::collection::vec(any::<bool>(), 12)) {
            let v = Vector::from_fn(m.cols(), |i| (i as f64) * 0.37 - 1.0);
            let rows: Vec<usize> = (0..m.rows()).filter(|&r| mask[r]).collect();
            let dense = m.matvec(&v).unwrap();
            let sparse = m.matvec_rows(&v, &rows).unwrap();
            for &(r, val) in sparse.entries() {
                prop_assert_eq!(val.to_bits(), dense[r].to_bits());
            }
            prop_assert_eq!(sparse.len(), rows.len());
        }

        /// matvec is linear to floating-point accuracy.
        #[test]
        fn matvec_linearity(m in arb_matrix(8), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let u = Vector::from_fn(m.cols(), |i| (i as f64 * 1.3).sin());
            let w = Vector::from_fn(m.cols(), |i| (i as f64 * 0.7).cos());
            let combo = u.scale(a).add(&w.scale(b)).unwrap();
            let lhs = m.matvec(&combo).unwrap();
            let rhs = m.matvec(&u).unwrap().scale(a).add(&m.matvec(&w).unwrap().scale(b)).unwrap();
            for i in 0..lhs.len() {
                let denom = lhs[i].abs().max(rhs[i].abs()).max(1.0);
                prop_assert!(((lhs[i] - rhs[i]) / denom).abs() < 1e-12);
            }
        }
    }
}
