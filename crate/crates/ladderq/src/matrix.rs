//! Dense complex matrices over f64, the carrier for every operator here.
//!
//! A thin wrapper around [`nalgebra::DMatrix<Complex64>`] that fixes the JSON
//! wire format (`{"rows": N, "cols": N, "entries": [[re, im], ...]}` in
//! row-major order) and collects the handful of operations the rest of the
//! crate needs: adjoints, Kronecker products, commutators and Hermitian
//! eigendecompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { inner: DMatrix::from_fn(rows, cols, f) }
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        })
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.inner[(i, j)] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { inner: &self.inner + &other.inner }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { inner: &self.inner - &other.inner }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { inner: &self.inner * &other.inner }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { inner: self.inner.map(|z| z * factor) }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self { inner: self.inner.map(|z| z * factor) }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose() }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.diagonal().sum()
    }

    /// Largest entry magnitude; zero for empty matrices.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ab − ba. Errors on non-conformable shapes.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() || self.rows() != other.rows() || !other.is_square() {
            return Err(Error::ShapeMismatch {
                expected: format!("square {0}x{0} pair", self.rows()),
                got: format!("{}x{} and {}x{}", self.rows(), self.cols(), other.rows(), other.cols()),
            });
        }
        Ok(self.mul(other).sub(&other.mul(self)))
    }

    /// Kronecker product, self ⊗ other (self-major index ordering).
    pub fn kron(&self, other: &Self) -> Self {
        Self { inner: self.inner.kronecker(&other.inner) }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.adjoint()).max_abs() <= tol
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Returns eigenvalues in ascending order and the matching unitary of
    /// column eigenvectors. The input is trusted to be Hermitian; callers
    /// validate with [`is_hermitian`](Self::is_hermitian) where it matters.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let n = self.rows();
        let eig = self.inner.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, Self { inner: vectors })
    }

    /// Eigenvalues only, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        self.hermitian_eigen().0
    }

    /// Apply a column vector: self · v.
    pub fn mul_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = DVector::from_column_slice(v);
        (&self.inner * x).iter().copied().collect()
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            rows: usize,
            cols: usize,
            entries: &'a [[f64; 2]],
        }
        let mut entries = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Wire { rows: self.rows(), cols: self.cols(), entries: &entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            rows: usize,
            cols: usize,
            entries: Vec<[f64; 2]>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.entries.len() != w.rows * w.cols {
            return Err(D::Error::custom(format!(
                "matrix payload has {} entries for shape {}x{}",
                w.entries.len(),
                w.rows,
                w.cols
            )));
        }
        let mut m = ComplexMatrix::zeros(w.rows, w.cols);
        for i in 0..w.rows {
            for j in 0..w.cols {
                let [re, im] = w.entries[i * w.cols + j];
                m.set(i, j, Complex64::new(re, im));
            }
        }
        Ok(m)
    }
}
