//! Dense complex linear algebra: matrices, tensor products, partial traces,
//! Hermitian eigendecomposition and fractional matrix powers.
//!
//! Everything follows a single index convention: composite indices are
//! row-major with the left tensor factor most significant.

mod eigen;

pub use eigen::{
    hermitian_eig, matrix_power, support_projector, trace_distance, trace_norm_hermitian,
    EigenSystem, HermitianOperator,
};

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

/// Dense complex matrix with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<Complex64>,
}

impl ComplexMatrix {
    pub fn new(data: Array2<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: Array2::eye(dim),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            data: Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)),
        }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let entries: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&entries)
    }

    /// Column vector from amplitudes.
    pub fn ket(amplitudes: &[Complex64]) -> Self {
        Self::from_fn(amplitudes.len(), 1, |i, _| amplitudes[i])
    }

    /// Standard basis column vector |k⟩.
    pub fn basis_ket(dim: usize, k: usize) -> Self {
        Self::from_fn(dim, 1, |i, _| {
            if i == k {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[(i, j)] = v;
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            other.rows(),
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            other.rows(),
            other.cols()
        );
        ComplexMatrix::new(self.data.dot(&other.data))
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::new(&self.data + &other.data)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::new(&self.data - &other.data)
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix::new(self.data.mapv(|x| x * c))
    }

    pub fn scale_real(&self, c: f64) -> ComplexMatrix {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.data.t().mapv(|x| x.conj()))
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise modulus of self - other.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entrywise hermiticity defect |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut defect: f64 = 0.0;
        for i in 0..self.rows() {
            for j in i..self.cols() {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    /// (M + M†)/2.
    pub fn symmetrized(&self) -> ComplexMatrix {
        self.add(&self.adjoint()).scale_real(0.5)
    }

    /// Max entrywise modulus of the commutator [self, other].
    pub fn commutator_defect(&self, other: &ComplexMatrix) -> f64 {
        self.matmul(other).max_abs_diff(&other.matmul(self))
    }

    /// Max entrywise |M†M - I|.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.rows()))
    }

    /// U M U†.
    pub fn conjugate_with(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.matmul(self).matmul(&u.adjoint())
    }
}

/// Kronecker product with the left factor most significant.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a.get(i / rb, j / cb) * b.get(i % rb, j % cb)
    })
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_product_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty(), "tensor_product_all needs factors");
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = tensor_product(&out, f);
    }
    out
}

/// Trace over every tensor factor not listed in `keep`, preserving the
/// tensor order of the kept factors.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace: matrix is {}x{}, factor dims {:?} give {}",
            m.rows(),
            m.cols(),
            dims,
            total
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidInput(format!(
            "partial_trace: keep set {:?} outside 0..{}",
            keep,
            dims.len()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();

    let traced: Vec<usize> = (0..dims.len())
        .filter(|i| !keep_sorted.contains(i))
        .collect();
    let keep_dim: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor in the composite row-major index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let unrank = |mut x: usize, subset: &[usize]| -> usize {
        // Map a flat index over `subset` factors to its composite offset.
        let mut offset = 0;
        for &f in subset.iter().rev() {
            offset += (x % dims[f]) * strides[f];
            x /= dims[f];
        }
        offset
    };

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for i in 0..keep_dim {
        let oi = unrank(i, &keep_sorted);
        for j in 0..keep_dim {
            let oj = unrank(j, &keep_sorted);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let ot = unrank(t, &traced);
                acc += m.get(oi + ot, oj + ot);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    #[test]
    fn tensor_product_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_product_of_diagonals() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[1.0, 3.0]);
        let expected = ComplexMatrix::from_real_diag(&[1.0, 3.0, 2.0, 6.0]);
        assert_eq!(tensor_product(&a, &b), expected);
    }

    #[test]
    fn tensor_product_mixed_product_identity() {
        // (A⊗B)(C⊗D) = AC ⊗ BD, checked against direct multiplication.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..8 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let cm = random_matrix(&mut rng, 2, 2);
            let d = random_matrix(&mut rng, 2, 2);
            let lhs = tensor_product(&a, &b).matmul(&tensor_product(&cm, &d));
            let rhs = tensor_product(&a.matmul(&cm), &b.matmul(&d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn tensor_product_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..6 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 3, 3);
            let cm = random_matrix(&mut rng, 2, 2);
            let lhs = tensor_product(&tensor_product(&a, &b), &cm);
            let rhs = tensor_product(&a, &tensor_product(&b, &cm));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (da, db) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let a = random_matrix(&mut rng, da, da);
            let b = random_matrix(&mut rng, db, db);
            let joint = tensor_product(&a, &b);
            let first = partial_trace(&joint, &[da, db], &[0]).unwrap();
            let second = partial_trace(&joint, &[da, db], &[1]).unwrap();
            assert!(first.max_abs_diff(&a.scale(b.trace())) < 1e-12);
            assert!(second.max_abs_diff(&b.scale(a.trace())) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_identity() {
        let i4 = ComplexMatrix::identity(4);
        let out = partial_trace(&i4, &[2, 2], &[0]).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        // Summation oracle: total trace equals the sum over paired indices.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let g = random_matrix(&mut rng, 4, 4);
        let rho = {
            let gg = g.matmul(&g.adjoint());
            let t = gg.trace().re;
            gg.scale_real(1.0 / t)
        };
        let out = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!((out.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_middle_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 3, 3);
        let cm = random_matrix(&mut rng, 2, 2);
        let joint = tensor_product_all(&[&a, &b, &cm]);
        let kept = partial_trace(&joint, &[2, 3, 2], &[0, 2]).unwrap();
        let expected = tensor_product(&a, &cm).scale(b.trace());
        assert!(kept.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let i4 = ComplexMatrix::identity(4);
        let err = partial_trace(&i4, &[2, 3], &[0]).unwrap_err();
        assert!(err.is_input());
    }
}
