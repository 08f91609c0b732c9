//! Hermitian operators, eigendecompositions and eigenvalue functional
//! calculus (fractional powers, support projectors, trace norms).

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tol;
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use std::ops::Range;

/// Square complex matrix certified Hermitian; the stored matrix is the
/// symmetrization (M + M†)/2 of the input.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    dim: usize,
    matrix: ComplexMatrix,
    hermiticity_defect: f64,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, tol::HERMITICITY)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        let dim = matrix.rows();
        Ok(Self {
            dim,
            matrix: matrix.symmetrized(),
            hermiticity_defect: defect,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }
}

/// Eigendecomposition of a Hermitian operator with eigenvalues ascending
/// and eigenvalues clustered into degenerate groups.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    degeneracy_groups: Vec<Range<usize>>,
    reconstruction_defect: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are orthonormal eigenvectors, ordered like `eigenvalues`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn degeneracy_groups(&self) -> &[Range<usize>] {
        &self.degeneracy_groups
    }

    pub fn reconstruction_defect(&self) -> f64 {
        self.reconstruction_defect
    }

    /// Eigenvector column k as a ket.
    pub fn eigenvector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), 1, |i, _| self.eigenvectors.get(i, k))
    }

    /// Projector onto the eigenspace spanned by the columns in `group`.
    pub fn group_projector(&self, group: &Range<usize>) -> ComplexMatrix {
        let d = self.dim();
        let mut p = ComplexMatrix::zeros(d, d);
        for k in group.clone() {
            for i in 0..d {
                let vi = self.eigenvectors.get(i, k);
                for j in 0..d {
                    let vj = self.eigenvectors.get(j, k).conj();
                    p.set(i, j, p.get(i, j) + vi * vj);
                }
            }
        }
        p
    }

    /// V f(Λ) V† for a real scalar function of the eigenvalues.
    pub fn apply_real(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.apply_complex(|x| Complex64::new(f(x), 0.0))
    }

    /// V f(Λ) V† for a complex scalar function of the eigenvalues.
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..d {
            let fk = f(self.eigenvalues[k]);
            for i in 0..d {
                scaled.set(i, k, scaled.get(i, k) * fk);
            }
        }
        scaled.matmul(&self.eigenvectors.adjoint())
    }

    /// Transform into the eigenbasis: V† M V.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors
            .adjoint()
            .matmul(m)
            .matmul(&self.eigenvectors)
    }

    /// Transform back from the eigenbasis: V M V†.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors
            .matmul(m)
            .matmul(&self.eigenvectors.adjoint())
    }

    /// Cutoff below which an eigenvalue counts as zero, relative to the
    /// largest eigenvalue magnitude.
    pub fn support_cutoff(&self) -> f64 {
        let max = self.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        tol::SUPPORT_CUTOFF_REL * max
    }

    /// Rank after discarding eigenvalues at or below the support cutoff.
    pub fn support_rank(&self) -> usize {
        let cut = self.support_cutoff();
        self.eigenvalues.iter().filter(|&&x| x > cut).count()
    }
}

/// Jacobi polish: rotate away residual off-diagonal mass left by the bulk
/// solver. `b` is (nearly) diagonal Hermitian; rotations accumulate into
/// the eigenvector matrix `v`. Converges quadratically from an almost
/// diagonal start, so the cost is a few O(d²) scans plus a handful of
/// O(d) rotations.
fn jacobi_polish(b: &mut ComplexMatrix, v: &mut ComplexMatrix) {
    let d = b.rows();
    let scale = b.max_abs().max(f64::MIN_POSITIVE);
    let stop = 4.0 * f64::EPSILON * scale;
    for _sweep in 0..12 {
        let mut worst = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                worst = worst.max(b.get(p, q).norm());
            }
        }
        if worst <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let a = b.get(p, q);
                let g = a.norm();
                if g <= stop {
                    continue;
                }
                let phase = a / Complex64::new(g, 0.0);
                let theta = 0.5 * (2.0 * g).atan2(b.get(p, p).re - b.get(q, q).re);
                let (c, s) = (theta.cos(), theta.sin());
                // Unitary on the (p,q) plane: U_pp = c, U_pq = -s,
                // U_qp = s·e^{-iφ}, U_qq = c·e^{-iφ} with φ = arg(a).
                let se_m = Complex64::new(s, 0.0) * phase.conj();
                let ce_m = Complex64::new(c, 0.0) * phase.conj();
                let se_p = se_m.conj();
                let ce_p = ce_m.conj();
                // B <- U† B (rows p, q).
                for j in 0..d {
                    let bp = b.get(p, j);
                    let bq = b.get(q, j);
                    b.set(p, j, bp * c + bq * se_p);
                    b.set(q, j, -bp * s + bq * ce_p);
                }
                // B <- B U and V <- V U (columns p, q).
                for i in 0..d {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, bp * c + bq * se_m);
                    b.set(i, q, -bp * s + bq * ce_m);
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, vp * c + vq * se_m);
                    v.set(i, q, -vp * s + vq * ce_m);
                }
                // The rotation zeroes (p,q) by construction; pin it and
                // keep the diagonal real against rounding drift.
                b.set(p, q, Complex64::new(0.0, 0.0));
                b.set(q, p, Complex64::new(0.0, 0.0));
                b.set(p, p, Complex64::new(b.get(p, p).re, 0.0));
                b.set(q, q, Complex64::new(b.get(q, q).re, 0.0));
            }
        }
    }
}

fn group_by_gap(eigenvalues: &[f64], gap: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let n = eigenvalues.len();
    let mut start = 0;
    for i in 1..n {
        if eigenvalues[i] - eigenvalues[i - 1] > gap {
            groups.push(start..i);
            start = i;
        }
    }
    if n > 0 {
        groups.push(start..n);
    }
    groups
}

/// Eigendecomposition of a Hermitian operator; eigenvalues ascending,
/// degeneracies grouped by the given gap threshold.
pub fn hermitian_eig(a: &HermitianOperator, degeneracy_tol: f64) -> Result<EigenSystem> {
    let d = a.dim();
    let m = a.matrix();

    // Exactly diagonal inputs (common: lab-frame Hamiltonians, Gibbs states
    // in their own basis) skip the solver entirely.
    let mut diagonal = true;
    'outer: for i in 0..d {
        for j in 0..d {
            if i != j && m.get(i, j) != Complex64::new(0.0, 0.0) {
                diagonal = false;
                break 'outer;
            }
        }
    }

    let (eigenvalues, eigenvectors) = if diagonal {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| m.get(i, i).re.partial_cmp(&m.get(j, j).re).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
        let mut vecs = ComplexMatrix::zeros(d, d);
        for (col, &row) in order.iter().enumerate() {
            vecs.set(row, col, Complex64::new(1.0, 0.0));
        }
        (vals, vecs)
    } else {
        let mut na = DMatrix::<Complex<f64>>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let z = m.get(i, j);
                na[(i, j)] = Complex::new(z.re, z.im);
            }
        }
        let eig = nalgebra::SymmetricEigen::try_new(na, f64::EPSILON, tol::EIG_MAX_ITER).ok_or(
            Error::EigenConvergence {
                max_iterations: tol::EIG_MAX_ITER,
            },
        )?;
        let mut vecs = ComplexMatrix::from_fn(d, d, |i, k| {
            let z = eig.eigenvectors[(i, k)];
            Complex64::new(z.re, z.im)
        });
        // The QL pass can leave eigenpair residuals around 1e-9; rotate the
        // remaining off-diagonal mass away at machine level.
        let mut rotated = vecs.adjoint().matmul(m).matmul(&vecs);
        jacobi_polish(&mut rotated, &mut vecs);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| {
            rotated
                .get(i, i)
                .re
                .partial_cmp(&rotated.get(j, j).re)
                .unwrap()
        });
        let vals: Vec<f64> = order.iter().map(|&i| rotated.get(i, i).re).collect();
        let sorted = ComplexMatrix::from_fn(d, d, |i, k| vecs.get(i, order[k]));
        (vals, sorted)
    };

    let orth_defect = eigenvectors.unitarity_defect();
    if orth_defect > tol::ORTHONORMALITY {
        return Err(Error::Numeric(format!(
            "eigenbasis orthonormality defect {orth_defect:.3e}"
        )));
    }
    let sys = EigenSystem {
        degeneracy_groups: group_by_gap(&eigenvalues, degeneracy_tol),
        eigenvalues,
        eigenvectors,
        reconstruction_defect: 0.0,
    };
    let recon = sys.apply_real(|x| x);
    let recon_defect = recon.max_abs_diff(m);
    if recon_defect > tol::RECONSTRUCTION {
        return Err(Error::Numeric(format!(
            "eigendecomposition reconstruction defect {recon_defect:.3e}"
        )));
    }
    Ok(EigenSystem {
        reconstruction_defect: recon_defect,
        ..sys
    })
}

/// A^t by eigenvalue functional calculus on the support of A.
///
/// Eigenvalues at or below the support cutoff map to 0, so negative `t`
/// yields the pseudo-inverse power. Eigenvalues more negative than the PSD
/// tolerance are rejected.
pub fn matrix_power(a: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    let eig = hermitian_eig(a, tol::DEGENERACY_GAP)?;
    let min = eig.eigenvalues().first().copied().unwrap_or(0.0);
    if min < -tol::PSD {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let cut = eig.support_cutoff();
    let powered = eig.apply_real(|x| if x <= cut { 0.0 } else { x.powf(t) });
    HermitianOperator::with_tolerance(powered, 1e-8)
}

/// Projector onto the support of a PSD Hermitian operator.
pub fn support_projector(eig: &EigenSystem) -> ComplexMatrix {
    let cut = eig.support_cutoff();
    eig.apply_real(|x| if x > cut { 1.0 } else { 0.0 })
}

/// Trace norm ‖M‖₁ = Σ|λ| of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let op = HermitianOperator::with_tolerance(m.clone(), 1e-6)?;
    let eig = hermitian_eig(&op, tol::DEGENERACY_GAP)?;
    Ok(eig.eigenvalues().iter().map(|x| x.abs()).sum())
}

/// Trace distance ½‖A - B‖₁ between Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm_hermitian(&a.sub(b))?)
}
