//! The weighted second-moment matrix M(λ) = Σ λ_i x_i x_iᵀ and its top-k
//! eigenpairs.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::basis::OrthonormalBasis;
use crate::dataset::UnitVectorSet;
use crate::error::{Error, Result};
use crate::simplex::SimplexWeights;

/// Vectors per gemm call when building M; sized to stay in cache.
const MOMENT_CHUNK: usize = 1024;

/// Max |M − Mᵀ| accepted by the eigen routines.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Top-k eigenpairs of a symmetric matrix, in descending eigenvalue order.
#[derive(Debug, Clone)]
pub struct SpectralState {
    pub eigenvalues: Vec<f64>,
    pub basis: OrthonormalBasis,
    /// μ_k − μ_{k+1}, with μ_{k+1} taken as 0 when k = d.
    pub spectral_gap: f64,
}

pub fn weighted_moment_matrix(x: &UnitVectorSet, w: &SimplexWeights) -> Result<DMatrix<f64>> {
    moment_matrix_raw(x, w.as_slice())
}

/// Σ w_i x_i x_iᵀ for arbitrary weights. Used for off-simplex evaluation,
/// e.g. finite differences of the dual objective.
pub fn moment_matrix_raw(x: &UnitVectorSet, weights: &[f64]) -> Result<DMatrix<f64>> {
    if weights.len() != x.n() {
        return Err(Error::Shape(format!(
            "{} weights for {} vectors",
            weights.len(),
            x.n()
        )));
    }
    let d = x.d();
    // projected iterates are often sparse
    let active: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] != 0.0).collect();
    let mut m = DMatrix::<f64>::zeros(d, d);
    let mut left = Vec::with_capacity(MOMENT_CHUNK * d);
    let mut right = Vec::with_capacity(MOMENT_CHUNK * d);
    for chunk in active.chunks(MOMENT_CHUNK) {
        left.clear();
        right.clear();
        for &i in chunk {
            let p = x.point(i);
            left.extend_from_slice(p);
            right.extend(p.iter().map(|v| v * weights[i]));
        }
        // SAFETY: left and right hold chunk.len() contiguous columns of length d
        // and m is d×d column-major, matching the strides passed.
        unsafe {
            matrixmultiply::dgemm(
                d,
                chunk.len(),
                d,
                1.0,
                left.as_ptr(),
                1,
                d as isize,
                right.as_ptr(),
                d as isize,
                1,
                1.0,
                m.as_mut_ptr(),
                1,
                d as isize,
            );
        }
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Every eigenvalue of a symmetric matrix, descending.
pub fn full_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let (values, _) = sorted_eigen(m);
    Ok(values)
}

pub fn top_k_eigenpairs(m: &DMatrix<f64>, k: usize) -> Result<SpectralState> {
    check_symmetric(m)?;
    let d = m.nrows();
    if k == 0 || k > d {
        return Err(Error::DimensionRange { k, d });
    }
    let (values, vectors) = sorted_eigen(m);
    let next = if k < d { values[k] } else { 0.0 };
    let spectral_gap = values[k - 1] - next;
    let basis = OrthonormalBasis::new(vectors.columns(0, k).into_owned())?;
    Ok(SpectralState {
        eigenvalues: values[..k].to_vec(),
        basis,
        spectral_gap,
    })
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Shape(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            worst = worst.max((m[(a, b)] - m[(b, a)]).abs());
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if worst > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            max_asymmetry: worst,
        });
    }
    Ok(())
}

/// Eigenvalues descending (ties by original index) with eigenvector columns
/// in the same order. Each eigenvector's largest-magnitude entry is made
/// positive, lowest index winning magnitude ties.
fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
    });

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for r in 1..d {
            if col[r].abs() > col[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    (values, vectors)
}
