//! Reference embeddings: PCA, a seeded random orthonormal projection, and a
//! brute-force search used as an optimality oracle on tiny instances.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::basis::OrthonormalBasis;
use crate::dataset::UnitVectorSet;
use crate::dual_ascent::primal_distortion;
use crate::error::{Error, Result};
use crate::simplex::SimplexWeights;
use crate::spectral::{top_k_eigenpairs, weighted_moment_matrix};

/// Seed of the random stream used by [`grid_search_optimum`] when it falls
/// back to sampling bases.
const GRID_SEARCH_SEED: u64 = 0x5eed;

/// Top-k eigenvectors of (1/n) XᵀX. Identical to the uniform starting
/// iterate of the dual ascent.
pub fn pca_basis(x: &UnitVectorSet, k: usize) -> Result<OrthonormalBasis> {
    if k == 0 || k > x.d() {
        return Err(Error::DimensionRange { k, d: x.d() });
    }
    let m = weighted_moment_matrix(x, &SimplexWeights::uniform(x.n()))?;
    Ok(top_k_eigenpairs(&m, k)?.basis)
}

/// A d×k Gaussian matrix orthonormalized by Householder QR.
///
/// The generator is ChaCha20 seeded with `ChaCha20Rng::seed_from_u64(seed)`.
/// Standard normal deviates fill the matrix column by column, and each Q
/// column is signed so that R has a positive diagonal, which makes the
/// result a deterministic function of (d, k, seed).
pub fn random_orthonormal_basis(d: usize, k: usize, seed: u64) -> Result<OrthonormalBasis> {
    if k == 0 || k > d {
        return Err(Error::DimensionRange { k, d });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    gaussian_orthonormal(&mut rng, d, k)
}

fn gaussian_orthonormal(rng: &mut ChaCha20Rng, d: usize, k: usize) -> Result<OrthonormalBasis> {
    let mut g = DMatrix::<f64>::zeros(d, k);
    for c in 0..k {
        for r in 0..d {
            g[(r, c)] = rng.sample(StandardNormal);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..k {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    OrthonormalBasis::new(q)
}

#[derive(Debug, Clone)]
pub struct GridOptimum {
    pub basis: OrthonormalBasis,
    pub epsilon: f64,
}

/// Smallest max-distortion found over a fixed candidate set.
///
/// For k = 1: an angle grid θ_j = jπ/resolution when d = 2, a Fibonacci
/// sphere of `resolution` points when d = 3. Other shapes with d ≤ 4 sample
/// `resolution` random orthonormal bases. The returned ε is an upper bound on
/// the true optimum.
pub fn grid_search_optimum(x: &UnitVectorSet, k: usize, resolution: usize) -> Result<GridOptimum> {
    let d = x.d();
    if k == 0 || k > d {
        return Err(Error::DimensionRange { k, d });
    }
    if resolution < 100 {
        return Err(Error::Config(format!(
            "grid resolution must be at least 100, got {resolution}"
        )));
    }
    if d > 4 {
        return Err(Error::Unsupported(format!(
            "grid search supports d <= 4, got d={d}"
        )));
    }

    let mut best: Option<GridOptimum> = None;
    let mut consider = |v: DMatrix<f64>| -> Result<()> {
        let basis = OrthonormalBasis::new(v)?;
        let epsilon = primal_distortion(x, &basis)?.epsilon;
        if best.as_ref().is_none_or(|b| epsilon < b.epsilon) {
            best = Some(GridOptimum { basis, epsilon });
        }
        Ok(())
    };

    match (d, k) {
        (1, 1) => consider(DMatrix::from_element(1, 1, 1.0))?,
        (2, 1) => {
            for j in 0..resolution {
                let theta = std::f64::consts::PI * j as f64 / resolution as f64;
                consider(DMatrix::from_column_slice(2, 1, &[theta.cos(), theta.sin()]))?;
            }
        }
        (3, 1) => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let count = resolution as f64;
            for i in 0..resolution {
                let z = 1.0 - (2 * i + 1) as f64 / count;
                let radius = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                let v = [radius * phi.cos(), radius * phi.sin(), z];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                consider(DMatrix::from_column_slice(3, 1, &v.map(|c| c / norm)))?;
            }
        }
        _ => {
            let mut rng = ChaCha20Rng::seed_from_u64(GRID_SEARCH_SEED);
            for _ in 0..resolution {
                consider(gaussian_orthonormal(&mut rng, d, k)?.into_matrix())?;
            }
        }
    }

    best.ok_or_else(|| Error::Unsupported("empty search grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pca_picks_dominant_axis() {
        let x = UnitVectorSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let v = pca_basis(&x, 1).unwrap();
        assert!((v.matrix()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(v.matrix()[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn pca_full_and_single_row() {
        let x = UnitVectorSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let v = pca_basis(&x, 2).unwrap();
        assert!((v.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);

        let x = UnitVectorSet::from_rows(&[vec![0.6, -0.8]]).unwrap();
        let v = pca_basis(&x, 1).unwrap();
        let c = v.matrix().column(0);
        assert!((c[0] + 0.6).abs() < 1e-12 && (c[1] - 0.8).abs() < 1e-12);
        assert!(pca_basis(&x, 3).is_err());
    }

    #[test]
    fn random_basis_contracts() {
        let v = random_orthonormal_basis(5, 5, 7).unwrap();
        assert!(v.deviation() <= 1e-10);
        assert_eq!((v.d(), v.k()), (5, 5));
        assert_eq!(v, random_orthonormal_basis(5, 5, 7).unwrap());
        assert_ne!(v, random_orthonormal_basis(5, 5, 8).unwrap());
        assert!(matches!(
            random_orthonormal_basis(3, 4, 1),
            Err(Error::DimensionRange { k: 4, d: 3 })
        ));
    }

    #[test]
    fn grid_axis_pair() {
        let x = UnitVectorSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = grid_search_optimum(&x, 1, 10_000).unwrap();
        assert!((g.epsilon - 0.5).abs() < 1e-12);
        let v = g.basis.matrix();
        assert!((v[(0, 0)].abs() - v[(1, 0)].abs()).abs() < 1e-12);
    }

    #[test]
    fn grid_single_row_is_exact() {
        let x = UnitVectorSet::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!(grid_search_optimum(&x, 1, 1000).unwrap().epsilon < 1e-12);
    }

    #[test]
    fn grid_three_directions() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = UnitVectorSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]]).unwrap();
        let g = grid_search_optimum(&x, 1, 10_000).unwrap();
        assert!((g.epsilon - 0.5).abs() < 1e-12);
        assert!((g.basis.matrix()[(0, 0)] - h).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_unsupported() {
        let x = UnitVectorSet::new(DMatrix::identity(5, 5)).unwrap();
        assert!(matches!(grid_search_optimum(&x, 1, 1000), Err(Error::Unsupported(_))));
        let x = UnitVectorSet::new(DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(grid_search_optimum(&x, 1, 10), Err(Error::Config(_))));
        assert!(grid_search_optimum(&x, 3, 1000).is_err());
    }

    #[test]
    fn grid_random_fallback_for_k2() {
        let x = UnitVectorSet::new(DMatrix::identity(4, 4)).unwrap();
        let g = grid_search_optimum(&x, 2, 500).unwrap();
        assert_eq!(g.basis.k(), 2);
        // any 2-plane in R^4 misses at least half of some axis
        assert!(g.epsilon >= 0.5 - 1e-12);
    }
}
