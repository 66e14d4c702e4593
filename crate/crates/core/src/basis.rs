use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Bound on max |VᵀV − I| accepted for a basis.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// A d×k matrix with orthonormal columns; the embedding is x ↦ Vᵀx.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    v: DMatrix<f64>,
}

impl OrthonormalBasis {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        let (d, k) = v.shape();
        if k == 0 || k > d {
            return Err(Error::DimensionRange { k, d });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("basis has non-finite entries".into()));
        }
        let deviation = orthonormality_deviation(&v);
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { v })
    }

    /// The first k standard basis vectors of R^d.
    pub fn standard(d: usize, k: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, k))
    }

    pub fn d(&self) -> usize {
        self.v.nrows()
    }

    pub fn k(&self) -> usize {
        self.v.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.v
    }

    /// max |VᵀV − I_k| entrywise.
    pub fn deviation(&self) -> f64 {
        orthonormality_deviation(&self.v)
    }
}

pub(crate) fn orthonormality_deviation(v: &DMatrix<f64>) -> f64 {
    let gram = v.tr_mul(v);
    let k = gram.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((gram[(a, b)] - target).abs());
        }
    }
    worst
}
