//! Singular spectrum of the data and the spectral approximation guarantee
//!
//! ε_ALG / p* ≤ 1/(1 − σ₁²/n) ≤ 1/(1 − κ²/ℓ),
//!
//! where σ₁ is the largest singular value of X, ℓ its rank, κ = σ₁/σ_ℓ, and
//! n = Σσ_i² because every row of X has unit length.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::dataset::UnitVectorSet;
use crate::dual_ascent::EmbeddingResult;
use crate::error::{Error, Result};

/// Singular values at or below `DEFAULT_RANK_TOL · σ₁` do not count toward the rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Rows per block when tall inputs are reduced before the SVD.
const QR_BLOCK: usize = 512;

/// Slack allowed on weak duality before it is treated as a violation.
pub const DUALITY_SLACK: f64 = 1e-8;

/// A bound that may be vacuous. Serializes as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_f64(*v),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    /// σ_1 ≥ … ≥ σ_d ≥ 0, zero-padded to length d.
    pub values: Vec<f64>,
    pub rank: usize,
    /// σ_1 / σ_ℓ.
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub kappa: f64,
    /// 1/(1 − σ₁²/n).
    pub bound_sigma: Bound,
    /// 1/(1 − κ²/ℓ); infinite when κ² ≥ ℓ.
    pub bound_kappa: Bound,
    /// Σ_{i≤ℓ} σ_i², equal to n up to roundoff and the rank cutoff.
    pub spectrum_sum_check: f64,
    pub n: usize,
    pub fingerprint: String,
    pub diagnostics: Vec<String>,
}

impl BoundReport {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

pub fn singular_spectrum(x: &UnitVectorSet, rank_tol: f64) -> Result<SingularSpectrum> {
    if !(rank_tol >= 0.0 && rank_tol.is_finite()) {
        return Err(Error::Config(format!("rank tolerance must be nonnegative, got {rank_tol}")));
    }
    let mut values: Vec<f64> = reduce_rows(x.matrix())
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s.abs())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(x.d(), 0.0);

    let top = values[0];
    let rank = values.iter().filter(|&&s| s > rank_tol * top).count();
    let kappa = if rank == 0 { 1.0 } else { top / values[rank - 1] };
    Ok(SingularSpectrum {
        values,
        rank,
        kappa,
    })
}

/// A matrix with at most max(d, QR_BLOCK) rows and the same singular values
/// as `a`: Householder QR applied block by block, each new block stacked under
/// the running triangular factor. Keeps the working set small for tall inputs.
fn reduce_rows(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = a.shape();
    if n <= QR_BLOCK.max(2 * d) {
        return a.clone();
    }
    let mut r: Option<DMatrix<f64>> = None;
    let mut start = 0;
    while start < n {
        let rows = QR_BLOCK.min(n - start);
        let block = a.rows(start, rows);
        let stacked = match r.take() {
            None => block.into_owned(),
            Some(prev) => {
                let mut s = DMatrix::zeros(prev.nrows() + rows, d);
                s.rows_mut(0, prev.nrows()).copy_from(&prev);
                s.rows_mut(prev.nrows(), rows).copy_from(&block);
                s
            }
        };
        r = Some(stacked.qr().r());
        start += rows;
    }
    r.expect("n > 0")
}

pub fn approximation_bound(x: &UnitVectorSet) -> Result<BoundReport> {
    approximation_bound_with_tol(x, DEFAULT_RANK_TOL)
}

pub fn approximation_bound_with_tol(x: &UnitVectorSet, rank_tol: f64) -> Result<BoundReport> {
    let spectrum = singular_spectrum(x, rank_tol)?;
    let n = x.n() as f64;
    let rank = spectrum.rank;
    let s1_sq = spectrum.values[0] * spectrum.values[0];
    let spectrum_sum_check: f64 = spectrum.values[..rank].iter().map(|s| s * s).sum();
    let mut diagnostics = Vec::new();

    let (bound_sigma, bound_kappa) = if rank <= 1 {
        diagnostics.push(
            "data has rank 1 (sigma_1^2 = n); the approximation bounds are vacuous".to_string(),
        );
        (Bound::Infinite, Bound::Infinite)
    } else {
        let sigma = if s1_sq < n {
            Bound::Finite(n / (n - s1_sq))
        } else {
            Bound::Infinite
        };
        let l = rank as f64;
        let k_sq = spectrum.kappa * spectrum.kappa;
        let kappa = if k_sq < l {
            Bound::Finite(l / (l - k_sq))
        } else {
            diagnostics.push(format!(
                "kappa^2 = {k_sq} >= rank {rank}; the condition-number bound is vacuous"
            ));
            Bound::Infinite
        };
        (sigma, kappa)
    };

    Ok(BoundReport {
        singular_values: spectrum.values,
        rank,
        kappa: spectrum.kappa,
        bound_sigma,
        bound_kappa,
        spectrum_sum_check,
        n: x.n(),
        fingerprint: x.fingerprint(),
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichDiagnostic {
    pub epsilon: f64,
    pub best_dual: f64,
    /// ε_ALG / best dual value, an upper bound on ε_ALG / p*. `None` when the
    /// dual value is not positive.
    pub certified_ratio: Option<f64>,
    /// Both ε_ALG and the dual value are zero: the embedding is exact.
    pub exact_optimum: bool,
    pub bound_sigma: Bound,
    pub bound_kappa: Bound,
}

impl SandwichDiagnostic {
    /// Checks the certified ratio against the spectral bounds. Only meaningful
    /// when the best dual value is taken to be the dual optimum.
    pub fn check_bounds(&self) -> Result<()> {
        let Some(ratio) = self.certified_ratio else {
            return Ok(());
        };
        for bound in [self.bound_sigma, self.bound_kappa] {
            if let Bound::Finite(b) = bound {
                if ratio > b + 1e-9 {
                    return Err(Error::BoundViolation { ratio, bound: b });
                }
            }
        }
        Ok(())
    }
}

/// Verifies best dual ≤ ε_ALG and reports the certified ratio.
pub fn duality_sandwich_check(
    result: &EmbeddingResult,
    report: &BoundReport,
) -> Result<SandwichDiagnostic> {
    if result.fingerprint != report.fingerprint {
        return Err(Error::Provenance {
            result: result.fingerprint.clone(),
            report: report.fingerprint.clone(),
        });
    }
    let epsilon = result.distortion.epsilon;
    let best_dual = result.best_dual_value;
    if best_dual > epsilon + DUALITY_SLACK {
        return Err(Error::SandwichViolation {
            dual: best_dual,
            epsilon,
        });
    }
    let exact_optimum = epsilon <= 1e-12 && best_dual <= 1e-12;
    let certified_ratio = (!exact_optimum && best_dual > 0.0).then(|| epsilon / best_dual);
    Ok(SandwichDiagnostic {
        epsilon,
        best_dual,
        certified_ratio,
        exact_optimum,
        bound_sigma: report.bound_sigma,
        bound_kappa: report.bound_kappa,
    })
}
