//! Data-adaptive orthogonal embeddings that minimize the maximum squared-length
//! distortion of a set of unit vectors.
//!
//! The embedding is found by projected gradient ascent on the Lagrangian dual
//! of a relaxed min-max problem: the dual variables live on the probability
//! simplex, each dual point defines a weighted second-moment matrix, and the
//! top-k eigenvectors of that matrix are a feasible embedding. PCA and random
//! orthonormal projections are provided as baselines, together with a
//! spectral bound on the approximation ratio.

pub mod baselines;
pub mod basis;
pub mod bounds;
pub mod cli;
pub mod dataset;
pub mod dual_ascent;
pub mod error;
pub mod report;
pub mod simplex;
pub mod spectral;

pub use basis::OrthonormalBasis;
pub use bounds::{approximation_bound, duality_sandwich_check, singular_spectrum, Bound, BoundReport};
pub use dataset::{
    load_points, normalize_rows, pairwise_unit_differences, DedupPolicy, PointSet, UnitVectorSet,
};
pub use dual_ascent::{
    default_step_size, dual_gradient, dual_objective, primal_distortion, run_projected_ascent,
    AscentConfig, DistortionReport, EmbeddingResult, IterationRecord, StepSize,
};
pub use error::{Error, Result};
pub use simplex::{is_on_simplex, project_to_simplex, SimplexWeights};
pub use spectral::{top_k_eigenpairs, weighted_moment_matrix, SpectralState};
