//! Dual objective, its gradient, primal distortion, and the projected
//! gradient ascent driver.
//!
//! For weights λ on the simplex the dual value is g(λ) = 1 − Σ_{j≤k} μ_j where
//! μ_1 ≥ … ≥ μ_k are the top eigenvalues of M(λ) = Σ λ_i x_i x_iᵀ. Its partial
//! derivative in λ_ℓ is −Σ_{j≤k} (x_ℓᵀ v_j)², the negated squared length of
//! x_ℓ projected onto the top-k eigenvectors. Every iterate's eigenvectors are
//! also a feasible embedding, so each step yields both a lower bound (the
//! dual value) and an upper bound (the distortion of that embedding) on the
//! optimal distortion.

use crate::basis::OrthonormalBasis;
use crate::dataset::UnitVectorSet;
use crate::error::{Error, Result};
use crate::simplex::{project_to_simplex, SimplexWeights};
use crate::spectral::{moment_matrix_raw, top_k_eigenpairs, weighted_moment_matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// √2 / √(nT), see [`default_step_size`].
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct AscentConfig {
    pub iterations: usize,
    pub step_size: StepSize,
    /// Also evaluate the mean of λ⁽¹⁾..λ⁽ᵀ⁾ and return it if it beats the best iterate.
    pub evaluate_average: bool,
    /// Iterates whose spectral gap μ_k − μ_{k+1} falls below this are flagged degenerate.
    pub degeneracy_tolerance: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            iterations: 120,
            step_size: StepSize::Auto,
            evaluate_average: true,
            degeneracy_tolerance: 1e-8,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if let StepSize::Fixed(eta) = self.step_size {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::Config(format!("step size must be positive, got {eta}")));
            }
        }
        if !(self.degeneracy_tolerance >= 0.0) {
            return Err(Error::Config("degeneracy tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    /// The step size a run with `n` vectors will use, or `None` for T = 0.
    pub fn resolve_step(&self, n: usize) -> Result<Option<f64>> {
        if self.iterations == 0 {
            return Ok(None);
        }
        match self.step_size {
            StepSize::Auto => default_step_size(n, self.iterations).map(Some),
            StepSize::Fixed(eta) => Ok(Some(eta)),
        }
    }
}

/// Per-vector distortions φ_i = 1 − ‖Vᵀx_i‖² and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub phi: Vec<f64>,
    pub epsilon: f64,
    /// First index attaining `epsilon`.
    pub argmax: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Iterate,
    Average,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub kind: RecordKind,
    pub dual_value: f64,
    pub primal_epsilon: f64,
    pub best_epsilon_so_far: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectedIterate {
    Best,
    Average,
}

impl SelectedIterate {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectedIterate::Best => "best",
            SelectedIterate::Average => "average",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub basis: OrthonormalBasis,
    pub distortion: DistortionReport,
    pub trace: Vec<IterationRecord>,
    pub selected: SelectedIterate,
    pub lambda_selected: SimplexWeights,
    /// Largest dual value seen anywhere in the trace.
    pub best_dual_value: f64,
    /// `None` when no ascent steps were taken.
    pub step_size: Option<f64>,
    /// Fingerprint of the unit vectors the run was computed on.
    pub fingerprint: String,
}

impl EmbeddingResult {
    pub fn degenerate_iterations(&self) -> usize {
        self.trace.iter().filter(|r| r.degenerate).count()
    }
}

/// g(λ) = 1 − Σ_{j≤k} μ_j(M(λ)), in [0, 1].
pub fn dual_objective(x: &UnitVectorSet, w: &SimplexWeights, k: usize) -> Result<f64> {
    check_k(x, k)?;
    if k == x.d() {
        return Ok(0.0);
    }
    let m = weighted_moment_matrix(x, w)?;
    let state = top_k_eigenpairs(&m, k)?;
    Ok((1.0 - state.eigenvalues.iter().sum::<f64>()).clamp(0.0, 1.0))
}

/// 1 − Σ_{j≤k} μ_j(Σ w_i x_i x_iᵀ) for arbitrary weights, without clamping.
/// Off the simplex this is the smooth extension of the dual objective.
pub fn dual_objective_extended(x: &UnitVectorSet, weights: &[f64], k: usize) -> Result<f64> {
    check_k(x, k)?;
    let m = moment_matrix_raw(x, weights)?;
    let state = top_k_eigenpairs(&m, k)?;
    Ok(1.0 - state.eigenvalues.iter().sum::<f64>())
}

/// ∂g/∂λ_ℓ = −Σ_{j≤k} (x_ℓᵀ v_j)². Exact where μ_k > μ_{k+1}; at a repeated
/// boundary eigenvalue it is the value for whichever eigenbasis was returned.
pub fn dual_gradient(x: &UnitVectorSet, w: &SimplexWeights, k: usize) -> Result<Vec<f64>> {
    check_k(x, k)?;
    let m = weighted_moment_matrix(x, w)?;
    let state = top_k_eigenpairs(&m, k)?;
    Ok(captured_energy(x, &state.basis)
        .into_iter()
        .map(|e| -e)
        .collect())
}

pub fn primal_distortion(x: &UnitVectorSet, v: &OrthonormalBasis) -> Result<DistortionReport> {
    if v.d() != x.d() {
        return Err(Error::Shape(format!(
            "basis has {} rows but vectors have dimension {}",
            v.d(),
            x.d()
        )));
    }
    Ok(distortion_from_energy(&captured_energy(x, v)))
}

fn distortion_from_energy(energy: &[f64]) -> DistortionReport {
    let phi: Vec<f64> = energy.iter().map(|e| (1.0 - e).max(0.0)).collect();
    let mut argmax = 0;
    for (i, &p) in phi.iter().enumerate() {
        if p > phi[argmax] {
            argmax = i;
        }
    }
    DistortionReport {
        epsilon: phi[argmax],
        argmax,
        phi,
    }
}

/// η = D/(L√T) with L = √n (gradient norm bound) and D = √2 (simplex diameter).
pub fn default_step_size(n: usize, iterations: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("step size needs at least one vector".into()));
    }
    if iterations == 0 {
        return Err(Error::Config(
            "automatic step size needs T >= 1; give an explicit step for T = 0".into(),
        ));
    }
    Ok(std::f64::consts::SQRT_2 / ((n as f64).sqrt() * (iterations as f64).sqrt()))
}

/// Projected gradient ascent on the dual, starting from uniform weights.
///
/// Every iterate (including the uniform start, which is PCA) is turned into
/// an embedding and scored; the lowest-distortion iterate is tracked with a
/// strict improvement rule. After T steps the mean of λ⁽¹⁾..λ⁽ᵀ⁾ is scored
/// too and the better of the two is returned (the mean on ties).
pub fn run_projected_ascent(
    x: &UnitVectorSet,
    k: usize,
    cfg: &AscentConfig,
) -> Result<EmbeddingResult> {
    cfg.validate()?;
    check_k(x, k)?;
    let n = x.n();
    let step = cfg.resolve_step(n)?;

    let mut lambda = SimplexWeights::uniform(n);
    let mut current = Evaluation::new(x, &lambda, k, cfg.degeneracy_tolerance)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 2);
    trace.push(current.record(0, RecordKind::Iterate, current.distortion.epsilon));

    let mut best_eps = current.distortion.epsilon;
    let mut best = (lambda.clone(), current.basis.clone(), current.distortion.clone());
    let mut sum = vec![0.0; n];

    if let Some(eta) = step {
        for t in 1..=cfg.iterations {
            let ascent: Vec<f64> = lambda
                .as_slice()
                .iter()
                .zip(&current.energy)
                .map(|(l, e)| l - eta * e)
                .collect();
            lambda = project_to_simplex(&ascent)?;
            for (s, l) in sum.iter_mut().zip(lambda.as_slice()) {
                *s += l;
            }
            current = Evaluation::new(x, &lambda, k, cfg.degeneracy_tolerance)?;
            if current.distortion.epsilon < best_eps {
                best_eps = current.distortion.epsilon;
                best = (lambda.clone(), current.basis.clone(), current.distortion.clone());
            }
            trace.push(current.record(t, RecordKind::Iterate, best_eps));
        }
    }

    let mut selected = SelectedIterate::Best;
    let (mut lambda_out, mut basis_out, mut distortion_out) = best;

    if cfg.evaluate_average && cfg.iterations > 0 {
        let scale = cfg.iterations as f64;
        let mean = SimplexWeights::new(sum.iter().map(|s| s / scale).collect())?;
        let avg = Evaluation::new(x, &mean, k, cfg.degeneracy_tolerance)?;
        let avg_eps = avg.distortion.epsilon;
        trace.push(avg.record(cfg.iterations, RecordKind::Average, best_eps.min(avg_eps)));
        if !(best_eps < avg_eps) {
            selected = SelectedIterate::Average;
            lambda_out = mean;
            basis_out = avg.basis;
            distortion_out = avg.distortion;
        }
    }

    let best_dual_value = trace
        .iter()
        .map(|r| r.dual_value)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(EmbeddingResult {
        basis: basis_out,
        distortion: distortion_out,
        trace,
        selected,
        lambda_selected: lambda_out,
        best_dual_value,
        step_size: step,
        fingerprint: x.fingerprint(),
    })
}

/// One eigendecomposition of M(λ) and everything derived from it.
struct Evaluation {
    dual: f64,
    basis: OrthonormalBasis,
    /// ‖Vᵀx_i‖², the negated gradient.
    energy: Vec<f64>,
    distortion: DistortionReport,
    degenerate: bool,
}

impl Evaluation {
    fn new(x: &UnitVectorSet, lambda: &SimplexWeights, k: usize, gap_tol: f64) -> Result<Self> {
        let m = weighted_moment_matrix(x, lambda)?;
        let state = top_k_eigenpairs(&m, k)?;
        let full = k == x.d();
        let dual = if full {
            0.0
        } else {
            (1.0 - state.eigenvalues.iter().sum::<f64>()).clamp(0.0, 1.0)
        };
        let energy = captured_energy(x, &state.basis);
        let distortion = distortion_from_energy(&energy);
        Ok(Self {
            dual,
            degenerate: !full && state.spectral_gap < gap_tol,
            basis: state.basis,
            energy,
            distortion,
        })
    }

    fn record(&self, t: usize, kind: RecordKind, best: f64) -> IterationRecord {
        IterationRecord {
            t,
            kind,
            dual_value: self.dual,
            primal_epsilon: self.distortion.epsilon,
            best_epsilon_so_far: best,
            degenerate: self.degenerate,
        }
    }
}

/// ‖Vᵀx_i‖² for every row; exactly 1 when V spans the whole space.
fn captured_energy(x: &UnitVectorSet, v: &OrthonormalBasis) -> Vec<f64> {
    if v.k() == x.d() {
        return vec![1.0; x.n()];
    }
    const BLOCK: usize = 256;
    let (n, d, k) = (x.n(), x.d(), v.k());
    // column-major n×d: coordinate r of every vector is contiguous
    let xs = x.matrix().as_slice();
    let vs = v.matrix();
    let mut energy = vec![0.0; n];
    let mut q = vec![0.0; BLOCK * k];
    for start in (0..n).step_by(BLOCK) {
        let len = BLOCK.min(n - start);
        q.fill(0.0);
        for r in 0..d {
            let col = &xs[r * n + start..r * n + start + len];
            for (j, qj) in q.chunks_exact_mut(BLOCK).enumerate() {
                let c = vs[(r, j)];
                for (qi, xi) in qj.iter_mut().zip(col) {
                    *qi += c * xi;
                }
            }
        }
        let e = &mut energy[start..start + len];
        for qj in q.chunks_exact(BLOCK) {
            for (ei, qi) in e.iter_mut().zip(qj) {
                *ei += qi * qi;
            }
        }
    }
    energy
}

fn check_k(x: &UnitVectorSet, k: usize) -> Result<()> {
    if k == 0 || k > x.d() {
        return Err(Error::DimensionRange { k, d: x.d() });
    }
    Ok(())
}
