//! JSON run report and CSV iteration trace.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so reports round-trip exactly and are byte-stable across runs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bounds::{Bound, BoundReport};
use crate::dual_ascent::{DistortionReport, EmbeddingResult, RecordKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct BaselineReports {
    pub pca: Option<DistortionReport>,
    pub random: Option<DistortionReport>,
}

/// Run settings that are not carried by the result itself.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub mode: String,
    pub iterations: usize,
    /// Wall-clock time, if it should be reported. Leaving it out keeps the
    /// report byte-identical across reruns.
    pub runtime_seconds: Option<f64>,
    /// Content hash of the parsed input matrix.
    pub input_fingerprint: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub iters: usize,
    pub eta: Option<f64>,
    pub mode: String,
    pub epsilon_alg: f64,
    pub selected_iterate: &'static str,
    pub dual_best: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_pca: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_random: Option<f64>,
    pub bound_sigma: Bound,
    pub bound_kappa: Bound,
    pub rank: usize,
    pub kappa: f64,
    pub sigma_max: f64,
    pub degenerate_iterations: usize,
    pub runtime_seconds: Option<f64>,
    pub input_fingerprint: String,
}

impl RunReport {
    pub fn new(
        result: &EmbeddingResult,
        bounds: &BoundReport,
        baselines: &BaselineReports,
        meta: &RunMeta,
    ) -> Result<Self> {
        if result.fingerprint != bounds.fingerprint {
            return Err(Error::Provenance {
                result: result.fingerprint.clone(),
                report: bounds.fingerprint.clone(),
            });
        }
        Ok(Self {
            n: bounds.n,
            d: result.basis.d(),
            k: result.basis.k(),
            iters: meta.iterations,
            eta: result.step_size,
            mode: meta.mode.clone(),
            epsilon_alg: result.distortion.epsilon,
            selected_iterate: result.selected.as_str(),
            dual_best: result.best_dual_value,
            epsilon_pca: baselines.pca.as_ref().map(|r| r.epsilon),
            epsilon_random: baselines.random.as_ref().map(|r| r.epsilon),
            bound_sigma: bounds.bound_sigma,
            bound_kappa: bounds.bound_kappa,
            rank: bounds.rank,
            kappa: bounds.kappa,
            sigma_max: bounds.sigma_max(),
            degenerate_iterations: result.degenerate_iterations(),
            runtime_seconds: meta.runtime_seconds,
            input_fingerprint: meta.input_fingerprint.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn emit_report(
    result: &EmbeddingResult,
    bounds: &BoundReport,
    baselines: &BaselineReports,
    meta: &RunMeta,
    path: &Path,
) -> Result<RunReport> {
    let report = RunReport::new(result, bounds, baselines, meta)?;
    write_file(path, report.to_json().as_bytes())?;
    Ok(report)
}

/// `t,dual_value,primal_epsilon,best_epsilon,degenerate`, one row per record.
/// The average-iterate row has `t = avg`.
pub fn trace_csv(result: &EmbeddingResult) -> String {
    let mut out = String::from("t,dual_value,primal_epsilon,best_epsilon,degenerate\n");
    for r in &result.trace {
        let t = match r.kind {
            RecordKind::Iterate => r.t.to_string(),
            RecordKind::Average => "avg".to_string(),
        };
        out.push_str(&format!(
            "{t},{:?},{:?},{:?},{}\n",
            r.dual_value,
            r.primal_epsilon,
            r.best_epsilon_so_far,
            u8::from(r.degenerate)
        ));
    }
    out
}

pub fn write_trace(result: &EmbeddingResult, path: &Path) -> Result<()> {
    write_file(path, trace_csv(result).as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)
}
