//! The `embed` command line front end.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::baselines::{pca_basis, random_orthonormal_basis};
use crate::bounds::{approximation_bound_with_tol, duality_sandwich_check, DEFAULT_RANK_TOL};
use crate::dataset::{
    load_points, normalize_rows, sample_pairs, unit_differences_for_pairs, DedupPolicy,
    LoadOptions, UnitVectorSet, DEFAULT_ROW_NORM_TOL,
};
use crate::dual_ascent::{primal_distortion, run_projected_ascent, AscentConfig, StepSize};
use crate::error::Error;
use crate::report::{write_trace, BaselineReports, RunMeta, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Embed the normalized differences of every pair of points.
    Pairwise,
    /// Rows are already directions; renormalize and embed them directly.
    Rows,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Pairwise => "pairwise",
            Mode::Rows => "rows",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Pca,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaArg(pub StepSize);

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(EtaArg(StepSize::Auto));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("expected `auto` or a number, got {s:?}"))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(format!("step size must be positive, got {s}"));
        }
        Ok(EtaArg(StepSize::Fixed(v)))
    }
}

fn parse_rank_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("rank tolerance must be nonnegative, got {s}"));
    }
    Ok(v)
}

/// Minimum-distortion orthogonal embedding by dual projected gradient ascent.
#[derive(Debug, Parser)]
#[command(name = "embed", version)]
pub struct Args {
    /// Matrix file: one point per row, comma or whitespace separated.
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value = "pairwise")]
    pub mode: Mode,

    /// Embedding dimension.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,

    /// Number of ascent iterations T.
    #[arg(long, default_value_t = 120)]
    pub iters: usize,

    /// Step size: `auto` (√2/√(nT)) or a positive number.
    #[arg(long, default_value = "auto")]
    pub eta: EtaArg,

    /// Comma-separated baselines to evaluate.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub baselines: Vec<Baseline>,

    /// Seed for the random baseline and pair sampling.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Drop coincident point pairs instead of failing.
    #[arg(long)]
    pub dedup: bool,

    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write the per-iteration CSV trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Relative singular value cutoff for the rank.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL, value_parser = parse_rank_tol)]
    pub rank_tol: f64,

    /// Use a seeded uniform sample of this many pairs (pairwise mode).
    #[arg(long)]
    pub pair_sample: Option<usize>,

    /// Record wall-clock runtime in the report (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,

    /// Log progress and diagnostics to stderr, not just warnings.
    #[arg(short, long)]
    pub verbose: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] Error),
}

/// Parses `args` (program name first), installs a stderr logger and runs.
/// Returns the exit status: 0 on success, 1 on data errors, 2 on usage errors.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = if parsed.verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    };
    // a second call in the same process keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(&parsed) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let started = Instant::now();
    let opts = LoadOptions {
        header: args.header,
        ..LoadOptions::default()
    };
    let points = load_points(&args.input, &opts)?;
    let k = usize::try_from(args.k).map_err(|_| CliError::Usage("k is too large".into()))?;
    if k > points.d() {
        return Err(CliError::Usage(format!(
            "k={k} exceeds the data dimension d={}",
            points.d()
        )));
    }
    if args.pair_sample == Some(0) {
        return Err(CliError::Usage("--pair-sample must be positive".into()));
    }

    let vectors = build_vectors(args, &points)?;
    log::info!(
        "{} unit vectors in dimension {} ({} mode)",
        vectors.n(),
        vectors.d(),
        args.mode.as_str()
    );

    let cfg = AscentConfig {
        iterations: args.iters,
        step_size: args.eta.0,
        ..AscentConfig::default()
    };
    let result = run_projected_ascent(&vectors, k, &cfg)?;
    let bounds = approximation_bound_with_tol(&vectors, args.rank_tol)?;
    for note in &bounds.diagnostics {
        log::warn!("{note}");
    }
    let sandwich = duality_sandwich_check(&result, &bounds)?;
    if let Some(ratio) = sandwich.certified_ratio {
        log::info!("certified ratio epsilon/dual = {ratio}");
    }
    let degenerate = result.degenerate_iterations();
    if degenerate > 0 {
        log::warn!("{degenerate} iterate(s) had a repeated eigenvalue at the top-k boundary");
    }

    let mut baselines = BaselineReports::default();
    for b in &args.baselines {
        match b {
            Baseline::Pca => {
                baselines.pca = Some(primal_distortion(&vectors, &pca_basis(&vectors, k)?)?);
            }
            Baseline::Random => {
                let basis = random_orthonormal_basis(vectors.d(), k, args.seed)?;
                baselines.random = Some(primal_distortion(&vectors, &basis)?);
            }
        }
    }

    let meta = RunMeta {
        mode: args.mode.as_str().to_string(),
        iterations: args.iters,
        runtime_seconds: args.timing.then(|| started.elapsed().as_secs_f64()),
        input_fingerprint: points.fingerprint(),
    };
    let report = RunReport::new(&result, &bounds, &baselines, &meta)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, json.as_bytes()).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.trace {
        write_trace(&result, path)?;
    }
    Ok(())
}

fn build_vectors(args: &Args, points: &crate::dataset::PointSet) -> Result<UnitVectorSet, CliError> {
    match args.mode {
        Mode::Rows => {
            let off = points
                .matrix()
                .row_iter()
                .map(|r| (r.norm() - 1.0).abs())
                .fold(0.0, f64::max);
            if off > DEFAULT_ROW_NORM_TOL {
                log::warn!("input rows are not unit length (max deviation {off:e}); renormalizing");
            }
            Ok(normalize_rows(points.matrix())?)
        }
        Mode::Pairwise => {
            if points.r() < 2 {
                return Err(Error::InvalidInput(
                    "pairwise mode needs at least two points".into(),
                )
                .into());
            }
            let pairs = match args.pair_sample {
                Some(count) => sample_pairs(points.r(), count, args.seed),
                None => crate::dataset::all_pairs(points.r()),
            };
            let policy = if args.dedup {
                DedupPolicy::Drop
            } else {
                DedupPolicy::Error
            };
            Ok(unit_differences_for_pairs(points, &pairs, policy)?.vectors)
        }
    }
}
