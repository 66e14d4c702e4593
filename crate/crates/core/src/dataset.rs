//! Dataset ingestion and the two ways of turning raw points into unit vectors:
//! normalizing each row, or normalizing every pairwise difference.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Rows whose norm is within this distance of 1 are accepted as-is.
pub const DEFAULT_ROW_NORM_TOL: f64 = 1e-9;
/// Rows whose norm is within this distance of 1 are silently renormalized.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

/// Raw data points, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: DMatrix<f64>,
}

impl PointSet {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        check_finite(&points)?;
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Number of points.
    pub fn r(&self) -> usize {
        self.points.nrows()
    }

    /// Ambient dimension.
    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.points * factor)
    }

    /// SHA-256 over the shape and the row-major little-endian entries.
    pub fn fingerprint(&self) -> String {
        fingerprint(&self.points)
    }
}

/// An n×d matrix whose rows are unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorSet {
    rows: DMatrix<f64>,
    /// The transpose, so that each vector is a contiguous column.
    points: DMatrix<f64>,
    row_norm_tolerance: f64,
    fingerprint: String,
}

impl UnitVectorSet {
    /// Validates unit rows. Rows off by less than [`RENORMALIZE_LIMIT`] are
    /// renormalized, anything further away is rejected.
    pub fn new(mut rows: DMatrix<f64>) -> Result<Self> {
        if rows.nrows() == 0 || rows.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        check_finite(&rows)?;
        for i in 0..rows.nrows() {
            let norm = rows.row(i).norm();
            let off = (norm - 1.0).abs();
            if off <= DEFAULT_ROW_NORM_TOL {
                continue;
            }
            if off <= RENORMALIZE_LIMIT {
                rows.row_mut(i).unscale_mut(norm);
            } else {
                return Err(Error::NotUnit { row: i, norm });
            }
        }
        Ok(Self {
            points: rows.transpose(),
            fingerprint: fingerprint(&rows),
            rows,
            row_norm_tolerance: DEFAULT_ROW_NORM_TOL,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn d(&self) -> usize {
        self.rows.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// The d×n transpose: vector i is column i.
    pub fn columns(&self) -> &DMatrix<f64> {
        &self.points
    }

    /// Row i as a contiguous slice of length d.
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.points.as_slice()[i * d..(i + 1) * d]
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.rows.row(i).transpose()
    }

    pub fn row_norm_tolerance(&self) -> f64 {
        self.row_norm_tolerance
    }

    /// max_i | ‖x_i‖ − 1 |
    pub fn max_norm_deviation(&self) -> f64 {
        self.rows
            .row_iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// SHA-256 of the shape and row-major contents, computed at construction.
    pub fn fingerprint(&self) -> String {
        self.fingerprint.clone()
    }
}

/// How the columns of a text matrix are separated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    /// Commas if the line contains one, whitespace otherwise.
    #[default]
    Auto,
    Comma,
    Whitespace,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub format: MatrixFormat,
    /// Skip the first line of the file.
    pub header: bool,
}

pub fn load_points(path: &Path, opts: &LoadOptions) -> Result<PointSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_points(&text, opts)
}

/// Parses one point per line. Blank lines and lines starting with `#` are
/// skipped; line numbers in errors are one-based and refer to the raw text.
pub fn parse_points(text: &str, opts: &LoadOptions) -> Result<PointSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if opts.header && idx == 0 {
            continue;
        }
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let comma = match opts.format {
            MatrixFormat::Comma => true,
            MatrixFormat::Whitespace => false,
            MatrixFormat::Auto => line.contains(','),
        };
        let cells: Vec<&str> = if comma {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };

        let mut row = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("empty cell in column {}", col + 1),
                });
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse {cell:?} as a number (column {})", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value {cell:?} in column {}", col + 1),
                });
            }
            row.push(value);
        }

        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {w} columns, found {}", row.len()),
                });
            }
            Some(_) => {}
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    PointSet::from_rows(&rows)
}

/// Divides every row by its Euclidean norm.
pub fn normalize_rows(m: &DMatrix<f64>) -> Result<UnitVectorSet> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyInput);
    }
    check_finite(m)?;
    let mut out = m.clone();
    for i in 0..out.nrows() {
        let norm = out.row(i).norm();
        if norm == 0.0 {
            return Err(Error::DegenerateVector { row: i });
        }
        out.row_mut(i).unscale_mut(norm);
    }
    UnitVectorSet::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupPolicy {
    /// Coincident points are an error.
    #[default]
    Error,
    /// Coincident pairs are skipped and counted.
    Drop,
}

#[derive(Debug, Clone)]
pub struct PairwiseDifferences {
    pub vectors: UnitVectorSet,
    /// Zero-based (i, j) with i < j for every output row, in row order.
    pub pairs: Vec<(usize, usize)>,
    /// Pairs skipped under [`DedupPolicy::Drop`].
    pub dropped: usize,
}

/// All pairs i < j in row-major order.
pub fn all_pairs(r: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(r * r.saturating_sub(1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            pairs.push((i, j));
        }
    }
    pairs
}

/// A uniform sample of `count` distinct pairs, returned in row-major order.
/// Returns every pair when `count` is at least C(r, 2).
pub fn sample_pairs(r: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let pairs = all_pairs(r);
    if count >= pairs.len() {
        return pairs;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, pairs.len(), count).into_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| pairs[i]).collect()
}

/// (u_i − u_j)/‖u_i − u_j‖ for every pair i < j.
pub fn pairwise_unit_differences(
    points: &PointSet,
    policy: DedupPolicy,
) -> Result<PairwiseDifferences> {
    if points.r() < 2 {
        return Err(Error::InvalidInput(
            "pairwise differences need at least two points".into(),
        ));
    }
    unit_differences_for_pairs(points, &all_pairs(points.r()), policy)
}

pub fn unit_differences_for_pairs(
    points: &PointSet,
    pairs: &[(usize, usize)],
    policy: DedupPolicy,
) -> Result<PairwiseDifferences> {
    let d = points.d();
    let m = points.matrix();
    let mut data = Vec::with_capacity(pairs.len() * d);
    let mut kept = Vec::with_capacity(pairs.len());
    let mut dropped = 0;
    let mut diff = vec![0.0; d];

    for &(i, j) in pairs {
        if i >= points.r() || j >= points.r() || i == j {
            return Err(Error::InvalidInput(format!("invalid pair ({i}, {j})")));
        }
        for (c, slot) in diff.iter_mut().enumerate() {
            *slot = m[(i, c)] - m[(j, c)];
        }
        let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            match policy {
                DedupPolicy::Error => {
                    return Err(Error::CoincidentPoints {
                        first: i.min(j),
                        second: i.max(j),
                    })
                }
                DedupPolicy::Drop => {
                    dropped += 1;
                    continue;
                }
            }
        }
        data.extend(diff.iter().map(|v| v / norm));
        kept.push((i, j));
    }

    if kept.is_empty() {
        return Err(Error::EmptyInput);
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} coincident point pair(s)");
    }
    let vectors = UnitVectorSet::new(DMatrix::from_row_slice(kept.len(), d, &data))?;
    Ok(PairwiseDifferences {
        vectors,
        pairs: kept,
        dropped,
    })
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyInput);
    };
    let d = first.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != d) {
        return Err(Error::Shape(format!(
            "row {bad} has {} entries, expected {d}",
            rows[bad].len()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), d, &flat))
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            if !m[(row, col)].is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn fingerprint(m: &DMatrix<f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((m.nrows() as u64).to_le_bytes());
    hasher.update((m.ncols() as u64).to_le_bytes());
    for row in m.row_iter() {
        for v in row.iter() {
            hasher.update(v.to_le_bytes());
        }
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
