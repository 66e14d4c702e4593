#![allow(dead_code)]

use isoembed::UnitVectorSet;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Gaussian rows scaled to unit length.
pub fn random_unit_vectors(rng: &mut ChaCha20Rng, n: usize, d: usize) -> UnitVectorSet {
    isoembed::normalize_rows(&gaussian_matrix(rng, n, d)).unwrap()
}

/// A random point on the simplex, sometimes with exact zeros.
pub fn random_simplex_point(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                -rng.random::<f64>().ln()
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Euclidean projection onto the simplex by trying every support set and
/// keeping the one that satisfies the KKT conditions.
pub fn kkt_projection(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    assert!((1..=16).contains(&n));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let s: f64 = support.iter().map(|&i| y[i]).sum();
        let alpha = (1.0 - s) / support.len() as f64;
        let slack = 1e-12 * (1.0 + y.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let primal_ok = support.iter().all(|&i| y[i] + alpha >= -slack);
        let dual_ok = (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .all(|i| y[i] + alpha <= slack);
        if !(primal_ok && dual_ok) {
            continue;
        }
        let x: Vec<f64> = (0..n)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    (y[i] + alpha).max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        let dist: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, x));
        }
    }
    best.expect("some support satisfies KKT").1
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Truncates to `digits` significant figures.
pub fn truncate_sig(x: f64, digits: i32) -> f64 {
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - mag);
    (x * scale + 1e-9).trunc() / scale
}

pub fn embed_bin() -> &'static str {
    env!("CARGO_BIN_EXE_embed")
}
