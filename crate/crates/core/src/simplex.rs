//! Euclidean projection onto the probability simplex and the weight type that
//! lives on it.

use crate::error::{Error, Result};

/// Tolerance on |Σλ − 1| accepted by [`SimplexWeights::new`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Dual weights: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights {
    lambda: Vec<f64>,
}

impl SimplexWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::NotOnSimplex("empty weight vector".into()));
        }
        if let Some(i) = lambda.iter().position(|v| !v.is_finite()) {
            return Err(Error::NotOnSimplex(format!("entry {i} is not finite")));
        }
        if let Some(i) = lambda.iter().position(|&v| v < 0.0) {
            return Err(Error::NotOnSimplex(format!(
                "entry {i} is negative ({})",
                lambda[i]
            )));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotOnSimplex(format!("entries sum to {sum}")));
        }
        Ok(Self { lambda })
    }

    /// 1/n in every coordinate.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform weights need n >= 1");
        Self {
            lambda: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.lambda
    }
}

/// Nearest point of {λ ≥ 0, Σλ = 1} to `y`.
///
/// Sorts descending, takes ρ as the largest index j with
/// y_(j) + (1 − Σ_{i≤j} y_(i))/j > 0, shifts by α = (1 − Σ_{i≤ρ} y_(i))/ρ and
/// clips at zero. Runs in O(n log n).
pub fn project_to_simplex(y: &[f64]) -> Result<SimplexWeights> {
    if y.is_empty() {
        return Err(Error::InvalidInput("cannot project an empty vector".into()));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("entry {i} is not finite")));
    }

    // only the sorted values matter, so ties need no ordering rule
    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut prefix = 0.0;
    let mut rho = 1;
    let mut rho_prefix = sorted[0];
    for (j, &v) in sorted.iter().enumerate() {
        prefix += v;
        if v + (1.0 - prefix) / (j + 1) as f64 > 0.0 {
            rho = j + 1;
            rho_prefix = prefix;
        }
    }
    let alpha = (1.0 - rho_prefix) / rho as f64;

    let lambda = y.iter().map(|&v| (v + alpha).max(0.0)).collect();
    Ok(SimplexWeights { lambda })
}

/// min w_i ≥ −tol and |Σ w_i − 1| ≤ tol.
pub fn is_on_simplex(w: &[f64], tol: f64) -> bool {
    if w.is_empty() {
        return false;
    }
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = w.iter().sum();
    min >= -tol && (sum - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn already_on_simplex_is_fixed() {
        let p = project_to_simplex(&[0.5, 0.5]).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn clips_to_vertex() {
        let p = project_to_simplex(&[2.0, 0.0]).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn interior_shift() {
        let p = project_to_simplex(&[0.6, 0.3, 0.3]).unwrap();
        let third = 0.3 - 1.0 / 15.0;
        assert!(close(p.as_slice(), &[0.6 - 1.0 / 15.0, third, third], 1e-15));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            project_to_simplex(&[1.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            project_to_simplex(&[f64::INFINITY]),
            Err(Error::InvalidInput(_))
        ));
        assert!(project_to_simplex(&[]).is_err());
    }

    #[test]
    fn ties_do_not_change_value() {
        let p = project_to_simplex(&[0.3, 0.3, 0.3, -2.0]).unwrap();
        assert!(close(p.as_slice(), &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0], 1e-15));
    }

    #[test]
    fn simplex_membership() {
        assert!(is_on_simplex(&[0.25; 4], 1e-9));
        assert!(!is_on_simplex(&[1.1, -0.1], 1e-9));
        assert!(is_on_simplex(&[0.5, 0.5 + 1e-12], 1e-9));
        assert!(!is_on_simplex(&[0.5, 0.6], 1e-9));
        assert!(!is_on_simplex(&[], 1e-9));
    }

    #[test]
    fn weights_validation() {
        assert!(SimplexWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexWeights::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexWeights::new(vec![0.5, 0.4]).is_err());
        assert!(SimplexWeights::new(vec![]).is_err());
        assert_eq!(SimplexWeights::uniform(4).as_slice(), &[0.25; 4]);
    }
}
