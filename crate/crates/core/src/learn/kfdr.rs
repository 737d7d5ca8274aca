//! Kernel Fisher discriminant ratio scan for change-point detection.
//!
//! For a candidate split `tau` of an ordered sample sequence, the score is
//! the regularized kernel Fisher discriminant ratio between the two
//! segments,
//!
//! `(n1 n2 / n) * delta' (Sigma_W + gamma I)^-1 delta`,
//!
//! with `delta` the feature-mean difference and `Sigma_W` the pooled
//! within-segment covariance. Everything is evaluated through the Gram
//! matrix: within-segment row centering, a coefficient-space linear solve
//! of order n, and one quadratic form. The change-point estimate is the
//! argmax of the score over candidates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// Regularization and candidate window for a KFDR scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KfdrConfig {
    /// Ridge added to the within-segment covariance.
    pub gamma: f64,
    /// Inclusive range of candidate split sizes `tau` (left-segment
    /// lengths). `None` scans every split with at least 2 samples per side.
    pub candidates: Option<(usize, usize)>,
}

impl KfdrConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(
                "gamma must be positive and finite".to_string(),
            ));
        }
        Ok(Self {
            gamma,
            candidates: None,
        })
    }

    pub fn with_candidates(mut self, lo: usize, hi: usize) -> Self {
        self.candidates = Some((lo, hi));
        self
    }
}

/// Scores every candidate split of the sequence underlying `gram`.
///
/// `tau` is the size of the left segment; candidates leaving fewer than two
/// samples on either side are skipped. Returns `(tau, score)` pairs in
/// ascending `tau` order.
pub fn kfdr_scan(gram: &GramMatrix, config: &KfdrConfig) -> Result<Vec<(usize, f64)>> {
    if !(config.gamma > 0.0) || !config.gamma.is_finite() {
        return Err(Error::InvalidParameter(
            "gamma must be positive and finite".to_string(),
        ));
    }
    let k = gram.values();
    let n = k.nrows();
    if n < 4 {
        return Err(Error::EmptyInput("sequence too short for a KFDR scan"));
    }
    let (lo, hi) = config.candidates.unwrap_or((2, n - 2));

    let mut scores = Vec::new();
    for tau in lo.max(2)..=hi.min(n.saturating_sub(2)) {
        scores.push((tau, kfdr_score(k, tau, config.gamma)?));
    }
    Ok(scores)
}

/// The candidate with the highest score (first one on ties).
pub fn kfdr_change_point(scores: &[(usize, f64)]) -> Option<usize> {
    scores
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|&(tau, _)| tau)
}

fn kfdr_score(k: &DMatrix<f64>, tau: usize, gamma: f64) -> Result<f64> {
    let n = k.nrows();
    let n1 = tau;
    let n2 = n - tau;

    // Mean-difference coefficients: delta = Phi d.
    let mut d = DVector::zeros(n);
    for i in 0..n1 {
        d[i] = -1.0 / n1 as f64;
    }
    for i in n1..n {
        d[i] = 1.0 / n2 as f64;
    }

    // P K with P the block-diagonal within-segment centering projector:
    // subtract from each row its segment's average row.
    let mut pk = k.clone();
    for (start, len) in [(0, n1), (n1, n2)] {
        for col in 0..n {
            let mut mean = 0.0;
            for row in start..start + len {
                mean += k[(row, col)];
            }
            mean /= len as f64;
            for row in start..start + len {
                pk[(row, col)] -= mean;
            }
        }
    }

    // (gamma I + P K / n) x = d, then score = (n1 n2 / n) d' K x.
    let mut system = pk / n as f64;
    for i in 0..n {
        system[(i, i)] += gamma;
    }
    let x = system
        .lu()
        .solve(&d)
        .ok_or_else(|| Error::InvalidParameter("singular KFDR system".to_string()))?;
    let score = (n1 as f64 * n2 as f64 / n as f64) * d.dot(&(k * x));
    Ok(score)
}
