//! Smoothing persistence diagrams into normalized discrete measures on a
//! finite support set.
//!
//! Each diagram point contributes an isotropic Gaussian bump; the measure is
//! the vector of bump sums evaluated at every support point, normalized to
//! sum to one. The Gaussian is the unnormalized `exp(-||x - u||^2 / (2
//! sigma^2))`; the `2 pi sigma^2` prefactor cancels in the normalization and
//! is omitted.

use serde::{Deserialize, Serialize};

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::fgt::{gauss_transform_exact, gauss_transform_fast, GaussTransformProblem};

/// Threshold below which the naive normalizer is considered underflowed and
/// the computation is redone in log space.
const UNDERFLOW_GUARD: f64 = 1e-300;

/// Evaluation strategy for the Gaussian sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Accel {
    Exact,
    /// Fast Gauss transform with element-wise error at most
    /// `epsilon * (number of smoothed points)`.
    Fgt {
        epsilon: f64,
    },
}

/// Bandwidth and acceleration choice for diagram smoothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub sigma: f64,
    pub accel: Accel,
}

impl SmoothingParams {
    pub fn exact(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(
                "sigma must be positive and finite".to_string(),
            ));
        }
        Ok(Self {
            sigma,
            accel: Accel::Exact,
        })
    }

    pub fn fgt(sigma: f64, epsilon: f64) -> Result<Self> {
        let mut params = Self::exact(sigma)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(
                "epsilon must lie in (0, 1)".to_string(),
            ));
        }
        params.accel = Accel::Fgt { epsilon };
        Ok(params)
    }

    pub fn uses_fgt(&self) -> bool {
        matches!(self.accel, Accel::Fgt { .. })
    }
}

/// A probability vector over a finite support in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates the simplex invariants: matching lengths, nonnegative
    /// weights summing to one (within 1e-12) unless the support is empty.
    pub fn new(support: Vec<[f64; 2]>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be nonnegative".to_string(),
            ));
        }
        if !support.is_empty() {
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "weights sum to {total}, expected 1"
                )));
            }
        }
        Ok(Self { support, weights })
    }

    pub fn empty() -> Self {
        Self {
            support: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn support(&self) -> &[[f64; 2]] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// The common support set for a diagram pair: the union of both diagrams
/// and both diagonal mirrors, deduplicated by exact coordinate equality.
///
/// The result is sorted lexicographically, which makes it independent of
/// the argument order; `|Theta| <= 4 N` when both cardinalities are at most
/// `N`. Fails if either diagram still contains essential points.
pub fn build_support(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
) -> Result<Vec<[f64; 2]>> {
    let mirror_i = dg_i.diagonal_mirror()?;
    let mirror_j = dg_j.diagonal_mirror()?;
    let mut seen = std::collections::HashSet::new();
    let mut theta = Vec::new();
    for dg in [dg_i, &mirror_j, dg_j, &mirror_i] {
        for p in dg.points() {
            if seen.insert(p.bits()) {
                theta.push(p.to_xy());
            }
        }
    }
    theta.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    Ok(theta)
}

/// Smooths a point multiset into a normalized measure on `theta`.
///
/// `weights[k]` is the Gaussian bump sum at `theta[k]` divided by the total
/// over all support points. With `Accel::Fgt` the bump sums are approximated
/// by the fast Gauss transform; tiny negative approximation residues are
/// clamped to zero. A normalizer below 1e-300 triggers an exact log-space
/// recomputation; if even that degenerates the bandwidth is too small.
pub fn smooth(
    points: &[[f64; 2]],
    theta: &[[f64; 2]],
    params: &SmoothingParams,
) -> Result<DiscreteMeasure> {
    if points.is_empty() && theta.is_empty() {
        return Ok(DiscreteMeasure::empty());
    }
    if theta.is_empty() {
        return Err(Error::EmptySupport);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("smoothing points"));
    }

    let mut sums = match params.accel {
        Accel::Exact => {
            let problem = GaussTransformProblem::new(
                points.to_vec(),
                vec![1.0; points.len()],
                theta.to_vec(),
                params.sigma,
                0.5,
            )?;
            gauss_transform_exact(&problem)
        }
        Accel::Fgt { epsilon } => {
            let problem = GaussTransformProblem::new(
                points.to_vec(),
                vec![1.0; points.len()],
                theta.to_vec(),
                params.sigma,
                epsilon,
            )?;
            gauss_transform_fast(&problem)
        }
    };
    for s in &mut sums {
        if *s < 0.0 {
            *s = 0.0;
        }
    }

    let z: f64 = sums.iter().sum();
    let weights = if z < UNDERFLOW_GUARD {
        log_space_weights(points, theta, params.sigma)?
    } else {
        sums.iter().map(|s| s / z).collect()
    };
    Ok(DiscreteMeasure {
        support: theta.to_vec(),
        weights,
    })
}

/// Max-shifted log-sum-exp evaluation of the normalized weights, for
/// bandwidths where the naive sums underflow.
fn log_space_weights(points: &[[f64; 2]], theta: &[[f64; 2]], sigma: f64) -> Result<Vec<f64>> {
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let log_sums: Vec<f64> = theta
        .iter()
        .map(|x| {
            let exponents: Vec<f64> = points
                .iter()
                .map(|u| {
                    let dx = x[0] - u[0];
                    let dy = x[1] - u[1];
                    -(dx * dx + dy * dy) * inv_two_sigma_sq
                })
                .collect();
            let peak = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !peak.is_finite() {
                return f64::NEG_INFINITY;
            }
            peak + exponents.iter().map(|e| (e - peak).exp()).sum::<f64>().ln()
        })
        .collect();

    let peak = log_sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Underflow);
    }
    let shifted: Vec<f64> = log_sums.iter().map(|l| (l - peak).exp()).collect();
    let z: f64 = shifted.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Underflow);
    }
    Ok(shifted.iter().map(|s| s / z).collect())
}
