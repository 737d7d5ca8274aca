//! Fisher information metric between persistence diagrams.
//!
//! On the probability simplex the metric is `arccos` of the Bhattacharyya
//! coefficient between two weight vectors. Between diagrams, each side is
//! first augmented with the other side's diagonal projections, both are
//! smoothed onto the common support set, and the simplex metric is applied:
//!
//! 1. `Theta = Dg_i | Dg_jD | Dg_j | Dg_iD` (diagonal mirrors `D`)
//! 2. `rho_i = smooth(Dg_i | Dg_jD)` on `Theta`
//! 3. `rho_j = smooth(Dg_j | Dg_iD)` on `Theta`
//! 4. `d = arccos(<sqrt(rho_i), sqrt(rho_j)>)`
//!
//! The value always lies in `[0, pi/2]`. The result is symmetric in the
//! argument order and exactly zero for identical diagrams; it is exposed as
//! a symmetric divergence, with no triangle-inequality claim.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::fgt;
use crate::measure::{build_support, smooth, DiscreteMeasure, SmoothingParams};

/// Outcome of a diagram-level Fisher distance computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FimResult {
    /// The distance, in `[0, pi/2]`.
    pub value: f64,
    /// Cardinality of the common support set `Theta`.
    pub support_size: usize,
    /// Whether the fast Gauss transform actually handled a smoothing step
    /// (requested and above the exact-evaluation crossover).
    pub accel_used: bool,
}

/// Fisher information metric between two points of the probability simplex
/// sharing the same support list in the same order.
///
/// Computed as `arccos(1 - H^2/2)` with `H^2` the squared Hellinger
/// distance; this is algebraically the Bhattacharyya arccos and evaluates
/// to exactly zero for bitwise-identical weight vectors. The coefficient is
/// clamped to `[0, 1]` before `arccos` to absorb rounding.
pub fn fisher_distance_simplex(rho_i: &DiscreteMeasure, rho_j: &DiscreteMeasure) -> Result<f64> {
    if rho_i.support() != rho_j.support() {
        return Err(Error::SupportMismatch {
            left: rho_i.len(),
            right: rho_j.len(),
        });
    }
    let hellinger_sq: f64 = rho_i
        .weights()
        .iter()
        .zip(rho_j.weights())
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    let bc = (1.0 - 0.5 * hellinger_sq).clamp(0.0, 1.0);
    Ok(bc.acos())
}

fn union_with_mirror(
    own: &PersistenceDiagram,
    other: &PersistenceDiagram,
) -> Result<Vec<[f64; 2]>> {
    let mirror = other.diagonal_mirror()?;
    Ok(own
        .points()
        .iter()
        .chain(mirror.points())
        .map(|p| p.to_xy())
        .collect())
}

/// Fisher information metric between two finite persistence diagrams.
///
/// Two empty diagrams are at distance zero by convention. Diagrams that
/// still contain essential (infinite-death) points are rejected.
pub fn fim(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &SmoothingParams,
) -> Result<FimResult> {
    if !dg_i.is_finite() || !dg_j.is_finite() {
        return Err(Error::EssentialPoint);
    }
    if dg_i.is_empty() && dg_j.is_empty() {
        return Ok(FimResult {
            value: 0.0,
            support_size: 0,
            accel_used: false,
        });
    }
    let theta = build_support(dg_i, dg_j)?;
    let sources_i = union_with_mirror(dg_i, dg_j)?;
    let sources_j = union_with_mirror(dg_j, dg_i)?;
    let accel_used = params.uses_fgt()
        && (fgt::uses_fast_path(sources_i.len(), theta.len())
            || fgt::uses_fast_path(sources_j.len(), theta.len()));
    let rho_i = smooth(&sources_i, &theta, params)?;
    let rho_j = smooth(&sources_j, &theta, params)?;
    let value = fisher_distance_simplex(&rho_i, &rho_j)?;
    Ok(FimResult {
        value,
        support_size: theta.len(),
        accel_used,
    })
}

/// Pairwise Fisher distance matrix, computed in parallel over the upper
/// triangle. The diagonal is exactly zero.
pub fn fim_matrix(
    diagrams: &[PersistenceDiagram],
    params: &SmoothingParams,
) -> Result<DMatrix<f64>> {
    let n = diagrams.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| fim(&diagrams[i], &diagrams[j], params).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    let mut matrix = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        matrix[(i, j)] = v;
        matrix[(j, i)] = v;
    }
    Ok(matrix)
}
