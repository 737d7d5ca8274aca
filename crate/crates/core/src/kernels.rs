//! Kernels on persistence diagrams: the Persistence Fisher kernel plus the
//! PSS, PWG and SW baselines, Gram-matrix assembly, and the quantile
//! heuristic for choosing the Fisher kernel's scale `t`.
//!
//! The Persistence Fisher kernel is `exp(-t * d_FIM)`; it is positive
//! definite without approximation and infinitely divisible, so a Gram
//! matrix keeps its Fisher distance matrix around and can be re-scaled to
//! any other `t` without recomputing distances.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::measure::SmoothingParams;
use crate::metric::{fim, fim_matrix};

/// Persistence Fisher kernel parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PfParams {
    pub t: f64,
    pub smoothing: SmoothingParams,
}

/// Persistence Scale Space kernel parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PssParams {
    pub sigma: f64,
}

/// Persistence Weighted Gaussian kernel parameters: weight
/// `arctan(c * pers(p)^q)`, embedding bandwidth `sigma`, outer bandwidth
/// `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwgParams {
    pub c: f64,
    pub q: f64,
    pub sigma: f64,
    pub tau: f64,
}

/// Sliced Wasserstein kernel parameters: `directions` evenly spaced
/// projection angles and outer bandwidth `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwParams {
    pub directions: usize,
    pub sigma: f64,
}

/// Tagged union of the per-kernel hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "lowercase")]
pub enum KernelParams {
    Pf(PfParams),
    Pss(PssParams),
    Pwg(PwgParams),
    Sw(SwParams),
}

fn require_positive(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelParams::Pf(p) => {
                require_positive(p.t, "t")?;
                require_positive(p.smoothing.sigma, "sigma")
            }
            KernelParams::Pss(p) => require_positive(p.sigma, "sigma"),
            KernelParams::Pwg(p) => {
                require_positive(p.c, "C")?;
                require_positive(p.q, "q")?;
                require_positive(p.sigma, "sigma")?;
                require_positive(p.tau, "tau")
            }
            KernelParams::Sw(p) => {
                if p.directions == 0 {
                    return Err(Error::InvalidParameter(
                        "directions must be at least 1".to_string(),
                    ));
                }
                require_positive(p.sigma, "sigma")
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelParams::Pf(_) => "pf",
            KernelParams::Pss(_) => "pss",
            KernelParams::Pwg(_) => "pwg",
            KernelParams::Sw(_) => "sw",
        }
    }
}

/// `exp(-t * d_FIM)`; always in `(0, 1]`.
pub fn pf_kernel(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &PfParams,
) -> Result<f64> {
    KernelParams::Pf(*params).validate()?;
    let d = fim(dg_i, dg_j, &params.smoothing)?;
    Ok((-params.t * d.value).exp())
}

fn require_finite(dg: &PersistenceDiagram) -> Result<()> {
    if dg.is_finite() {
        Ok(())
    } else {
        Err(Error::EssentialPoint)
    }
}

/// Persistence Scale Space kernel: a heat-equation solution with the
/// diagonal as a Dirichlet boundary, evaluated as a double sum over point
/// pairs minus their mirrored counterparts.
pub fn pss_kernel(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &PssParams,
) -> Result<f64> {
    KernelParams::Pss(*params).validate()?;
    require_finite(dg_i)?;
    require_finite(dg_j)?;
    let inv = 1.0 / (8.0 * params.sigma);
    let mut sum = 0.0;
    for p in dg_i.points() {
        for r in dg_j.points() {
            let direct = (p.birth - r.birth).powi(2) + (p.death - r.death).powi(2);
            let mirrored = (p.birth - r.death).powi(2) + (p.death - r.birth).powi(2);
            sum += (-direct * inv).exp() - (-mirrored * inv).exp();
        }
    }
    Ok(sum / (8.0 * std::f64::consts::PI * params.sigma))
}

fn pwg_weight(persistence: f64, params: &PwgParams) -> f64 {
    (params.c * persistence.powf(params.q)).atan()
}

fn pwg_inner(a: &PersistenceDiagram, b: &PersistenceDiagram, params: &PwgParams) -> f64 {
    let inv = 1.0 / (2.0 * params.sigma * params.sigma);
    let mut sum = 0.0;
    for p in a.points() {
        let wp = pwg_weight(p.persistence(), params);
        for r in b.points() {
            let wr = pwg_weight(r.persistence(), params);
            let d2 = (p.birth - r.birth).powi(2) + (p.death - r.death).powi(2);
            sum += wp * wr * (-d2 * inv).exp();
        }
    }
    sum
}

/// Persistence Weighted Gaussian kernel: Gaussian of the RKHS distance
/// between arctan-weighted kernel mean embeddings.
pub fn pwg_kernel(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &PwgParams,
) -> Result<f64> {
    KernelParams::Pwg(*params).validate()?;
    require_finite(dg_i)?;
    require_finite(dg_j)?;
    let rkhs_sq = (pwg_inner(dg_i, dg_i, params) - 2.0 * pwg_inner(dg_i, dg_j, params)
        + pwg_inner(dg_j, dg_j, params))
    .max(0.0);
    Ok((-rkhs_sq / (2.0 * params.tau * params.tau)).exp())
}

/// L1 distance between the sorted projections of the two augmented point
/// sets onto the direction at angle `theta`.
fn sw_one_direction(a: &[[f64; 2]], b: &[[f64; 2]], theta: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    let mut pa: Vec<f64> = a.iter().map(|p| p[0] * cos + p[1] * sin).collect();
    let mut pb: Vec<f64> = b.iter().map(|p| p[0] * cos + p[1] * sin).collect();
    pa.sort_by(f64::total_cmp);
    pb.sort_by(f64::total_cmp);
    pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum()
}

fn sw_augmented(own: &PersistenceDiagram, other: &PersistenceDiagram) -> Result<Vec<[f64; 2]>> {
    let mirror = other.diagonal_mirror()?;
    Ok(own
        .points()
        .iter()
        .chain(mirror.points())
        .map(|p| p.to_xy())
        .collect())
}

/// Sliced Wasserstein distance approximated with `directions` angles evenly
/// spaced over `[-pi/2, pi/2)`: each diagram is augmented with the other's
/// diagonal projections (equal cardinalities), projected, sorted, and
/// compared in L1; the per-direction distances are averaged.
pub fn sw_distance(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    directions: usize,
) -> Result<f64> {
    if directions == 0 {
        return Err(Error::InvalidParameter(
            "directions must be at least 1".to_string(),
        ));
    }
    let a = sw_augmented(dg_i, dg_j)?;
    let b = sw_augmented(dg_j, dg_i)?;
    let m = directions as f64;
    let total: f64 = (0..directions)
        .map(|k| {
            let theta = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / m;
            sw_one_direction(&a, &b, theta)
        })
        .sum();
    Ok(total / m)
}

/// Sliced Wasserstein kernel: `exp(-d_SW / (2 sigma^2))`.
pub fn sw_kernel(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &SwParams,
) -> Result<f64> {
    KernelParams::Sw(*params).validate()?;
    let d = sw_distance(dg_i, dg_j, params.directions)?;
    Ok((-d / (2.0 * params.sigma * params.sigma)).exp())
}

/// Single-pair dispatch over the kernel family.
pub fn kernel(
    dg_i: &PersistenceDiagram,
    dg_j: &PersistenceDiagram,
    params: &KernelParams,
) -> Result<f64> {
    match params {
        KernelParams::Pf(p) => pf_kernel(dg_i, dg_j, p),
        KernelParams::Pss(p) => pss_kernel(dg_i, dg_j, p),
        KernelParams::Pwg(p) => pwg_kernel(dg_i, dg_j, p),
        KernelParams::Sw(p) => sw_kernel(dg_i, dg_j, p),
    }
}

/// A symmetric kernel matrix with its provenance.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    values: DMatrix<f64>,
    kernel: KernelParams,
    diagram_ids: Vec<String>,
    /// Fisher distance matrix, kept for PF kernels so sweeps over `t` are
    /// element-wise exponentiations.
    fim: Option<DMatrix<f64>>,
}

impl GramMatrix {
    /// Wraps an existing symmetric kernel matrix (symmetry checked within
    /// 1e-12). Used when a matrix is loaded from disk or built by hand.
    pub fn from_values(
        values: DMatrix<f64>,
        kernel: KernelParams,
        diagram_ids: Vec<String>,
    ) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                got: values.ncols(),
            });
        }
        if diagram_ids.len() != values.nrows() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                got: diagram_ids.len(),
            });
        }
        for i in 0..values.nrows() {
            for j in (i + 1)..values.ncols() {
                if (values[(i, j)] - values[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            values,
            kernel,
            diagram_ids,
            fim: None,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn diagram_ids(&self) -> &[String] {
        &self.diagram_ids
    }

    pub fn order(&self) -> usize {
        self.values.nrows()
    }

    /// The cached Fisher distance matrix (PF kernels only).
    pub fn fim_matrix(&self) -> Option<&DMatrix<f64>> {
        self.fim.as_ref()
    }

    /// Re-scales a PF Gram matrix to a different `t` using the cached
    /// distance matrix.
    pub fn with_pf_t(&self, t: f64) -> Result<GramMatrix> {
        let KernelParams::Pf(mut pf) = self.kernel else {
            return Err(Error::InvalidParameter(
                "with_pf_t requires a PF kernel Gram matrix".to_string(),
            ));
        };
        require_positive(t, "t")?;
        let fim = self
            .fim
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("missing cached distance matrix".to_string()))?;
        pf.t = t;
        Ok(GramMatrix {
            values: fim.map(|d| (-t * d).exp()),
            kernel: KernelParams::Pf(pf),
            diagram_ids: self.diagram_ids.clone(),
            fim: Some(fim.clone()),
        })
    }
}

/// Pairwise Gram matrix over a diagram set, parallelized over the upper
/// triangle. Diagram identifiers default to the list indices.
pub fn gram(diagrams: &[PersistenceDiagram], params: &KernelParams) -> Result<GramMatrix> {
    let ids = (0..diagrams.len()).map(|i| i.to_string()).collect();
    gram_with_ids(diagrams, ids, params)
}

pub fn gram_with_ids(
    diagrams: &[PersistenceDiagram],
    diagram_ids: Vec<String>,
    params: &KernelParams,
) -> Result<GramMatrix> {
    params.validate()?;
    if diagrams.is_empty() {
        return Err(Error::EmptyInput("diagram set"));
    }
    if diagram_ids.len() != diagrams.len() {
        return Err(Error::DimensionMismatch {
            expected: diagrams.len(),
            got: diagram_ids.len(),
        });
    }
    let n = diagrams.len();

    if let KernelParams::Pf(pf) = params {
        let distances = fim_matrix(diagrams, &pf.smoothing)?;
        let values = distances.map(|d| (-pf.t * d).exp());
        return Ok(GramMatrix {
            values,
            kernel: *params,
            diagram_ids,
            fim: Some(distances),
        });
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| kernel(&diagrams[i], &diagrams[j], params))
        .collect::<Result<Vec<f64>>>()?;
    let mut values = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(entries) {
        values[(i, j)] = v;
        values[(j, i)] = v;
    }
    Ok(GramMatrix {
        values,
        kernel: *params,
        diagram_ids,
        fim: None,
    })
}

/// Rectangular kernel matrix between two diagram lists (rows x columns).
pub fn cross_gram(
    rows: &[PersistenceDiagram],
    cols: &[PersistenceDiagram],
    params: &KernelParams,
) -> Result<DMatrix<f64>> {
    params.validate()?;
    let pairs: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| kernel(&rows[i], &cols[j], params))
        .collect::<Result<Vec<f64>>>()?;
    let mut values = DMatrix::zeros(rows.len(), cols.len());
    for (&(i, j), v) in pairs.iter().zip(entries) {
        values[(i, j)] = v;
    }
    Ok(values)
}

/// The scale `t` such that `1/t` is the nearest-rank `s%` quantile of the
/// given Fisher distances (1-based rank `ceil(s n / 100)`).
pub fn quantile_t(fim_values: &[f64], s: f64) -> Result<f64> {
    if fim_values.is_empty() {
        return Err(Error::EmptyInput("distance list"));
    }
    if !(s > 0.0 && s <= 100.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile percent must lie in (0, 100], got {s}"
        )));
    }
    let mut sorted = fim_values.to_vec();
    if sorted.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "distances must be finite and nonnegative".to_string(),
        ));
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = ((s * n as f64 / 100.0).ceil() as usize).clamp(1, n);
    let q = sorted[rank - 1];
    if q <= 0.0 {
        return Err(Error::ZeroQuantile);
    }
    Ok(1.0 / q)
}
