pub mod bench;
pub mod dist;
pub mod gen_orbits;
pub mod gram;
pub mod kfdr;
pub mod ph;
pub mod svm_cv;

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use serde_json::json;

use persistence_fisher::diagram::PersistenceDiagram;
use persistence_fisher::kernels::{self, quantile_t, GramMatrix, KernelParams, PfParams};
use persistence_fisher::metric::fim_matrix;

use crate::{KernelArgs, KernelKind};

/// Writes a matrix as comma-separated rows, floats in shortest round-trip
/// form.
pub(crate) fn write_matrix_csv(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let mut text = String::new();
    for r in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols())
            .map(|c| format!("{}", matrix[(r, c)]))
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn upper_triangle(matrix: &DMatrix<f64>) -> Vec<f64> {
    let n = matrix.nrows();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| matrix[(i, j)])
        .collect()
}

/// Builds the Gram matrix for a kernel-flag set, resolving a
/// quantile-selected `t` for the Fisher kernel when requested. Returns the
/// matrix plus the fully resolved parameters for the sidecar.
pub(crate) fn resolve_gram(
    args: &KernelArgs,
    diagrams: &[PersistenceDiagram],
    ids: Vec<String>,
) -> Result<(GramMatrix, KernelParams)> {
    match args.kernel {
        KernelKind::Pf => {
            let smoothing = args.smoothing()?;
            let distances = fim_matrix(diagrams, &smoothing)?;
            let t = match (args.t, args.t_quantile) {
                (Some(t), _) => t,
                (None, Some(s)) => quantile_t(&upper_triangle(&distances), s)?,
                (None, None) => bail!("the PF kernel needs --t or --t-quantile"),
            };
            let params = KernelParams::Pf(PfParams { t, smoothing });
            let values = distances.map(|d| (-t * d).exp());
            let gram = GramMatrix::from_values(values, params, ids)?;
            Ok((gram, params))
        }
        _ => {
            let params = args.to_params(None)?;
            let gram = kernels::gram_with_ids(diagrams, ids, &params)?;
            Ok((gram, params))
        }
    }
}

pub(crate) fn kernel_params_json(params: &KernelParams) -> serde_json::Value {
    json!({ "params": params, "kernel": params.name() })
}
