use std::fmt::Write as _;

use anyhow::Result;
use serde_json::json;

use persistence_fisher::kernels::{self, KernelParams, PfParams};
use persistence_fisher::metric::fim_matrix;

use crate::cv::{cross_validate, CvConfig, CvKernel};
use crate::manifest::{entry_ids, load_diagrams, read_manifest, require_labels};
use crate::sidecar::{sidecar_path, suffixed, Sidecar};
use crate::{parse_f64_list, KernelKind, SvmCvArgs};

pub fn run(args: &SvmCvArgs, argv: &[String]) -> Result<()> {
    let entries = read_manifest(&args.manifest)?;
    let diagrams = load_diagrams(&entries, args.essential.0)?;
    let labels = require_labels(&entries)?;
    let ids = entry_ids(&entries);

    let t_quantiles = match args.kernel.t_quantile {
        Some(s) => vec![s],
        None => parse_f64_list(&args.t_quantile_grid)?,
    };
    let config = CvConfig {
        t_quantiles,
        fixed_t: args.kernel.t,
        c_grid: parse_f64_list(&args.c_grid)?,
        folds: args.folds,
        repeats: args.repeats,
        train_frac: args.train_frac,
        seed: args.seed,
    };

    // For the Fisher kernel the distance matrix is computed once; every
    // (split, t) pair reuses it.
    let report = match args.kernel.kernel {
        KernelKind::Pf => {
            let smoothing = args.kernel.smoothing()?;
            let distances = fim_matrix(&diagrams, &smoothing)?;
            let provenance = KernelParams::Pf(PfParams {
                t: args.kernel.t.unwrap_or(1.0),
                smoothing,
            });
            cross_validate(
                CvKernel::PfDistances(&distances),
                provenance,
                &labels,
                &config,
            )?
        }
        _ => {
            let params = args.kernel.to_params(None)?;
            let gram = kernels::gram_with_ids(&diagrams, ids, &params)?;
            cross_validate(CvKernel::Fixed(gram.values()), params, &labels, &config)?
        }
    };

    println!(
        "{} accuracy: {:.2} \u{b1} {:.2} ({} repeats)",
        match args.kernel.kernel {
            KernelKind::Pf => "pf",
            KernelKind::Pss => "pss",
            KernelKind::Pwg => "pwg",
            KernelKind::Sw => "sw",
        },
        100.0 * report.mean_accuracy,
        100.0 * report.std_accuracy,
        config.repeats
    );

    let mut csv = String::from("repeat,accuracy,chosen_c,chosen_t,chosen_t_quantile\n");
    for r in &report.per_repeat {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.repeat,
            r.accuracy,
            r.chosen_c,
            r.chosen_t.map_or(String::new(), |t| format!("{t}")),
            r.chosen_t_quantile
                .map_or(String::new(), |s| format!("{s}")),
        )
        .expect("string write");
    }
    let csv_path = suffixed(&args.out, ".csv");
    std::fs::write(&csv_path, csv)?;

    Sidecar::new("svm-cv", argv)
        .input(&args.manifest)
        .output(&csv_path)
        .seed(args.seed)
        .params(&json!({
            "kernel": format!("{:?}", args.kernel.kernel).to_lowercase(),
            "sigma": args.kernel.sigma,
            "fgt_eps": args.kernel.fgt_eps,
            "fixed_t": args.kernel.t,
            "t_quantile_grid": config.t_quantiles,
            "c_grid": config.c_grid,
            "folds": config.folds,
            "repeats": config.repeats,
            "train_frac": config.train_frac,
            "mean_accuracy": report.mean_accuracy,
            "std_accuracy": report.std_accuracy,
            "per_repeat": report.per_repeat,
        }))?
        .write(&sidecar_path(&args.out))
}
