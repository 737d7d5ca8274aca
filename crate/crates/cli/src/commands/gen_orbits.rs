use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde_json::json;

use persistence_fisher::datagen::orbit_dataset;
use persistence_fisher::homology::save_point_cloud_file;

use crate::sidecar::Sidecar;
use crate::{parse_f64_list, GenOrbitsArgs};

pub fn run(args: &GenOrbitsArgs, argv: &[String]) -> Result<()> {
    let r_values = parse_f64_list(&args.r_values)?;
    let dataset = orbit_dataset(&r_values, args.per_class, args.n_points, args.seed)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    let mut labels_text = String::new();
    let mut sidecar = Sidecar::new("gen-orbits", argv).seed(args.seed);
    for (k, (cloud, label)) in dataset.iter().enumerate() {
        let name = format!("orbit_{label}_{:03}.txt", k % args.per_class);
        save_point_cloud_file(args.out.join(&name), cloud)?;
        writeln!(labels_text, "{name} {label}").expect("string write");
    }
    let labels_path = args.out.join("labels.txt");
    std::fs::write(&labels_path, labels_text)
        .with_context(|| format!("writing {}", labels_path.display()))?;
    sidecar = sidecar.output(&labels_path);
    sidecar
        .params(&json!({
            "r_values": r_values,
            "per_class": args.per_class,
            "n_points": args.n_points,
        }))?
        .write(&args.out.join("gen-orbits.json"))
}
