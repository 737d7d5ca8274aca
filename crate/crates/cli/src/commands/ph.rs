use anyhow::{bail, Context, Result};
use serde_json::json;

use persistence_fisher::diagram::save_diagram_file;
use persistence_fisher::homology::{
    load_point_cloud_file, rips_persistence, sublevel_persistence, SampledFunction,
};

use crate::sidecar::{sidecar_path, suffixed, Sidecar};
use crate::{Filtration, PhArgs};

pub fn run(args: &PhArgs, argv: &[String]) -> Result<()> {
    let diagrams = match args.filtration {
        Filtration::Rips => {
            let cloud = load_point_cloud_file(&args.input)
                .with_context(|| format!("loading point cloud {}", args.input.display()))?;
            let max_scale = args
                .max_scale
                .context("--max-scale is required for the Rips filtration")?;
            rips_persistence(&cloud, args.dim, max_scale)?
        }
        Filtration::Sublevel => {
            let cloud = load_point_cloud_file(&args.input)
                .with_context(|| format!("loading sampled function {}", args.input.display()))?;
            if cloud.dim() != 1 {
                bail!("sublevel input must hold one value per line");
            }
            let values: Vec<f64> = cloud.points().iter().map(|p| p[0]).collect();
            vec![sublevel_persistence(&SampledFunction::new(values)?)]
        }
    };

    let mut sidecar = Sidecar::new("ph", argv).input(&args.input);
    for dg in &diagrams {
        let path = suffixed(&args.out, &format!(".h{}.dg", dg.homology_dimension()));
        save_diagram_file(&path, dg)?;
        sidecar = sidecar.output(&path);
    }
    sidecar = sidecar.params(&json!({
        "filtration": format!("{:?}", args.filtration).to_lowercase(),
        "dim": args.dim,
        "max_scale": args.max_scale,
    }))?;
    sidecar.write(&sidecar_path(&args.out))
}
