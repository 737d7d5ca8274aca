use anyhow::{Context, Result};
use serde_json::json;

use persistence_fisher::diagram::load_diagram_file;
use persistence_fisher::metric::fim;

use crate::sidecar::{sidecar_path, Sidecar};
use crate::DistArgs;

pub fn run(args: &DistArgs, argv: &[String]) -> Result<()> {
    let dg_a = load_diagram_file(&args.a, args.essential.0)
        .with_context(|| format!("loading {}", args.a.display()))?;
    let dg_b = load_diagram_file(&args.b, args.essential.0)
        .with_context(|| format!("loading {}", args.b.display()))?;
    let params = args.smoothing.to_params()?;
    let result = fim(&dg_a, &dg_b, &params)?;
    println!("{}", result.value);

    if let Some(out) = &args.out {
        std::fs::write(out, format!("{}\n", result.value))
            .with_context(|| format!("writing {}", out.display()))?;
        Sidecar::new("dist", argv)
            .input(&args.a)
            .input(&args.b)
            .output(out)
            .params(&json!({
                "smoothing": params,
                "value": result.value,
                "support_size": result.support_size,
                "accel_used": result.accel_used,
            }))?
            .write(&sidecar_path(out))?;
    }
    Ok(())
}
