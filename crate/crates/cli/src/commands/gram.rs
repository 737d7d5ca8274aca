use anyhow::Result;
use serde_json::json;

use crate::commands::{kernel_params_json, resolve_gram, write_matrix_csv};
use crate::manifest::{entry_ids, load_diagrams, read_manifest};
use crate::sidecar::{sidecar_path, suffixed, Sidecar};
use crate::GramArgs;

pub fn run(args: &GramArgs, argv: &[String]) -> Result<()> {
    let entries = read_manifest(&args.manifest)?;
    let diagrams = load_diagrams(&entries, args.essential.0)?;
    let ids = entry_ids(&entries);
    let (gram, params) = resolve_gram(&args.kernel, &diagrams, ids.clone())?;

    let csv = suffixed(&args.out, ".csv");
    write_matrix_csv(&csv, gram.values())?;
    Sidecar::new("gram", argv)
        .input(&args.manifest)
        .output(&csv)
        .params(&json!({
            "kernel": kernel_params_json(&params),
            "diagram_ids": ids,
            "order": gram.order(),
        }))?
        .write(&sidecar_path(&args.out))
}
