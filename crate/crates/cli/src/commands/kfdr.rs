use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde_json::json;

use persistence_fisher::learn::{kfdr_change_point, kfdr_scan, KfdrConfig};

use crate::commands::{kernel_params_json, resolve_gram};
use crate::manifest::{entry_ids, load_diagrams, read_manifest};
use crate::sidecar::{sidecar_path, suffixed, Sidecar};
use crate::KfdrArgs;

pub fn run(args: &KfdrArgs, argv: &[String]) -> Result<()> {
    let entries = read_manifest(&args.manifest)?;
    let diagrams = load_diagrams(&entries, args.essential.0)?;
    let ids = entry_ids(&entries);
    let (gram, params) = resolve_gram(&args.kernel, &diagrams, ids)?;

    let config = KfdrConfig::new(args.gamma)?;
    let scores = kfdr_scan(&gram, &config)?;
    let change = kfdr_change_point(&scores).context("no valid split candidates")?;
    println!("change_point {change}");

    let mut csv = String::from("index,score\n");
    for (tau, score) in &scores {
        writeln!(csv, "{tau},{score}").expect("string write");
    }
    let csv_path = suffixed(&args.out, ".csv");
    std::fs::write(&csv_path, csv)?;

    Sidecar::new("kfdr", argv)
        .input(&args.manifest)
        .output(&csv_path)
        .params(&json!({
            "kernel": kernel_params_json(&params),
            "gamma": args.gamma,
            "change_point": change,
            "sequence_length": gram.order(),
        }))?
        .write(&sidecar_path(&args.out))
}
