use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use persistence_fisher::diagram::PersistenceDiagram;
use persistence_fisher::measure::SmoothingParams;
use persistence_fisher::metric::fim;

use crate::sidecar::{sidecar_path, suffixed, Sidecar};
use crate::BenchArgs;

fn random_diagram(rng: &mut ChaCha8Rng, n: usize) -> PersistenceDiagram {
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let birth: f64 = rng.random();
            (birth, birth + rng.random::<f64>())
        })
        .collect();
    PersistenceDiagram::from_pairs(&pairs, 1).expect("valid synthetic diagram")
}

pub fn run(args: &BenchArgs, argv: &[String]) -> Result<()> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|tok| tok.trim().parse::<usize>())
        .collect::<Result<Vec<usize>, _>>()
        .map_err(|e| anyhow::anyhow!("invalid size list `{}`: {e}", args.sizes))?;
    if sizes.is_empty() {
        bail!("empty size list");
    }
    let exact = SmoothingParams::exact(args.sigma)?;
    let fast = SmoothingParams::fgt(args.sigma, args.fgt_eps)?;

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("points exact_s fgt_s speedup |d_exact - d_fgt|");
    let mut csv = String::from("points,exact_s,fgt_s,speedup,abs_diff\n");
    let mut rows = Vec::new();
    for &n in &sizes {
        let dg_i = random_diagram(&mut rng, n);
        let dg_j = random_diagram(&mut rng, n);

        let start = Instant::now();
        let d_exact = fim(&dg_i, &dg_j, &exact)?;
        let exact_s = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let d_fast = fim(&dg_i, &dg_j, &fast)?;
        let fgt_s = start.elapsed().as_secs_f64();

        let diff = (d_exact.value - d_fast.value).abs();
        println!(
            "{n} {exact_s:.4} {fgt_s:.4} {:.2} {diff:.3e}",
            exact_s / fgt_s
        );
        writeln!(csv, "{n},{exact_s},{fgt_s},{},{diff}", exact_s / fgt_s).expect("string write");
        rows.push(json!({
            "points": n,
            "exact_s": exact_s,
            "fgt_s": fgt_s,
            "abs_diff": diff,
            "accel_used": d_fast.accel_used,
        }));
    }

    if let Some(out) = &args.out {
        let csv_path = suffixed(out, ".csv");
        std::fs::write(&csv_path, csv)?;
        Sidecar::new("bench", argv)
            .output(&csv_path)
            .seed(args.seed)
            .params(&json!({
                "sizes": sizes,
                "sigma": args.sigma,
                "fgt_eps": args.fgt_eps,
                "rows": rows,
            }))?
            .write(&sidecar_path(out))?;
    }
    Ok(())
}
