//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`) or failing its assertions.
//!
//! Run with:
//!   cargo test -p persistence-fisher-cli --test acceptance -- --nocapture

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use persistence_fisher::datagen::{changepoint_sequence, orbit_dataset};
use persistence_fisher::diagram::PersistenceDiagram;
use persistence_fisher::fgt::{gauss_transform_exact, gauss_transform_fast, GaussTransformProblem};
use persistence_fisher::homology::{rips_persistence, PointCloud};
use persistence_fisher::kernels::{gram, quantile_t, KernelParams, PfParams, PssParams};
use persistence_fisher::learn::{kfdr_change_point, kfdr_scan, KfdrConfig};
use persistence_fisher::measure::{smooth, SmoothingParams};
use persistence_fisher::metric::{fim, fim_matrix};
use pf_testkit::{
    eigen_range, h1_diagram_by_rank, mst_edge_values, random_cloud, random_diagram,
    random_zero_sum, split_diagram,
};
use pfk_cli::cv::{cross_validate, CvConfig, CvKernel};

fn report(criterion: u32, name: &str, start: Instant, budget_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    println!("[acceptance] criterion {criterion} ({name}): PASS in {elapsed:.1}s (budget {budget_s:.0}s)");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its runtime budget: {elapsed:.1}s >= {budget_s}s"
    );
}

/// The diagram sets, bandwidths, and quantile-selected scales shared by
/// criteria 1, 3 and 4.
fn pf_gram_sets() -> Vec<(Vec<PersistenceDiagram>, SmoothingParams, f64)> {
    let sigmas = [0.01, 0.1, 1.0];
    let mut rng = StdRng::seed_from_u64(0xACC_1);
    (0..20)
        .map(|set| {
            let diagrams: Vec<PersistenceDiagram> =
                (0..10).map(|_| random_diagram(&mut rng, 50, 2.0)).collect();
            let smoothing = SmoothingParams::exact(sigmas[set % sigmas.len()]).unwrap();
            let distances = fim_matrix(&diagrams, &smoothing).unwrap();
            let upper: Vec<f64> = (0..10)
                .flat_map(|i| ((i + 1)..10).map(move |j| (i, j)))
                .map(|(i, j)| distances[(i, j)])
                .collect();
            let t = quantile_t(&upper, 20.0).unwrap();
            (diagrams, smoothing, t)
        })
        .collect()
}

#[test]
fn criterion_1_pf_gram_positive_semidefinite() {
    let start = Instant::now();
    for (set, (diagrams, smoothing, t)) in pf_gram_sets().into_iter().enumerate() {
        let g = gram(&diagrams, &KernelParams::Pf(PfParams { t, smoothing })).unwrap();
        let (min_eig, max_eig) = eigen_range(g.values());
        assert!(
            min_eig >= -1e-8 * max_eig,
            "set {set} (sigma {}, t {t:.3}): min {min_eig:.3e}, max {max_eig:.3e}",
            smoothing.sigma
        );
    }
    report(1, "PF Gram PSD", start, 60.0);
}

#[test]
fn criterion_2_distance_minus_half_pi_is_cnd() {
    let start = Instant::now();
    let sigmas = [0.01, 0.1, 1.0];
    let mut rng = StdRng::seed_from_u64(0xACC_2);
    for set in 0..20 {
        let diagrams: Vec<PersistenceDiagram> =
            (0..8).map(|_| random_diagram(&mut rng, 50, 2.0)).collect();
        let smoothing = SmoothingParams::exact(sigmas[set % sigmas.len()]).unwrap();
        let d = fim_matrix(&diagrams, &smoothing).unwrap();
        let n = diagrams.len();
        for trial in 0..200 {
            let c = random_zero_sum(&mut rng, n);
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += c[i] * c[j] * (d[(i, j)] - FRAC_PI_2);
                }
            }
            assert!(
                quad <= 1e-10,
                "set {set} trial {trial}: quadratic form {quad:.3e} above tolerance"
            );
        }
    }
    report(
        2,
        "d_FIM - pi/2 conditionally negative definite",
        start,
        30.0,
    );
}

#[test]
fn criterion_3_stability_bound_is_an_identity() {
    let start = Instant::now();
    for (set, (diagrams, smoothing, t)) in pf_gram_sets().into_iter().enumerate() {
        let g = gram(&diagrams, &KernelParams::Pf(PfParams { t, smoothing })).unwrap();
        let d = g.fim_matrix().unwrap();
        let k = g.values();
        for i in 0..diagrams.len() {
            for j in 0..diagrams.len() {
                let induced_sq = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];
                assert!(
                    induced_sq <= 2.0 * t * d[(i, j)],
                    "set {set} pair ({i},{j}): {induced_sq} > {}",
                    2.0 * t * d[(i, j)]
                );
            }
        }
    }
    report(3, "induced squared distance <= 2 t d_FIM", start, 60.0);
}

#[test]
fn criterion_4_infinite_divisibility() {
    let start = Instant::now();
    for (set, (diagrams, smoothing, t)) in pf_gram_sets().into_iter().enumerate() {
        let g = gram(&diagrams, &KernelParams::Pf(PfParams { t, smoothing })).unwrap();
        for m in [2.0, 3.0, 5.0] {
            let root = g.values().map(|v| v.powf(1.0 / m));
            let (min_eig, max_eig) = eigen_range(&root);
            assert!(
                min_eig >= -1e-8 * max_eig,
                "set {set} root {m}: min {min_eig:.3e}, max {max_eig:.3e}"
            );
        }
    }
    report(4, "element-wise roots of PF Grams stay PSD", start, 120.0);
}

#[test]
fn criterion_5_fgt_error_certificate() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xACC_5);
    let epsilon = 1e-6;

    // Element-wise certificate on 25 problems per bandwidth.
    for &bandwidth in &[0.01, 0.1, 1.0, 10.0] {
        for trial in 0..25 {
            let sources: Vec<[f64; 2]> = (0..1000).map(|_| [rng.random(), rng.random()]).collect();
            let charges: Vec<f64> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
            let targets: Vec<[f64; 2]> = (0..1000).map(|_| [rng.random(), rng.random()]).collect();
            let total: f64 = charges.iter().map(|q| q.abs()).sum();
            let problem =
                GaussTransformProblem::new(sources, charges, targets, bandwidth, epsilon).unwrap();
            let exact = gauss_transform_exact(&problem);
            let fast = gauss_transform_fast(&problem);
            let worst = exact
                .iter()
                .zip(&fast)
                .map(|(e, f)| (e - f).abs())
                .fold(0.0, f64::max);
            assert!(
                worst <= epsilon * total,
                "bandwidth {bandwidth} trial {trial}: error {worst:.3e} > {:.3e}",
                epsilon * total
            );
        }
    }

    // End-to-end distance agreement on 50 random diagram pairs.
    let sigmas = [0.1, 0.5, 1.0];
    for trial in 0..50 {
        let dg_i = random_diagram(&mut rng, 500, 1.0);
        let dg_j = random_diagram(&mut rng, 500, 1.0);
        let sigma = sigmas[trial % sigmas.len()];
        let exact = fim(&dg_i, &dg_j, &SmoothingParams::exact(sigma).unwrap()).unwrap();
        let fast = fim(&dg_i, &dg_j, &SmoothingParams::fgt(sigma, epsilon).unwrap()).unwrap();
        assert!(
            (exact.value - fast.value).abs() <= 1e-5,
            "trial {trial} (sigma {sigma}): |{} - {}| > 1e-5",
            exact.value,
            fast.value
        );
    }
    report(5, "FGT certificate and end-to-end agreement", start, 120.0);
}

#[test]
fn criterion_6_homology_oracles() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xACC_6);

    for trial in 0..100 {
        let n = rng.random_range(2..=12);
        let cloud = random_cloud(&mut rng, n, 2);
        let diagrams = rips_persistence(&cloud, 0, 10.0).unwrap();
        let (finite, essential) = split_diagram(&diagrams[0]);
        assert_eq!(diagrams[0].len(), n, "H0 trial {trial}");
        assert_eq!(essential, vec![0.0], "H0 trial {trial}");
        let deaths: Vec<f64> = finite.iter().map(|&(_, d)| d).collect();
        assert_eq!(deaths, mst_edge_values(&cloud), "H0 trial {trial}");
    }

    for trial in 0..50 {
        let n = rng.random_range(4..=8);
        let cloud = random_cloud(&mut rng, n, 2);
        let max_scale = if trial % 2 == 0 { 10.0 } else { 0.3 };
        let diagrams = rips_persistence(&cloud, 1, max_scale).unwrap();
        let got: Vec<(f64, f64)> = {
            let (mut finite, essential) = split_diagram(&diagrams[1]);
            finite.extend(essential.into_iter().map(|b| (b, f64::INFINITY)));
            finite.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            finite
        };
        assert_eq!(
            got,
            h1_diagram_by_rank(&cloud, max_scale),
            "H1 trial {trial} (max_scale {max_scale})"
        );
    }
    report(6, "H0 MST oracle and H1 boundary-rank oracle", start, 120.0);
}

fn orbit_h1_diagrams(clouds: &[PointCloud], max_scale: f64) -> Vec<PersistenceDiagram> {
    clouds
        .par_iter()
        .map(|cloud| {
            rips_persistence(cloud, 1, max_scale).unwrap()[1]
                .apply_policy(Default::default())
                .unwrap()
        })
        .collect()
}

#[test]
fn criterion_7_orbit_classification() {
    let start = Instant::now();
    let sigma = 0.02;
    let max_scale = 0.2;
    let data = orbit_dataset(&[2.5, 3.5, 4.0, 4.1, 4.3], 50, 300, 42).unwrap();
    let labels: Vec<i32> = data.iter().map(|(_, l)| *l as i32).collect();
    let clouds: Vec<PointCloud> = data.into_iter().map(|(c, _)| c).collect();
    let diagrams = orbit_h1_diagrams(&clouds, max_scale);

    let smoothing = SmoothingParams::exact(sigma).unwrap();
    let config = CvConfig {
        t_quantiles: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
        fixed_t: None,
        c_grid: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        folds: 3,
        repeats: 10,
        train_frac: 0.7,
        seed: 42,
    };

    let distances = fim_matrix(&diagrams, &smoothing).unwrap();
    let pf_report = cross_validate(
        CvKernel::PfDistances(&distances),
        KernelParams::Pf(PfParams { t: 1.0, smoothing }),
        &labels,
        &config,
    )
    .unwrap();

    // Baseline: smoothed measures on a fixed grid compared with a Gaussian
    // kernel whose bandwidth is inner-selected from 10^{-3..3}; identical
    // splits via the shared seed.
    let grid: Vec<[f64; 2]> = (0..20)
        .flat_map(|i| (0..20).map(move |j| (i, j)))
        .map(|(i, j)| {
            [
                0.25 * (i as f64 + 0.5) / 20.0,
                0.25 * (j as f64 + 0.5) / 20.0,
            ]
        })
        .collect();
    let vectors: Vec<Vec<f64>> = diagrams
        .par_iter()
        .map(|dg| {
            if dg.is_empty() {
                return vec![0.0; grid.len()];
            }
            let points: Vec<[f64; 2]> = dg.points().iter().map(|p| p.to_xy()).collect();
            smooth(&points, &grid, &smoothing)
                .unwrap()
                .weights()
                .to_vec()
        })
        .collect();
    let n = vectors.len();
    let sq_dist = DMatrix::from_fn(n, n, |i, j| {
        vectors[i]
            .iter()
            .zip(&vectors[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    });
    let candidates: Vec<DMatrix<f64>> = (-3..=3)
        .map(|e| {
            let s = 10.0f64.powi(e);
            sq_dist.map(|v| (-v / (2.0 * s * s)).exp())
        })
        .collect();
    let baseline_report = cross_validate(
        CvKernel::FixedGrid(&candidates),
        KernelParams::Pss(PssParams { sigma: 1.0 }),
        &labels,
        &config,
    )
    .unwrap();

    println!(
        "[acceptance] criterion 7 detail: PF {:.2} ± {:.2}, Prob+Gaussian {:.2} ± {:.2}",
        100.0 * pf_report.mean_accuracy,
        100.0 * pf_report.std_accuracy,
        100.0 * baseline_report.mean_accuracy,
        100.0 * baseline_report.std_accuracy
    );
    assert!(
        pf_report.mean_accuracy >= 0.60,
        "PF mean accuracy {:.4} below 0.60",
        pf_report.mean_accuracy
    );
    assert!(
        pf_report.mean_accuracy >= baseline_report.mean_accuracy,
        "PF {:.4} below the smoothed-measure Gaussian baseline {:.4}",
        pf_report.mean_accuracy,
        baseline_report.mean_accuracy
    );
    report(7, "orbit classification", start, 900.0);
}

#[test]
fn criterion_8_kfdr_change_point_localization() {
    let start = Instant::now();
    let smoothing = SmoothingParams::exact(0.02).unwrap();
    let mut hits = 0;
    let mut detections = Vec::new();
    for trial in 0..20u64 {
        let sequence = changepoint_sequence(2.5, 4.3, 10, 10, 200, 1000 + 100 * trial).unwrap();
        let diagrams = orbit_h1_diagrams(&sequence, 0.2);
        let probe = gram(&diagrams, &KernelParams::Pf(PfParams { t: 1.0, smoothing })).unwrap();
        let distances = probe.fim_matrix().unwrap();
        let upper: Vec<f64> = (0..20)
            .flat_map(|i| ((i + 1)..20).map(move |j| distances[(i, j)]))
            .collect();
        let g = probe.with_pf_t(quantile_t(&upper, 50.0).unwrap()).unwrap();
        // Candidate window keeps at least 5 samples per side; KFDR scores
        // are variance-inflated at extreme splits.
        let config = KfdrConfig::new(1e-3).unwrap().with_candidates(5, 15);
        let scores = kfdr_scan(&g, &config).unwrap();
        let tau = kfdr_change_point(&scores).unwrap();
        detections.push(tau);
        if (8..=12).contains(&tau) {
            hits += 1;
        }
    }
    println!("[acceptance] criterion 8 detail: detections {detections:?}");
    assert!(
        hits >= 18,
        "only {hits}/20 within ±2 of the change index 10"
    );
    report(8, "KFDR change-point localization", start, 300.0);
}

fn pfk(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_pfk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "pfk {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Runs the full CLI pipeline into `dir` and returns the bytes of every
/// produced file, sorted by name.
fn pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    pfk(
        dir,
        &[
            "gen-orbits",
            "--r-values",
            "2.5,4.3",
            "--per-class",
            "4",
            "--n-points",
            "80",
            "--seed",
            "31",
            "--out",
            "data",
        ],
    );
    let labels = std::fs::read_to_string(dir.join("data/labels.txt")).unwrap();
    let mut manifest = String::new();
    for line in labels.lines() {
        let (name, label) = line.split_once(' ').unwrap();
        let stem = name.strip_suffix(".txt").unwrap();
        pfk(
            dir,
            &[
                "ph",
                "--input",
                &format!("data/{name}"),
                "--dim",
                "1",
                "--max-scale",
                "0.25",
                "--out",
                &format!("data/{stem}"),
            ],
        );
        manifest.push_str(&format!("{stem}.h1.dg {label}\n"));
    }
    std::fs::write(dir.join("data/diagrams.txt"), &manifest).unwrap();
    let seq: String = manifest
        .lines()
        .map(|l| format!("{}\n", l.split_whitespace().next().unwrap()))
        .collect();
    std::fs::write(dir.join("data/seq.txt"), seq).unwrap();

    pfk(
        dir,
        &[
            "gram",
            "--manifest",
            "data/diagrams.txt",
            "--kernel",
            "pf",
            "--sigma",
            "0.02",
            "--t-quantile",
            "20",
            "--out",
            "gram",
        ],
    );
    pfk(
        dir,
        &[
            "svm-cv",
            "--manifest",
            "data/diagrams.txt",
            "--kernel",
            "pf",
            "--sigma",
            "0.02",
            "--folds",
            "2",
            "--repeats",
            "3",
            "--seed",
            "31",
            "--out",
            "cv",
        ],
    );
    pfk(
        dir,
        &[
            "kfdr",
            "--manifest",
            "data/seq.txt",
            "--kernel",
            "pf",
            "--sigma",
            "0.02",
            "--t-quantile",
            "50",
            "--gamma",
            "1e-3",
            "--out",
            "kf",
        ],
    );

    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

#[test]
fn criterion_9_full_pipeline_determinism() {
    let start = Instant::now();
    let run_a = tempfile::tempdir().unwrap();
    let run_b = tempfile::tempdir().unwrap();
    let files_a = pipeline(run_a.path());
    let files_b = pipeline(run_b.path());
    assert_eq!(
        files_a.len(),
        files_b.len(),
        "runs produced different file sets"
    );
    let mut csv_count = 0;
    for ((name_a, bytes_a), (name_b, bytes_b)) in files_a.iter().zip(&files_b) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "{name_a} differs between runs");
        if name_a.ends_with(".csv") {
            csv_count += 1;
        }
    }
    assert!(csv_count >= 3, "expected gram, cv and kfdr CSV outputs");
    report(9, "byte-identical outputs under a fixed seed", start, 300.0);
}
