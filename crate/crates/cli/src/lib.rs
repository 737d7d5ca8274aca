//! Implementation of the `pfk` command-line tool.
//!
//! Subcommands: `ph` (point clouds or sampled functions to diagrams),
//! `dist` (Fisher distance between two diagram files), `gram` (kernel
//! matrices as CSV), `gen-orbits` (linked twist map datasets), `svm-cv`
//! (repeated stratified cross-validated classification), `kfdr`
//! (change-point scan), and `bench` (exact vs fast-transform timings).
//!
//! Every run is deterministic given its inputs, flags, and seed, and every
//! output file comes with a JSON sidecar that records enough to replay the
//! exact invocation.

pub mod cv;
pub mod manifest;
pub mod sidecar;

mod commands;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;

use persistence_fisher::diagram::EssentialPolicy;
use persistence_fisher::kernels::{KernelParams, PfParams, PssParams, PwgParams, SwParams};
use persistence_fisher::measure::SmoothingParams;

#[derive(Parser, Debug)]
#[command(name = "pfk", version, about = "Persistence Fisher kernel pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute persistence diagrams from a point cloud or sampled function.
    Ph(PhArgs),
    /// Fisher information distance between two diagram files.
    Dist(DistArgs),
    /// Kernel Gram matrix over a manifest of diagram files.
    Gram(GramArgs),
    /// Generate labeled linked twist map orbit datasets.
    GenOrbits(GenOrbitsArgs),
    /// Repeated stratified-split SVM cross validation.
    SvmCv(SvmCvArgs),
    /// KFDR change-point scan over an ordered diagram sequence.
    Kfdr(KfdrArgs),
    /// Wall-time comparison of exact and fast-transform distance paths.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Filtration {
    Rips,
    Sublevel,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KernelKind {
    Pf,
    Pss,
    Pwg,
    Sw,
}

/// `drop` or `cap:<value>`.
#[derive(Clone, Copy, Debug)]
pub struct PolicyArg(pub EssentialPolicy);

impl FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("drop") {
            return Ok(PolicyArg(EssentialPolicy::Drop));
        }
        if let Some(v) = s.strip_prefix("cap:") {
            let value: f64 = v.parse().map_err(|_| format!("invalid cap value `{v}`"))?;
            return Ok(PolicyArg(EssentialPolicy::Cap(value)));
        }
        Err(format!("expected `drop` or `cap:<value>`, got `{s}`"))
    }
}

#[derive(Args, Debug)]
pub struct PhArgs {
    /// Point-cloud file (one point per line) or, with --filtration
    /// sublevel, one function value per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Filtration::Rips)]
    pub filtration: Filtration,
    /// Highest homology dimension to compute (0 or 1).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Rips filtration cutoff (edges enter at half the point distance).
    #[arg(long)]
    pub max_scale: Option<f64>,
    /// Output prefix: writes <out>.h<k>.dg plus <out>.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SmoothingArgs {
    /// Gaussian smoothing bandwidth.
    #[arg(long)]
    pub sigma: f64,
    /// Use the fast Gauss transform with this error bound (default 1e-6
    /// when the flag is given without a value); omit for exact sums.
    #[arg(long, num_args = 0..=1, default_missing_value = "1e-6")]
    pub fgt_eps: Option<f64>,
}

impl SmoothingArgs {
    pub fn to_params(&self) -> Result<SmoothingParams> {
        Ok(match self.fgt_eps {
            Some(eps) => SmoothingParams::fgt(self.sigma, eps)?,
            None => SmoothingParams::exact(self.sigma)?,
        })
    }
}

#[derive(Args, Debug)]
pub struct DistArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    /// Essential-class policy: `drop` or `cap:<value>`.
    #[arg(long, default_value = "drop")]
    pub essential: PolicyArg,
    /// Optionally also write the value and a sidecar here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// Bandwidth: smoothing sigma for PF, the kernel's scale otherwise.
    #[arg(long)]
    pub sigma: f64,
    /// PF scale t (mutually exclusive with --t-quantile).
    #[arg(long, conflicts_with = "t_quantile")]
    pub t: Option<f64>,
    /// Choose t so 1/t is this percent quantile of the observed Fisher
    /// distances.
    #[arg(long)]
    pub t_quantile: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "1e-6")]
    pub fgt_eps: Option<f64>,
    /// PWG weight scale C.
    #[arg(long, default_value_t = 1.0)]
    pub pwg_c: f64,
    /// PWG persistence exponent q.
    #[arg(long, default_value_t = 1.0)]
    pub pwg_q: f64,
    /// PWG outer bandwidth tau.
    #[arg(long, default_value_t = 1.0)]
    pub pwg_tau: f64,
    /// SW projection count M.
    #[arg(long, default_value_t = 6)]
    pub sw_directions: usize,
}

impl KernelArgs {
    pub fn smoothing(&self) -> Result<SmoothingParams> {
        Ok(match self.fgt_eps {
            Some(eps) => SmoothingParams::fgt(self.sigma, eps)?,
            None => SmoothingParams::exact(self.sigma)?,
        })
    }

    /// Resolves to kernel parameters; PF needs `t` already known.
    pub fn to_params(&self, pf_t: Option<f64>) -> Result<KernelParams> {
        Ok(match self.kernel {
            KernelKind::Pf => {
                let t = pf_t
                    .or(self.t)
                    .context("the PF kernel needs --t or --t-quantile")?;
                KernelParams::Pf(PfParams {
                    t,
                    smoothing: self.smoothing()?,
                })
            }
            KernelKind::Pss => KernelParams::Pss(PssParams { sigma: self.sigma }),
            KernelKind::Pwg => KernelParams::Pwg(PwgParams {
                c: self.pwg_c,
                q: self.pwg_q,
                sigma: self.sigma,
                tau: self.pwg_tau,
            }),
            KernelKind::Sw => KernelParams::Sw(SwParams {
                directions: self.sw_directions,
                sigma: self.sigma,
            }),
        })
    }
}

#[derive(Args, Debug)]
pub struct GramArgs {
    /// Manifest: one diagram path per line (optional trailing label
    /// ignored), relative to the manifest's directory.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "drop")]
    pub essential: PolicyArg,
    /// Output prefix: writes <out>.csv and <out>.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenOrbitsArgs {
    /// Twist parameters, one class per value.
    #[arg(long, default_value = "2.5,3.5,4,4.1,4.3")]
    pub r_values: String,
    #[arg(long, default_value_t = 50)]
    pub per_class: usize,
    #[arg(long, default_value_t = 300)]
    pub n_points: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for cloud files plus labels.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SvmCvArgs {
    /// Manifest: `<diagram-path> <integer-label>` per line.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "drop")]
    pub essential: PolicyArg,
    /// Inner-CV grid over t quantiles (PF only; used when --t is absent).
    #[arg(long, default_value = "1,2,5,10,20,50")]
    pub t_quantile_grid: String,
    /// Inner-CV grid for the SVM box parameter.
    #[arg(long, default_value = "0.01,0.1,1,10,100")]
    pub c_grid: String,
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Training fraction of each stratified split.
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output prefix: writes <out>.csv (per-repeat accuracies) and
    /// <out>.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct KfdrArgs {
    /// Manifest: ordered diagram paths, one per line.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "drop")]
    pub essential: PolicyArg,
    /// KFDR ridge regularization.
    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,
    /// Output prefix: writes <out>.csv (index,score) and <out>.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Diagram sizes (points per diagram) to time.
    #[arg(long, default_value = "500,1000,5000")]
    pub sizes: String,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub fgt_eps: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Optional output prefix for a CSV of the timing table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let values = s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid number `{tok}` in list `{s}`"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        bail!("empty list");
    }
    Ok(values)
}

/// Parses argv and runs the selected subcommand.
pub fn run() -> Result<()> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    dispatch(cli, argv)
}

/// Entry point used by tests to run with an explicit argv.
pub fn run_from(args: &[&str]) -> Result<()> {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let cli = Cli::try_parse_from(std::iter::once("pfk").chain(args.iter().copied()))?;
    dispatch(cli, argv)
}

fn dispatch(cli: Cli, argv: Vec<String>) -> Result<()> {
    match cli.command {
        Command::Ph(args) => commands::ph::run(&args, &argv),
        Command::Dist(args) => commands::dist::run(&args, &argv),
        Command::Gram(args) => commands::gram::run(&args, &argv),
        Command::GenOrbits(args) => commands::gen_orbits::run(&args, &argv),
        Command::SvmCv(args) => commands::svm_cv::run(&args, &argv),
        Command::Kfdr(args) => commands::kfdr::run(&args, &argv),
        Command::Bench(args) => commands::bench::run(&args, &argv),
    }
}
