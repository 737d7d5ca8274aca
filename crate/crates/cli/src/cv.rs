//! Repeated stratified cross-validation over precomputed kernel matrices.
//!
//! The protocol mirrors the usual benchmark setup: stratified train/test
//! splits repeated with per-repeat seeds derived from the master seed, and
//! hyperparameters chosen by inner k-fold cross validation on the training
//! split only. For the Fisher kernel the inner grid ranges over quantile
//! choices of `t` (computed from training-pair distances only) times the
//! SVM box parameter; other kernels range over the box parameter alone.

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use persistence_fisher::kernels::{quantile_t, GramMatrix, KernelParams};
use persistence_fisher::learn::{svm_predict, svm_train, LabeledGram};

/// Whether an error came from the SVM's indefiniteness gate. Kernel
/// hyperparameters that materially break positive semidefiniteness (for the
/// Fisher kernel this can happen at very large `t` on large diagram sets)
/// are dropped from the inner-CV grid rather than aborting the run.
fn is_indefinite(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<persistence_fisher::Error>(),
        Some(persistence_fisher::Error::IndefiniteGram { .. })
    )
}

/// Kernel source for cross validation: a ready Gram matrix, a grid of
/// candidate Gram matrices (the inner CV picks one, e.g. a bandwidth
/// sweep), or Fisher distances to be turned into `exp(-t d)` with a
/// per-split `t`.
#[derive(Clone, Copy, Debug)]
pub enum CvKernel<'a> {
    Fixed(&'a DMatrix<f64>),
    FixedGrid(&'a [DMatrix<f64>]),
    PfDistances(&'a DMatrix<f64>),
}

#[derive(Clone, Debug)]
pub struct CvConfig {
    /// Quantile grid for `1/t` (PF distances only; ignored for fixed
    /// kernels).
    pub t_quantiles: Vec<f64>,
    /// Fixed `t` overriding the quantile grid.
    pub fixed_t: Option<f64>,
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub train_frac: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepeatOutcome {
    pub repeat: usize,
    pub accuracy: f64,
    pub chosen_c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_t_quantile: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_kernel_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CvReport {
    pub per_repeat: Vec<RepeatOutcome>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
}

/// Deterministic stratified split: within each class the indices are
/// shuffled by a seeded generator and the first `train_frac` share goes to
/// training (at least one sample per class on each side).
pub fn stratified_split(labels: &[i32], train_frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<i32> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        let n = members.len();
        let take = ((train_frac * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Stratified k-fold partition of `indices`, dealing each shuffled class
/// round-robin across folds.
pub fn stratified_folds(indices: &[usize], labels: &[i32], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut classes: Vec<i32> = indices.iter().map(|&i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut slot = 0usize;
    for class in classes {
        let mut members: Vec<usize> = indices
            .iter()
            .copied()
            .filter(|&i| labels[i] == class)
            .collect();
        members.shuffle(&mut rng);
        for idx in members {
            folds[slot % k].push(idx);
            slot += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    folds
}

pub fn accuracy(predictions: &[i32], truth: &[i32]) -> f64 {
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    correct as f64 / truth.len() as f64
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

struct KernelView<'a> {
    kernel: CvKernel<'a>,
    provenance: KernelParams,
}

/// One inner-grid candidate: a kernel-matrix index, a (quantile, t) pair,
/// or neither for a single fixed kernel.
#[derive(Clone, Copy, Debug, Default)]
struct Candidate {
    kernel_index: Option<usize>,
    t_quantile: Option<f64>,
    t: Option<f64>,
}

impl KernelView<'_> {
    fn value(&self, i: usize, j: usize, candidate: Candidate) -> f64 {
        match self.kernel {
            CvKernel::Fixed(k) => k[(i, j)],
            CvKernel::FixedGrid(ks) => {
                ks[candidate.kernel_index.expect("grid needs an index")][(i, j)]
            }
            CvKernel::PfDistances(d) => (-candidate.t.expect("PF needs t") * d[(i, j)]).exp(),
        }
    }

    fn train_and_score(
        &self,
        labels: &[i32],
        train: &[usize],
        test: &[usize],
        candidate: Candidate,
        c: f64,
    ) -> Result<f64> {
        let n = train.len();
        let sub = DMatrix::from_fn(n, n, |a, b| self.value(train[a], train[b], candidate));
        let ids = train.iter().map(|i| i.to_string()).collect();
        let gram =
            GramMatrix::from_values(sub, self.provenance, ids).context("building training Gram")?;
        let train_labels: Vec<i32> = train.iter().map(|&i| labels[i]).collect();
        let model = svm_train(&LabeledGram::new(gram, train_labels)?, c)?;
        let cross = DMatrix::from_fn(test.len(), n, |r, cix| {
            self.value(test[r], train[cix], candidate)
        });
        let predictions = svm_predict(&model, &cross)?;
        let truth: Vec<i32> = test.iter().map(|&i| labels[i]).collect();
        Ok(accuracy(&predictions, &truth))
    }
}

/// One repeat: split, pick hyperparameters by inner CV on the training
/// side, retrain, and score the held-out side.
fn run_repeat(
    view: &KernelView,
    labels: &[i32],
    config: &CvConfig,
    repeat: usize,
) -> Result<RepeatOutcome> {
    let split_seed = config.seed.wrapping_add(repeat as u64);
    let (train, test) = stratified_split(labels, config.train_frac, split_seed);

    // Grid candidates; for PF the t values come from training-pair
    // distances only.
    let mut candidates: Vec<Candidate> = Vec::new();
    match (view.kernel, config.fixed_t) {
        (CvKernel::Fixed(_), _) => candidates.push(Candidate::default()),
        (CvKernel::FixedGrid(ks), _) => {
            for k in 0..ks.len() {
                candidates.push(Candidate {
                    kernel_index: Some(k),
                    ..Candidate::default()
                });
            }
        }
        (CvKernel::PfDistances(_), Some(t)) => candidates.push(Candidate {
            t: Some(t),
            ..Candidate::default()
        }),
        (CvKernel::PfDistances(d), None) => {
            let mut train_distances = Vec::with_capacity(train.len() * (train.len() - 1) / 2);
            for (a, &i) in train.iter().enumerate() {
                for &j in &train[a + 1..] {
                    train_distances.push(d[(i, j)]);
                }
            }
            for &s in &config.t_quantiles {
                if let Ok(t) = quantile_t(&train_distances, s) {
                    candidates.push(Candidate {
                        t_quantile: Some(s),
                        t: Some(t),
                        ..Candidate::default()
                    });
                }
            }
            if candidates.is_empty() {
                bail!("no usable t quantile: all training distances are zero");
            }
        }
    }

    let folds = stratified_folds(
        &train,
        labels,
        config.folds,
        split_seed.wrapping_add(0x5eed),
    );
    let mut ranking: Vec<(f64, usize, usize)> = Vec::new(); // (score, cand_idx, c_idx)
    'candidates: for (cand_idx, &candidate) in candidates.iter().enumerate() {
        for (c_idx, &c) in config.c_grid.iter().enumerate() {
            let mut scores = Vec::new();
            for held in 0..folds.len() {
                let validation = &folds[held];
                if validation.is_empty() {
                    continue;
                }
                let inner_train: Vec<usize> = folds
                    .iter()
                    .enumerate()
                    .filter(|&(f, _)| f != held)
                    .flat_map(|(_, f)| f.iter().copied())
                    .collect();
                let distinct = {
                    let mut ls: Vec<i32> = inner_train.iter().map(|&i| labels[i]).collect();
                    ls.sort_unstable();
                    ls.dedup();
                    ls.len()
                };
                if distinct < 2 {
                    continue;
                }
                match view.train_and_score(labels, &inner_train, validation, candidate, c) {
                    Ok(score) => scores.push(score),
                    Err(e) if is_indefinite(&e) => continue 'candidates,
                    Err(e) => return Err(e),
                }
            }
            if scores.is_empty() {
                bail!("no valid inner folds; reduce --folds");
            }
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            ranking.push((mean, cand_idx, c_idx));
        }
    }
    if ranking.is_empty() {
        bail!("every kernel candidate produced a materially indefinite training Gram");
    }
    // Best inner score first; grid order breaks ties deterministically.
    ranking.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    // Refit the best candidate on the full training split; a candidate that
    // only turns indefinite at full training size falls through to the next.
    for &(_, cand_idx, c_idx) in &ranking {
        let chosen = candidates[cand_idx];
        let chosen_c = config.c_grid[c_idx];
        match view.train_and_score(labels, &train, &test, chosen, chosen_c) {
            Ok(accuracy) => {
                return Ok(RepeatOutcome {
                    repeat,
                    accuracy,
                    chosen_c,
                    chosen_t: chosen.t,
                    chosen_t_quantile: chosen.t_quantile,
                    chosen_kernel_index: chosen.kernel_index,
                });
            }
            Err(e) if is_indefinite(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    bail!("every ranked candidate produced a materially indefinite training Gram at refit")
}

/// Runs the full repeated-splits protocol; repeats execute in parallel and
/// are reported in index order.
pub fn cross_validate(
    kernel: CvKernel,
    provenance: KernelParams,
    labels: &[i32],
    config: &CvConfig,
) -> Result<CvReport> {
    if config.c_grid.is_empty() {
        bail!("empty C grid");
    }
    if config.repeats == 0 {
        bail!("need at least one repeat");
    }
    if config.folds < 2 {
        bail!("need at least two inner folds");
    }
    if !(config.train_frac > 0.0 && config.train_frac < 1.0) {
        bail!("train fraction must lie in (0, 1)");
    }
    let view = KernelView { kernel, provenance };
    let per_repeat = (0..config.repeats)
        .into_par_iter()
        .map(|repeat| run_repeat(&view, labels, config, repeat))
        .collect::<Result<Vec<RepeatOutcome>>>()?;
    let accuracies: Vec<f64> = per_repeat.iter().map(|r| r.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accuracies);
    Ok(CvReport {
        per_repeat,
        mean_accuracy,
        std_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified_and_deterministic() {
        let labels: Vec<i32> = (0..30).map(|i| (i % 3) as i32).collect();
        let (train, test) = stratified_split(&labels, 0.7, 9);
        assert_eq!(train.len(), 21);
        assert_eq!(test.len(), 9);
        for class in 0..3 {
            assert_eq!(train.iter().filter(|&&i| labels[i] == class).count(), 7);
            assert_eq!(test.iter().filter(|&&i| labels[i] == class).count(), 3);
        }
        assert_eq!(stratified_split(&labels, 0.7, 9), (train.clone(), test));
        assert_ne!(stratified_split(&labels, 0.7, 10).0, train);
    }

    #[test]
    fn folds_partition_the_index_set() {
        let labels: Vec<i32> = (0..20).map(|i| (i % 2) as i32).collect();
        let indices: Vec<usize> = (0..20).collect();
        let folds = stratified_folds(&indices, &labels, 3, 4);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, indices);
        for fold in &folds {
            assert!(fold.len() >= 6);
        }
    }

    #[test]
    fn block_kernel_classifies_perfectly() {
        let n_per = 6usize;
        let labels: Vec<i32> = (0..3 * n_per).map(|i| (i / n_per) as i32).collect();
        let k = DMatrix::from_fn(labels.len(), labels.len(), |i, j| {
            if labels[i] == labels[j] {
                1.0
            } else {
                0.2
            }
        });
        let config = CvConfig {
            t_quantiles: vec![],
            fixed_t: None,
            c_grid: vec![0.1, 1.0, 10.0],
            folds: 3,
            repeats: 4,
            train_frac: 0.7,
            seed: 1,
        };
        let provenance = KernelParams::Pss(persistence_fisher::kernels::PssParams { sigma: 1.0 });
        let report = cross_validate(CvKernel::Fixed(&k), provenance, &labels, &config).unwrap();
        assert_eq!(report.mean_accuracy, 1.0);
        assert_eq!(report.std_accuracy, 0.0);
        assert_eq!(report.per_repeat.len(), 4);
    }
}
