//! One-vs-one kernel SVM on precomputed Gram matrices.
//!
//! The binary solver is sequential minimal optimization with working-set
//! size 2 and maximal-violating-pair selection, no shrinking. Training
//! stops when the KKT violation drops below 1e-3. Multi-class follows the
//! usual one-vs-one voting; vote ties resolve to the lowest class id, as
//! does a decision value of exactly zero.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::LabeledGram;

const KKT_TOLERANCE: f64 = 1e-3;
/// Budget expressed in kernel-matrix entries touched; each SMO iteration
/// reads two rows.
const MAX_KERNEL_HITS: usize = 10_000_000;
/// Eigenvalues of the training Gram below `-1e-6 * max` indicate a broken
/// kernel rather than rounding; refuse to train on such matrices.
const INDEFINITE_TOLERANCE: f64 = 1e-6;

/// One trained binary machine of the one-vs-one ensemble.
#[derive(Clone, Debug)]
struct BinaryMachine {
    class_pos: i32,
    class_neg: i32,
    /// Indices into the training set.
    support: Vec<usize>,
    /// `alpha_i * y_i` per support vector.
    coefficients: Vec<f64>,
    bias: f64,
}

/// A one-vs-one multi-class model over a fixed training set.
#[derive(Clone, Debug)]
pub struct SvmModel {
    classes: Vec<i32>,
    machines: Vec<BinaryMachine>,
    train_size: usize,
}

impl SvmModel {
    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }
}

/// Result of one binary SMO run.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Primal-form dual objective `1/2 a'Qa - e'a` after every iteration
    /// (monotonically non-increasing).
    pub objective_trace: Vec<f64>,
}

/// Solves `min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0` for `Q = yy' * K`.
pub(crate) fn smo_solve(kernel: &DMatrix<f64>, labels: &[f64], c: f64) -> SmoSolution {
    let n = labels.len();
    let mut alphas = vec![0.0f64; n];
    // Gradient of the objective; at alpha = 0 it is -e.
    let mut gradient = vec![-1.0f64; n];
    let max_iter = (MAX_KERNEL_HITS / (2 * n).max(1)).max(1_000);
    let mut objective_trace = Vec::new();
    let mut iterations = 0;

    let objective = |alphas: &[f64], gradient: &[f64]| -> f64 {
        0.5 * alphas
            .iter()
            .zip(gradient)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>()
    };

    loop {
        // Maximal violating pair over -y * gradient.
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for t in 0..n {
            let score = -labels[t] * gradient[t];
            let in_up = (labels[t] > 0.0 && alphas[t] < c) || (labels[t] < 0.0 && alphas[t] > 0.0);
            let in_low = (labels[t] > 0.0 && alphas[t] > 0.0) || (labels[t] < 0.0 && alphas[t] < c);
            if in_up && up.map_or(true, |(_, best)| score > best) {
                up = Some((t, score));
            }
            if in_low && low.map_or(true, |(_, best)| score < best) {
                low = Some((t, score));
            }
        }
        let (Some((i, b_up)), Some((j, b_low))) = (up, low) else {
            break;
        };
        if b_up - b_low <= KKT_TOLERANCE || iterations >= max_iter {
            break;
        }

        let eta = (kernel[(i, i)] + kernel[(j, j)] - 2.0 * kernel[(i, j)]).max(1e-12);
        let mut step = (b_up - b_low) / eta;
        // Box constraints on alpha_i + y_i*step and alpha_j - y_j*step.
        let cap_i = if labels[i] > 0.0 {
            c - alphas[i]
        } else {
            alphas[i]
        };
        let cap_j = if labels[j] > 0.0 {
            alphas[j]
        } else {
            c - alphas[j]
        };
        step = step.min(cap_i).min(cap_j);

        alphas[i] += labels[i] * step;
        alphas[j] -= labels[j] * step;
        for t in 0..n {
            gradient[t] += step * labels[t] * (kernel[(t, i)] - kernel[(t, j)]);
        }
        iterations += 1;
        objective_trace.push(objective(&alphas, &gradient));
    }

    // Bias from free support vectors; midpoint of the violating-pair bounds
    // when none are free.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..n {
        if alphas[t] > 0.0 && alphas[t] < c {
            free_sum += -labels[t] * gradient[t];
            free_count += 1;
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let mut b_up = f64::NEG_INFINITY;
        let mut b_low = f64::INFINITY;
        for t in 0..n {
            let score = -labels[t] * gradient[t];
            let in_up = (labels[t] > 0.0 && alphas[t] < c) || (labels[t] < 0.0 && alphas[t] > 0.0);
            let in_low = (labels[t] > 0.0 && alphas[t] > 0.0) || (labels[t] < 0.0 && alphas[t] < c);
            if in_up {
                b_up = b_up.max(score);
            }
            if in_low {
                b_low = b_low.min(score);
            }
        }
        0.5 * (b_up + b_low)
    };

    SmoSolution {
        alphas,
        bias,
        iterations,
        objective_trace,
    }
}

/// Trains a one-vs-one kernel SVM with box parameter `c`.
///
/// The training Gram must be finite and positive semidefinite up to
/// rounding: eigenvalues in `[-1e-6 * max, 0)` are tolerated, anything
/// lower is an error.
pub fn svm_train(data: &LabeledGram, c: f64) -> Result<SvmModel> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(
            "C must be positive and finite".to_string(),
        ));
    }
    let k = data.gram.values();
    let n = k.nrows();
    for i in 0..n {
        for j in 0..n {
            if !k[(i, j)].is_finite() {
                return Err(Error::NonFiniteGram { row: i, col: j });
            }
        }
    }

    let mut classes: Vec<i32> = data.labels.clone();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }

    let eigenvalues = k.clone().symmetric_eigen().eigenvalues;
    let max_eig = eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min_eig = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -INDEFINITE_TOLERANCE * max_eig.max(0.0) {
        return Err(Error::IndefiniteGram {
            min_eigenvalue: min_eig,
        });
    }

    let mut machines = Vec::new();
    for (a_idx, &class_pos) in classes.iter().enumerate() {
        for &class_neg in &classes[a_idx + 1..] {
            let indices: Vec<usize> = (0..n)
                .filter(|&t| data.labels[t] == class_pos || data.labels[t] == class_neg)
                .collect();
            let labels: Vec<f64> = indices
                .iter()
                .map(|&t| {
                    if data.labels[t] == class_pos {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            let m = indices.len();
            let mut sub = DMatrix::zeros(m, m);
            for (r, &gr) in indices.iter().enumerate() {
                for (s, &gs) in indices.iter().enumerate() {
                    sub[(r, s)] = k[(gr, gs)];
                }
            }
            let solution = smo_solve(&sub, &labels, c);
            let mut support = Vec::new();
            let mut coefficients = Vec::new();
            for (local, &alpha) in solution.alphas.iter().enumerate() {
                if alpha > 0.0 {
                    support.push(indices[local]);
                    coefficients.push(alpha * labels[local]);
                }
            }
            machines.push(BinaryMachine {
                class_pos,
                class_neg,
                support,
                coefficients,
                bias: solution.bias,
            });
        }
    }
    Ok(SvmModel {
        classes,
        machines,
        train_size: n,
    })
}

/// Predicts class ids for each row of `cross_gram` (test x train kernel
/// values) by one-vs-one majority vote.
pub fn svm_predict(model: &SvmModel, cross_gram: &DMatrix<f64>) -> Result<Vec<i32>> {
    if cross_gram.ncols() != model.train_size {
        return Err(Error::DimensionMismatch {
            expected: model.train_size,
            got: cross_gram.ncols(),
        });
    }
    let mut predictions = Vec::with_capacity(cross_gram.nrows());
    for row in 0..cross_gram.nrows() {
        let mut votes: Vec<u32> = vec![0; model.classes.len()];
        for machine in &model.machines {
            let mut decision = machine.bias;
            for (&s, &coeff) in machine.support.iter().zip(&machine.coefficients) {
                decision += coeff * cross_gram[(row, s)];
            }
            let winner = if decision > 0.0 {
                machine.class_pos
            } else if decision < 0.0 {
                machine.class_neg
            } else {
                machine.class_pos.min(machine.class_neg)
            };
            let slot = model.classes.iter().position(|&c| c == winner).unwrap();
            votes[slot] += 1;
        }
        // Ties resolve to the lowest class id: classes are ascending and the
        // scan keeps the first maximum.
        let mut best = 0usize;
        for (slot, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = slot;
            }
        }
        predictions.push(model.classes[best]);
    }
    Ok(predictions)
}
