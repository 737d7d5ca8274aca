//! Kernel consumers: a small one-vs-one kernel SVM trained by sequential
//! minimal optimization, and KFDR change-point detection. Both operate
//! purely on precomputed Gram matrices.

mod kfdr;
mod svm;

pub use kfdr::{kfdr_change_point, kfdr_scan, KfdrConfig};
pub use svm::{svm_predict, svm_train, SvmModel};

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// A Gram matrix paired with per-diagram class labels.
#[derive(Clone, Debug)]
pub struct LabeledGram {
    pub gram: GramMatrix,
    pub labels: Vec<i32>,
}

impl LabeledGram {
    pub fn new(gram: GramMatrix, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != gram.order() {
            return Err(Error::DimensionMismatch {
                expected: gram.order(),
                got: labels.len(),
            });
        }
        Ok(Self { gram, labels })
    }
}
