//! Kernels and information geometry for persistence diagrams.
//!
//! The centerpiece is the Fisher information metric between persistence
//! diagrams and the positive definite kernel `exp(-t * d_FIM)` built on it.
//! The crate also ships the supporting pipeline: Vietoris–Rips and
//! sublevel-set persistence, diagram smoothing into discrete measures, a
//! 2-D fast Gauss transform with a certified error bound, the PSS/PWG/SW
//! baseline kernels, a small one-vs-one kernel SVM, and KFDR change-point
//! detection.

pub mod datagen;
pub mod diagram;
pub mod fgt;
pub mod homology;
pub mod kernels;
pub mod learn;
pub mod measure;
pub mod metric;

mod error;
pub use error::{Error, Result};
