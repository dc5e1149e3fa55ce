//! Reproducible experiment definitions.

use std::collections::BTreeMap;

use crate::rca::DeviationReport;

pub mod chain;
pub mod fmo;

pub use chain::{run_chain, ChainRun, ChainScenario};
pub use fmo::{bundled_fmo, load_fmo, parse_fmo, run_fmo, FmoRun, FmoScenario};

/// Pairwise comparisons keyed `"<a>_vs_<b>"`, ordered for stable output.
pub type Reports = BTreeMap<String, DeviationReport>;

/// `samples` evenly spaced points on [0, t_max]; a single sample is t = 0.
pub fn time_grid(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}
