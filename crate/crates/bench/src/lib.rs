//! Shared fixtures for the criterion benchmarks.

use spinepr_core::ModelParams;

/// The radiative-damping operating point at `Z = 2`, `d = 30`.
pub fn reference_point(n_atoms: f64) -> ModelParams {
    ModelParams::radiative(2.0, 30.0, 0.0, n_atoms).expect("valid parameters")
}

/// A log-spaced grid of `Z` values on `[1, 4]`.
pub fn z_grid(steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| 4f64.powf(i as f64 / (steps.max(2) - 1) as f64))
        .collect()
}
