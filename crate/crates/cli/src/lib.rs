//! Batch front-end: configuration, parameter sweeps, Monte-Carlo runs and
//! CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, ConfigError, McConfig, Scale, SweepConfig};
pub use output::{emit_csv, format_number, render_sweep_csv, SWEEP_HEADER};
pub use sweep::{run_sweep, CurveMinimum, McRow, RowStatus, SweepRow, SweepTable};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Minimum separation `c ΔT` (meters) for two measurements of duration
/// `delta_t` seconds to be space-like separated.
pub fn causal_separation(delta_t: f64) -> spinepr_core::Result<f64> {
    if !(delta_t >= 0.0) || !delta_t.is_finite() {
        return Err(spinepr_core::Error::Domain(format!(
            "measurement time must be finite and >= 0, got {delta_t}"
        )));
    }
    Ok(SPEED_OF_LIGHT * delta_t)
}
