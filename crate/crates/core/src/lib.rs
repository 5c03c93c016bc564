//! Steady-state entanglement and EPR-paradox analysis for two collective
//! atomic spin ensembles coupled by engineered dissipation.
//!
//! - [`model`]: squeezing parameters, rates, population model
//! - [`dynamics`]: second-moment equations, RK4 integration, steady states
//! - [`witnesses`]: inference variances, gains, sum and EPR criteria
//! - [`measurement`]: Monte-Carlo readout with verifying pulses

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod measurement;
pub mod model;
pub mod witnesses;

pub use dynamics::{
    coherent_initial, integrate, mean_spin_steady, moment_derivatives, steady_state, Axis, Branch,
    MomentRates, MomentState, Trajectory,
};
pub use error::{Error, Result};
pub use measurement::{
    covariance_from_moments, estimate_witnesses, local_readout, sample_spins, Estimate,
    EstimatedWitnesses, PulseModel, SpinCovariance, SpinSampleSet,
};
pub use model::{p2_steady, ModelParams, PopulationModel, RateSet, SqueezeParams};
pub use witnesses::{
    classify, classify_steady, duan_entanglement, epr_parameter, gain_entanglement,
    inference_variance, optimal_gain, GainPair, Side, WitnessFlags, WitnessReport,
};
