//! Parameter sweeps over `Z` for a family of dephasing rates.

use rayon::prelude::*;

use spinepr_core::measurement::simulate_local_experiment;
use spinepr_core::{
    classify_steady, optimal_gain, p2_steady, EstimatedWitnesses, ModelParams, PulseModel, RateSet,
    SqueezeParams, WitnessFlags,
};

use crate::config::{McConfig, Scale, SweepConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }

    /// Status column text; never contains a comma.
    pub fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Failed(msg) => format!("error: {}", msg.replace([',', '\n', '\r'], ";")),
        }
    }
}

/// One evaluated `(Z, Γ_d^add)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub z: f64,
    pub mu: f64,
    pub nu: f64,
    pub p2: f64,
    pub gamma_d_add: f64,
    pub g_opt: f64,
    pub var_inf_z: f64,
    pub var_inf_y: f64,
    pub xi_inf: f64,
    pub xi_g_inf: f64,
    pub e_epr_inf: f64,
    pub flags: WitnessFlags,
    pub status: RowStatus,
}

impl SweepRow {
    fn failed(z: f64, gamma_d_add: f64, err: impl ToString) -> Self {
        Self {
            z,
            mu: f64::NAN,
            nu: f64::NAN,
            p2: f64::NAN,
            gamma_d_add,
            g_opt: f64::NAN,
            var_inf_z: f64::NAN,
            var_inf_y: f64::NAN,
            xi_inf: f64::NAN,
            xi_g_inf: f64::NAN,
            e_epr_inf: f64::NAN,
            flags: WitnessFlags::default(),
            status: RowStatus::Failed(err.to_string()),
        }
    }
}

/// Monte-Carlo estimate attached to a sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub z: f64,
    pub gamma_d_add: f64,
    pub m: usize,
    pub seed: u64,
    pub estimate: Result<EstimatedWitnesses, String>,
}

/// Minima of one curve over the `Z` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMinimum {
    pub gamma_d_add: f64,
    pub e_epr_min: f64,
    pub z_at_e_epr_min: f64,
    pub xi_min: f64,
    pub z_at_xi_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub minima: Vec<CurveMinimum>,
    pub mc: Vec<McRow>,
}

/// `Z` values of the sweep, endpoints included.
pub fn z_grid(cfg: &SweepConfig) -> Vec<f64> {
    let n = cfg.z_steps;
    if n == 1 || cfg.z_min == cfg.z_max {
        return vec![cfg.z_min; n];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                return cfg.z_max;
            }
            let t = i as f64 / last;
            match cfg.scale {
                Scale::Linear => cfg.z_min + t * (cfg.z_max - cfg.z_min),
                Scale::Log => cfg.z_min * (cfg.z_max / cfg.z_min).powf(t),
            }
        })
        .collect()
}

/// Model parameters for one sweep point.
pub fn point_params(
    cfg: &SweepConfig,
    z: f64,
    gamma_d_add: f64,
) -> spinepr_core::Result<ModelParams> {
    let squeeze = SqueezeParams::from_z(z)?;
    let rates = RateSet::from_squeeze(&squeeze, cfg.gamma, gamma_d_add, cfg.d)?;
    ModelParams::new(squeeze, rates, cfg.n_atoms, cfg.pop)
}

/// Steady state, optimal gains and every witness at one point.
pub fn evaluate_point(cfg: &SweepConfig, z: f64, gamma_d_add: f64) -> SweepRow {
    let eval = || -> spinepr_core::Result<SweepRow> {
        let p = point_params(cfg, z, gamma_d_add)?;
        let (_, report) = classify_steady(&p)?;
        let gain = optimal_gain(&p)?;
        Ok(SweepRow {
            z,
            mu: p.squeeze().mu(),
            nu: p.squeeze().nu(),
            p2: p2_steady(&p)?,
            gamma_d_add,
            g_opt: gain.magnitude(),
            var_inf_z: report.var_inf_z,
            var_inf_y: report.var_inf_y,
            xi_inf: report.delta_ent,
            xi_g_inf: report.delta_g_ent,
            e_epr_inf: report.e_epr_ab,
            flags: report.flags,
            status: RowStatus::Ok,
        })
    };
    eval().unwrap_or_else(|err| SweepRow::failed(z, gamma_d_add, err))
}

/// Seed for the `index`-th Monte-Carlo point, independent of scheduling.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut x = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Runs the Monte-Carlo local readout at one point.
pub fn monte_carlo_point(
    cfg: &SweepConfig,
    mc: &McConfig,
    z: f64,
    gamma_d_add: f64,
    seed: u64,
) -> McRow {
    let estimate = (|| -> spinepr_core::Result<EstimatedWitnesses> {
        let p = point_params(cfg, z, gamma_d_add)?;
        let (state, _) = classify_steady(&p)?;
        let pulse = if mc.alpha.is_infinite() {
            PulseModel::ideal()
        } else {
            PulseModel::new(mc.alpha, mc.n_p, mc.r_light)?
        };
        simulate_local_experiment(&state, &p, &pulse, mc.m, seed)
    })()
    .map_err(|e| e.to_string());
    McRow {
        z,
        gamma_d_add,
        m: mc.m,
        seed,
        estimate,
    }
}

fn curve_minimum(gamma_d_add: f64, rows: &[SweepRow]) -> Option<CurveMinimum> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.status.is_ok()).collect();
    let by = |f: fn(&SweepRow) -> f64| {
        ok.iter()
            .copied()
            .min_by(|a, b| f(a).total_cmp(&f(b)))
            .map(|r| (f(r), r.z))
    };
    let (e_epr_min, z_at_e_epr_min) = by(|r| r.e_epr_inf)?;
    let (xi_min, z_at_xi_min) = by(|r| r.xi_inf)?;
    Some(CurveMinimum {
        gamma_d_add,
        e_epr_min,
        z_at_e_epr_min,
        xi_min,
        z_at_xi_min,
    })
}

/// Evaluates every `(Γ_d^add, Z)` point, curve by curve in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> SweepTable {
    let grid = z_grid(cfg);
    let points: Vec<(f64, f64)> = cfg
        .gamma_d_add_list
        .iter()
        .flat_map(|&add| grid.iter().map(move |&z| (z, add)))
        .collect();

    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(z, add)| evaluate_point(cfg, z, add))
        .collect();

    let minima = cfg
        .gamma_d_add_list
        .iter()
        .zip(rows.chunks(grid.len()))
        .filter_map(|(&add, curve)| curve_minimum(add, curve))
        .collect();

    let mc = match &cfg.mc {
        Some(mc) => points
            .iter()
            .enumerate()
            .map(|(i, &(z, add))| monte_carlo_point(cfg, mc, z, add, point_seed(mc.seed, i)))
            .collect(),
        None => Vec::new(),
    };

    SweepTable { rows, minima, mc }
}
