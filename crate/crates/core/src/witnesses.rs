//! Entanglement and EPR-paradox witnesses evaluated on Gaussian moment data.
//!
//! Conventions: the inference variance of `A` given `B` on one axis is
//! `Δ²(J_A - g J_B) = v_A + g² v_B - 2 g c` with a signed gain `g`, so a
//! positive gain exploits a positive correlation. The two ensembles carry
//! anti-parallel mean spins, and all bounds use `|<J^X>|`.

use crate::dynamics::{steady_state, Axis, Branch, MomentState};
use crate::error::{domain, Error, Result};
use crate::model::{p2_steady, ModelParams};

/// Direction of inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Predict ensemble `A` from measurements on `B`.
    AGivenB,
    /// Predict ensemble `B` from measurements on `A`.
    BGivenA,
}

/// Signed inference gains for the `Y` and `Z` axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub g_y: f64,
    pub g_z: f64,
}

impl GainPair {
    pub fn new(g_y: f64, g_z: f64) -> Self {
        Self { g_y, g_z }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Y => self.g_y,
            Axis::Z => self.g_z,
        }
    }

    /// Sign of the combination `J_A ± |g| J_B` realized by the signed gain.
    pub fn branch(&self, axis: Axis) -> Branch {
        if self.get(axis) < 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    /// Gain magnitude, the quantity plotted against `Z`.
    pub fn magnitude(&self) -> f64 {
        self.g_z.abs().max(self.g_y.abs())
    }
}

/// Classification flags derived from a [`WitnessReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WitnessFlags {
    pub entangled: bool,
    pub epr_ab: bool,
    pub epr_ba: bool,
    pub epr_via_sum: bool,
}

impl WitnessFlags {
    pub fn from_values(delta_ent: f64, delta_g_ent: f64, e_epr_ab: f64, e_epr_ba: f64) -> Self {
        Self {
            entangled: delta_ent.min(delta_g_ent) < 1.0,
            epr_ab: e_epr_ab < 1.0,
            epr_ba: e_epr_ba < 1.0,
            epr_via_sum: delta_ent < 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    /// Optimal gains for inferring `A` from `B`.
    pub gains: GainPair,
    pub var_inf_z: f64,
    pub var_inf_y: f64,
    pub delta_ent: f64,
    pub delta_g_ent: f64,
    pub e_epr_ab: f64,
    pub e_epr_ba: f64,
    pub flags: WitnessFlags,
}

fn side_moments(s: &MomentState, axis: Axis, side: Side) -> (f64, f64, f64) {
    let (va, vb, c) = s.axis_moments(axis);
    match side {
        Side::AGivenB => (va, vb, c),
        Side::BGivenA => (vb, va, c),
    }
}

/// `Δ²(J_target - g J_other)` on `axis`.
pub fn inference_variance(s: &MomentState, g: f64, axis: Axis, side: Side) -> f64 {
    let (target, other, c) = side_moments(s, axis, side);
    target + g * g * other - 2.0 * g * c
}

/// Gains minimizing the inference variances of the given state: the
/// regression coefficients `c / v_other`.
pub fn state_optimal_gain(s: &MomentState, side: Side) -> GainPair {
    let regress = |axis| {
        let (_, other, c) = side_moments(s, axis, side);
        if other > 0.0 {
            c / other
        } else {
            0.0
        }
    };
    GainPair::new(regress(Axis::Y), regress(Axis::Z))
}

/// Analytic steady-state gains
/// `|g| = mu nu dΓ P2² / ([Γ̃ + dΓ P2² (mu² + nu²)] / 2)`.
///
/// The sign on each axis is picked by evaluating both branches on the
/// steady state and keeping the smaller inference variance.
pub fn optimal_gain(p: &ModelParams) -> Result<GainPair> {
    let p2 = p2_steady(p)?;
    let denom = 0.5 * p.variance_source(p2);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "degenerate gain denominator {denom}"
        )));
    }
    let magnitude = p.entangling_source(p2) / denom;
    if magnitude == 0.0 {
        return Ok(GainPair::new(0.0, 0.0));
    }
    let ss = steady_state(p)?;
    let pick = |axis| {
        let plus = inference_variance(&ss, magnitude, axis, Side::AGivenB);
        let minus = inference_variance(&ss, -magnitude, axis, Side::AGivenB);
        if minus < plus {
            -magnitude
        } else {
            magnitude
        }
    };
    Ok(GainPair::new(pick(Axis::Y), pick(Axis::Z)))
}

/// Normalized EPR paradox parameter
/// `Δ_inf(J^Z) Δ_inf(J^Y) / (|<J^X>| / 2)`; values below 1 violate the
/// inferred Heisenberg bound `Δ²_inf Z Δ²_inf Y >= |<J^X>|² / 4`.
pub fn epr_parameter(var_inf_z: f64, var_inf_y: f64, mean_x: f64) -> Result<f64> {
    if !(var_inf_z >= 0.0) || !(var_inf_y >= 0.0) {
        return Err(domain(format!(
            "inference variances must be >= 0, got ({var_inf_z}, {var_inf_y})"
        )));
    }
    if mean_x == 0.0 || !mean_x.is_finite() {
        return Err(Error::UndefinedBound(format!("mean spin {mean_x}")));
    }
    Ok((var_inf_z * var_inf_y).sqrt() / (0.5 * mean_x.abs()))
}

fn mean_spin_total(s: &MomentState) -> Result<f64> {
    if s.mean_x_a == 0.0 || s.mean_x_b == 0.0 {
        return Err(Error::UndefinedBound("zero mean spin".into()));
    }
    Ok(s.mean_x_a.abs() + s.mean_x_b.abs())
}

/// Sum criterion `[Δ²(J_A^Z ± J_B^Z) + Δ²(J_A^Y ± J_B^Y)] / (|<J_A^X>| + |<J_B^X>|)`,
/// with the sign on each axis chosen to reduce the fluctuations.
pub fn duan_entanglement(s: &MomentState) -> Result<f64> {
    let denom = mean_spin_total(s)?;
    let reduced = |axis| {
        let (va, vb, c) = s.axis_moments(axis);
        va + vb - 2.0 * c.abs()
    };
    Ok((reduced(Axis::Z) + reduced(Axis::Y)) / denom)
}

/// Gain-weighted sum criterion
/// `[Δ²_inf(J_A^Z) + Δ²_inf(J_A^Y)] / (|<J_A^X>| + |g_Y g_Z| |<J_B^X>|)`.
///
/// Equals [`duan_entanglement`] at unit gains signed along the reduced
/// branches.
pub fn gain_entanglement(s: &MomentState, g: &GainPair) -> Result<f64> {
    let denom = s.mean_x_a.abs() + (g.g_y * g.g_z).abs() * s.mean_x_b.abs();
    if !(denom > 0.0) {
        return Err(Error::UndefinedBound("zero gain-weighted mean spin".into()));
    }
    let num = inference_variance(s, g.g_z, Axis::Z, Side::AGivenB)
        + inference_variance(s, g.g_y, Axis::Y, Side::AGivenB);
    Ok(num / denom)
}

/// Evaluates every witness on `s` with the state's optimal gains.
pub fn classify(s: &MomentState) -> Result<WitnessReport> {
    s.validate()?;
    let gains = state_optimal_gain(s, Side::AGivenB);
    let var_inf_z = inference_variance(s, gains.g_z, Axis::Z, Side::AGivenB).max(0.0);
    let var_inf_y = inference_variance(s, gains.g_y, Axis::Y, Side::AGivenB).max(0.0);
    let e_epr_ab = epr_parameter(var_inf_z, var_inf_y, s.mean_x_a)?;

    let back = state_optimal_gain(s, Side::BGivenA);
    let e_epr_ba = epr_parameter(
        inference_variance(s, back.g_z, Axis::Z, Side::BGivenA).max(0.0),
        inference_variance(s, back.g_y, Axis::Y, Side::BGivenA).max(0.0),
        s.mean_x_b,
    )?;

    let delta_ent = duan_entanglement(s)?;
    let delta_g_ent = gain_entanglement(s, &gains)?;
    Ok(WitnessReport {
        gains,
        var_inf_z,
        var_inf_y,
        delta_ent,
        delta_g_ent,
        e_epr_ab,
        e_epr_ba,
        flags: WitnessFlags::from_values(delta_ent, delta_g_ent, e_epr_ab, e_epr_ba),
    })
}

/// Steady state of `p` and its witness report.
pub fn classify_steady(p: &ModelParams) -> Result<(MomentState, WitnessReport)> {
    let s = steady_state(p)?;
    let report = classify(&s)?;
    Ok((s, report))
}
