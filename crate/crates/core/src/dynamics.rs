//! Second-moment dynamics of the two ensembles.
//!
//! Only the six second moments `<(J^Z)^2>`, `<(J^Y)^2>` of each ensemble and
//! the cross terms `<J_A^Z J_B^Z>`, `<J_A^Y J_B^Y>` evolve. First moments of
//! `J^Y`, `J^Z` are zero. The population `P2` and the mean spins `<J^X>` are
//! held at their steady-state values during integration.
//!
//! All six equations share the decay rate `Γ̃ + dΓ P2`, so the system relaxes
//! exponentially onto the analytic fixed point returned by [`steady_state`].

use crate::error::{domain, Error, Result};
use crate::model::{p2_steady, ModelParams};

/// Spin component transverse to the mean spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Y,
    Z,
}

/// Sign in a combination `J_A ± g J_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

const CS_TOL: f64 = 1e-12;

/// Gaussian moment data for the ensemble pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub v_az: f64,
    pub v_ay: f64,
    pub v_bz: f64,
    pub v_by: f64,
    pub c_zz: f64,
    pub c_yy: f64,
    pub p2: f64,
    pub mean_x_a: f64,
    pub mean_x_b: f64,
}

impl MomentState {
    /// Checks non-negativity, the Cauchy-Schwarz bounds and the anti-parallel
    /// mean-spin geometry.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.v_az,
            self.v_ay,
            self.v_bz,
            self.v_by,
            self.c_zz,
            self.c_yy,
            self.p2,
            self.mean_x_a,
            self.mean_x_b,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure("non-finite moment".into()));
        }
        let scale = self.v_az.max(self.v_ay).max(self.v_bz).max(self.v_by);
        for (name, v) in [
            ("v_az", self.v_az),
            ("v_ay", self.v_ay),
            ("v_bz", self.v_bz),
            ("v_by", self.v_by),
        ] {
            if v < -CS_TOL * scale {
                return Err(domain(format!("{name} is negative: {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.p2) {
            return Err(domain(format!("p2 outside [0, 1]: {}", self.p2)));
        }
        self.check_cauchy_schwarz()?;
        let m = self.mean_x_a.abs().max(self.mean_x_b.abs());
        if (self.mean_x_a + self.mean_x_b).abs() > CS_TOL * m.max(f64::MIN_POSITIVE) {
            return Err(domain("mean spins are not anti-parallel"));
        }
        Ok(())
    }

    pub(crate) fn check_cauchy_schwarz(&self) -> Result<()> {
        let pairs = [
            ("zz", self.c_zz, self.v_az, self.v_bz),
            ("yy", self.c_yy, self.v_ay, self.v_by),
        ];
        for (name, c, va, vb) in pairs {
            let bound = (va.max(0.0) * vb.max(0.0)).sqrt();
            if c.abs() > bound * (1.0 + CS_TOL) + CS_TOL * va.max(vb) {
                return Err(Error::NumericalFailure(format!(
                    "correlation c_{name} = {c} violates Cauchy-Schwarz bound {bound}"
                )));
            }
        }
        Ok(())
    }

    /// Variances of ensemble `A` and `B` and their covariance on one axis.
    pub fn axis_moments(&self, axis: Axis) -> (f64, f64, f64) {
        match axis {
            Axis::Y => (self.v_ay, self.v_by, self.c_yy),
            Axis::Z => (self.v_az, self.v_bz, self.c_zz),
        }
    }

    /// The same state with ensembles `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            v_az: self.v_bz,
            v_ay: self.v_by,
            v_bz: self.v_az,
            v_by: self.v_ay,
            mean_x_a: self.mean_x_b,
            mean_x_b: self.mean_x_a,
            ..*self
        }
    }

    fn moments(&self) -> [f64; 6] {
        [
            self.v_az, self.v_ay, self.v_bz, self.v_by, self.c_zz, self.c_yy,
        ]
    }

    fn with_moments(&self, m: [f64; 6]) -> Self {
        Self {
            v_az: m[0],
            v_ay: m[1],
            v_bz: m[2],
            v_by: m[3],
            c_zz: m[4],
            c_yy: m[5],
            ..*self
        }
    }

    /// Largest absolute difference over the six second moments.
    pub fn max_moment_diff(&self, other: &Self) -> f64 {
        self.moments()
            .iter()
            .zip(other.moments())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Time derivative of a [`MomentState`]; the population and mean-spin rates
/// are identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRates {
    pub v_az: f64,
    pub v_ay: f64,
    pub v_bz: f64,
    pub v_by: f64,
    pub c_zz: f64,
    pub c_yy: f64,
    pub p2: f64,
    pub mean_x_a: f64,
    pub mean_x_b: f64,
}

impl MomentRates {
    fn from_moments(m: [f64; 6]) -> Self {
        Self {
            v_az: m[0],
            v_ay: m[1],
            v_bz: m[2],
            v_by: m[3],
            c_zz: m[4],
            c_yy: m[5],
            p2: 0.0,
            mean_x_a: 0.0,
            mean_x_b: 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        [
            self.v_az, self.v_ay, self.v_bz, self.v_by, self.c_zz, self.c_yy,
        ]
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Sampled solution of the moment equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
}

impl Trajectory {
    pub fn last(&self) -> &MomentState {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Spin coherent state of `n_atoms` atoms per ensemble, polarized along
/// `+X` in `A` and `-X` in `B`.
pub fn coherent_initial(n_atoms: f64) -> Result<MomentState> {
    if !(n_atoms > 0.0) || !n_atoms.is_finite() {
        return Err(domain(format!(
            "atom number must be finite and > 0, got {n_atoms}"
        )));
    }
    let shot = 0.25 * n_atoms;
    Ok(MomentState {
        v_az: shot,
        v_ay: shot,
        v_bz: shot,
        v_by: shot,
        c_zz: 0.0,
        c_yy: 0.0,
        p2: 1.0,
        mean_x_a: 0.5 * n_atoms,
        mean_x_b: -0.5 * n_atoms,
    })
}

fn derivative_moments(m: &[f64; 6], p2: f64, p: &ModelParams) -> [f64; 6] {
    let n = p.n_atoms();
    let decay = p.relaxation_rate(p2);
    let var_source = 0.25 * n * p.variance_source(p2);
    let cross_source = 0.5 * n * p.entangling_source(p2);
    [
        -decay * m[0] + var_source,
        -decay * m[1] + var_source,
        -decay * m[2] + var_source,
        -decay * m[3] + var_source,
        -decay * m[4] + cross_source,
        -decay * m[5] - cross_source,
    ]
}

/// Right-hand side of the moment equations, using `s.p2` as the population.
pub fn moment_derivatives(s: &MomentState, p: &ModelParams) -> Result<MomentRates> {
    s.validate()?;
    Ok(MomentRates::from_moments(derivative_moments(
        &s.moments(),
        s.p2,
        p,
    )))
}

/// Rate of change of the conditional variance `Δ²(J_A ± g J_B)` on `axis`,
/// with `P2` at its steady value.
///
/// `branch` is the sign in the combination. The source term enters with that
/// sign on `Z` and with the opposite sign on `Y`, following the signs of the
/// two cross-correlation sources.
pub fn conditional_variance_derivative(
    value: f64,
    g: f64,
    axis: Axis,
    branch: Branch,
    p: &ModelParams,
) -> Result<f64> {
    if !(value >= 0.0) || !g.is_finite() {
        return Err(domain(format!(
            "invalid conditional variance input ({value}, g = {g})"
        )));
    }
    let p2 = p2_steady(p)?;
    let n = p.n_atoms();
    let cross = n * g * p.entangling_source(p2) * branch.sign() * axis_source_sign(axis);
    Ok(-p.relaxation_rate(p2) * value + 0.25 * n * (1.0 + g * g) * p.variance_source(p2) + cross)
}

/// Fixed point of [`conditional_variance_derivative`].
pub fn conditional_variance_steady(
    g: f64,
    axis: Axis,
    branch: Branch,
    p: &ModelParams,
) -> Result<f64> {
    let p2 = p2_steady(p)?;
    let decay = p.relaxation_rate(p2);
    if !(decay > 0.0) {
        return Err(Error::NumericalFailure("relaxation rate is zero".into()));
    }
    let n = p.n_atoms();
    let a = 0.25 * n * (1.0 + g * g);
    let cross = n * g * p.entangling_source(p2) * branch.sign() * axis_source_sign(axis);
    Ok((a * p.variance_source(p2) + cross) / decay)
}

fn axis_source_sign(axis: Axis) -> f64 {
    match axis {
        Axis::Z => 1.0,
        Axis::Y => -1.0,
    }
}

/// `|<J^X>|` in the steady state, `(N/2) P2,∞`.
pub fn mean_spin_steady(p: &ModelParams) -> Result<f64> {
    Ok(0.5 * p.n_atoms() * p2_steady(p)?)
}

/// Analytic fixed point of the moment equations.
pub fn steady_state(p: &ModelParams) -> Result<MomentState> {
    let p2 = p2_steady(p)?;
    let decay = p.relaxation_rate(p2);
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "degenerate relaxation rate {decay}"
        )));
    }
    let n = p.n_atoms();
    let v = 0.25 * n * p.variance_source(p2) / decay;
    let c = 0.5 * n * p.entangling_source(p2) / decay;
    let mean = 0.5 * n * p2;
    let s = MomentState {
        v_az: v,
        v_ay: v,
        v_bz: v,
        v_by: v,
        c_zz: c,
        c_yy: -c,
        p2,
        mean_x_a: mean,
        mean_x_b: -mean,
    };
    s.check_cauchy_schwarz()?;
    Ok(s)
}

/// Largest step accepted by [`integrate`] for the given parameters.
pub fn max_stable_step(p: &ModelParams) -> f64 {
    0.1 / p.stiffness_bound()
}

/// Fixed-step classical fourth-order Runge-Kutta integration from `t = 0`
/// to `t_end` (in units of `1/Γ`).
///
/// The population and mean spins of `init` are replaced by their steady
/// values before the first step. The last step is shortened to land on
/// `t_end` exactly. Every accepted state is checked against the
/// Cauchy-Schwarz bounds.
pub fn integrate(init: &MomentState, p: &ModelParams, t_end: f64, h: f64) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(domain(format!("t_end must be finite and > 0, got {t_end}")));
    }
    if !(h > 0.0) {
        return Err(domain(format!("step must be > 0, got {h}")));
    }
    let limit = max_stable_step(p);
    if h > limit {
        return Err(Error::Stability { step: h, limit });
    }
    init.validate()?;

    let p2 = p2_steady(p)?;
    let mean = mean_spin_steady(p)?;
    let mut state = MomentState {
        p2,
        mean_x_a: mean,
        mean_x_b: -mean,
        ..*init
    };

    let n_full = (t_end / h).floor() as usize;
    let remainder = t_end - n_full as f64 * h;
    let extra = remainder > 1e-9 * h;
    let n_steps = n_full + usize::from(extra);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(state);

    let mut y = state.moments();
    for k in 0..n_steps {
        let (dt, t_next) = if k == n_full {
            (remainder, t_end)
        } else if k + 1 == n_full && !extra {
            (h, t_end)
        } else {
            (h, (k + 1) as f64 * h)
        };
        y = rk4_step(&y, dt, |m| derivative_moments(m, p2, p));
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite moment at t = {t_next}"
            )));
        }
        state = state.with_moments(y);
        state.check_cauchy_schwarz()?;
        times.push(t_next);
        states.push(state);
    }

    Ok(Trajectory { times, states })
}

fn rk4_step<F>(y: &[f64; 6], h: f64, f: F) -> [f64; 6]
where
    F: Fn(&[f64; 6]) -> [f64; 6],
{
    let axpy = |a: &[f64; 6], s: f64, b: &[f64; 6]| -> [f64; 6] {
        std::array::from_fn(|i| a[i] + s * b[i])
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &k1));
    let k3 = f(&axpy(y, 0.5 * h, &k2));
    let k4 = f(&axpy(y, h, &k3));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_point() -> ModelParams {
        ModelParams::radiative(2.0, 30.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn coherent_state_values() {
        let s = coherent_initial(4.0).unwrap();
        assert_eq!((s.v_az, s.v_ay, s.v_bz, s.v_by), (1.0, 1.0, 1.0, 1.0));
        assert_eq!((s.c_zz, s.c_yy), (0.0, 0.0));
        assert_eq!((s.p2, s.mean_x_a, s.mean_x_b), (1.0, 2.0, -2.0));
        let s = coherent_initial(1.0).unwrap();
        assert_eq!(s.v_ay, 0.25);
        s.validate().unwrap();
        assert!(coherent_initial(0.0).is_err());
        assert!(coherent_initial(-3.0).is_err());
    }

    #[test]
    fn coherent_state_is_fixed_point_without_squeezing() {
        let p = ModelParams::radiative(1.0, 30.0, 0.0, 100.0).unwrap();
        let r = moment_derivatives(&coherent_initial(100.0).unwrap(), &p).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn cross_source_at_z_two() {
        let p = reference_point();
        let p2 = p2_steady(&p).unwrap();
        let s = MomentState {
            p2,
            mean_x_a: 0.5 * p2,
            mean_x_b: -0.5 * p2,
            ..coherent_initial(1.0).unwrap()
        };
        let r = moment_derivatives(&s, &p).unwrap();
        // 0.5 * 0.9375 * 30 * (1/2.125)^2
        assert!((r.c_zz - 3.114186851211073).abs() < 1e-12);
        assert!((r.c_yy + 3.114186851211073).abs() < 1e-12);
    }

    #[test]
    fn steady_state_values() {
        let p = ModelParams::radiative(1.0, 30.0, 0.0, 8.0).unwrap();
        let s = steady_state(&p).unwrap();
        assert_eq!((s.v_az, s.c_zz, s.c_yy), (2.0, 0.0, 0.0));

        let s = steady_state(&reference_point()).unwrap();
        assert!((s.v_az - 0.25).abs() < 1e-15);
        assert!((s.c_zz - 0.151966060913063).abs() < 1e-12);
        assert_eq!(s.c_yy, -s.c_zz);
        assert!((s.mean_x_a - 0.5 / 2.125).abs() < 1e-15);
        let r = moment_derivatives(&s, &reference_point()).unwrap();
        assert!(r.max_abs() < 1e-10);
    }

    #[test]
    fn mean_spin_values() {
        let p = ModelParams::radiative(1.0, 30.0, 0.0, 10.0).unwrap();
        assert_eq!(mean_spin_steady(&p).unwrap(), 5.0);
        let m = mean_spin_steady(&reference_point()).unwrap();
        assert!((m - 0.23529411764705882).abs() < 1e-15);
    }

    #[test]
    fn relaxation_from_coherent_state() {
        let p = reference_point();
        let ss = steady_state(&p).unwrap();
        let traj = integrate(&coherent_initial(1.0).unwrap(), &p, 0.1, 1e-4).unwrap();
        let rate = p.relaxation_rate(ss.p2);
        assert!((rate - 20.492_647_058_823_53).abs() < 1e-12);
        let expected = ss.c_zz * (1.0 - (-rate * 0.1).exp());
        assert!((traj.last().c_zz - expected).abs() < 1e-12);
        assert!((traj.last().c_zz - 0.132388).abs() < 1e-5);
        assert_eq!(traj.times.last().copied(), Some(0.1));
    }

    #[test]
    fn steady_initial_state_stays_put() {
        let p = reference_point().with_n_atoms(1e6).unwrap();
        let ss = steady_state(&p).unwrap();
        let traj = integrate(&ss, &p, 1.0, 1e-3).unwrap();
        for s in &traj.states {
            assert!(s.max_moment_diff(&ss) < 1e-9 * 1e6);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let p = reference_point();
        let ss = steady_state(&p).unwrap();
        let rate = p.relaxation_rate(ss.p2);
        let exact = ss.c_zz * (1.0 - (-rate * 0.1).exp());
        let err = |h: f64| {
            let t = integrate(&coherent_initial(1.0).unwrap(), &p, 0.1, h).unwrap();
            (t.last().c_zz - exact).abs()
        };
        let h = 0.1 / 40.0;
        let ratio = err(h) / err(h / 2.0);
        assert!((ratio - 16.0).abs() < 3.0, "ratio {ratio}");
    }

    #[test]
    fn integrate_rejects_bad_steps() {
        let p = reference_point();
        let init = coherent_initial(1.0).unwrap();
        assert!(matches!(
            integrate(&init, &p, 1.0, 0.01),
            Err(Error::Stability { .. })
        ));
        assert!(integrate(&init, &p, 1.0, 0.0).is_err());
        assert!(integrate(&init, &p, 0.0, 1e-3).is_err());
        let bad = MomentState { c_zz: 0.5, ..init };
        assert!(integrate(&bad, &p, 1.0, 1e-3).is_err());
    }

    #[test]
    fn conditional_variance_reduces_to_single_variance() {
        let p = reference_point();
        for axis in [Axis::Y, Axis::Z] {
            for branch in [Branch::Plus, Branch::Minus] {
                let val = 0.3;
                let lhs = conditional_variance_derivative(val, 0.0, axis, branch, &p).unwrap();
                let p2 = p2_steady(&p).unwrap();
                let s = MomentState {
                    v_az: val,
                    v_ay: val,
                    p2,
                    mean_x_a: 0.5 * p2,
                    mean_x_b: -0.5 * p2,
                    ..coherent_initial(1.0).unwrap()
                };
                let r = moment_derivatives(&s, &p).unwrap();
                assert!((lhs - r.v_az).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn conditional_variance_steady_is_fixed_point() {
        let p = reference_point().with_n_atoms(1e4).unwrap();
        for g in [-1.0, 0.0, 0.3, 0.607864, 2.0] {
            for axis in [Axis::Y, Axis::Z] {
                for branch in [Branch::Plus, Branch::Minus] {
                    let v = conditional_variance_steady(g, axis, branch, &p).unwrap();
                    let r = conditional_variance_derivative(v, g, axis, branch, &p).unwrap();
                    assert!(r.abs() < 1e-10 * 1e4);
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn random_state(
        n: f64,
        va: f64,
        vb: f64,
        rho_z: f64,
        wa: f64,
        wb: f64,
        rho_y: f64,
        p2: f64,
    ) -> MomentState {
        MomentState {
            v_az: va * n,
            v_bz: vb * n,
            c_zz: rho_z * (va * vb).sqrt() * n,
            v_ay: wa * n,
            v_by: wb * n,
            c_yy: rho_y * (wa * wb).sqrt() * n,
            p2,
            mean_x_a: 0.5 * n * p2,
            mean_x_b: -0.5 * n * p2,
        }
    }

    proptest! {
        #[test]
        fn conditional_variance_matches_moment_combination(
            va in 0.01f64..1.0, vb in 0.01f64..1.0, rho_z in -1.0f64..1.0,
            wa in 0.01f64..1.0, wb in 0.01f64..1.0, rho_y in -1.0f64..1.0,
            g in -3.0f64..3.0, z in 1.0f64..4.0, d in 0.0f64..100.0, add in 0.0f64..5.0,
        ) {
            let n = 1e6;
            let p = ModelParams::radiative(z, d, add, n).unwrap();
            let p2 = p2_steady(&p).unwrap();
            let s = random_state(n, va, vb, rho_z, wa, wb, rho_y, p2);
            let r = moment_derivatives(&s, &p).unwrap();
            for axis in [Axis::Y, Axis::Z] {
                for branch in [Branch::Plus, Branch::Minus] {
                    let sg = branch.sign() * g;
                    let (a, b, c, da, db, dc) = match axis {
                        Axis::Y => (s.v_ay, s.v_by, s.c_yy, r.v_ay, r.v_by, r.c_yy),
                        Axis::Z => (s.v_az, s.v_bz, s.c_zz, r.v_az, r.v_bz, r.c_zz),
                    };
                    let val = a + g * g * b + 2.0 * sg * c;
                    let combo = da + g * g * db + 2.0 * sg * dc;
                    let direct = conditional_variance_derivative(val.max(0.0), g, axis, branch, &p).unwrap();
                    let scale = combo.abs().max(n * p.stiffness_bound() * 1e-3);
                    prop_assert!((direct - combo).abs() <= 1e-12 * scale * 10.0);
                }
            }
        }

        #[test]
        fn steady_state_is_fixed_point(z in 1.0f64..4.0, d in 0.0f64..100.0, add in 0.0f64..10.0, n in 1.0f64..1e8) {
            let p = ModelParams::radiative(z, d, add, n).unwrap();
            let s = steady_state(&p).unwrap();
            s.validate().unwrap();
            prop_assert!(moment_derivatives(&s, &p).unwrap().max_abs() <= 1e-10 * n);
        }

        #[test]
        fn relaxation_is_single_exponential(
            va in 0.0f64..1.0, vb in 0.0f64..1.0, rho_z in -1.0f64..1.0,
            wa in 0.0f64..1.0, wb in 0.0f64..1.0, rho_y in -1.0f64..1.0,
            z in 1.0f64..4.0, d in 0.0f64..100.0,
        ) {
            let p = ModelParams::radiative(z, d, 0.0, 1.0).unwrap();
            let ss = steady_state(&p).unwrap();
            let init = random_state(1.0, va, vb, rho_z, wa, wb, rho_y, ss.p2);
            let h = max_stable_step(&p);
            let rate = p.relaxation_rate(ss.p2);
            let t_end = 3.0 / rate;
            let traj = integrate(&init, &p, t_end, h).unwrap();
            let gap0 = init.max_moment_diff(&ss);
            let mut last = f64::INFINITY;
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let gap = s.max_moment_diff(&ss);
                prop_assert!(gap <= last + 1e-15);
                prop_assert!((gap - gap0 * (-rate * t).exp()).abs() <= 1e-6 * gap0 + 1e-15);
                last = gap;
            }
        }

        #[test]
        fn scale_covariance(z in 1.0f64..4.0, d in 0.0f64..100.0, n in 1.0f64..1e6) {
            let p1 = ModelParams::radiative(z, d, 1.0, n).unwrap();
            let p2 = p1.with_n_atoms(2.0 * n).unwrap();
            let h = max_stable_step(&p1);
            let t1 = integrate(&coherent_initial(n).unwrap(), &p1, 0.5, h).unwrap();
            let t2 = integrate(&coherent_initial(2.0 * n).unwrap(), &p2, 0.5, h).unwrap();
            for (a, b) in t1.states.iter().zip(&t2.states) {
                prop_assert_eq!(2.0 * a.v_az, b.v_az);
                prop_assert_eq!(2.0 * a.c_zz, b.c_zz);
                prop_assert_eq!(2.0 * a.c_yy, b.c_yy);
            }
        }
    }
}
