//! Monte-Carlo model of the optical spin readout.
//!
//! Spin fluctuations are drawn from the Gaussian state described by a
//! [`MomentState`]. A verifying pulse maps a spin component onto its output
//! Stokes parameter, `S_out^Y = S_in^Y + α J`, and `S_out^Y / α` is used as
//! the spin estimate. The input `S^Y` noise has variance `e^{-2 r} n_p / 4`.
//!
//! Two schemes are modeled: a single pulse through both ensembles, which
//! only reveals the sum `J_A + J_B`, and one pulse per ensemble, which gives
//! the local outcomes needed for inference variances. Each axis is read out
//! in its own pass, so back-action onto the other axis never enters.
//!
//! Work is split into fixed-size batches, each drawing from its own ChaCha
//! stream, so results depend only on the seed and never on thread timing.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dynamics::{mean_spin_steady, Axis, MomentState};
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;
use crate::witnesses::{epr_parameter, WitnessFlags};

const BATCH: usize = 1 << 13;
const JACKKNIFE_BLOCKS: usize = 64;
const MIN_SAMPLES: usize = 100;

// Stream tags keep sampling and the two readout passes on disjoint streams.
const STREAM_SPINS: u64 = 0;
const STREAM_LOCAL_Y: u64 = 1;
const STREAM_LOCAL_Z: u64 = 2;
const STREAM_COLLECTIVE_Y: u64 = 3;
const STREAM_COLLECTIVE_Z: u64 = 4;

fn batch_rng(seed: u64, tag: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 40) | batch as u64);
    rng
}

/// Covariance over `(J_A^Y, J_B^Y, J_A^Z, J_B^Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCovariance(pub Matrix4<f64>);

impl SpinCovariance {
    pub const A_Y: usize = 0;
    pub const B_Y: usize = 1;
    pub const A_Z: usize = 2;
    pub const B_Z: usize = 3;

    pub fn eigenvalues(&self) -> Vector4<f64> {
        SymmetricEigen::new(self.0).eigenvalues
    }

    /// Matrix `L` with `L Lᵀ = Σ`, from the symmetric eigendecomposition so
    /// singular covariances are accepted.
    fn factor(&self) -> Result<Matrix4<f64>> {
        let eig = SymmetricEigen::new(self.0);
        let scale = self.0.diagonal().amax();
        let mut root = Matrix4::zeros();
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if !lambda.is_finite() {
                return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
            }
            if lambda < -1e-12 * scale {
                return Err(Error::NumericalFailure(format!(
                    "covariance is not positive semidefinite (eigenvalue {lambda})"
                )));
            }
            root[(i, i)] = lambda.max(0.0).sqrt();
        }
        Ok(eig.eigenvectors * root)
    }
}

/// Gaussian covariance of the transverse spin fluctuations. Cross terms
/// between the `Y` and `Z` axes are zero.
pub fn covariance_from_moments(s: &MomentState) -> Result<SpinCovariance> {
    let mut m = Matrix4::zeros();
    m[(SpinCovariance::A_Y, SpinCovariance::A_Y)] = s.v_ay;
    m[(SpinCovariance::B_Y, SpinCovariance::B_Y)] = s.v_by;
    m[(SpinCovariance::A_Y, SpinCovariance::B_Y)] = s.c_yy;
    m[(SpinCovariance::B_Y, SpinCovariance::A_Y)] = s.c_yy;
    m[(SpinCovariance::A_Z, SpinCovariance::A_Z)] = s.v_az;
    m[(SpinCovariance::B_Z, SpinCovariance::B_Z)] = s.v_bz;
    m[(SpinCovariance::A_Z, SpinCovariance::B_Z)] = s.c_zz;
    m[(SpinCovariance::B_Z, SpinCovariance::A_Z)] = s.c_zz;
    let cov = SpinCovariance(m);
    cov.factor()?;
    Ok(cov)
}

/// One joint draw of the transverse spin components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinSample {
    pub a_y: f64,
    pub a_z: f64,
    pub b_y: f64,
    pub b_z: f64,
}

impl SpinSample {
    fn axis(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::Y => (self.a_y, self.b_y),
            Axis::Z => (self.a_z, self.b_z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSampleSet {
    pub samples: Vec<SpinSample>,
    pub seed: u64,
}

impl SpinSampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draws `m` zero-mean samples with covariance `cov`.
pub fn sample_spins(cov: &SpinCovariance, m: usize, seed: u64) -> Result<SpinSampleSet> {
    if m == 0 {
        return Err(domain("sample count must be >= 1"));
    }
    let root = cov.factor()?;
    let mut samples = vec![SpinSample::default(); m];
    samples
        .par_chunks_mut(BATCH)
        .enumerate()
        .for_each(|(batch, chunk)| {
            let mut rng = batch_rng(seed, STREAM_SPINS, batch);
            for out in chunk {
                let xi = Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let x = root * xi;
                *out = SpinSample {
                    a_y: x[SpinCovariance::A_Y],
                    b_y: x[SpinCovariance::B_Y],
                    a_z: x[SpinCovariance::A_Z],
                    b_z: x[SpinCovariance::B_Z],
                };
            }
        });
    Ok(SpinSampleSet { samples, seed })
}

/// Verifying-pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseModel {
    alpha: f64,
    n_p: f64,
    r_light: f64,
}

/// The `Y` and `Z` Stokes components of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesPair {
    pub y: f64,
    pub z: f64,
}

impl PulseModel {
    pub fn new(alpha: f64, n_p: f64, r_light: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(domain(format!("coupling gain must be >= 0, got {alpha}")));
        }
        if !(n_p > 0.0) || !n_p.is_finite() {
            return Err(domain(format!(
                "photon number must be finite and > 0, got {n_p}"
            )));
        }
        if !r_light.is_finite() {
            return Err(domain(format!(
                "light squeeze parameter must be finite, got {r_light}"
            )));
        }
        Ok(Self {
            alpha,
            n_p,
            r_light,
        })
    }

    /// Infinite coupling: spin estimates carry no readout noise.
    pub fn ideal() -> Self {
        Self {
            alpha: f64::INFINITY,
            n_p: 1.0,
            r_light: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_p(&self) -> f64 {
        self.n_p
    }

    pub fn r_light(&self) -> f64 {
        self.r_light
    }

    /// Variance of the input `S^Y`, `e^{-2r} n_p / 4`.
    pub fn input_variance(&self) -> f64 {
        (-2.0 * self.r_light).exp() * self.n_p * 0.25
    }

    /// Variance added to each spin estimate, `e^{-2r} n_p / (4 α²)`.
    pub fn noise_variance(&self) -> f64 {
        if self.alpha.is_infinite() {
            0.0
        } else {
            self.input_variance() / (self.alpha * self.alpha)
        }
    }

    /// Excess of a measured `Δ²(ĵ_A - g ĵ_B)` over the true inference variance.
    pub fn penalty(&self, g: f64) -> f64 {
        (1.0 + g * g) * self.noise_variance()
    }

    /// Light side of a single-ensemble interaction.
    pub fn interact(&self, s_in: StokesPair, j: f64) -> StokesPair {
        StokesPair {
            y: s_in.y + self.alpha * j,
            z: s_in.z,
        }
    }

    fn check_invertible(&self) -> Result<()> {
        if self.alpha == 0.0 {
            Err(Error::NoInversion)
        } else {
            Ok(())
        }
    }

    fn estimate(&self, s_in_y: f64, j: f64) -> f64 {
        if self.alpha.is_infinite() {
            j
        } else {
            self.interact(StokesPair { y: s_in_y, z: 0.0 }, j).y / self.alpha
        }
    }
}

/// Pulse passing through `A` then `B`, with back-action `β` of opposite sign
/// on the two ensembles. Returns the output light and the output spins.
pub fn collective_pass(
    sample: &SpinSample,
    s_in: StokesPair,
    alpha: f64,
    beta: f64,
) -> (StokesPair, SpinSample) {
    let light = StokesPair {
        y: s_in.y + alpha * (sample.a_z + sample.b_z),
        z: s_in.z,
    };
    let spins = SpinSample {
        a_y: sample.a_y + beta * s_in.z,
        b_y: sample.b_y - beta * s_in.z,
        ..*sample
    };
    (light, spins)
}

/// Paired local estimates `(ĵ_A, ĵ_B)` for one axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisReadout {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalReadouts {
    pub y: AxisReadout,
    pub z: AxisReadout,
}

impl LocalReadouts {
    pub fn axis(&self, axis: Axis) -> &AxisReadout {
        match axis {
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn len(&self) -> usize {
        self.z.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn local_axis(samples: &SpinSampleSet, pulse: &PulseModel, seed: u64, axis: Axis) -> AxisReadout {
    let tag = match axis {
        Axis::Y => STREAM_LOCAL_Y,
        Axis::Z => STREAM_LOCAL_Z,
    };
    let sd = pulse.input_variance().sqrt();
    let pairs: Vec<(f64, f64)> = samples
        .samples
        .par_chunks(BATCH)
        .enumerate()
        .flat_map_iter(|(batch, chunk)| {
            let mut rng = batch_rng(seed, tag, batch);
            chunk
                .iter()
                .map(|s| {
                    let (ja, jb) = s.axis(axis);
                    let na: f64 = StandardNormal.sample(&mut rng);
                    let nb: f64 = StandardNormal.sample(&mut rng);
                    (pulse.estimate(sd * na, ja), pulse.estimate(sd * nb, jb))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let (a, b) = pairs.into_iter().unzip();
    AxisReadout { a, b }
}

/// One verifying pulse per ensemble, each axis in a separate pass.
pub fn local_readout(
    samples: &SpinSampleSet,
    pulse: &PulseModel,
    seed: u64,
) -> Result<LocalReadouts> {
    pulse.check_invertible()?;
    Ok(LocalReadouts {
        y: local_axis(samples, pulse, seed, Axis::Y),
        z: local_axis(samples, pulse, seed, Axis::Z),
    })
}

/// Estimates of `J_A + J_B` per axis from a single pulse through both
/// ensembles. The individual spins are not recoverable from these.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveReadouts {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl CollectiveReadouts {
    /// Sample variance of the sum estimate with its standard error.
    pub fn sum_variance(&self, axis: Axis) -> Estimate {
        let data = match axis {
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        };
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate {
            value: var,
            std_error: var * (2.0 / (n - 1.0)).sqrt(),
        }
    }
}

fn collective_axis(samples: &SpinSampleSet, pulse: &PulseModel, seed: u64, axis: Axis) -> Vec<f64> {
    let tag = match axis {
        Axis::Y => STREAM_COLLECTIVE_Y,
        Axis::Z => STREAM_COLLECTIVE_Z,
    };
    let sd = pulse.input_variance().sqrt();
    samples
        .samples
        .par_chunks(BATCH)
        .enumerate()
        .flat_map_iter(|(batch, chunk)| {
            let mut rng = batch_rng(seed, tag, batch);
            chunk
                .iter()
                .map(|s| {
                    // The Y readout follows a rotation mapping J^Y onto J^Z.
                    let rotated = match axis {
                        Axis::Z => *s,
                        Axis::Y => SpinSample {
                            a_y: -s.a_z,
                            a_z: s.a_y,
                            b_y: -s.b_z,
                            b_z: s.b_y,
                        },
                    };
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    let s_in = StokesPair {
                        y: sd * noise,
                        z: 0.0,
                    };
                    if pulse.alpha.is_infinite() {
                        rotated.a_z + rotated.b_z
                    } else {
                        collective_pass(&rotated, s_in, pulse.alpha, 0.0).0.y / pulse.alpha
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Single pulse through both ensembles, per axis.
pub fn collective_readout(
    samples: &SpinSampleSet,
    pulse: &PulseModel,
    seed: u64,
) -> Result<CollectiveReadouts> {
    pulse.check_invertible()?;
    Ok(CollectiveReadouts {
        y: collective_axis(samples, pulse, seed, Axis::Y),
        z: collective_axis(samples, pulse, seed, Axis::Z),
    })
}

/// A Monte-Carlo estimate with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `truth` lies within `k` standard errors.
    pub fn covers(&self, truth: f64, k: f64) -> bool {
        (self.value - truth).abs() <= k * self.std_error
    }
}

/// Witnesses assembled from local readouts, with regression gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedWitnesses {
    pub m: usize,
    pub g_y: Estimate,
    pub g_z: Estimate,
    pub var_inf_y: Estimate,
    pub var_inf_z: Estimate,
    pub delta_ent: Estimate,
    pub delta_g_ent: Estimate,
    pub e_epr_ab: Estimate,
    pub e_epr_ba: Estimate,
    pub flags: WitnessFlags,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairSums {
    n: f64,
    a: f64,
    b: f64,
    aa: f64,
    bb: f64,
    ab: f64,
}

impl PairSums {
    fn from_slices(a: &[f64], b: &[f64]) -> Self {
        a.iter().zip(b).fold(Self::default(), |s, (&x, &y)| Self {
            n: s.n + 1.0,
            a: s.a + x,
            b: s.b + y,
            aa: s.aa + x * x,
            bb: s.bb + y * y,
            ab: s.ab + x * y,
        })
    }

    fn add(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            a: self.a + o.a,
            b: self.b + o.b,
            aa: self.aa + o.aa,
            bb: self.bb + o.bb,
            ab: self.ab + o.ab,
        }
    }

    fn sub(self, o: Self) -> Self {
        Self {
            n: self.n - o.n,
            a: self.a - o.a,
            b: self.b - o.b,
            aa: self.aa - o.aa,
            bb: self.bb - o.bb,
            ab: self.ab - o.ab,
        }
    }

    /// Unbiased `(var_a, var_b, cov_ab)`.
    fn moments(&self) -> (f64, f64, f64) {
        let n = self.n;
        let k = 1.0 / (n - 1.0);
        (
            (self.aa - self.a * self.a / n) * k,
            (self.bb - self.b * self.b / n) * k,
            (self.ab - self.a * self.b / n) * k,
        )
    }
}

fn block_sums(r: &AxisReadout, blocks: usize) -> Vec<PairSums> {
    let len = r.a.len();
    (0..blocks)
        .into_par_iter()
        .map(|k| {
            let lo = k * len / blocks;
            let hi = (k + 1) * len / blocks;
            PairSums::from_slices(&r.a[lo..hi], &r.b[lo..hi])
        })
        .collect()
}

/// Delete-one-block jackknife over per-axis sufficient statistics.
fn jackknife<const K: usize, F>(y: &[PairSums], z: &[PairSums], f: F) -> Result<[Estimate; K]>
where
    F: Fn(&PairSums, &PairSums) -> Result<[f64; K]>,
{
    let total = |v: &[PairSums]| v.iter().fold(PairSums::default(), |acc, s| acc.add(*s));
    let (ty, tz) = (total(y), total(z));
    let full = f(&ty, &tz)?;
    let blocks = y.len();
    let loo: Vec<[f64; K]> = (0..blocks)
        .map(|k| f(&ty.sub(y[k]), &tz.sub(z[k])))
        .collect::<Result<_>>()?;
    let kf = blocks as f64;
    Ok(std::array::from_fn(|i| {
        let mean = loo.iter().map(|v| v[i]).sum::<f64>() / kf;
        let ss = loo.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>();
        Estimate {
            value: full[i],
            std_error: ((kf - 1.0) / kf * ss).sqrt(),
        }
    }))
}

fn check_readouts(r: &LocalReadouts) -> Result<usize> {
    let m = r.len();
    if r.z.b.len() != m || r.y.a.len() != m || r.y.b.len() != m {
        return Err(Error::Estimation(
            "readout axes have different lengths".into(),
        ));
    }
    if m < MIN_SAMPLES {
        return Err(Error::Estimation(format!(
            "need at least {MIN_SAMPLES} samples per axis, got {m}"
        )));
    }
    Ok(m)
}

/// Measured `Δ²(ĵ_A - g ĵ_B)` at a fixed gain.
pub fn inference_variance_at_gain(r: &LocalReadouts, g: f64, axis: Axis) -> Result<Estimate> {
    let m = check_readouts(r)?;
    let blocks = JACKKNIFE_BLOCKS.min(m / 2);
    let y = block_sums(&r.y, blocks);
    let z = block_sums(&r.z, blocks);
    let [e] = jackknife(&y, &z, |sy, sz| {
        let (va, vb, c) = match axis {
            Axis::Y => sy.moments(),
            Axis::Z => sz.moments(),
        };
        Ok([va + g * g * vb - 2.0 * g * c])
    })?;
    Ok(e)
}

/// Regression gains, inference variances and all witnesses from local
/// readouts. The mean spin is the model's steady value.
pub fn estimate_witnesses(r: &LocalReadouts, p: &ModelParams) -> Result<EstimatedWitnesses> {
    let m = check_readouts(r)?;
    let mean = mean_spin_steady(p)?;
    if mean == 0.0 {
        return Err(Error::UndefinedBound("zero mean spin".into()));
    }
    let blocks = JACKKNIFE_BLOCKS.min(m / 2);
    let y = block_sums(&r.y, blocks);
    let z = block_sums(&r.z, blocks);
    let [g_y, g_z, var_inf_y, var_inf_z, delta_ent, delta_g_ent, e_epr_ab, e_epr_ba] =
        jackknife(&y, &z, |sy, sz| {
            let (ay, by, cy) = sy.moments();
            let (az, bz, cz) = sz.moments();
            if !(by > 0.0) || !(bz > 0.0) || !(ay > 0.0) || !(az > 0.0) {
                return Err(Error::Estimation("regressor has zero variance".into()));
            }
            let (gy, gz) = (cy / by, cz / bz);
            let inf_y = (ay - gy * cy).max(0.0);
            let inf_z = (az - gz * cz).max(0.0);
            let back_y = (by - cy * cy / ay).max(0.0);
            let back_z = (bz - cz * cz / az).max(0.0);
            let duan = (ay + by - 2.0 * cy.abs() + az + bz - 2.0 * cz.abs()) / (2.0 * mean);
            let gain_ent = (inf_y + inf_z) / (mean * (1.0 + (gy * gz).abs()));
            Ok([
                gy,
                gz,
                inf_y,
                inf_z,
                duan,
                gain_ent,
                epr_parameter(inf_z, inf_y, mean)?,
                epr_parameter(back_z, back_y, mean)?,
            ])
        })?;
    Ok(EstimatedWitnesses {
        m,
        g_y,
        g_z,
        var_inf_y,
        var_inf_z,
        delta_ent,
        delta_g_ent,
        e_epr_ab,
        e_epr_ba,
        flags: WitnessFlags::from_values(
            delta_ent.value,
            delta_g_ent.value,
            e_epr_ab.value,
            e_epr_ba.value,
        ),
    })
}

/// Samples `state`, reads it out locally and estimates the
/// witnesses.
pub fn simulate_local_experiment(
    state: &MomentState,
    p: &ModelParams,
    pulse: &PulseModel,
    m: usize,
    seed: u64,
) -> Result<EstimatedWitnesses> {
    let cov = covariance_from_moments(state)?;
    let samples = sample_spins(&cov, m, seed)?;
    let readouts = local_readout(&samples, pulse, seed)?;
    estimate_witnesses(&readouts, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{coherent_initial, steady_state};

    fn reference_point() -> ModelParams {
        ModelParams::radiative(2.0, 30.0, 0.0, 4.0).unwrap()
    }

    #[test]
    fn coherent_covariance_is_identity() {
        let cov = covariance_from_moments(&coherent_initial(4.0).unwrap()).unwrap();
        assert_eq!(cov.0, Matrix4::identity());
    }

    #[test]
    fn steady_covariance_blocks() {
        let s = steady_state(&reference_point()).unwrap();
        let cov = covariance_from_moments(&s).unwrap();
        let c = cov.0[(SpinCovariance::A_Z, SpinCovariance::B_Z)];
        assert!((c - 0.151966060913063 * 4.0).abs() < 1e-12);
        assert_eq!(cov.0[(SpinCovariance::A_Y, SpinCovariance::B_Y)], -c);
        assert_eq!(cov.0[(SpinCovariance::A_Y, SpinCovariance::A_Z)], 0.0);
        assert!(cov.eigenvalues().min() >= -1e-12 * 4.0);
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let s = MomentState {
            c_zz: 2.0,
            ..coherent_initial(4.0).unwrap()
        };
        assert!(matches!(
            covariance_from_moments(&s),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn zero_covariance_gives_zero_samples() {
        let cov = SpinCovariance(Matrix4::zeros());
        let set = sample_spins(&cov, 1000, 3).unwrap();
        assert!(set.samples.iter().all(|s| *s == SpinSample::default()));
        assert!(sample_spins(&cov, 0, 3).is_err());
    }

    #[test]
    fn seeded_sampling_replays() {
        let cov = covariance_from_moments(&steady_state(&reference_point()).unwrap()).unwrap();
        let a = sample_spins(&cov, 20_000, 11).unwrap();
        let b = sample_spins(&cov, 20_000, 11).unwrap();
        let c = sample_spins(&cov, 20_000, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn stokes_z_passes_through() {
        let pulse = PulseModel::new(2.0, 100.0, 0.0).unwrap();
        let out = pulse.interact(StokesPair { y: 0.5, z: -1.25 }, 3.0);
        assert_eq!(out, StokesPair { y: 6.5, z: -1.25 });
    }

    #[test]
    fn collective_pass_conserves_y_sum() {
        let s = SpinSample {
            a_y: 0.3,
            a_z: -1.0,
            b_y: 0.7,
            b_z: 2.0,
        };
        let (light, out) = collective_pass(&s, StokesPair { y: 0.1, z: 0.9 }, 1.5, 0.4);
        assert!((out.a_y + out.b_y - (s.a_y + s.b_y)).abs() < 1e-15);
        assert_ne!(out.a_y, s.a_y);
        assert_eq!((out.a_z, out.b_z), (s.a_z, s.b_z));
        assert_eq!(light.z, 0.9);
        assert!((light.y - (0.1 + 1.5)).abs() < 1e-15);
    }

    #[test]
    fn ideal_readout_is_exact() {
        let cov = covariance_from_moments(&steady_state(&reference_point()).unwrap()).unwrap();
        let samples = sample_spins(&cov, 500, 1).unwrap();
        let r = local_readout(&samples, &PulseModel::ideal(), 9).unwrap();
        for (s, (a, b)) in samples.samples.iter().zip(r.z.a.iter().zip(&r.z.b)) {
            assert_eq!((*a, *b), (s.a_z, s.b_z));
        }
        let c = collective_readout(&samples, &PulseModel::ideal(), 9).unwrap();
        assert_eq!(c.z[3], samples.samples[3].a_z + samples.samples[3].b_z);
        assert_eq!(c.y[3], samples.samples[3].a_y + samples.samples[3].b_y);
    }

    #[test]
    fn zero_gain_cannot_be_inverted() {
        let cov = covariance_from_moments(&coherent_initial(4.0).unwrap()).unwrap();
        let samples = sample_spins(&cov, 10, 1).unwrap();
        let pulse = PulseModel::new(0.0, 10.0, 0.0).unwrap();
        assert_eq!(local_readout(&samples, &pulse, 1), Err(Error::NoInversion));
        assert_eq!(
            collective_readout(&samples, &pulse, 1),
            Err(Error::NoInversion)
        );
    }

    #[test]
    fn perfect_anticorrelation_leaves_pure_noise() {
        let s = MomentState {
            c_zz: -1.0,
            c_yy: -1.0,
            ..coherent_initial(4.0).unwrap()
        };
        let cov = covariance_from_moments(&s).unwrap();
        let samples = sample_spins(&cov, 200_000, 5).unwrap();
        let pulse = PulseModel::new(1.0, 4.0, 0.0).unwrap();
        let c = collective_readout(&samples, &pulse, 6).unwrap();
        let est = c.sum_variance(Axis::Z);
        assert!(est.covers(pulse.noise_variance(), 3.0), "{est:?}");
    }

    #[test]
    fn estimation_needs_enough_samples() {
        let r = LocalReadouts {
            y: AxisReadout {
                a: vec![0.0; 50],
                b: vec![0.0; 50],
            },
            z: AxisReadout {
                a: vec![0.0; 50],
                b: vec![0.0; 50],
            },
        };
        assert!(matches!(
            estimate_witnesses(&r, &reference_point()),
            Err(Error::Estimation(_))
        ));
        let flat = LocalReadouts {
            y: AxisReadout {
                a: vec![1.0; 200],
                b: vec![0.0; 200],
            },
            z: AxisReadout {
                a: vec![1.0; 200],
                b: vec![0.0; 200],
            },
        };
        assert!(matches!(
            estimate_witnesses(&flat, &reference_point()),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn penalty_decreases_with_light_squeezing() {
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let pulse = PulseModel::new(0.5, 100.0, i as f64 * 0.25).unwrap();
            let pen = pulse.penalty(0.6);
            assert!(pen < last);
            last = pen;
        }
        assert_eq!(PulseModel::ideal().penalty(3.0), 0.0);
    }
}
