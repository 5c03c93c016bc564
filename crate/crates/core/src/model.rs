//! Physical parameters of the two-ensemble model.
//!
//! The engineered dissipation is parametrized by a squeezing pair `(mu, nu)`
//! with `mu^2 - nu^2 = 1`. Single-particle rates follow from it:
//! cooling `mu^2 Γ`, heating `nu^2 Γ`, radiative dephasing `2(mu^2 + nu^2) Γ`,
//! plus an additional non-radiative dephasing term. All rates are in units
//! of the single-atom decay rate Γ (default 1).

use crate::error::{domain, Error, Result};

const INVARIANT_TOL: f64 = 1e-12;

/// Squeezing parametrization of the engineered dissipation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    mu: f64,
    nu: f64,
    r: f64,
    z: f64,
}

impl SqueezeParams {
    /// Builds the parameters from `Z = 1/(mu - nu) = e^r`.
    pub fn from_z(z: f64) -> Result<Self> {
        if !z.is_finite() {
            return Err(domain(format!("Z must be finite, got {z}")));
        }
        if z < 1.0 {
            return Err(domain(format!("Z must be >= 1, got {z}")));
        }
        let inv = z.recip();
        let sq = Self {
            mu: 0.5 * (z + inv),
            nu: 0.5 * (z - inv),
            r: z.ln(),
            z,
        };
        sq.check()?;
        Ok(sq)
    }

    /// Builds the parameters from the squeeze parameter `r >= 0`.
    pub fn from_r(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(domain(format!(
                "squeeze parameter must be finite and >= 0, got {r}"
            )));
        }
        let sq = Self {
            mu: r.cosh(),
            nu: r.sinh(),
            r,
            z: r.exp(),
        };
        sq.check()?;
        Ok(sq)
    }

    /// No squeezing: `mu = 1`, `nu = 0`.
    pub fn identity() -> Self {
        Self {
            mu: 1.0,
            nu: 0.0,
            r: 0.0,
            z: 1.0,
        }
    }

    fn check(&self) -> Result<()> {
        let scale = self.mu * self.mu;
        if ((self.mu * self.mu - self.nu * self.nu) - 1.0).abs() > INVARIANT_TOL * scale.max(1.0) {
            return Err(domain("mu^2 - nu^2 != 1"));
        }
        if ((self.mu - self.nu) * self.z - 1.0).abs() > INVARIANT_TOL * (self.mu * self.z).max(1.0)
        {
            return Err(domain("Z != 1/(mu - nu)"));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `mu^2 + nu^2`, which equals `cosh(2r)`.
    pub fn sum_squares(&self) -> f64 {
        self.mu * self.mu + self.nu * self.nu
    }
}

/// Decay and dephasing rates plus the optical depth of each ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    gamma: f64,
    gamma_cool: f64,
    gamma_heat: f64,
    gamma_d_rad: f64,
    gamma_d_add: f64,
    gamma_d: f64,
    gamma_tilde: f64,
    d: f64,
}

impl RateSet {
    /// Assembles a rate set from its independent components. The totals
    /// `gamma_d` and `gamma_tilde` are derived.
    pub fn new(
        gamma: f64,
        gamma_cool: f64,
        gamma_heat: f64,
        gamma_d_rad: f64,
        gamma_d_add: f64,
        d: f64,
    ) -> Result<Self> {
        let named = [
            ("gamma", gamma),
            ("gamma_cool", gamma_cool),
            ("gamma_heat", gamma_heat),
            ("gamma_d_rad", gamma_d_rad),
            ("gamma_d_add", gamma_d_add),
            ("d", d),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(domain(format!("{name} must be finite, got {value}")));
            }
            if value < 0.0 {
                return Err(domain(format!("{name} must be >= 0, got {value}")));
            }
        }
        let gamma_d = gamma_d_rad + gamma_d_add;
        Ok(Self {
            gamma,
            gamma_cool,
            gamma_heat,
            gamma_d_rad,
            gamma_d_add,
            gamma_d,
            gamma_tilde: gamma_cool + gamma_heat + gamma_d,
            d,
        })
    }

    /// Rates implied by the squeezing parameters: cooling `mu^2 Γ`, heating
    /// `nu^2 Γ` and radiative dephasing `2(mu^2 + nu^2) Γ`.
    pub fn from_squeeze(sq: &SqueezeParams, gamma: f64, gamma_d_add: f64, d: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(domain(format!("gamma must be > 0, got {gamma}")));
        }
        let mu2 = sq.mu() * sq.mu();
        let nu2 = sq.nu() * sq.nu();
        Self::new(
            gamma,
            mu2 * gamma,
            nu2 * gamma,
            2.0 * (mu2 + nu2) * gamma,
            gamma_d_add,
            d,
        )
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_cool(&self) -> f64 {
        self.gamma_cool
    }

    pub fn gamma_heat(&self) -> f64 {
        self.gamma_heat
    }

    pub fn gamma_d_rad(&self) -> f64 {
        self.gamma_d_rad
    }

    pub fn gamma_d_add(&self) -> f64 {
        self.gamma_d_add
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// How the steady-state normalized population `P2` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PopulationModel {
    /// Single-particle rate balance `(Γ_cool - Γ_heat)/(Γ_cool + Γ_heat)`.
    #[default]
    RateBalance,
    /// A user-supplied value in `[0, 1]`.
    Fixed(f64),
}

impl PopulationModel {
    pub fn fixed(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(domain(format!("fixed P2 must lie in [0, 1], got {value}")));
        }
        Ok(Self::Fixed(value))
    }
}

/// Complete parameter set for one ensemble pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    squeeze: SqueezeParams,
    rates: RateSet,
    n_atoms: f64,
    pop: PopulationModel,
}

impl ModelParams {
    pub fn new(
        squeeze: SqueezeParams,
        rates: RateSet,
        n_atoms: f64,
        pop: PopulationModel,
    ) -> Result<Self> {
        if !(n_atoms > 0.0) || !n_atoms.is_finite() {
            return Err(domain(format!(
                "atom number must be finite and > 0, got {n_atoms}"
            )));
        }
        if let PopulationModel::Fixed(v) = pop {
            PopulationModel::fixed(v)?;
        }
        Ok(Self {
            squeeze,
            rates,
            n_atoms,
            pop,
        })
    }

    /// Parameters for the radiative rate model at a given `Z` and optical
    /// depth, with `Γ = 1` and the rate-balance population model.
    pub fn radiative(z: f64, d: f64, gamma_d_add: f64, n_atoms: f64) -> Result<Self> {
        let squeeze = SqueezeParams::from_z(z)?;
        let rates = RateSet::from_squeeze(&squeeze, 1.0, gamma_d_add, d)?;
        Self::new(squeeze, rates, n_atoms, PopulationModel::RateBalance)
    }

    pub fn squeeze(&self) -> &SqueezeParams {
        &self.squeeze
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn n_atoms(&self) -> f64 {
        self.n_atoms
    }

    pub fn pop(&self) -> PopulationModel {
        self.pop
    }

    pub fn with_n_atoms(&self, n_atoms: f64) -> Result<Self> {
        Self::new(self.squeeze, self.rates, n_atoms, self.pop)
    }

    pub fn with_pop(&self, pop: PopulationModel) -> Result<Self> {
        Self::new(self.squeeze, self.rates, self.n_atoms, pop)
    }

    /// Common decay rate `Γ̃ + dΓ P2` of every second moment.
    pub fn relaxation_rate(&self, p2: f64) -> f64 {
        self.rates.gamma_tilde + self.rates.d * self.rates.gamma * p2
    }

    /// Bracket `Γ̃ + dΓ P2^2 (mu^2 + nu^2)` multiplying the `N/4` variance source.
    pub fn variance_source(&self, p2: f64) -> f64 {
        self.rates.gamma_tilde
            + self.rates.d * self.rates.gamma * p2 * p2 * self.squeeze.sum_squares()
    }

    /// Entangling strength `mu nu dΓ P2^2`.
    pub fn entangling_source(&self, p2: f64) -> f64 {
        self.squeeze.mu * self.squeeze.nu * self.rates.d * self.rates.gamma * p2 * p2
    }

    /// Largest rate appearing in the moment equations for any `P2` in
    /// `[0, 1]`, used by the integrator's stability guard.
    pub fn stiffness_bound(&self) -> f64 {
        self.rates.gamma_tilde + self.rates.d * self.rates.gamma
    }
}

/// Steady-state normalized population `P2,∞`.
pub fn p2_steady(params: &ModelParams) -> Result<f64> {
    match params.pop {
        PopulationModel::Fixed(v) => Ok(v),
        PopulationModel::RateBalance => {
            let cool = params.rates.gamma_cool;
            let heat = params.rates.gamma_heat;
            let total = cool + heat;
            if !(total > 0.0) {
                return Err(Error::DegenerateModel(
                    "cooling plus heating rate is zero".into(),
                ));
            }
            Ok(((cool - heat) / total).clamp(0.0, 1.0))
        }
    }
}
