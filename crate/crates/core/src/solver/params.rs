use serde::{Deserialize, Serialize};

use crate::error::{NsvError, Result};
use crate::spectral::{SpectralVelocity, TorusGrid};
use crate::tensor::check_exponent;

/// Scalar time modulation of a forcing term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant,
    /// `exp(rate t)`
    Exponential { rate: f64 },
    /// Signed power `|g|^(exponent-1) g` of `g(t) = mean + amplitude sin(omega t)`.
    Oscillation {
        mean: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default = "one")]
        exponent: f64,
    },
    /// `d/dt [amplitude sin(omega t)]`
    OscillationRate { amplitude: f64, omega: f64 },
}

fn one() -> f64 {
    1.0
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Exponential { rate } => (rate * t).exp(),
            TimeProfile::Oscillation {
                mean,
                amplitude,
                omega,
                exponent,
            } => {
                let g = mean + amplitude * (omega * t).sin();
                if exponent == 1.0 {
                    g
                } else if g == 0.0 {
                    0.0
                } else {
                    g.abs().powf(exponent - 1.0) * g
                }
            }
            TimeProfile::OscillationRate { amplitude, omega } => amplitude * omega * (omega * t).cos(),
        }
    }
}

/// One separable forcing contribution `profile(t) * field(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerm {
    pub profile: TimeProfile,
    pub field: SpectralVelocity,
}

/// Body force as a finite sum of separable terms. Fields need not be
/// divergence-free; their gradient part ends up in the pressure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Forcing {
    terms: Vec<ForcingTerm>,
}

impl Forcing {
    pub fn zero() -> Self {
        Forcing::default()
    }

    pub fn constant(field: SpectralVelocity) -> Self {
        Forcing::zero().with_term(TimeProfile::Constant, field)
    }

    pub fn with_term(mut self, profile: TimeProfile, field: SpectralVelocity) -> Self {
        self.terms.push(ForcingTerm { profile, field });
        self
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.field.coeff_norm() == 0.0)
    }

    /// Accumulates `f(t)` into `out`.
    pub fn add_to(&self, t: f64, out: &mut SpectralVelocity) {
        for term in &self.terms {
            let s = term.profile.value(t);
            if s != 0.0 {
                out.add_scaled(s, &term.field);
            }
        }
    }

    pub fn evaluate(&self, t: f64, grid: &TorusGrid) -> SpectralVelocity {
        let mut out = SpectralVelocity::zeros(grid);
        self.add_to(t, &mut out);
        out
    }

    pub fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        for term in &self.terms {
            if term.field.grid() != grid {
                return Err(NsvError::GridMismatch(
                    "forcing field lives on a different grid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Auxiliary stress `(1/n_reg) |D|^(beta-2) D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regularization {
    pub beta: f64,
    pub n_reg: u32,
}

impl Regularization {
    pub fn weight(&self) -> f64 {
        1.0 / self.n_reg as f64
    }
}

/// Admissible regularization exponents `max((3d-4)/d, p) <= beta <= d`.
pub fn beta_range(dim: usize, p: f64) -> (f64, f64) {
    let d = dim as f64;
    (((3.0 * d - 4.0) / d).max(p), d)
}

/// Physical parameters of the momentum balance.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeParams {
    pub nu: f64,
    pub kappa: f64,
    pub p: f64,
    pub forcing: Forcing,
    pub regularization: Option<Regularization>,
}

impl PdeParams {
    pub fn new(nu: f64, kappa: f64, p: f64) -> Result<Self> {
        let params = PdeParams {
            nu,
            kappa,
            p,
            forcing: Forcing::zero(),
            regularization: None,
        };
        params.validate_scalars()?;
        Ok(params)
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_regularization(mut self, beta: f64, n_reg: u32) -> Self {
        self.regularization = Some(Regularization { beta, n_reg });
        self
    }

    fn validate_scalars(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(NsvError::InvalidParameter(format!(
                "viscosity nu must be positive, got {}",
                self.nu
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(NsvError::InvalidParameter(format!(
                "relaxation time kappa must be positive, got {}",
                self.kappa
            )));
        }
        check_exponent(self.p)
    }

    /// Full validation against the grid the parameters will be used on.
    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        self.validate_scalars()?;
        self.forcing.check_grid(grid)?;
        if let Some(reg) = self.regularization {
            if reg.n_reg == 0 {
                return Err(NsvError::InvalidParameter("n_reg must be >= 1".into()));
            }
            let (lo, hi) = beta_range(grid.dim(), self.p);
            let eps = 1e-12;
            if !(reg.beta >= lo - eps && reg.beta <= hi + eps) {
                return Err(NsvError::InvalidParameter(format!(
                    "beta = {} outside [{lo}, {hi}] for d = {}, p = {}",
                    reg.beta,
                    grid.dim(),
                    self.p
                )));
            }
        }
        Ok(())
    }

    /// Conjugate exponent `p' = p/(p-1)`.
    pub fn p_conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `1/n_reg`, zero without regularization.
    pub fn reg_weight(&self) -> f64 {
        self.regularization.map_or(0.0, |r| r.weight())
    }

    pub fn reg_beta(&self) -> f64 {
        self.regularization.map_or(self.p, |r| r.beta)
    }
}
