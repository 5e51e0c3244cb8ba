//! Run configuration files (a TOML subset) for simulations and experiments.
//!
//! ```toml
//! [model]
//! nu = 0.1
//! kappa = 0.5
//! p = 2.0
//!
//! [grid]
//! dim = 2
//! modes = 32
//!
//! [time]
//! dt = 1e-3
//! t_end = 1.0
//!
//! [initial]
//! kind = "taylor_green"
//! amplitude = 1.0
//! ```
//!
//! Physical parameters have no defaults. Optional sections: `[regularization]`
//! (`beta`, `n_reg`), `[[forcing]]` (a `field` table and a `profile` table),
//! and `[experiment]` for experiment specs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NsvError, Result};
use crate::experiments::ManufacturedTarget;
use crate::kv1d::{Forcing1d, Kv1dConfig, Kv1dParams, SineState};
use crate::solver::{
    Forcing, PdeParams, Regularization, Scheme, SimConfig, TimeProfile, DEFAULT_FIXED_POINT_TOL,
    DEFAULT_MAX_FIXED_POINT_ITERS,
};
use crate::spectral::{fields, SpectralVelocity, TorusGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub nu: f64,
    pub kappa: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// 1 selects the Dirichlet sine model, 2 or 3 the periodic box.
    pub dim: usize,
    pub modes: usize,
    /// Defaults to `2 pi` on the torus and `pi` in 1-D.
    pub box_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_tol")]
    pub fixed_point_tol: f64,
    #[serde(default = "default_iters")]
    pub max_fixed_point_iters: usize,
    /// Shell cutoff; defaults to the full lattice.
    pub galerkin_n: Option<usize>,
}

fn default_tol() -> f64 {
    DEFAULT_FIXED_POINT_TOL
}

fn default_iters() -> usize {
    DEFAULT_MAX_FIXED_POINT_ITERS
}

/// Named velocity fields usable as initial data or forcing shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    TaylorGreen {
        amplitude: f64,
    },
    Abc {
        a: f64,
        b: f64,
        c: f64,
    },
    Shear {
        amplitude: f64,
        wavenumber: u32,
    },
    /// Seeded random field; the command-line seed replaces `seed` when given.
    Random {
        rms: f64,
        max_shell: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "yes")]
        solenoidal: bool,
    },
    /// `amplitude sin(k pi x / L)` (1-D only).
    SineMode {
        k: usize,
        amplitude: f64,
    },
}

fn yes() -> bool {
    true
}

impl FieldSpec {
    pub fn build(&self, grid: &TorusGrid, seed: Option<u64>) -> Result<SpectralVelocity> {
        Ok(match *self {
            FieldSpec::Zero => SpectralVelocity::zeros(grid),
            FieldSpec::TaylorGreen { amplitude } => fields::taylor_green(grid, amplitude),
            FieldSpec::Abc { a, b, c } => {
                if grid.dim() != 3 {
                    return Err(NsvError::Config("abc field needs grid.dim = 3".into()));
                }
                fields::abc(grid, a, b, c)
            }
            FieldSpec::Shear {
                amplitude,
                wavenumber,
            } => fields::shear(grid, amplitude, wavenumber),
            FieldSpec::Random {
                rms,
                max_shell,
                seed: s,
                solenoidal,
            } => fields::random(grid, seed.unwrap_or(s), rms, max_shell, solenoidal),
            FieldSpec::SineMode { .. } => {
                return Err(NsvError::Config("sine_mode is only available for grid.dim = 1".into()))
            }
        })
    }

    fn build_1d(&self, modes: usize, length: f64) -> Result<SineState> {
        match *self {
            FieldSpec::Zero => SineState::zeros(modes, length),
            FieldSpec::SineMode { k, amplitude } => SineState::single_mode(modes, length, k, amplitude),
            _ => Err(NsvError::Config(
                "grid.dim = 1 supports the zero and sine_mode fields".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub field: FieldSpec,
    #[serde(default = "constant_profile")]
    pub profile: TimeProfile,
}

fn constant_profile() -> TimeProfile {
    TimeProfile::Constant
}

/// Experiment kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TaylorGreen,
    Manufactured,
    Refinement,
    KappaSweep,
    Gronwall,
    RegularizationSweep,
}

/// `[experiment]` section. The meaning of `sweep` depends on `kind`:
/// amplitudes (taylor_green), time steps (manufactured), shells
/// (refinement), relaxation times (kappa_sweep), perturbation sizes
/// (gronwall), regularization indices (regularization_sweep).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub sweep: Vec<f64>,
    pub output: String,
    /// Regularization exponent for `regularization_sweep`.
    pub beta: Option<f64>,
    /// Target for `manufactured`.
    pub target: Option<ManufacturedTarget>,
    /// Perturbation seed for `gronwall`.
    pub perturbation_seed: Option<u64>,
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub time: TimeSection,
    #[serde(default = "zero_field")]
    pub initial: FieldSpec,
    pub regularization: Option<Regularization>,
    #[serde(default)]
    pub forcing: Vec<ForcingSection>,
    pub experiment: Option<ExperimentSection>,
}

fn zero_field() -> FieldSpec {
    FieldSpec::Zero
}

/// Everything needed to run the periodic solver.
#[derive(Debug, Clone)]
pub struct TorusSetup {
    pub config: SimConfig,
    pub params: PdeParams,
    pub initial: SpectralVelocity,
}

/// Everything needed to run the 1-D model.
#[derive(Debug, Clone)]
pub struct SineSetup {
    pub config: Kv1dConfig,
    pub params: Kv1dParams,
    pub forcing: Forcing1d,
    pub initial: SineState,
}

#[derive(Debug, Clone)]
pub enum Setup {
    Torus(TorusSetup),
    Sine(SineSetup),
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| NsvError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NsvError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Builds solver inputs. `seed` overrides the seeds of random fields.
    pub fn setup(&self, seed: Option<u64>) -> Result<Setup> {
        let m = &self.model;
        let g = &self.grid;
        let t = &self.time;
        if g.dim == 1 {
            if self.regularization.is_some() {
                return Err(NsvError::Config("regularization is not available for grid.dim = 1".into()));
            }
            let length = g.box_length.unwrap_or(std::f64::consts::PI);
            let initial = self.initial.build_1d(g.modes, length)?;
            let mut forcing = Forcing1d::default();
            for f in &self.forcing {
                forcing.terms.push((f.profile, f.field.build_1d(g.modes, length)?.coeffs));
            }
            let mut config = Kv1dConfig::new(t.dt, t.t_end);
            config.fixed_point_tol = t.fixed_point_tol;
            config.max_fixed_point_iters = t.max_fixed_point_iters;
            if t.scheme != Scheme::Midpoint {
                return Err(NsvError::Config("grid.dim = 1 supports only the midpoint scheme".into()));
            }
            return Ok(Setup::Sine(SineSetup {
                config,
                params: Kv1dParams::new(m.nu, m.kappa, m.p)?,
                forcing,
                initial,
            }));
        }
        let grid = TorusGrid::new(g.dim, g.modes, g.box_length.unwrap_or(std::f64::consts::TAU))?;
        let mut forcing = Forcing::zero();
        for f in &self.forcing {
            forcing = forcing.with_term(f.profile, f.field.build(&grid, seed)?);
        }
        let mut params = PdeParams::new(m.nu, m.kappa, m.p)?.with_forcing(forcing);
        params.regularization = self.regularization;
        params.validate(&grid)?;
        let mut config = SimConfig::new(&grid, t.dt, t.t_end).with_scheme(t.scheme);
        config.fixed_point_tol = t.fixed_point_tol;
        config.max_fixed_point_iters = t.max_fixed_point_iters;
        if let Some(n) = t.galerkin_n {
            config.galerkin_n = n;
        }
        config.validate()?;
        let initial = self.initial.build(&grid, seed)?;
        Ok(Setup::Torus(TorusSetup {
            config,
            params,
            initial,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
nu = 0.1
kappa = 0.5
p = 2.0

[grid]
dim = 2
modes = 16

[time]
dt = 0.01
t_end = 0.1

[initial]
kind = "taylor_green"
amplitude = 1.0
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.time.scheme, Scheme::Midpoint);
        let Setup::Torus(s) = cfg.setup(None).unwrap() else {
            panic!("expected a torus setup");
        };
        assert_eq!(s.config.galerkin_n, 7);
        assert_eq!(s.params.p, 2.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let bad = MINIMAL.replace("nu = 0.1", "nu = 0.1\nviscosity = 2.0");
        let err = RunConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("viscosity"), "{err}");
    }

    #[test]
    fn missing_physical_parameter_is_named() {
        let bad = MINIMAL.replace("kappa = 0.5\n", "");
        let err = RunConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("kappa"), "{err}");
    }

    #[test]
    fn forcing_and_regularization_sections() {
        let text = format!(
            "{MINIMAL}\n[regularization]\nbeta = 2.0\nn_reg = 4\n\n[[forcing]]\nfield = {{ kind = \"shear\", amplitude = 0.5, wavenumber = 1 }}\nprofile = {{ kind = \"exponential\", rate = -1.0 }}\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let Setup::Torus(s) = cfg.setup(None).unwrap() else {
            panic!("expected a torus setup");
        };
        assert_eq!(s.params.reg_weight(), 0.25);
        assert_eq!(s.params.forcing.terms().len(), 1);
        let round = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(round, cfg);
    }
}
