use serde::{Deserialize, Serialize};

use crate::error::{NsvError, Result};
use crate::solver::{integrate_observed, Evaluator, Forcing, PdeParams, SimConfig, TimeProfile};
use crate::spectral::{fields, SpectralVelocity, TorusGrid};

/// Spatial shape `U` of a separable target `g(t) U(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetShape {
    Zero,
    TaylorGreen { amplitude: f64 },
    Abc { a: f64, b: f64, c: f64 },
}

impl TargetShape {
    pub fn field(&self, grid: &TorusGrid) -> Result<SpectralVelocity> {
        match *self {
            TargetShape::Zero => Ok(SpectralVelocity::zeros(grid)),
            TargetShape::TaylorGreen { amplitude } => Ok(fields::taylor_green(grid, amplitude)),
            TargetShape::Abc { a, b, c } => {
                if grid.dim() != 3 {
                    return Err(NsvError::InvalidParameter("ABC target needs d = 3".into()));
                }
                Ok(fields::abc(grid, a, b, c))
            }
        }
    }
}

/// Manufactured solution `v(t, x) = g(t) U(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedTarget {
    pub shape: TargetShape,
    pub profile: TimeProfile,
}

/// Profiles for `g'`, `g^2` and the signed power `|g|^(q-2) g`, with the
/// constant factor carried by `g'`.
type DerivedProfiles = (Option<(f64, TimeProfile)>, TimeProfile, TimeProfile);

fn derived_profiles(profile: TimeProfile, q: f64) -> Result<DerivedProfiles> {
    match profile {
        TimeProfile::Constant => Ok((None, TimeProfile::Constant, TimeProfile::Constant)),
        TimeProfile::Exponential { rate } => Ok((
            Some((rate, TimeProfile::Exponential { rate })),
            TimeProfile::Exponential { rate: 2.0 * rate },
            TimeProfile::Exponential { rate: (q - 1.0) * rate },
        )),
        TimeProfile::Oscillation {
            mean,
            amplitude,
            omega,
            exponent: 1.0,
        } => {
            // g^2 is represented as |g| g, so g must keep one sign.
            if mean <= amplitude.abs() {
                return Err(NsvError::InvalidParameter(
                    "oscillating target profile must stay positive (mean > |amplitude|)".into(),
                ));
            }
            let power = |e| TimeProfile::Oscillation {
                mean,
                amplitude,
                omega,
                exponent: e,
            };
            Ok((
                Some((1.0, TimeProfile::OscillationRate { amplitude, omega })),
                power(2.0),
                power(q - 1.0),
            ))
        }
        _ => Err(NsvError::InvalidParameter(format!(
            "unsupported target profile {profile:?}"
        ))),
    }
}

/// Forcing that makes `target` an exact solution, assembled on a lattice
/// with twice the modes and truncated to `grid`.
pub fn manufactured_forcing(
    target: &ManufacturedTarget,
    params: &PdeParams,
    grid: &TorusGrid,
) -> Result<Forcing> {
    let fine = TorusGrid::new(grid.dim(), 2 * grid.modes(), grid.box_length())?;
    let u_fine = target.shape.field(&fine)?;
    let unforced = PdeParams {
        forcing: Forcing::zero(),
        ..params.clone()
    };
    let mut ev = Evaluator::new(&fine, &unforced, fine.max_shell())?;
    let (conv, visc, reg) = ev.stress_divergences(&u_fine);
    let (rate, square, power) = derived_profiles(target.profile, params.p)?;

    let mut forcing = Forcing::zero();
    if let Some((scale, prof)) = rate {
        let mut mass = u_fine.clone();
        let kappa = params.kappa;
        for c in 0..fine.dim() {
            for (idx, z) in mass.component_mut(c).iter_mut().enumerate() {
                *z *= scale * (1.0 + kappa * fine.k2(idx));
            }
        }
        forcing = forcing.with_term(prof, mass.transfer(grid)?);
    }
    forcing = forcing.with_term(square, conv.transfer(grid)?);
    forcing = forcing.with_term(power, visc.scaled(-params.nu).transfer(grid)?);
    if let Some(r) = params.regularization {
        let (_, _, reg_power) = derived_profiles(target.profile, r.beta)?;
        forcing = forcing.with_term(reg_power, reg.scaled(-r.weight()).transfer(grid)?);
    }
    Ok(forcing)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManufacturedReport {
    pub modes: usize,
    pub dt: f64,
    pub t_end: f64,
    /// `||v(T) - g(T) U||_2`
    pub terminal_error: f64,
    /// `max_t ||v(t) - g(t) U||_2`
    pub max_error: f64,
    /// `terminal_error / ||g(T) U||_2`
    pub relative_error: f64,
}

/// Integrates from `g(0) U` with the manufactured forcing and measures the
/// distance to the target.
pub fn run_manufactured(
    target: &ManufacturedTarget,
    params: &PdeParams,
    config: &SimConfig,
) -> Result<ManufacturedReport> {
    let grid = &config.grid;
    let forcing = manufactured_forcing(target, params, grid)?;
    let forced = params.clone().with_forcing(forcing);
    let shape = target.shape.field(grid)?;
    let v0 = shape.scaled(target.profile.value(0.0));
    let mut max_error: f64 = 0.0;
    let mut last = (0.0, 0.0);
    integrate_observed(config, &forced, &v0, |_, t, v| {
        let mut d = v.clone();
        let g = target.profile.value(t);
        d.add_scaled(-g, &shape);
        let e = d.l2_norm_sq().sqrt();
        max_error = max_error.max(e);
        last = (e, g.abs() * shape.l2_norm_sq().sqrt());
    })?;
    let (terminal_error, scale) = last;
    Ok(ManufacturedReport {
        modes: grid.modes(),
        dt: config.dt,
        t_end: config.t_end,
        terminal_error,
        max_error,
        relative_error: if scale > 0.0 { terminal_error / scale } else { terminal_error },
    })
}
