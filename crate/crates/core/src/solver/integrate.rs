use serde::{Deserialize, Serialize};

use super::params::PdeParams;
use super::rhs::Evaluator;
use crate::diagnostics::{EnergyLedger, LedgerRecord};
use crate::error::{NsvError, Result};
use crate::spectral::{truncate, SpectralVelocity, TorusGrid};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Implicit midpoint rule solved by fixed-point iteration.
    #[default]
    Midpoint,
    /// Classical four-stage Runge-Kutta.
    ExplicitRk4,
}

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_FIXED_POINT_ITERS: usize = 50;

/// Discretization and stepping controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: TorusGrid,
    /// Shell cutoff `n`; retained modes satisfy `|k|_inf <= n`.
    pub galerkin_n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub fixed_point_tol: f64,
    pub max_fixed_point_iters: usize,
    /// Keep every `snapshot_every`-th state (the final state is always kept);
    /// zero keeps only the initial and final states.
    pub snapshot_every: usize,
}

impl SimConfig {
    /// Midpoint stepping on the full lattice with default tolerances.
    pub fn new(grid: &TorusGrid, dt: f64, t_end: f64) -> Self {
        SimConfig {
            grid: grid.clone(),
            galerkin_n: grid.max_shell(),
            dt,
            t_end,
            scheme: Scheme::Midpoint,
            fixed_point_tol: DEFAULT_FIXED_POINT_TOL,
            max_fixed_point_iters: DEFAULT_MAX_FIXED_POINT_ITERS,
            snapshot_every: 0,
        }
    }

    pub fn with_shell(mut self, n: usize) -> Self {
        self.galerkin_n = n;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.fixed_point_tol = tol;
        self
    }

    pub fn with_snapshots(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.galerkin_n == 0 {
            return Err(NsvError::InvalidParameter("galerkin_n must be positive".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(NsvError::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(NsvError::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.dt > self.t_end {
            return Err(NsvError::InvalidParameter(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if !(self.fixed_point_tol > 0.0) {
            return Err(NsvError::InvalidParameter("fixed_point_tol must be positive".into()));
        }
        if self.max_fixed_point_iters == 0 {
            return Err(NsvError::InvalidParameter(
                "max_fixed_point_iters must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn num_steps(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Time of step `k`.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.num_steps() {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }
}

/// Stored states and the per-step energy ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, SpectralVelocity)>,
    pub ledger: EnergyLedger,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralVelocity {
        &self.snapshots.last().expect("trajectory has an initial state").1
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }

    pub fn initial_state(&self) -> &SpectralVelocity {
        &self.snapshots[0].1
    }
}

/// `P^n v0`, after checking that `v0` is divergence-free.
pub fn project_initial(v0: &SpectralVelocity, n: usize) -> Result<SpectralVelocity> {
    let g = v0.grid();
    let kmax = g.max_shell() as f64 * std::f64::consts::TAU / g.box_length();
    let defect = v0.divergence_defect();
    if defect > 1e-12 * kmax * v0.coeff_norm() {
        return Err(NsvError::NotDivergenceFree { defect });
    }
    truncate(v0, n)
}

/// `dv/dt` of the Galerkin system with cutoff `n`.
pub fn tendency(v: &SpectralVelocity, t: f64, params: &PdeParams, n: usize) -> Result<SpectralVelocity> {
    let mut ev = Evaluator::new(v.grid(), params, n)?;
    Ok(ev.tendency(v, t))
}

fn rel_change(diff: &SpectralVelocity, base: &SpectralVelocity) -> f64 {
    let d = diff.coeff_norm();
    let b = base.coeff_norm();
    if d == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        d / b
    }
}

/// Single-step driver owning the evaluator buffers.
pub struct Stepper {
    ev: Evaluator,
    scheme: Scheme,
    tol: f64,
    max_iters: usize,
}

impl Stepper {
    pub fn new(config: &SimConfig, params: &PdeParams) -> Result<Self> {
        config.validate()?;
        Ok(Stepper {
            ev: Evaluator::new(&config.grid, params, config.galerkin_n)?,
            scheme: config.scheme,
            tol: config.fixed_point_tol,
            max_iters: config.max_fixed_point_iters,
        })
    }

    pub fn evaluator(&mut self) -> &mut Evaluator {
        &mut self.ev
    }

    /// Advances `v` from `t` by `dt`. `k1` is the tendency at `(v, t)` when
    /// already known. Returns the new state and the number of fixed-point
    /// iterations (zero for the explicit scheme).
    pub fn step(
        &mut self,
        v: &SpectralVelocity,
        t: f64,
        dt: f64,
        k1: Option<&SpectralVelocity>,
    ) -> Result<(SpectralVelocity, usize)> {
        let k1 = match k1 {
            Some(k) => k.clone(),
            None => self.ev.tendency(v, t),
        };
        match self.scheme {
            Scheme::Midpoint => self.midpoint(v, t, dt, &k1),
            Scheme::ExplicitRk4 => Ok((self.rk4(v, t, dt, &k1), 0)),
        }
    }

    fn midpoint(
        &mut self,
        v: &SpectralVelocity,
        t: f64,
        dt: f64,
        k1: &SpectralVelocity,
    ) -> Result<(SpectralVelocity, usize)> {
        let tm = t + 0.5 * dt;
        let mut next = v.axpy(dt, k1);
        let mut residual = f64::INFINITY;
        for iter in 1..=self.max_iters {
            let mut mid = v.clone();
            mid.add_scaled(1.0, &next);
            mid.scale(0.5);
            let rate = self.ev.tendency(&mid, tm);
            let cand = v.axpy(dt, &rate);
            let mut diff = cand.clone();
            diff.add_scaled(-1.0, &next);
            residual = rel_change(&diff, &cand);
            next = cand;
            if residual.is_nan() {
                break;
            }
            if residual <= self.tol {
                return Ok((next, iter));
            }
        }
        Err(NsvError::FixedPointDiverged {
            time: t,
            iterations: self.max_iters,
            residual,
        })
    }

    fn rk4(&mut self, v: &SpectralVelocity, t: f64, dt: f64, k1: &SpectralVelocity) -> SpectralVelocity {
        let k2 = self.ev.tendency(&v.axpy(0.5 * dt, k1), t + 0.5 * dt);
        let k3 = self.ev.tendency(&v.axpy(0.5 * dt, &k2), t + 0.5 * dt);
        let k4 = self.ev.tendency(&v.axpy(dt, &k3), t + dt);
        let mut out = v.axpy(dt / 6.0, k1);
        out.add_scaled(dt / 3.0, &k2);
        out.add_scaled(dt / 3.0, &k3);
        out.add_scaled(dt / 6.0, &k4);
        out
    }

    /// Ledger record of `v` at time `t`; also returns the tendency.
    pub fn record(&mut self, step: usize, v: &SpectralVelocity, t: f64, iters: usize) -> (LedgerRecord, SpectralVelocity) {
        let (rate, q) = self.ev.tendency_with_quadratures(v, t);
        let params = self.ev.params();
        let kappa = params.kappa;
        let w = params.reg_weight();
        let forcing = self.ev.forcing_at(t);
        let l2_sq = v.l2_norm_sq();
        let kappa_grad_sq = kappa * v.grad_norm_sq();
        let rec = LedgerRecord {
            step,
            t,
            l2_sq,
            kappa_grad_sq,
            energy: l2_sq + kappa_grad_sq,
            grad_p: q.grad_p,
            strain_p: q.strain_p,
            reg_grad_beta: w * q.grad_beta,
            reg_strain_beta: w * q.strain_beta,
            forcing_work: forcing.inner(v),
            dtv_l2_sq: rate.l2_norm_sq(),
            kappa_grad_dtv_sq: kappa * rate.grad_norm_sq(),
            forcing_pprime: q.forcing_pprime,
            fixed_point_iters: iters,
        };
        (rec, rate)
    }
}

fn check_finite(rec: &LedgerRecord) -> Result<()> {
    if rec.energy.is_finite() && rec.strain_p.is_finite() && rec.dtv_l2_sq.is_finite() {
        Ok(())
    } else {
        Err(NsvError::NonFinite { time: rec.t })
    }
}

/// Integrates the Galerkin system from `P^n v0` over `[0, t_end]`,
/// recording a ledger entry at every step. `observer` sees every state.
pub fn integrate_observed(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    mut observer: impl FnMut(usize, f64, &SpectralVelocity),
) -> Result<Trajectory> {
    if v0.grid() != &config.grid {
        return Err(NsvError::GridMismatch("initial state and config grids differ".into()));
    }
    let mut stepper = Stepper::new(config, params)?;
    let mut v = project_initial(v0, config.galerkin_n)?;
    let nsteps = config.num_steps();
    let mut ledger = EnergyLedger::new(params);
    let mut snapshots = vec![(0.0, v.clone())];
    observer(0, 0.0, &v);
    let (rec, mut rate) = stepper.record(0, &v, 0.0, 0);
    check_finite(&rec)?;
    ledger.push(rec);
    for k in 0..nsteps {
        let t = config.time(k);
        let t1 = config.time(k + 1);
        let (next, iters) = stepper.step(&v, t, t1 - t, Some(&rate))?;
        v = next;
        let (rec, r) = stepper.record(k + 1, &v, t1, iters);
        check_finite(&rec).map_err(|_| NsvError::NonFinite { time: t1 })?;
        ledger.push(rec);
        rate = r;
        observer(k + 1, t1, &v);
        let last = k + 1 == nsteps;
        if last || (config.snapshot_every > 0 && (k + 1) % config.snapshot_every == 0) {
            snapshots.push((t1, v.clone()));
        }
    }
    Ok(Trajectory { snapshots, ledger })
}

/// Integrates the Galerkin system from `P^n v0`.
pub fn integrate(config: &SimConfig, params: &PdeParams, v0: &SpectralVelocity) -> Result<Trajectory> {
    integrate_observed(config, params, v0, |_, _, _| {})
}

/// Integrates the system with the auxiliary stress `(1/n_reg) B(v)`.
pub fn solve_regularized(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
) -> Result<Trajectory> {
    if params.regularization.is_none() {
        return Err(NsvError::InvalidParameter(
            "solve_regularized needs a (beta, n_reg) pair".into(),
        ));
    }
    integrate(config, params, v0)
}
