//! One-dimensional power-law Kelvin-Voigt model on `(0, L)` with
//! homogeneous Dirichlet conditions,
//!
//! ```text
//! d/dt (v - kappa v_xx) = d/dx (nu |v_x|^(p-2) v_x) + f,   v(0) = v(L) = 0,
//! ```
//!
//! discretized in the sine basis `sin(k pi x / L)`, `k = 1..=M`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::diagnostics::{energy_identity_residual, EnergyLedger, LedgerParams, LedgerRecord};
use crate::error::{NsvError, Result};
use crate::solver::{TimeProfile, DEFAULT_FIXED_POINT_TOL, DEFAULT_MAX_FIXED_POINT_ITERS};
use crate::tensor::{check_exponent, power_law_factor};

/// `sin(pi y)` with exact zeros at integer `y`.
pub fn sin_pi(y: f64) -> f64 {
    let r = y.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else {
        (std::f64::consts::PI * r).sin()
    }
}

/// Sine coefficients on `(0, length)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineState {
    pub length: f64,
    /// `coeffs[k-1]` multiplies `sin(k pi x / L)`.
    pub coeffs: Vec<f64>,
}

impl SineState {
    pub fn zeros(modes: usize, length: f64) -> Result<Self> {
        if modes == 0 {
            return Err(NsvError::InvalidParameter("need at least one sine mode".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(NsvError::InvalidParameter(format!("length must be positive, got {length}")));
        }
        Ok(SineState {
            length,
            coeffs: vec![0.0; modes],
        })
    }

    pub fn single_mode(modes: usize, length: f64, k: usize, amplitude: f64) -> Result<Self> {
        let mut s = SineState::zeros(modes, length)?;
        if k == 0 || k > modes {
            return Err(NsvError::InvalidParameter(format!("mode {k} outside 1..={modes}")));
        }
        s.coeffs[k - 1] = amplitude;
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `k pi / L`
    pub fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.length
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = x / self.length;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| b * sin_pi((i + 1) as f64 * y))
            .sum()
    }

    /// Values at `n` equispaced points including both end points.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n)
            .map(|j| self.eval(self.length * j as f64 / (n - 1) as f64))
            .collect()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        0.5 * self.length * self.coeffs.iter().map(|b| b * b).sum::<f64>()
    }

    pub fn grad_norm_sq(&self) -> f64 {
        0.5 * self.length
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, b)| (b * self.wavenumber(i + 1)).powi(2))
                .sum::<f64>()
    }

    pub fn inner(&self, other: &SineState) -> f64 {
        0.5 * self.length * self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum::<f64>()
    }

    fn axpy(&self, s: f64, other: &SineState) -> SineState {
        SineState {
            length: self.length,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + s * b).collect(),
        }
    }

    fn norm(&self) -> f64 {
        self.coeffs.iter().map(|b| b * b).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kv1dParams {
    pub nu: f64,
    pub kappa: f64,
    pub p: f64,
}

impl Kv1dParams {
    pub fn new(nu: f64, kappa: f64, p: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(NsvError::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(NsvError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        check_exponent(p)?;
        Ok(Kv1dParams { nu, kappa, p })
    }
}

/// Separable forcing `sum profile_i(t) * field_i(x)` in sine coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Forcing1d {
    pub terms: Vec<(TimeProfile, Vec<f64>)>,
}

impl Forcing1d {
    fn coeffs(&self, t: f64, modes: usize) -> Vec<f64> {
        let mut out = vec![0.0; modes];
        for (prof, c) in &self.terms {
            let s = prof.value(t);
            for (o, x) in out.iter_mut().zip(c) {
                *o += s * x;
            }
        }
        out
    }
}

/// Stepping controls for the 1-D model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kv1dConfig {
    pub dt: f64,
    pub t_end: f64,
    pub fixed_point_tol: f64,
    pub max_fixed_point_iters: usize,
}

impl Kv1dConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Kv1dConfig {
            dt,
            t_end,
            fixed_point_tol: DEFAULT_FIXED_POINT_TOL,
            max_fixed_point_iters: DEFAULT_MAX_FIXED_POINT_ITERS,
        }
    }
}

struct Rhs1d {
    params: Kv1dParams,
    forcing: Forcing1d,
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl Rhs1d {
    fn new(params: Kv1dParams, forcing: Forcing1d, modes: usize) -> Self {
        // Odd extension to (0, 2L) sampled with room for the 3/2 rule.
        let n = 2 * (3 * (modes + 1)).div_ceil(2);
        let mut planner = FftPlanner::new();
        Rhs1d {
            params,
            forcing,
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            buf: vec![Complex64::default(); n],
        }
    }

    /// Returns `dv/dt`, and `int_0^L |v_x|^p` when asked.
    fn eval(&mut self, v: &SineState, t: f64, quad: bool) -> (SineState, f64) {
        let m = v.modes();
        let n = self.n;
        self.buf.iter_mut().for_each(|z| *z = Complex64::default());
        for k in 1..=m {
            let c = 0.5 * v.coeffs[k - 1] * v.wavenumber(k);
            self.buf[k] += c;
            self.buf[n - k] += c;
        }
        self.inv.process(&mut self.buf);
        let mut dissip = 0.0;
        for z in self.buf.iter_mut() {
            let vx = z.re;
            let g2 = vx * vx;
            let f = power_law_factor(g2, self.params.p);
            if quad {
                dissip += f * g2;
            }
            *z = Complex64::new(self.params.nu * f * vx, 0.0);
        }
        self.fwd.process(&mut self.buf);
        let forcing = self.forcing.coeffs(t, m);
        let mut out = SineState {
            length: v.length,
            coeffs: vec![0.0; m],
        };
        for k in 1..=m {
            let kk = v.wavenumber(k);
            // tau = sum c_k cos(k' x) with c_k = 2 Re tau_hat(k)
            let ck = 2.0 * self.buf[k].re / n as f64;
            out.coeffs[k - 1] = (-kk * ck + forcing[k - 1]) / (1.0 + self.params.kappa * kk * kk);
        }
        // Half of the doubled domain.
        (out, dissip * v.length / n as f64)
    }
}

/// States and ledger of a 1-D run.
#[derive(Debug, Clone)]
pub struct Trajectory1d {
    pub times: Vec<f64>,
    pub states: Vec<SineState>,
    pub ledger: EnergyLedger,
}

impl Trajectory1d {
    pub fn final_state(&self) -> &SineState {
        self.states.last().expect("trajectory has an initial state")
    }
}

#[allow(clippy::too_many_arguments)]
fn record(step: usize, t: f64, v: &SineState, rate: &SineState, dissip: f64, params: &Kv1dParams, forcing: &Forcing1d, iters: usize) -> LedgerRecord {
    let f = SineState {
        length: v.length,
        coeffs: forcing.coeffs(t, v.modes()),
    };
    let l2_sq = v.l2_norm_sq();
    let kappa_grad_sq = params.kappa * v.grad_norm_sq();
    LedgerRecord {
        step,
        t,
        l2_sq,
        kappa_grad_sq,
        energy: l2_sq + kappa_grad_sq,
        grad_p: dissip,
        strain_p: dissip,
        reg_grad_beta: 0.0,
        reg_strain_beta: 0.0,
        forcing_work: f.inner(v),
        dtv_l2_sq: rate.l2_norm_sq(),
        kappa_grad_dtv_sq: params.kappa * rate.grad_norm_sq(),
        forcing_pprime: 0.0,
        fixed_point_iters: iters,
    }
}

/// Midpoint integration of the 1-D model, keeping every state.
pub fn integrate_1d(
    v0: &SineState,
    params: Kv1dParams,
    forcing: &Forcing1d,
    config: Kv1dConfig,
) -> Result<Trajectory1d> {
    if !(config.dt > 0.0 && config.t_end >= config.dt) {
        return Err(NsvError::InvalidParameter(format!(
            "need 0 < dt <= t_end, got dt = {}, t_end = {}",
            config.dt, config.t_end
        )));
    }
    let mut rhs = Rhs1d::new(params, forcing.clone(), v0.modes());
    let nsteps = ((config.t_end / config.dt) - 1e-9).ceil().max(1.0) as usize;
    let time = |k: usize| if k >= nsteps { config.t_end } else { k as f64 * config.dt };
    let mut ledger = EnergyLedger::from_records(
        LedgerParams {
            nu: params.nu,
            kappa: params.kappa,
            p: params.p,
            reg_weight: 0.0,
            beta: params.p,
            stress_factor: 1.0,
        },
        Vec::new(),
    );
    let mut v = v0.clone();
    let (mut rate, d) = rhs.eval(&v, 0.0, true);
    ledger.push(record(0, 0.0, &v, &rate, d, &params, forcing, 0));
    let mut times = vec![0.0];
    let mut states = vec![v.clone()];
    for k in 0..nsteps {
        let t = time(k);
        let dt = time(k + 1) - t;
        let mut next = v.axpy(dt, &rate);
        let mut iters = 0;
        let mut residual = f64::INFINITY;
        while iters < config.max_fixed_point_iters {
            iters += 1;
            let mid = v.axpy(1.0, &next);
            let mid = SineState {
                length: mid.length,
                coeffs: mid.coeffs.iter().map(|c| 0.5 * c).collect(),
            };
            let (r, _) = rhs.eval(&mid, t + 0.5 * dt, false);
            let cand = v.axpy(dt, &r);
            let diff = cand.axpy(-1.0, &next).norm();
            residual = if diff == 0.0 { 0.0 } else { diff / cand.norm() };
            next = cand;
            if residual <= config.fixed_point_tol || residual.is_nan() {
                break;
            }
        }
        if !(residual <= config.fixed_point_tol) {
            return Err(NsvError::FixedPointDiverged {
                time: t,
                iterations: iters,
                residual,
            });
        }
        v = next;
        let t1 = time(k + 1);
        let (r, d) = rhs.eval(&v, t1, true);
        rate = r;
        let rec = record(k + 1, t1, &v, &rate, d, &params, forcing, iters);
        if !rec.energy.is_finite() {
            return Err(NsvError::NonFinite { time: t1 });
        }
        ledger.push(rec);
        times.push(t1);
        states.push(v.clone());
    }
    Ok(Trajectory1d {
        times,
        states,
        ledger,
    })
}

/// Defect of `E(T) + 2 nu int int |v_x|^p - E(0) - 2 int int f v` per step.
pub fn energy_check_1d(traj: &Trajectory1d) -> Vec<f64> {
    energy_identity_residual(&traj.ledger)
}
