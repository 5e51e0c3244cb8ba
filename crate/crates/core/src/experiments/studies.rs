use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{apriori_report, trapezoid, AprioriReport};
use crate::error::{NsvError, Result};
use crate::pressure::{decompose_pressure, verify_pressure_bounds, PressureBoundReport};
use crate::solver::{integrate, integrate_observed, PdeParams, SimConfig};
use crate::spectral::{fields, leray_project, SpectralVelocity};

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Largest relative deviation from the mean, `max |c - mean| / mean`.
pub fn relative_spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if mean == 0.0 {
        if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        dev / mean.abs()
    }
}

fn l2_dist(a: &SpectralVelocity, b: &SpectralVelocity) -> (f64, f64) {
    let mut d = a.clone();
    d.add_scaled(-1.0, b);
    (d.l2_norm_sq(), d.grad_norm_sq())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorGreenReport {
    pub amplitude: f64,
    pub expected_rate: f64,
    /// `log(||v(T)|| / ||v(0)||) / T`; `None` for zero amplitude.
    pub measured_rate: Option<f64>,
    /// `||v(T) - exact(T)||_2`
    pub terminal_error: f64,
}

/// Taylor-Green decay for `p = 2` in two dimensions, against
/// `a exp(-2 nu t / (1 + 2 kappa))`.
pub fn run_taylor_green(config: &SimConfig, params: &PdeParams, amplitude: f64) -> Result<TaylorGreenReport> {
    if params.p != 2.0 {
        return Err(NsvError::InvalidParameter(format!(
            "Taylor-Green closed form needs p = 2, got {}",
            params.p
        )));
    }
    if config.grid.dim() != 2 {
        return Err(NsvError::InvalidParameter("Taylor-Green check runs in d = 2".into()));
    }
    let unit = config.grid.box_length() / std::f64::consts::TAU;
    let expected_rate = -2.0 * params.nu / (unit * unit) / (1.0 + 2.0 * params.kappa / (unit * unit));
    let v0 = fields::taylor_green(&config.grid, amplitude);
    let traj = integrate(config, params, &v0)?;
    let t = traj.final_time();
    let exact = v0.scaled((expected_rate * t).exp());
    let (e2, _) = l2_dist(traj.final_state(), &exact);
    let n0 = v0.l2_norm_sq();
    let measured_rate = (n0 > 0.0).then(|| 0.5 * (traj.final_state().l2_norm_sq() / n0).ln() / t);
    Ok(TaylorGreenReport {
        amplitude,
        expected_rate,
        measured_rate,
        terminal_error: e2.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaPoint {
    pub kappa: f64,
    /// `log(E(T)/E(0)) / T` for `E = ||v||^2 + kappa ||grad v||^2`.
    pub energy_decay_rate: Option<f64>,
    pub final_energy: f64,
}

/// Energy decay exponent across relaxation times.
pub fn kappa_sweep(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    kappas: &[f64],
) -> Result<Vec<KappaPoint>> {
    kappas
        .par_iter()
        .map(|&kappa| {
            let p = PdeParams {
                kappa,
                ..params.clone()
            };
            p.validate(&config.grid)?;
            let traj = integrate(config, &p, v0)?;
            let recs = traj.ledger.records();
            let (e0, e1) = (recs[0].energy, recs[recs.len() - 1].energy);
            Ok(KappaPoint {
                kappa,
                energy_decay_rate: (e0 > 0.0 && e1 > 0.0).then(|| (e1 / e0).ln() / traj.final_time()),
                final_energy: e1,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    pub delta: f64,
    pub times: Vec<f64>,
    /// `||grad w(t)||_2^2`
    pub grad_w_sq: Vec<f64>,
    /// `log(||grad w(t)||^2 / ||grad w(0)||^2)`, empty when `delta = 0`.
    pub log_ratio: Vec<f64>,
    /// Fitted rate over the second half of the run.
    pub rate: Option<f64>,
    /// Largest `log_ratio(t) - rate t`; the Gronwall line passes through
    /// the origin.
    pub max_excess: Option<f64>,
    pub max_grad_w: f64,
}

/// A solenoidal perturbation of `W^{1,2}` size `delta`.
pub fn perturbation(base: &SpectralVelocity, seed: u64, delta: f64) -> SpectralVelocity {
    let grid = base.grid();
    let mut w = fields::random(grid, seed, 1.0, grid.max_shell(), true);
    let norm = (w.l2_norm_sq() + w.grad_norm_sq()).sqrt();
    if norm > 0.0 {
        w.scale(delta / norm);
    }
    leray_project(&w)
}

/// Separation of two runs started from `v1` and `v2`.
pub fn gronwall_compare(
    config: &SimConfig,
    params: &PdeParams,
    v1: &SpectralVelocity,
    v2: &SpectralVelocity,
    delta: f64,
) -> Result<GronwallReport> {
    let mut states = Vec::new();
    let first = integrate_observed(config, params, v1, |_, t, v| states.push((t, v.clone())));
    first?;
    let mut times = Vec::with_capacity(states.len());
    let mut grad_w_sq = Vec::with_capacity(states.len());
    let mut idx = 0;
    integrate_observed(config, params, v2, |_, t, v| {
        let (_, g) = l2_dist(&states[idx].1, v);
        times.push(t);
        grad_w_sq.push(g);
        idx += 1;
    })?;
    let max_grad_w = grad_w_sq.iter().fold(0.0, |m: f64, g| m.max(g.sqrt()));
    let g0 = grad_w_sq[0];
    let (log_ratio, rate, max_excess) = if g0 > 0.0 {
        let lr: Vec<f64> = grad_w_sq.iter().map(|g| (g / g0).ln()).collect();
        let half = times.len() / 2;
        let rate = linear_fit(&times[half..], &lr[half..]).map(|(s, _)| s);
        let excess = rate.map(|c| {
            times
                .iter()
                .zip(&lr)
                .map(|(t, l)| l - c * t)
                .fold(f64::NEG_INFINITY, f64::max)
        });
        (lr, rate, excess)
    } else {
        (Vec::new(), None, None)
    };
    Ok(GronwallReport {
        delta,
        times,
        grad_w_sq,
        log_ratio,
        rate,
        max_excess,
        max_grad_w,
    })
}

/// Runs from `v0` and `v0 + w0`, with `w0` a seeded perturbation of size
/// `delta`.
pub fn run_gronwall(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    delta: f64,
    seed: u64,
) -> Result<GronwallReport> {
    let mut v2 = v0.clone();
    if delta != 0.0 {
        v2.add_scaled(1.0, &perturbation(v0, seed, delta));
    }
    gronwall_compare(config, params, v0, &v2, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementRow {
    pub coarse: usize,
    pub fine: usize,
    /// `||v_coarse - v_fine||_{L^2(Q_T)}`
    pub l2_qt: f64,
    /// `sup_t ||v_coarse - v_fine||_{W^{1,2}}`
    pub sup_w12: f64,
}

/// Differences between successive Galerkin cutoffs.
pub fn run_refinement(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    shells: &[usize],
) -> Result<Vec<RefinementRow>> {
    if shells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NsvError::InvalidParameter("shells must be strictly increasing".into()));
    }
    if shells.len() < 2 {
        return Ok(Vec::new());
    }
    let runs: Vec<Vec<(f64, SpectralVelocity)>> = shells
        .par_iter()
        .map(|&n| {
            let cfg = config.clone().with_shell(n).with_snapshots(1);
            integrate(&cfg, params, v0).map(|t| t.snapshots)
        })
        .collect::<Result<_>>()?;
    Ok(runs
        .windows(2)
        .zip(shells.windows(2))
        .map(|(pair, ns)| {
            let (mut acc, mut sup): (f64, f64) = (0.0, 0.0);
            let mut prev: Option<(f64, f64)> = None;
            for ((t, a), (_, b)) in pair[0].iter().zip(&pair[1]) {
                let (l2, g2) = l2_dist(a, b);
                sup = sup.max((l2 + g2).sqrt());
                if let Some((tp, lp)) = prev {
                    acc += 0.5 * (t - tp) * (l2 + lp);
                }
                prev = Some((*t, l2));
            }
            RefinementRow {
                coarse: ns[0],
                fine: ns[1],
                l2_qt: acc.sqrt(),
                sup_w12: sup,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationPoint {
    pub n_reg: u32,
    /// `int ||(1/n) B(v_n)||_{beta'}^{beta'} dt`
    pub stress_norm: f64,
    /// `(1/n) int ||grad v_n||_beta^beta dt`
    pub energy_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationReport {
    pub beta: f64,
    pub points: Vec<RegularizationPoint>,
    /// Log-log slope of `stress_norm` against `n_reg`.
    pub slope: Option<f64>,
}

/// `int ||(1/n) B(v)||_{beta'}^{beta'} dt` from a regularized ledger, using
/// `|B|^{beta'} = |D|^beta`.
pub fn regularizer_stress_norm(ledger: &crate::diagnostics::EnergyLedger) -> f64 {
    let p = ledger.params();
    if p.reg_weight == 0.0 {
        return 0.0;
    }
    let bp = p.beta / (p.beta - 1.0);
    let scale = p.reg_weight.powf(bp - 1.0);
    trapezoid(ledger.records(), |r| scale * r.reg_strain_beta)
}

pub fn run_regularization_sweep(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    beta: f64,
    n_list: &[u32],
) -> Result<RegularizationReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NsvError::InvalidParameter("n_list must be nonempty and increasing".into()));
    }
    let points: Vec<RegularizationPoint> = n_list
        .par_iter()
        .map(|&n| {
            let p = params.clone().with_regularization(beta, n);
            let traj = integrate(config, &p, v0)?;
            Ok(RegularizationPoint {
                n_reg: n,
                stress_norm: regularizer_stress_norm(&traj.ledger),
                energy_term: trapezoid(traj.ledger.records(), |r| r.reg_grad_beta),
            })
        })
        .collect::<Result<_>>()?;
    let positive: Vec<&RegularizationPoint> = points.iter().filter(|p| p.stress_norm > 0.0).collect();
    let x: Vec<f64> = positive.iter().map(|p| (p.n_reg as f64).ln()).collect();
    let y: Vec<f64> = positive.iter().map(|p| p.stress_norm.ln()).collect();
    Ok(RegularizationReport {
        beta,
        slope: linear_fit(&x, &y).map(|(s, _)| s),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriPoint {
    pub galerkin_n: usize,
    pub report: AprioriReport,
}

/// A-priori constants across Galerkin cutoffs.
pub fn apriori_sweep(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    shells: &[usize],
) -> Result<Vec<AprioriPoint>> {
    shells
        .par_iter()
        .map(|&n| {
            let traj = integrate(&config.clone().with_shell(n), params, v0)?;
            Ok(AprioriPoint {
                galerkin_n: n,
                report: apriori_report(&traj.ledger),
            })
        })
        .collect()
}

/// Pressure bound ratios sampled every `every` steps along a run.
pub fn trajectory_pressure_bounds(
    config: &SimConfig,
    params: &PdeParams,
    v0: &SpectralVelocity,
    every: usize,
    m1: f64,
    m2: f64,
) -> Result<PressureBoundReport> {
    let cfg = config.clone().with_snapshots(every.max(1));
    let traj = integrate(&cfg, params, v0)?;
    let samples = traj
        .snapshots
        .iter()
        .map(|(t, v)| Ok((*t, decompose_pressure(v, *t, params)?)))
        .collect::<Result<Vec<_>>>()?;
    verify_pressure_bounds(&samples, m1, m2)
}
