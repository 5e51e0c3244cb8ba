//! Energy ledger and the integral diagnostics computed from trajectories.

mod ledger;

pub use ledger::{
    cumulative_trapezoid, trapezoid, EnergyLedger, LedgerParams, LedgerRecord, LedgerSummary,
    LEDGER_HEADER,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NsvError, Result};
use crate::solver::Trajectory;
use crate::spectral::{SpectralVelocity, Transform};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Defect of the discrete energy identity
///
/// ```text
/// E(T) + 2c int_0^T (nu ||D v||_p^p + (1/n_reg) ||D v||_beta^beta) dt - E(0) - 2 int_0^T (f, v) dt
/// ```
///
/// with `E = ||v||_2^2 + kappa ||grad v||_2^2`, `c` the stress factor
/// (2 on the torus, 1 for the 1-D model) and trapezoid time integrals, one
/// entry per ledger record.
pub fn energy_identity_residual(ledger: &EnergyLedger) -> Vec<f64> {
    let recs = ledger.records();
    let Some(first) = recs.first() else {
        return Vec::new();
    };
    let diss = cumulative_trapezoid(recs, |r| ledger.dissipation_rate(r));
    let work = cumulative_trapezoid(recs, |r| r.forcing_work);
    recs.iter()
        .zip(diss.iter().zip(&work))
        .map(|(r, (d, w))| r.energy + d - first.energy - 2.0 * w)
        .collect()
}

/// Steps where the energy grew by more than `tol`.
pub fn dissipation_violations(ledger: &EnergyLedger, tol: f64) -> Vec<usize> {
    ledger
        .records()
        .windows(2)
        .filter(|w| w[1].energy - w[0].energy > tol)
        .map(|w| w[1].step)
        .collect()
}

/// Both sides of the a-priori bounds and the implied constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriReport {
    /// `sup_t E(t) + nu int ||grad v||_p^p dt (+ (1/n_reg) int ||grad v||_beta^beta dt)`
    pub lhs_energy: f64,
    /// `int ||dv/dt||_2^2 + kappa ||grad dv/dt||_2^2 dt`
    pub lhs_rate: f64,
    /// `int ||f||_{p'}^{p'} dt + ||v0||_2^2 + ||grad v0||_2^2`
    pub rhs: f64,
    /// `lhs_energy / rhs`; `None` when the data vanish.
    pub c_energy: Option<f64>,
    /// `lhs_rate / rhs`; `None` when the data vanish.
    pub c_rate: Option<f64>,
}

impl AprioriReport {
    pub fn is_trivial(&self) -> bool {
        self.c_energy.is_none()
    }
}

pub fn apriori_report(ledger: &EnergyLedger) -> AprioriReport {
    let recs = ledger.records();
    let params = ledger.params();
    let Some(first) = recs.first() else {
        return AprioriReport {
            lhs_energy: 0.0,
            lhs_rate: 0.0,
            rhs: 0.0,
            c_energy: None,
            c_rate: None,
        };
    };
    let sup_energy = recs.iter().map(|r| r.energy).fold(0.0, f64::max);
    let lhs_energy = sup_energy
        + trapezoid(recs, |r| params.nu * r.grad_p + r.reg_grad_beta);
    let lhs_rate = trapezoid(recs, |r| r.dtv_l2_sq + r.kappa_grad_dtv_sq);
    let grad0 = first.kappa_grad_sq / params.kappa;
    let rhs = trapezoid(recs, |r| r.forcing_pprime) + first.l2_sq + grad0;
    let ratio = |lhs: f64| if rhs > 0.0 { Some(lhs / rhs) } else { None };
    AprioriReport {
        lhs_energy,
        lhs_rate,
        rhs,
        c_energy: ratio(lhs_energy),
        c_rate: ratio(lhs_rate),
    }
}

fn snapshot_integral(traj: &Trajectory, mut f: impl FnMut(&SpectralVelocity) -> f64) -> f64 {
    let snaps = &traj.snapshots;
    let vals: Vec<f64> = snaps.iter().map(|(_, v)| f(v)).collect();
    let mut acc = 0.0;
    for i in 1..snaps.len() {
        acc += 0.5 * (snaps[i].0 - snaps[i - 1].0) * (vals[i] + vals[i - 1]);
    }
    acc
}

/// `||v||_zeta^zeta` by quadrature on the dealiasing grid.
pub fn lebesgue_norm_pow(v: &SpectralVelocity, zeta: f64, tr: &mut Transform) -> f64 {
    let mut sum = vec![0.0; tr.num_points()];
    let mut buf = vec![0.0; tr.num_points()];
    for c in 0..v.dim() {
        tr.to_grid(v.component(c), &mut buf);
        for (s, x) in sum.iter_mut().zip(&buf) {
            *s += x * x;
        }
    }
    tr.cell_volume() * sum.iter().map(|s| s.powf(0.5 * zeta)).sum::<f64>()
}

/// `int_0^T ||v||_zeta^zeta dt`, trapezoid over the stored snapshots.
pub fn lebesgue_time_norm(traj: &Trajectory, zeta: f64) -> Result<f64> {
    if !(zeta >= 1.0) {
        return Err(NsvError::InvalidParameter(format!("zeta = {zeta} must be >= 1")));
    }
    let grid = traj.initial_state().grid().clone();
    let mut tr = Transform::padded(&grid);
    Ok(snapshot_integral(traj, |v| lebesgue_norm_pow(v, zeta, &mut tr)))
}

/// `(||v (x) v||_r^r, ||div(v (x) v)||_r^r)` of one state.
pub fn convective_norms(v: &SpectralVelocity, r: f64, tr: &mut Transform) -> (f64, f64) {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let n = tr.num_points();
    let mut vel = vec![vec![0.0; n]; dim];
    for (c, out) in vel.iter_mut().enumerate() {
        tr.to_grid(v.component(c), out);
    }
    let mut conv = vec![vec![0.0; n]; dim];
    let mut buf = vec![0.0; n];
    for i in 0..dim {
        for j in 0..dim {
            tr.to_grid_scaled(v.component(i), |idx| I * grid.kvec(idx)[j], &mut buf);
            for x in 0..n {
                conv[i][x] += vel[j][x] * buf[x];
            }
        }
    }
    let mut a = 0.0;
    let mut b = 0.0;
    for x in 0..n {
        let speed2: f64 = (0..dim).map(|c| vel[c][x] * vel[c][x]).sum();
        let div2: f64 = (0..dim).map(|c| conv[c][x] * conv[c][x]).sum();
        // |v (x) v| = |v|^2 in the Frobenius norm.
        a += speed2.powf(r);
        b += div2.powf(0.5 * r);
    }
    (tr.cell_volume() * a, tr.cell_volume() * b)
}

/// Time integrals of the convective norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvectiveReport {
    pub r0: f64,
    /// `int ||v (x) v||_r0^r0 dt`
    pub tensor: f64,
    /// `int ||div(v (x) v)||_r0^r0 dt`
    pub divergence: f64,
}

pub fn convective_norm_report(traj: &Trajectory, r0: f64) -> Result<ConvectiveReport> {
    let grid = traj.initial_state().grid().clone();
    let d = grid.dim() as f64;
    let hi = d / (d - 1.0);
    if !(1.0..=hi + 1e-12).contains(&r0) {
        return Err(NsvError::InvalidParameter(format!(
            "r0 = {r0} outside [1, {hi}]"
        )));
    }
    let mut tr = Transform::padded(&grid);
    let mut tensor_vals = Vec::new();
    let mut div_vals = Vec::new();
    for (_, v) in &traj.snapshots {
        let (a, b) = convective_norms(v, r0, &mut tr);
        tensor_vals.push(a);
        div_vals.push(b);
    }
    let snaps = &traj.snapshots;
    let mut tensor = 0.0;
    let mut divergence = 0.0;
    for i in 1..snaps.len() {
        let h = 0.5 * (snaps[i].0 - snaps[i - 1].0);
        tensor += h * (tensor_vals[i] + tensor_vals[i - 1]);
        divergence += h * (div_vals[i] + div_vals[i - 1]);
    }
    Ok(ConvectiveReport {
        r0,
        tensor,
        divergence,
    })
}
