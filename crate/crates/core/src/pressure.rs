//! Pressure recovery and the split `pi = pi_1 + pi_2 + pi_h`.
//!
//! With the momentum right-hand side written as `div G`, `G = G1 + G2`,
//!
//! ```text
//! G1 = 2 nu A(v)
//! G2 = F - v (x) v + (2/n_reg) B(v),   F = -grad (-lap)^-1 f
//! ```
//!
//! each part solves `lap pi_i = div div G_i`. On the torus the harmonic part
//! is zero.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NsvError, Result};
use crate::solver::{Evaluator, PdeParams};
use crate::spectral::{
    leray_project, sym_pairs, SpectralScalar, SpectralVelocity, StressField, TorusGrid, Transform,
};
use crate::tensor::power_law_factor;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `pi` with `grad pi` equal to the gradient part of the momentum
/// right-hand side; zero mean.
pub fn recover_pressure(v: &SpectralVelocity, t: f64, params: &PdeParams) -> Result<SpectralScalar> {
    let grid = v.grid().clone();
    let mut ev = Evaluator::new(&grid, params, grid.max_shell())?;
    let rhs = ev.momentum_rhs(v, t);
    let mut out = vec![Complex64::default(); grid.len()];
    for (idx, z) in out.iter_mut().enumerate() {
        let k2 = grid.k2(idx);
        if k2 == 0.0 {
            continue;
        }
        let k = grid.kvec(idx);
        let c = rhs.at(idx);
        let mut dot = Complex64::default();
        for a in 0..grid.dim() {
            dot += k[a] * c[a];
        }
        *z = -I * dot / k2;
    }
    Ok(SpectralScalar::from_coeffs(&grid, out))
}

/// Coefficient norm of `(R - Leray R) - grad pi` for the momentum
/// right-hand side `R`, relative to the norm of `R - Leray R`.
pub fn pressure_gradient_residual(v: &SpectralVelocity, t: f64, params: &PdeParams) -> Result<f64> {
    let grid = v.grid().clone();
    let pi = recover_pressure(v, t, params)?;
    let mut ev = Evaluator::new(&grid, params, grid.max_shell())?;
    let rhs = ev.momentum_rhs(v, t);
    let mut complement = rhs.clone();
    complement.add_scaled(-1.0, &leray_project(&rhs));
    let scale = complement.coeff_norm();
    complement.add_scaled(-1.0, &pi.gradient());
    let r = complement.coeff_norm();
    Ok(if scale > 0.0 { r / scale } else { r })
}

/// The three pressure parts together with the tensors they are built from,
/// sampled on the dealiasing grid.
#[derive(Debug, Clone)]
pub struct PressureParts {
    pub pi1: SpectralScalar,
    pub pi2: SpectralScalar,
    /// Harmonic part, identically zero on the torus.
    pub pih: SpectralScalar,
    pub g1: StressField,
    /// `G2` entries in row-major order (`F` is not symmetric).
    pub g2: Vec<Vec<f64>>,
    /// `div G2` on the dealiasing grid, one array per component.
    pub div_g2: Vec<Vec<f64>>,
    cell_volume: f64,
}

impl PressureParts {
    pub fn total(&self) -> SpectralScalar {
        let mut c = self.pi1.coeffs().to_vec();
        for ((z, a), b) in c.iter_mut().zip(self.pi2.coeffs()).zip(self.pih.coeffs()) {
            *z += a + b;
        }
        SpectralScalar::from_coeffs(self.pi1.grid(), c)
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }
}

/// `(k k : G)/|k|^2` over the listed entries; `symmetric` doubles the
/// off-diagonal entries of upper-triangle storage.
fn div_div(
    grid: &TorusGrid,
    entries: &[(usize, usize)],
    g_hat: &[Vec<Complex64>],
    symmetric: bool,
) -> SpectralScalar {
    let mut out = vec![Complex64::default(); grid.len()];
    for (idx, z) in out.iter_mut().enumerate() {
        let k2 = grid.k2(idx);
        if k2 == 0.0 || !grid.is_active(idx) {
            continue;
        }
        let k = grid.kvec(idx);
        let mut s = Complex64::default();
        for (pos, &(i, j)) in entries.iter().enumerate() {
            let w = if symmetric && i != j { 2.0 } else { 1.0 };
            s += w * k[i] * k[j] * g_hat[pos][idx];
        }
        *z = s / k2;
    }
    SpectralScalar::from_coeffs(grid, out)
}

pub fn decompose_pressure(v: &SpectralVelocity, t: f64, params: &PdeParams) -> Result<PressureParts> {
    let grid = v.grid().clone();
    params.validate(&grid)?;
    let forcing = params.forcing.evaluate(t, &grid);
    let fm = forcing.mean();
    if fm.iter().any(|m| m.abs() > 1e-14 * forcing.coeff_norm().max(1.0)) {
        return Err(NsvError::InvalidParameter(
            "pressure decomposition needs zero-mean forcing".into(),
        ));
    }
    let dim = grid.dim();
    let pairs = sym_pairs(dim);
    let mut tr = Transform::padded(&grid);
    let n = tr.num_points();

    let mut vel = vec![vec![0.0; n]; dim];
    let mut grad = vec![vec![0.0; n]; dim * dim];
    for c in 0..dim {
        tr.to_grid(v.component(c), &mut vel[c]);
        for j in 0..dim {
            tr.to_grid_scaled(v.component(c), |idx| I * grid.kvec(idx)[j], &mut grad[c * dim + j]);
        }
    }
    // F_ij = -d_j (-lap)^-1 f_i, so that div F = f
    let mut fgrad = vec![vec![0.0; n]; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            tr.to_grid_scaled(
                forcing.component(i),
                |idx| {
                    let k2 = grid.k2(idx);
                    if k2 == 0.0 {
                        Complex64::default()
                    } else {
                        -I * grid.kvec(idx)[j] / k2
                    }
                },
                &mut fgrad[i * dim + j],
            );
        }
    }

    let nu = params.nu;
    let w = params.reg_weight();
    let beta = params.reg_beta();
    let mut g1 = vec![vec![0.0; n]; pairs.len()];
    let mut g2 = vec![vec![0.0; n]; dim * dim];
    let mut d = [[0.0; 3]; 3];
    for x in 0..n {
        let mut dn2 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let dij = 0.5 * (grad[i * dim + j][x] + grad[j * dim + i][x]);
                d[i][j] = dij;
                dn2 += dij * dij;
            }
        }
        let fa = 2.0 * nu * power_law_factor(dn2, params.p);
        let fb = if w > 0.0 { 2.0 * w * power_law_factor(dn2, beta) } else { 0.0 };
        for (pos, &(i, j)) in pairs.iter().enumerate() {
            g1[pos][x] = fa * d[i][j];
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = i * dim + j;
                g2[ij][x] = fgrad[ij][x] - vel[i][x] * vel[j][x] + fb * d[i][j];
            }
        }
    }
    let to_hat = |tr: &mut Transform, g: &[Vec<f64>]| -> Vec<Vec<Complex64>> {
        g.iter()
            .map(|comp| {
                let mut c = vec![Complex64::default(); grid.len()];
                tr.from_grid(comp, &mut c);
                c
            })
            .collect()
    };
    let g1_hat = to_hat(&mut tr, &g1);
    let g2_hat = to_hat(&mut tr, &g2);
    let pi1 = div_div(&grid, &pairs, &g1_hat, true);
    let full: Vec<(usize, usize)> = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).collect();
    let pi2 = div_div(&grid, &full, &g2_hat, false);

    // div G2 = f - div(v (x) v) + div((2/n_reg) B) on the retained lattice
    let mut div_g2 = vec![vec![0.0; n]; dim];
    for (i, out) in div_g2.iter_mut().enumerate() {
        let mut c = vec![Complex64::default(); grid.len()];
        for j in 0..dim {
            for (idx, z) in c.iter_mut().enumerate() {
                if grid.is_active(idx) {
                    *z += I * grid.kvec(idx)[j] * g2_hat[i * dim + j][idx];
                }
            }
        }
        tr.to_grid(&c, out);
    }

    let pts = tr.points_per_axis();
    Ok(PressureParts {
        pi1,
        pi2,
        pih: SpectralScalar::zeros(&grid),
        g1: StressField::new(dim, pts, g1),
        g2,
        div_g2,
        cell_volume: tr.cell_volume(),
    })
}

/// Measured bound constants; `None` when the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureBoundReport {
    pub m1: f64,
    pub m2: f64,
    /// `int ||pi_1||_m1^m1 / int ||G1||_m1^m1`
    pub viscous: Option<f64>,
    /// `int ||pi_2||_m2^m2 / int ||G2||_m2^m2`
    pub convective: Option<f64>,
    /// `int ||grad pi_2||_m2^m2 / int (||G2||_m2^m2 + ||div G2||_m2^m2)`
    pub gradient: Option<f64>,
}

fn tensor_pow(g: &StressField, m: f64, cell: f64) -> f64 {
    let pairs = sym_pairs(g.dim());
    let mut s = 0.0;
    for x in 0..g.num_points() {
        let mut n2 = 0.0;
        for &(i, j) in &pairs {
            let w = if i == j { 1.0 } else { 2.0 };
            let e = g.component(i, j)[x];
            n2 += w * e * e;
        }
        s += n2.powf(0.5 * m);
    }
    cell * s
}

fn vector_pow(comps: &[Vec<f64>], m: f64, cell: f64) -> f64 {
    let n = comps[0].len();
    let mut s = 0.0;
    for x in 0..n {
        let n2: f64 = comps.iter().map(|c| c[x] * c[x]).sum();
        s += n2.powf(0.5 * m);
    }
    cell * s
}

fn scalar_pow(vals: &[f64], m: f64, cell: f64) -> f64 {
    cell * vals.iter().map(|x| x.abs().powf(m)).sum::<f64>()
}

fn time_integral(times: &[f64], vals: &[f64]) -> f64 {
    if vals.len() == 1 {
        return vals[0];
    }
    (1..vals.len())
        .map(|i| 0.5 * (times[i] - times[i - 1]) * (vals[i] + vals[i - 1]))
        .sum()
}

/// Bound ratios over a sampled trajectory `(t, parts)`. A single sample
/// gives the ratios of the spatial norms.
pub fn verify_pressure_bounds(samples: &[(f64, PressureParts)], m1: f64, m2: f64) -> Result<PressureBoundReport> {
    if samples.is_empty() {
        return Err(NsvError::InvalidParameter("no pressure samples".into()));
    }
    if !(m1 >= 1.0 && m2 >= 1.0) {
        return Err(NsvError::InvalidParameter(format!(
            "exponents must be >= 1, got m1 = {m1}, m2 = {m2}"
        )));
    }
    let grid = samples[0].1.pi1.grid().clone();
    let mut tr = Transform::padded(&grid);
    let n = tr.num_points();
    let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut cols = vec![Vec::new(); 6];
    let mut buf = vec![0.0; n];
    for (_, parts) in samples {
        let cell = parts.cell_volume;
        tr.to_grid(parts.pi1.coeffs(), &mut buf);
        cols[0].push(scalar_pow(&buf, m1, cell));
        cols[1].push(tensor_pow(&parts.g1, m1, cell));
        tr.to_grid(parts.pi2.coeffs(), &mut buf);
        cols[2].push(scalar_pow(&buf, m2, cell));
        let g2 = vector_pow(&parts.g2, m2, cell);
        cols[3].push(g2);
        let grad: Vec<Vec<f64>> = (0..grid.dim())
            .map(|j| {
                let mut out = vec![0.0; n];
                tr.to_grid_scaled(parts.pi2.coeffs(), |idx| I * grid.kvec(idx)[j], &mut out);
                out
            })
            .collect();
        cols[4].push(vector_pow(&grad, m2, cell));
        cols[5].push(g2 + vector_pow(&parts.div_g2, m2, cell));
    }
    let ints: Vec<f64> = cols.iter().map(|c| time_integral(&times, c)).collect();
    let ratio = |a: f64, b: f64| if b > 0.0 { Some(a / b) } else { None };
    Ok(PressureBoundReport {
        m1,
        m2,
        viscous: ratio(ints[0], ints[1]),
        convective: ratio(ints[2], ints[3]),
        gradient: ratio(ints[4], ints[5]),
    })
}
