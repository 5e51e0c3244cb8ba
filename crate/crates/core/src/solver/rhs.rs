use num_complex::Complex64;

use super::params::PdeParams;
use crate::error::Result;
use crate::spectral::{
    leray_project_in_place, sym_pairs, truncate_in_place, SpectralVelocity, TorusGrid, Transform,
};
use crate::tensor::power_law_factor;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Space integrals evaluated by quadrature on the dealiasing grid, the same
/// quadrature that enters the discrete dynamics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratures {
    /// `||grad v||_p^p`
    pub grad_p: f64,
    /// `||D v||_p^p`
    pub strain_p: f64,
    /// `||grad v||_beta^beta` (zero without regularization)
    pub grad_beta: f64,
    /// `||D v||_beta^beta` (zero without regularization)
    pub strain_beta: f64,
    /// `||f||_{p'}^{p'}`
    pub forcing_pprime: f64,
}

/// Evaluates the Galerkin right-hand side
/// `(1 + kappa |k|^2) dv/dt = P_n Leray[f - div(v (x) v - 2 nu A(v) - (2/n_reg) B(v))]`.
pub struct Evaluator {
    grid: TorusGrid,
    params: PdeParams,
    shell: usize,
    tr: Transform,
    vel: Vec<Vec<f64>>,
    grad: Vec<Vec<f64>>,
    stress: Vec<Vec<f64>>,
    stress_hat: Vec<Vec<Complex64>>,
    forcing: SpectralVelocity,
    pairs: Vec<(usize, usize)>,
}

impl Evaluator {
    /// `shell` is the Galerkin cutoff; values above the lattice limit keep
    /// every retained mode.
    pub fn new(grid: &TorusGrid, params: &PdeParams, shell: usize) -> Result<Self> {
        params.validate(grid)?;
        let tr = Transform::padded(grid);
        let npts = tr.num_points();
        let dim = grid.dim();
        let pairs = sym_pairs(dim);
        Ok(Evaluator {
            grid: grid.clone(),
            params: params.clone(),
            shell: shell.min(grid.max_shell()),
            vel: vec![vec![0.0; npts]; dim],
            grad: vec![vec![0.0; npts]; dim * dim],
            stress: vec![vec![0.0; npts]; pairs.len()],
            stress_hat: vec![vec![Complex64::default(); grid.len()]; pairs.len()],
            forcing: SpectralVelocity::zeros(grid),
            pairs,
            tr,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }

    pub fn shell(&self) -> usize {
        self.shell
    }

    pub fn transform(&mut self) -> &mut Transform {
        &mut self.tr
    }

    fn load_physical(&mut self, v: &SpectralVelocity) {
        let dim = self.grid.dim();
        let grid = self.grid.clone();
        for c in 0..dim {
            self.tr.to_grid(v.component(c), &mut self.vel[c]);
            for j in 0..dim {
                self.tr
                    .to_grid_scaled(v.component(c), |idx| I * grid.kvec(idx)[j], &mut self.grad[c * dim + j]);
            }
        }
    }

    /// Momentum right-hand side `f - div T` before projection, plus the
    /// pointwise quadratures when requested.
    fn momentum(&mut self, v: &SpectralVelocity, t: f64, quad: bool) -> (SpectralVelocity, Quadratures) {
        let w = [1.0, self.params.nu, self.params.reg_weight()];
        self.assemble(v, t, w, true, quad)
    }

    /// `f - c0 div(v (x) v) + div(2 c1 A(v) + 2 c2 B(v))`, forcing optional.
    fn assemble(
        &mut self,
        v: &SpectralVelocity,
        t: f64,
        [c_conv, nu, w]: [f64; 3],
        with_forcing: bool,
        quad: bool,
    ) -> (SpectralVelocity, Quadratures) {
        let dim = self.grid.dim();
        self.load_physical(v);
        let p = self.params.p;
        let beta = self.params.reg_beta();
        let npts = self.tr.num_points();
        let mut q = Quadratures::default();
        let mut d = [[0.0; 3]; 3];
        for x in 0..npts {
            let mut dn2 = 0.0;
            let mut gn2 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let gij = self.grad[i * dim + j][x];
                    let gji = self.grad[j * dim + i][x];
                    let dij = 0.5 * (gij + gji);
                    d[i][j] = dij;
                    dn2 += dij * dij;
                    gn2 += gij * gij;
                }
            }
            let fa = power_law_factor(dn2, p);
            let fb = if w > 0.0 { power_law_factor(dn2, beta) } else { 0.0 };
            let visc = 2.0 * (nu * fa + w * fb);
            for (pos, &(i, j)) in self.pairs.iter().enumerate() {
                self.stress[pos][x] = c_conv * self.vel[i][x] * self.vel[j][x] - visc * d[i][j];
            }
            if quad {
                // |D|^p = |D|^(p-2) |D|^2 keeps the exact zero at the origin.
                q.strain_p += fa * dn2;
                q.grad_p += gn2.powf(0.5 * p);
                if w > 0.0 {
                    q.strain_beta += fb * dn2;
                    q.grad_beta += gn2.powf(0.5 * beta);
                }
            }
        }
        for (pos, s) in self.stress.iter().enumerate() {
            self.tr.from_grid(s, &mut self.stress_hat[pos]);
        }

        let mut rhs = SpectralVelocity::zeros(&self.grid);
        self.forcing = SpectralVelocity::zeros(&self.grid);
        if with_forcing {
            self.params.forcing.add_to(t, &mut self.forcing);
        }
        for idx in 0..self.grid.len() {
            if !self.grid.is_active(idx) {
                continue;
            }
            let k = self.grid.kvec(idx);
            let fk = self.forcing.at(idx);
            let mut out = [Complex64::default(); 3];
            for (pos, &(i, j)) in self.pairs.iter().enumerate() {
                let s = self.stress_hat[pos][idx];
                out[i] -= I * k[j] * s;
                if i != j {
                    out[j] -= I * k[i] * s;
                }
            }
            for c in 0..dim {
                out[c] += fk[c];
            }
            rhs.set(idx, out);
        }
        if quad {
            let cell = self.tr.cell_volume();
            q.strain_p *= cell;
            q.grad_p *= cell;
            q.strain_beta *= cell;
            q.grad_beta *= cell;
            if with_forcing && !self.params.forcing.is_zero() {
                let pp = self.params.p_conjugate();
                let mut sum = vec![0.0; npts];
                for c in 0..dim {
                    self.tr.to_grid(self.forcing.component(c), &mut self.vel[c]);
                    for (s, f) in sum.iter_mut().zip(&self.vel[c]) {
                        *s += f * f;
                    }
                }
                q.forcing_pprime = cell * sum.iter().map(|s| s.powf(0.5 * pp)).sum::<f64>();
            }
        }
        (rhs, q)
    }

    /// Unprojected momentum right-hand side `f - div(v (x) v) + div(2 nu A + 2 B / n_reg)`.
    pub fn momentum_rhs(&mut self, v: &SpectralVelocity, t: f64) -> SpectralVelocity {
        self.momentum(v, t, false).0
    }

    /// `(div(v (x) v), div(2 A(v)), div(2 B(v)))` on the retained lattice,
    /// unprojected; the last entry is zero without regularization.
    pub fn stress_divergences(
        &mut self,
        v: &SpectralVelocity,
    ) -> (SpectralVelocity, SpectralVelocity, SpectralVelocity) {
        let mut conv = self.assemble(v, 0.0, [1.0, 0.0, 0.0], false, false).0;
        conv.scale(-1.0);
        let visc = self.assemble(v, 0.0, [0.0, 1.0, 0.0], false, false).0;
        let reg = if self.params.regularization.is_some() {
            self.assemble(v, 0.0, [0.0, 0.0, 1.0], false, false).0
        } else {
            SpectralVelocity::zeros(&self.grid)
        };
        (conv, visc, reg)
    }

    fn finish(&self, mut rhs: SpectralVelocity) -> SpectralVelocity {
        leray_project_in_place(&mut rhs);
        truncate_in_place(&mut rhs, self.shell);
        let kappa = self.params.kappa;
        for c in 0..self.grid.dim() {
            let comp = rhs.component_mut(c);
            for (idx, z) in comp.iter_mut().enumerate() {
                *z /= 1.0 + kappa * self.grid.k2(idx);
            }
        }
        rhs
    }

    /// `dv/dt` for the Galerkin system.
    pub fn tendency(&mut self, v: &SpectralVelocity, t: f64) -> SpectralVelocity {
        let (rhs, _) = self.momentum(v, t, false);
        self.finish(rhs)
    }

    /// Tendency together with the quadratures of the state.
    pub fn tendency_with_quadratures(
        &mut self,
        v: &SpectralVelocity,
        t: f64,
    ) -> (SpectralVelocity, Quadratures) {
        let (rhs, q) = self.momentum(v, t, true);
        (self.finish(rhs), q)
    }

    /// `f(t)` on the lattice.
    pub fn forcing_at(&self, t: f64) -> SpectralVelocity {
        self.params.forcing.evaluate(t, &self.grid)
    }
}
