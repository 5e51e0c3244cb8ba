use num_complex::Complex64;

use super::fft::Transform;
use super::grid::TorusGrid;
use crate::error::{NsvError, Result};
use crate::tensor::SymTensor;

/// Fourier coefficients of a real vector field on the torus,
/// `v(x) = sum_k c_k e^{i k.x}`, one coefficient array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVelocity {
    grid: TorusGrid,
    comps: Vec<Vec<Complex64>>,
}

impl SpectralVelocity {
    pub fn zeros(grid: &TorusGrid) -> Self {
        SpectralVelocity {
            grid: grid.clone(),
            comps: vec![vec![Complex64::default(); grid.len()]; grid.dim()],
        }
    }

    pub fn from_components(grid: &TorusGrid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != grid.dim() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(NsvError::GridMismatch(
                "component arrays do not match the lattice".into(),
            ));
        }
        Ok(SpectralVelocity {
            grid: grid.clone(),
            comps,
        })
    }

    /// Interpolates a vector function sampled on the native grid.
    /// Band-limited inputs are reproduced exactly.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let mut tr = Transform::native(grid);
        let npts = tr.num_points();
        let samples: Vec<[f64; 3]> = (0..npts).map(|i| f(&grid.point(grid.modes(), i))).collect();
        let mut out = Self::zeros(grid);
        let mut vals = vec![0.0; npts];
        for c in 0..grid.dim() {
            for (v, s) in vals.iter_mut().zip(&samples) {
                *v = s[c];
            }
            tr.from_grid(&vals, &mut out.comps[c]);
        }
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    /// Coefficient vector at lattice index `idx`.
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        let mut out = [Complex64::default(); 3];
        for (c, comp) in self.comps.iter().enumerate() {
            out[c] = comp[idx];
        }
        out
    }

    pub fn set(&mut self, idx: usize, value: [Complex64; 3]) {
        for (c, comp) in self.comps.iter_mut().enumerate() {
            comp[idx] = value[c];
        }
    }

    pub fn check_grid(&self, other: &SpectralVelocity) -> Result<()> {
        if self.grid != other.grid {
            return Err(NsvError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &SpectralVelocity) -> SpectralVelocity {
        let mut out = self.clone();
        out.add_scaled(s, other);
        out
    }

    pub fn add_scaled(&mut self, s: f64, other: &SpectralVelocity) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for comp in self.comps.iter_mut() {
            for x in comp.iter_mut() {
                *x *= s;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> SpectralVelocity {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// Same field on another lattice of the same box: shared wave vectors
    /// are copied, the rest is zero (truncation or zero padding).
    pub fn transfer(&self, target: &TorusGrid) -> Result<SpectralVelocity> {
        if target.dim() != self.grid.dim() || target.box_length() != self.grid.box_length() {
            return Err(NsvError::GridMismatch(
                "transfer needs equal dimension and box length".into(),
            ));
        }
        let mut out = SpectralVelocity::zeros(target);
        for idx in 0..self.grid.len() {
            if !self.grid.is_active(idx) {
                continue;
            }
            if let Some(j) = target.index_of(self.grid.ints(idx)) {
                if target.is_active(j) {
                    out.set(j, self.at(idx));
                }
            }
        }
        Ok(out)
    }

    /// Euclidean norm of the coefficient array (no volume factor).
    pub fn coeff_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &SpectralVelocity) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// `||v||_2^2` over the box.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * self.coeff_norm().powi(2)
    }

    /// `||grad v||_2^2` over the box.
    pub fn grad_norm_sq(&self) -> f64 {
        let g = &self.grid;
        let mut s = 0.0;
        for comp in &self.comps {
            for (idx, z) in comp.iter().enumerate() {
                s += g.k2(idx) * z.norm_sqr();
            }
        }
        g.volume() * s
    }

    /// `(u, v)_{L^2}`
    pub fn inner(&self, other: &SpectralVelocity) -> f64 {
        let mut s = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                s += (x.conj() * y).re;
            }
        }
        self.grid.volume() * s
    }

    /// Voigt energy `||v||_2^2 + kappa ||grad v||_2^2`.
    pub fn voigt_energy(&self, kappa: f64) -> f64 {
        self.l2_norm_sq() + kappa * self.grad_norm_sq()
    }

    /// `max_k |k . c_k|` over the lattice.
    pub fn divergence_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let k = g.kvec(idx);
            let mut s = Complex64::default();
            for (c, comp) in self.comps.iter().enumerate() {
                s += comp[idx] * k[c];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Largest `|c(-k) - conj(c(k))|`.
    pub fn reality_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for comp in &self.comps {
            for idx in 0..g.len() {
                let d = comp[g.conj_index(idx)] - comp[idx].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Symmetrizes to `c(-k) = conj(c(k))` and clears Nyquist entries.
    pub fn enforce_reality(&mut self) {
        let g = self.grid.clone();
        for comp in self.comps.iter_mut() {
            let old = comp.clone();
            for idx in 0..g.len() {
                comp[idx] = if g.is_active(idx) {
                    0.5 * (old[idx] + old[g.conj_index(idx)].conj())
                } else {
                    Complex64::default()
                };
            }
        }
    }

    /// Mean (`k = 0`) velocity.
    pub fn mean(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for (c, comp) in self.comps.iter().enumerate() {
            m[c] = comp[0].re;
        }
        m
    }

    /// Samples every component on an `n`-per-axis grid.
    pub fn to_collocation(&self, tr: &mut Transform) -> Vec<CollocationField> {
        let n = tr.points_per_axis();
        self.comps
            .iter()
            .map(|c| {
                let mut vals = vec![0.0; tr.num_points()];
                tr.to_grid(c, &mut vals);
                CollocationField::new(self.grid.dim(), n, vals)
            })
            .collect()
    }

    /// Point evaluation by direct summation.
    pub fn eval(&self, x: &[f64; 3]) -> [f64; 3] {
        let g = &self.grid;
        let mut out = [0.0; 3];
        for idx in 0..g.len() {
            let k = g.kvec(idx);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            let e = Complex64::from_polar(1.0, phase);
            for (c, comp) in self.comps.iter().enumerate() {
                out[c] += (comp[idx] * e).re;
            }
        }
        out
    }
}

/// Fourier coefficients of a real scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &TorusGrid) -> Self {
        SpectralScalar {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        SpectralScalar {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn to_collocation(&self, tr: &mut Transform) -> CollocationField {
        let mut vals = vec![0.0; tr.num_points()];
        tr.to_grid(&self.coeffs, &mut vals);
        CollocationField::new(self.grid.dim(), tr.points_per_axis(), vals)
    }

    /// Gradient as a spectral vector field.
    pub fn gradient(&self) -> SpectralVelocity {
        let g = &self.grid;
        let mut out = SpectralVelocity::zeros(g);
        for idx in 0..g.len() {
            let k = g.kvec(idx);
            let ic = Complex64::new(0.0, 1.0) * self.coeffs[idx];
            for c in 0..g.dim() {
                out.component_mut(c)[idx] = ic * k[c];
            }
        }
        out
    }
}

/// Real scalar values on an `n^dim` collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationField {
    dim: usize,
    n: usize,
    values: Vec<f64>,
}

impl CollocationField {
    pub fn new(dim: usize, n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n.pow(dim as u32));
        CollocationField { dim, n, values }
    }

    pub fn zeros(dim: usize, n: usize) -> Self {
        Self::new(dim, n, vec![0.0; n.pow(dim as u32)])
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `sum_x |u(x)|^q * cell volume`
    pub fn lebesgue_pow(&self, q: f64, cell_volume: f64) -> f64 {
        cell_volume * self.values.iter().map(|v| v.abs().powf(q)).sum::<f64>()
    }
}

/// Symmetric tensor field on a collocation grid, stored as the upper
/// triangle `(0,0), (0,1), .., (d-1,d-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    dim: usize,
    n: usize,
    comps: Vec<Vec<f64>>,
}

/// Upper-triangle ordering of symmetric tensor components.
pub fn sym_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            v.push((i, j));
        }
    }
    v
}

impl StressField {
    pub fn new(dim: usize, n: usize, comps: Vec<Vec<f64>>) -> Self {
        assert_eq!(comps.len(), dim * (dim + 1) / 2);
        StressField { dim, n, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Component `(i, j)` (either order).
    pub fn component(&self, i: usize, j: usize) -> &[f64] {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let pos = sym_pairs(self.dim).iter().position(|&p| p == (a, b)).unwrap();
        &self.comps[pos]
    }

    pub fn at(&self, point: usize) -> SymTensor {
        let mut m = [[0.0; 3]; 3];
        for (pos, (i, j)) in sym_pairs(self.dim).into_iter().enumerate() {
            m[i][j] = self.comps[pos][point];
            m[j][i] = self.comps[pos][point];
        }
        SymTensor::from_matrix(self.dim, m).expect("stored tensors are symmetric")
    }

    /// Largest `|trace|` over the grid.
    pub fn max_trace(&self) -> f64 {
        (0..self.num_points())
            .map(|p| self.at(p).trace().abs())
            .fold(0.0, f64::max)
    }
}
