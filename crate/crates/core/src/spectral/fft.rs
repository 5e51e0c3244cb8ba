use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{wrap_index, TorusGrid};

/// Unnormalized complex FFT over an `n^dim` row-major array.
#[derive(Clone)]
pub struct FftNd {
    n: usize,
    dim: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
}

impl FftNd {
    pub fn new(n: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        FftNd {
            n,
            dim,
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
            lines: vec![Complex64::default(); n.pow(dim as u32)],
        }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Forward (`e^{-ikx}`) transform when `inverse` is false, `e^{+ikx}`
    /// otherwise. No normalization either way.
    pub fn process(&mut self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.lines.len());
        let fft = if inverse { &self.inv } else { &self.fwd };
        let n = self.n;
        fft.process_with_scratch(data, &mut self.scratch);
        for axis in 0..self.dim.saturating_sub(1) {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            let outer = data.len() / block;
            let mut pos = 0;
            for o in 0..outer {
                let base = o * block;
                for inner in 0..stride {
                    for j in 0..n {
                        self.lines[pos] = data[base + j * stride + inner];
                        pos += 1;
                    }
                }
            }
            fft.process_with_scratch(&mut self.lines, &mut self.scratch);
            pos = 0;
            for o in 0..outer {
                let base = o * block;
                for inner in 0..stride {
                    for j in 0..n {
                        data[base + j * stride + inner] = self.lines[pos];
                        pos += 1;
                    }
                }
            }
        }
    }
}

/// Moves fields between the coefficient lattice of a [`TorusGrid`] and a
/// collocation grid with `n >= M` points per axis.
#[derive(Clone)]
pub struct Transform {
    grid: TorusGrid,
    n: usize,
    fft: FftNd,
    /// `(lattice index, grid-lattice index)` for every retained mode.
    map: Vec<(usize, usize)>,
    buf: Vec<Complex64>,
}

impl Transform {
    pub fn new(grid: &TorusGrid, n: usize) -> Self {
        assert!(n >= grid.modes(), "collocation grid coarser than the lattice");
        let dim = grid.dim();
        let map = (0..grid.len())
            .filter(|&idx| grid.is_active(idx))
            .map(|idx| {
                let k = grid.ints(idx);
                let mut j = 0;
                for &c in k.iter().take(dim) {
                    j = j * n + wrap_index(c, n);
                }
                (idx, j)
            })
            .collect();
        let fft = FftNd::new(n, dim);
        let buf = vec![Complex64::default(); fft.len()];
        Transform {
            grid: grid.clone(),
            n,
            fft,
            map,
            buf,
        }
    }

    /// Dealiasing transform on the `3M/2` grid.
    pub fn padded(grid: &TorusGrid) -> Self {
        Self::new(grid, grid.padded())
    }

    /// Transform on the native `M` grid.
    pub fn native(grid: &TorusGrid) -> Self {
        Self::new(grid, grid.modes())
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.buf.len()
    }

    /// Quadrature weight of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        self.grid.volume() / self.num_points() as f64
    }

    /// Evaluates `sum_k c_k e^{ikx}` at every grid point.
    pub fn to_grid(&mut self, coeffs: &[Complex64], out: &mut [f64]) {
        self.to_grid_scaled(coeffs, |_| Complex64::new(1.0, 0.0), out)
    }

    /// As [`Transform::to_grid`] with each coefficient multiplied by
    /// `factor(idx)` first (used for spectral derivatives).
    pub fn to_grid_scaled(
        &mut self,
        coeffs: &[Complex64],
        factor: impl Fn(usize) -> Complex64,
        out: &mut [f64],
    ) {
        debug_assert_eq!(coeffs.len(), self.grid.len());
        self.buf.iter_mut().for_each(|c| *c = Complex64::default());
        for &(i, j) in &self.map {
            self.buf[j] = coeffs[i] * factor(i);
        }
        self.fft.process(&mut self.buf, true);
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.re;
        }
    }

    /// Interpolating coefficients of grid values, truncated to the retained
    /// lattice.
    pub fn from_grid(&mut self, values: &[f64], coeffs: &mut [Complex64]) {
        debug_assert_eq!(coeffs.len(), self.grid.len());
        for (b, v) in self.buf.iter_mut().zip(values) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fft.process(&mut self.buf, false);
        let norm = 1.0 / self.buf.len() as f64;
        coeffs.iter_mut().for_each(|c| *c = Complex64::default());
        for &(i, j) in &self.map {
            coeffs[i] = self.buf[j] * norm;
        }
    }
}
