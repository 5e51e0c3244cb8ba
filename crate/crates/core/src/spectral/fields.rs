//! Library of reference velocity fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::SpectralVelocity;
use super::grid::TorusGrid;
use super::ops::{leray_project_in_place, truncate_in_place};

fn wave(grid: &TorusGrid) -> f64 {
    std::f64::consts::TAU / grid.box_length()
}

/// Taylor-Green vortex. In 2-D `a (sin x cos y, -cos x sin y)`, in 3-D
/// `a (sin x cos y cos z, -cos x sin y cos z, 0)`.
pub fn taylor_green(grid: &TorusGrid, amplitude: f64) -> SpectralVelocity {
    let s = wave(grid);
    if grid.dim() == 2 {
        SpectralVelocity::from_fn(grid, |x| {
            let (sx, cx) = (s * x[0]).sin_cos();
            let (sy, cy) = (s * x[1]).sin_cos();
            [amplitude * sx * cy, -amplitude * cx * sy, 0.0]
        })
    } else {
        SpectralVelocity::from_fn(grid, |x| {
            let (sx, cx) = (s * x[0]).sin_cos();
            let (sy, cy) = (s * x[1]).sin_cos();
            let cz = (s * x[2]).cos();
            [amplitude * sx * cy * cz, -amplitude * cx * sy * cz, 0.0]
        })
    }
}

/// Arnold-Beltrami-Childress flow
/// `(a sin z + c cos y, b sin x + a cos z, c sin y + b cos x)` (3-D only).
pub fn abc(grid: &TorusGrid, a: f64, b: f64, c: f64) -> SpectralVelocity {
    assert_eq!(grid.dim(), 3, "ABC flow is three-dimensional");
    let s = wave(grid);
    SpectralVelocity::from_fn(grid, |x| {
        let (sx, cx) = (s * x[0]).sin_cos();
        let (sy, cy) = (s * x[1]).sin_cos();
        let (sz, cz) = (s * x[2]).sin_cos();
        [a * sz + c * cy, b * sx + a * cz, c * sy + b * cx]
    })
}

/// Kolmogorov shear `(a sin(m y), 0, 0)`.
pub fn shear(grid: &TorusGrid, amplitude: f64, wavenumber: u32) -> SpectralVelocity {
    let s = wave(grid) * wavenumber as f64;
    SpectralVelocity::from_fn(grid, |x| [amplitude * (s * x[1]).sin(), 0.0, 0.0])
}

/// Random real field with zero mean supported on shells `1..=max_shell`,
/// amplitude decaying like `|k|^-2`, scaled to root-mean-square `rms`.
/// Divergence-free when `solenoidal` is set.
pub fn random(
    grid: &TorusGrid,
    seed: u64,
    rms: f64,
    max_shell: usize,
    solenoidal: bool,
) -> SpectralVelocity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = SpectralVelocity::zeros(grid);
    for idx in 0..grid.len() {
        let shell = grid.shell(idx);
        // Draw for every entry so the stream does not depend on max_shell.
        let mut c = [Complex64::default(); 3];
        for z in c.iter_mut().take(grid.dim()) {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        if shell == 0 || shell > max_shell {
            continue;
        }
        let amp = 1.0 / grid.k2(idx).max(1e-300);
        for z in c.iter_mut() {
            *z *= amp;
        }
        v.set(idx, c);
    }
    v.enforce_reality();
    if solenoidal {
        leray_project_in_place(&mut v);
    }
    truncate_in_place(&mut v, max_shell);
    let norm = (v.l2_norm_sq() / grid.volume()).sqrt();
    if norm > 0.0 {
        v.scale(rms / norm);
    }
    v
}
