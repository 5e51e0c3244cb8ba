use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{NsvError, Result};

/// Periodic box `[0, L)^d` resolved by `M` Fourier modes per axis.
///
/// Coefficients live on the `M^d` FFT lattice (last axis fastest). The
/// Nyquist row `k_i = -M/2` is never populated, so the retained wavenumbers
/// satisfy `|k_i| <= M/2 - 1`. Nonlinear terms are evaluated on a padded
/// grid with `3M/2` points per axis.
#[derive(Clone)]
pub struct TorusGrid {
    dim: usize,
    modes: usize,
    box_length: f64,
    tables: Arc<Tables>,
}

struct Tables {
    /// Integer wavenumbers per lattice index.
    ints: Vec<[i64; 3]>,
    /// Physical wave vectors `2 pi k / L`.
    kvec: Vec<[f64; 3]>,
    k2: Vec<f64>,
    /// `max_i |k_i|`, or `usize::MAX` for Nyquist entries.
    shell: Vec<usize>,
    /// Index of `-k`.
    conj: Vec<usize>,
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.modes == other.modes && self.box_length == other.box_length
    }
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("box_length", &self.box_length)
            .finish()
    }
}

/// Signed wavenumber of FFT index `i` on an `n`-point axis.
pub(crate) fn signed_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of signed wavenumber `k` on an `n`-point axis.
pub(crate) fn wrap_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

impl TorusGrid {
    pub fn new(dim: usize, modes: usize, box_length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(NsvError::InvalidParameter(format!(
                "torus dimension must be 2 or 3, got {dim}"
            )));
        }
        if modes < 4 || !modes.is_multiple_of(2) {
            return Err(NsvError::InvalidParameter(format!(
                "modes per axis must be even and >= 4, got {modes}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(NsvError::InvalidParameter(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let len = modes.pow(dim as u32);
        let scale = TAU / box_length;
        let half = (modes / 2) as i64;
        let mut ints = Vec::with_capacity(len);
        let mut kvec = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut shell = Vec::with_capacity(len);
        let mut conj = Vec::with_capacity(len);
        for idx in 0..len {
            let mut k = [0i64; 3];
            let mut rem = idx;
            for axis in (0..dim).rev() {
                k[axis] = signed_index(rem % modes, modes);
                rem /= modes;
            }
            let nyquist = k.iter().any(|&c| c == -half);
            let kv = [k[0] as f64 * scale, k[1] as f64 * scale, k[2] as f64 * scale];
            ints.push(k);
            kvec.push(kv);
            k2.push(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
            shell.push(if nyquist {
                usize::MAX
            } else {
                k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap()
            });
            let mut cidx = 0;
            for &c in k.iter().take(dim) {
                cidx = cidx * modes + wrap_index(-c, modes);
            }
            conj.push(cidx);
        }
        Ok(TorusGrid {
            dim,
            modes,
            box_length,
            tables: Arc::new(Tables {
                ints,
                kvec,
                k2,
                shell,
                conj,
            }),
        })
    }

    /// `2 pi` periodic box.
    pub fn periodic(dim: usize, modes: usize) -> Result<Self> {
        Self::new(dim, modes, TAU)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Largest retained `|k_i|`.
    pub fn max_shell(&self) -> usize {
        self.modes / 2 - 1
    }

    /// Points per axis of the dealiasing grid.
    pub fn padded(&self) -> usize {
        3 * self.modes / 2
    }

    /// Number of lattice entries, `M^d`.
    pub fn len(&self) -> usize {
        self.tables.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    pub fn ints(&self, idx: usize) -> [i64; 3] {
        self.tables.ints[idx]
    }

    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        self.tables.kvec[idx]
    }

    pub fn k2(&self, idx: usize) -> f64 {
        self.tables.k2[idx]
    }

    pub fn shell(&self, idx: usize) -> usize {
        self.tables.shell[idx]
    }

    pub fn conj_index(&self, idx: usize) -> usize {
        self.tables.conj[idx]
    }

    /// Retained (non-Nyquist) entry.
    pub fn is_active(&self, idx: usize) -> bool {
        self.tables.shell[idx] != usize::MAX
    }

    /// Lattice index of an integer wavenumber, if it is retained.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let lim = self.max_shell() as i64;
        let mut idx = 0;
        for &c in k.iter().take(self.dim) {
            if c.abs() > lim {
                return None;
            }
            idx = idx * self.modes + wrap_index(c, self.modes);
        }
        if k.iter().skip(self.dim).any(|&c| c != 0) {
            return None;
        }
        Some(idx)
    }

    /// Coordinates of collocation point `idx` on an `n`-per-axis grid.
    pub fn point(&self, n: usize, idx: usize) -> [f64; 3] {
        let h = self.box_length / n as f64;
        let mut x = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = (rem % n) as f64 * h;
            rem /= n;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_conjugate_symmetric() {
        let g = TorusGrid::periodic(3, 6).unwrap();
        for idx in 0..g.len() {
            let c = g.conj_index(idx);
            assert_eq!(g.conj_index(c), idx);
            if g.is_active(idx) {
                let (a, b) = (g.ints(idx), g.ints(c));
                assert_eq!([a[0], a[1], a[2]], [-b[0], -b[1], -b[2]]);
                assert!(g.is_active(c));
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::periodic(1, 8).is_err());
        assert!(TorusGrid::periodic(2, 7).is_err());
        assert!(TorusGrid::new(2, 8, -1.0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = TorusGrid::periodic(2, 8).unwrap();
        let idx = g.index_of([-3, 2, 0]).unwrap();
        assert_eq!(g.ints(idx), [-3, 2, 0]);
        assert!(g.index_of([4, 0, 0]).is_none());
        assert_eq!(g.max_shell(), 3);
        assert_eq!(g.padded(), 12);
    }
}
