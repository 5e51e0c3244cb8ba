//! Pointwise tensor algebra for the power-law stress.
//!
//! The tensor norm `|E|` is the Frobenius norm `sqrt(E:E)` throughout.

use crate::error::{NsvError, Result};

/// Absolute symmetry tolerance, scaled by the largest entry.
const SYMMETRY_TOL: f64 = 1e-12;

/// Relative slack used when comparing the two sides of the monotonicity
/// inequalities.
pub const INEQUALITY_REL_TOL: f64 = 1e-12;

/// Square `d x d` matrix stored in a fixed 3x3 block (`d <= 3`).
pub type Mat3 = [[f64; 3]; 3];

/// Symmetric `d x d` tensor, `d` in `1..=3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    dim: usize,
    m: Mat3,
}

impl SymTensor {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "tensor dimension must be 1, 2 or 3");
        SymTensor { dim, m: [[0.0; 3]; 3] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            t.m[i][i] = 1.0;
        }
        t
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut t = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            t.m[i][i] = *v;
        }
        t
    }

    /// Builds a tensor from a full matrix, rejecting asymmetric input.
    /// Entries outside the leading `dim x dim` block are ignored.
    pub fn from_matrix(dim: usize, m: Mat3) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(NsvError::InvalidParameter(format!(
                "tensor dimension {dim} not in 1..=3"
            )));
        }
        let mut scale: f64 = 0.0;
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                scale = scale.max(m[i][j].abs());
                asym = asym.max((m[i][j] - m[j][i]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale.max(1.0) {
            return Err(NsvError::NonSymmetric { asymmetry: asym });
        }
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (m[i][j] + m[j][i]);
                t.m[i][j] = v;
                t.m[j][i] = v;
            }
        }
        Ok(t)
    }

    /// Symmetric part `(G + G^T)/2` of an arbitrary matrix.
    pub fn sym_part(dim: usize, g: &Mat3) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.m[i][j] = 0.5 * (g[i][j] + g[j][i]);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// `E : F`
    pub fn contract(&self, other: &SymTensor) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.contract(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = *self;
        for row in t.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        t
    }

    pub fn sub(&self, other: &SymTensor) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = *self;
        for i in 0..3 {
            for j in 0..3 {
                t.m[i][j] -= other.m[i][j];
            }
        }
        t
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut a: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                a = a.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        a
    }

    /// `Q E Q^T`
    pub fn rotated(&self, q: &Mat3) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        s += q[i][a] * self.m[a][b] * q[j][b];
                    }
                }
                out.m[i][j] = s;
            }
        }
        out
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(NsvError::InvalidParameter(format!(
            "power-law exponent must satisfy p > 1, got {p}"
        )))
    }
}

/// Scalar factor `|D|^(p-2)` given `|D|^2`, with the continuous extension
/// `A(0) = 0` folded in (the factor is set to zero at the origin).
#[inline]
pub fn power_law_factor(norm_sq: f64, p: f64) -> f64 {
    if norm_sq == 0.0 {
        0.0
    } else if p == 2.0 {
        1.0
    } else {
        norm_sq.powf(0.5 * (p - 2.0))
    }
}

/// `A(D) = |D|^(p-2) D`, with `A(0) = 0` for every `p > 1`.
pub fn power_law_stress(d: &SymTensor, p: f64) -> Result<SymTensor> {
    check_exponent(p)?;
    if d.asymmetry() > SYMMETRY_TOL * d.norm().max(1.0) {
        return Err(NsvError::NonSymmetric {
            asymmetry: d.asymmetry(),
        });
    }
    Ok(d.scaled(power_law_factor(d.norm_sq(), p)))
}

/// `(A(E) - A(F)) : (E - F)`, nonnegative for every `p > 1`.
pub fn monotonicity_gap(e: &SymTensor, f: &SymTensor, p: f64) -> Result<f64> {
    let ae = power_law_stress(e, p)?;
    let af = power_law_stress(f, p)?;
    Ok(ae.sub(&af).contract(&e.sub(f)))
}

/// Both sides of the classical p-Laplacian monotonicity inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let slack = INEQUALITY_REL_TOL * (lhs.abs() + rhs.abs());
        InequalityCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + slack,
        }
    }
}

/// For `p >= 2`: `2^(1-p) |E-F|^p <= (A(E)-A(F)):(E-F)`.
///
/// For `1 < p < 2`: `(p-1)|E-F|^2 <= (A(E)-A(F)):(E-F) (|E|^p+|F|^p)^((2-p)/p)`.
/// At `E = F = 0` the weight is `0^0`; the inequality is reported as holding
/// with both sides zero.
pub fn check_monotone_inequality(e: &SymTensor, f: &SymTensor, p: f64) -> Result<InequalityCheck> {
    let gap = monotonicity_gap(e, f, p)?;
    let diff = e.sub(f).norm();
    if p >= 2.0 {
        let lhs = diff.powf(p) / 2f64.powf(p - 1.0);
        Ok(InequalityCheck::new(lhs, gap))
    } else {
        let weight_base = e.norm().powf(p) + f.norm().powf(p);
        if weight_base == 0.0 {
            return Ok(InequalityCheck {
                lhs: 0.0,
                rhs: 0.0,
                holds: true,
            });
        }
        let lhs = (p - 1.0) * diff * diff;
        let rhs = gap * weight_base.powf((2.0 - p) / p);
        Ok(InequalityCheck::new(lhs, rhs))
    }
}

/// Largest entry of `Q Q^T - I` over the leading `dim x dim` block.
pub fn orthogonality_defect(dim: usize, q: &Mat3) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s: f64 = (0..dim).map(|k| q[i][k] * q[j][k]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((s - target).abs());
        }
    }
    defect
}

/// Counter-clockwise rotation by `theta` in the plane.
pub fn rotation_2d(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation by `angle` about a (not necessarily unit) axis, Rodrigues' formula.
pub fn rotation_3d(axis: [f64; 3], angle: f64) -> Mat3 {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

// 8th-order central difference weights for the first derivative.
const FD_WEIGHTS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const FD_STEP: f64 = 1e-2;

/// Velocity gradient `G_ij = d v_i / d x_j` of a sampled field by
/// finite differences.
pub fn fd_gradient(dim: usize, v: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Mat3 {
    let mut g = [[0.0; 3]; 3];
    let mut xp = x.to_vec();
    for j in 0..dim {
        let mut acc = vec![0.0; dim];
        for (m, w) in FD_WEIGHTS.iter().enumerate() {
            let off = (m + 1) as f64 * FD_STEP;
            xp[j] = x[j] + off;
            let plus = v(&xp);
            xp[j] = x[j] - off;
            let minus = v(&xp);
            for i in 0..dim {
                acc[i] += w * (plus[i] - minus[i]);
            }
        }
        xp[j] = x[j];
        for i in 0..dim {
            g[i][j] = acc[i] / FD_STEP;
        }
    }
    g
}

/// Frame-indifference of the symmetric gradient: returns the largest entry of
/// `D(v*)(x) - Q D(v)(Q^T x) Q^T` over a sample grid, where
/// `v*(x) = Q v(Q^T x)` is the field observed in the rotated frame.
pub fn objectivity_check(dim: usize, v: &dyn Fn(&[f64]) -> Vec<f64>, q: &Mat3) -> Result<f64> {
    if !(1..=3).contains(&dim) {
        return Err(NsvError::InvalidParameter(format!("dimension {dim}")));
    }
    let defect = orthogonality_defect(dim, q);
    if defect > 1e-12 {
        return Err(NsvError::NotOrthogonal { defect });
    }
    let apply = |m: &Mat3, transpose: bool, x: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|k| if transpose { m[k][i] * x[k] } else { m[i][k] * x[k] })
                    .sum()
            })
            .collect()
    };
    let rotated = |x: &[f64]| -> Vec<f64> {
        let back = apply(q, true, x);
        apply(q, false, &v(&back))
    };

    let per_axis = 5usize;
    let total = per_axis.pow(dim as u32);
    let mut worst: f64 = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let c = rem % per_axis;
                rem /= per_axis;
                0.37 + c as f64 * std::f64::consts::TAU / per_axis as f64
            })
            .collect();
        let d_star = SymTensor::sym_part(dim, &fd_gradient(dim, &rotated, &x));
        let x_back = apply(q, true, &x);
        let d_orig = SymTensor::sym_part(dim, &fd_gradient(dim, v, &x_back)).rotated(q);
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((d_star.get(i, j) - d_orig.get(i, j)).abs());
            }
        }
    }
    Ok(worst)
}
