use num_complex::Complex64;

use super::fft::Transform;
use super::field::{sym_pairs, CollocationField, SpectralScalar, SpectralVelocity, StressField};
use crate::error::{NsvError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Removes the component of every coefficient along its wave vector,
/// `c(k) <- c(k) - k (k.c(k)) / |k|^2`. The mean mode is left alone.
pub fn leray_project(u: &SpectralVelocity) -> SpectralVelocity {
    let mut out = u.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(u: &mut SpectralVelocity) {
    let grid = u.grid().clone();
    let dim = grid.dim();
    for idx in 1..grid.len() {
        let k2 = grid.k2(idx);
        if k2 == 0.0 {
            continue;
        }
        let k = grid.kvec(idx);
        let c = u.at(idx);
        let mut dot = Complex64::default();
        for a in 0..dim {
            dot += c[a] * k[a];
        }
        let dot = dot / k2;
        let mut out = c;
        for a in 0..dim {
            out[a] = c[a] - dot * k[a];
        }
        u.set(idx, out);
    }
}

/// Galerkin projection onto the shells `|k|_inf <= n`.
pub fn truncate(u: &SpectralVelocity, n: usize) -> Result<SpectralVelocity> {
    if n == 0 {
        return Err(NsvError::InvalidParameter(
            "Galerkin shell cutoff must be positive".into(),
        ));
    }
    let mut out = u.clone();
    truncate_in_place(&mut out, n);
    Ok(out)
}

pub(crate) fn truncate_in_place(u: &mut SpectralVelocity, n: usize) {
    let grid = u.grid().clone();
    for c in 0..grid.dim() {
        let comp = u.component_mut(c);
        for (idx, z) in comp.iter_mut().enumerate() {
            if grid.shell(idx) > n {
                *z = Complex64::default();
            }
        }
    }
}

/// `D(v) = (grad v + grad v^T)/2` on the collocation grid of `tr`.
pub fn sym_gradient(u: &SpectralVelocity, tr: &mut Transform) -> StressField {
    let grid = u.grid().clone();
    let dim = grid.dim();
    let npts = tr.num_points();
    let mut grad = vec![vec![vec![0.0; npts]; dim]; dim];
    for (i, row) in grad.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            tr.to_grid_scaled(u.component(i), |idx| I * grid.kvec(idx)[j], out);
        }
    }
    let comps = sym_pairs(dim)
        .into_iter()
        .map(|(i, j)| {
            grad[i][j]
                .iter()
                .zip(&grad[j][i])
                .map(|(a, b)| 0.5 * (a + b))
                .collect()
        })
        .collect();
    StressField::new(dim, tr.points_per_axis(), comps)
}

/// Product of two fields given on the native grid, formed on the `3M/2`
/// grid and truncated back to the retained lattice. Exact for the product
/// of two band-limited fields.
pub fn dealiased_product(
    a: &CollocationField,
    b: &CollocationField,
    native: &mut Transform,
    padded: &mut Transform,
) -> Result<SpectralScalar> {
    let grid = native.grid().clone();
    if a.points_per_axis() != grid.modes() || b.points_per_axis() != grid.modes() {
        return Err(NsvError::GridMismatch(
            "dealiased_product expects native-grid inputs".into(),
        ));
    }
    let mut ca = vec![Complex64::default(); grid.len()];
    let mut cb = ca.clone();
    native.from_grid(a.values(), &mut ca);
    native.from_grid(b.values(), &mut cb);
    let np = padded.num_points();
    let mut pa = vec![0.0; np];
    let mut pb = vec![0.0; np];
    padded.to_grid(&ca, &mut pa);
    padded.to_grid(&cb, &mut pb);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= y;
    }
    let mut out = vec![Complex64::default(); grid.len()];
    padded.from_grid(&pa, &mut out);
    Ok(SpectralScalar::from_coeffs(&grid, out))
}

/// `||D(v)||_2^2` by Parseval.
pub fn sym_gradient_norm_sq(u: &SpectralVelocity) -> f64 {
    let g = u.grid();
    let dim = g.dim();
    let mut s = 0.0;
    for idx in 0..g.len() {
        let k = g.kvec(idx);
        let c = u.at(idx);
        for i in 0..dim {
            for j in 0..dim {
                let dij = 0.5 * (c[i] * k[j] + c[j] * k[i]);
                s += dij.norm_sqr();
            }
        }
    }
    g.volume() * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fields;
    use crate::spectral::grid::TorusGrid;

    #[test]
    fn leray_example() {
        let g = TorusGrid::periodic(2, 8).unwrap();
        let idx = g.index_of([0, 2, 0]).unwrap();
        let mut u = SpectralVelocity::zeros(&g);
        u.set(idx, [Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0), Complex64::default()]);
        let p = leray_project(&u);
        let c = p.at(idx);
        assert!((c[0].re - 3.0).abs() < 1e-15 && c[1].norm() < 1e-15);
    }

    #[test]
    fn leray_fixes_divergence_free_fields() {
        let g = TorusGrid::periodic(2, 16).unwrap();
        let tg = fields::taylor_green(&g, 1.3);
        assert!(leray_project(&tg).max_abs_diff(&tg) < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let g = TorusGrid::periodic(2, 8).unwrap();
        let u = fields::random(&g, 7, 1.0, g.max_shell(), true);
        assert_eq!(truncate(&u, 4).unwrap(), u);
        assert!(truncate(&u, 0).is_err());
        let idx = g.index_of([3, -1, 0]).unwrap();
        let mut single = SpectralVelocity::zeros(&g);
        single.set(idx, [Complex64::new(0.0, 1.0); 3]);
        assert_eq!(truncate(&single, 2).unwrap().coeff_norm(), 0.0);
    }

    #[test]
    fn shear_gradient() {
        let g = TorusGrid::periodic(2, 16).unwrap();
        let v = SpectralVelocity::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let mut tr = Transform::native(&g);
        let d = sym_gradient(&v, &mut tr);
        for p in 0..tr.num_points() {
            let x = g.point(16, p);
            let t = d.at(p);
            assert!((t.get(0, 1) - 0.5 * x[1].cos()).abs() < 1e-13);
            assert!(t.get(0, 0).abs() < 1e-13 && t.get(1, 1).abs() < 1e-13);
        }
        let c = SpectralVelocity::from_fn(&g, |_| [0.7, -0.2, 0.0]);
        assert!(sym_gradient(&c, &mut tr).max_trace() < 1e-15);
    }

    #[test]
    fn product_of_single_modes() {
        let g = TorusGrid::periodic(2, 8).unwrap();
        let mut native = Transform::native(&g);
        let mut padded = Transform::padded(&g);
        let vals: Vec<f64> = (0..64).map(|i| g.point(8, i)[0].cos()).collect();
        let a = CollocationField::new(2, 8, vals);
        let prod = dealiased_product(&a, &a, &mut native, &mut padded).unwrap();
        for idx in 0..g.len() {
            let k = g.ints(idx);
            let c = prod.coeffs()[idx];
            let expect = match (k[0], k[1]) {
                (0, 0) => 0.5,
                (2, 0) | (-2, 0) => 0.25,
                _ => 0.0,
            };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-15, "{k:?} {c}");
        }
        let zero = CollocationField::zeros(2, 8);
        let z = dealiased_product(&a, &zero, &mut native, &mut padded).unwrap();
        assert_eq!(z.l2_norm_sq(), 0.0);
    }
}
