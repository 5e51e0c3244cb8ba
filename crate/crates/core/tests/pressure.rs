use nsv_core::pressure::{
    decompose_pressure, pressure_gradient_residual, recover_pressure, verify_pressure_bounds,
};
use nsv_core::solver::{Forcing, PdeParams, TimeProfile};
use nsv_core::spectral::{fields, SpectralVelocity, TorusGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn relative_gap(v: &SpectralVelocity, params: &PdeParams, t: f64) -> f64 {
    let pi = recover_pressure(v, t, params).unwrap();
    let mut d = decompose_pressure(v, t, params).unwrap().total();
    for (x, y) in d.coeffs_mut().iter_mut().zip(pi.coeffs()) {
        *x -= y;
    }
    (d.l2_norm_sq() / pi.l2_norm_sq()).sqrt()
}

#[test]
fn decomposition_sums_to_the_pressure_on_random_snapshots() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for s in 0..100 {
        let grid = if s % 2 == 0 {
            TorusGrid::periodic(2, 12).unwrap()
        } else {
            TorusGrid::periodic(3, 6).unwrap()
        };
        let v = fields::random(&grid, rng.gen(), rng.gen_range(0.1..2.0), grid.max_shell(), true);
        let f = fields::random(&grid, rng.gen(), 0.7, 2, true);
        let p = rng.gen_range(1.2..4.0);
        let params = PdeParams::new(0.1, 0.4, p)
            .unwrap()
            .with_forcing(Forcing::zero().with_term(TimeProfile::Exponential { rate: -1.0 }, f));
        let t = rng.gen_range(0.0..1.0);
        let gap = relative_gap(&v, &params, t);
        assert!(gap <= 1e-10, "snapshot {s}: {gap:e}");
        assert!(pressure_gradient_residual(&v, t, &params).unwrap() <= 1e-10);
    }
}

#[test]
fn regularized_pressure_is_decomposed_too() {
    let grid = TorusGrid::periodic(3, 8).unwrap();
    let v = fields::random(&grid, 3, 1.0, 3, true);
    let params = PdeParams::new(0.1, 0.4, 1.4).unwrap().with_regularization(5.0 / 3.0, 2);
    assert!(relative_gap(&v, &params, 0.0) <= 1e-10);
}

#[test]
fn harmonic_part_vanishes_and_pressure_has_zero_mean() {
    let grid = TorusGrid::periodic(2, 12).unwrap();
    let v = fields::random(&grid, 5, 1.0, 4, true);
    let params = PdeParams::new(0.1, 0.4, 2.5).unwrap();
    let parts = decompose_pressure(&v, 0.0, &params).unwrap();
    assert_eq!(parts.pih.l2_norm_sq(), 0.0);
    assert_eq!(parts.total().mean(), 0.0);
    assert_eq!(recover_pressure(&v, 0.0, &params).unwrap().mean(), 0.0);
}

#[test]
fn bound_ratios_are_finite_for_a_single_sample() {
    let grid = TorusGrid::periodic(2, 16).unwrap();
    let v = fields::random(&grid, 6, 1.0, 4, true);
    for p in [1.5, 3.0] {
        let params = PdeParams::new(0.1, 0.4, p).unwrap();
        let parts = decompose_pressure(&v, 0.0, &params).unwrap();
        let rep = verify_pressure_bounds(&[(0.0, parts)], p / (p - 1.0), 2.0).unwrap();
        for r in [rep.viscous, rep.convective, rep.gradient] {
            let r = r.unwrap();
            assert!(r.is_finite() && r > 0.0);
        }
    }
}

#[test]
fn bound_inputs_are_validated() {
    assert!(verify_pressure_bounds(&[], 2.0, 2.0).is_err());
    let grid = TorusGrid::periodic(2, 8).unwrap();
    let v = fields::random(&grid, 6, 1.0, 2, true);
    let params = PdeParams::new(0.1, 0.4, 2.0).unwrap();
    let parts = decompose_pressure(&v, 0.0, &params).unwrap();
    assert!(verify_pressure_bounds(&[(0.0, parts)], 0.5, 2.0).is_err());
}

#[test]
fn forcing_with_a_mean_is_rejected() {
    let grid = TorusGrid::periodic(2, 8).unwrap();
    let v = fields::random(&grid, 6, 1.0, 2, true);
    let uniform = SpectralVelocity::from_fn(&grid, |_| [1.0, 0.0, 0.0]);
    let params = PdeParams::new(0.1, 0.4, 2.0).unwrap().with_forcing(Forcing::constant(uniform));
    assert!(decompose_pressure(&v, 0.0, &params).is_err());
}
