#![allow(clippy::needless_range_loop)]

use nsv_core::config::RunConfig;
use nsv_core::kv1d::SineState;
use nsv_core::solver::{integrate, tendency, PdeParams, SimConfig};
use nsv_core::spectral::{fields, leray_project, sym_gradient_norm_sq, truncate, Transform, TorusGrid};
use nsv_core::tensor::{
    check_monotone_inequality, monotonicity_gap, power_law_stress, rotation_3d, Mat3, SymTensor,
};
use proptest::prelude::*;

fn sym(dim: usize) -> impl Strategy<Value = SymTensor> {
    (prop::array::uniform6(-10.0f64..10.0), 0.01f64..10.0).prop_map(move |(e, s)| {
        let mut m: Mat3 = [[0.0; 3]; 3];
        let mut it = e.iter();
        for i in 0..dim {
            for j in i..dim {
                let x = s * it.next().unwrap();
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        SymTensor::from_matrix(dim, m).unwrap()
    })
}

fn sym_any() -> impl Strategy<Value = SymTensor> {
    prop_oneof![sym(2), sym(3)]
}

fn pair() -> impl Strategy<Value = (SymTensor, SymTensor)> {
    prop_oneof![(sym(2), sym(2)), (sym(3), sym(3))]
}

proptest! {
    #[test]
    fn monotonicity_gap_is_nonnegative((e, f) in pair(), p in 1.05f64..6.0) {
        let gap = monotonicity_gap(&e, &f, p).unwrap();
        let scale = (e.norm().powf(p - 1.0) + f.norm().powf(p - 1.0)) * e.sub(&f).norm();
        prop_assert!(gap >= -1e-12 * scale, "gap {gap}");
    }

    #[test]
    fn monotone_inequalities_hold((e, f) in pair(), p in 1.05f64..6.0) {
        let c = check_monotone_inequality(&e, &f, p).unwrap();
        prop_assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
    }

    #[test]
    fn stress_is_homogeneous(d in sym_any(), p in 1.05f64..6.0, lambda in 0.01f64..100.0) {
        let lhs = power_law_stress(&d.scaled(lambda), p).unwrap();
        let rhs = power_law_stress(&d, p).unwrap().scaled(lambda.powf(p - 1.0));
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn stress_power_equals_norm_power(d in sym_any(), p in 1.05f64..6.0) {
        let a = power_law_stress(&d, p).unwrap();
        let expect = d.norm().powf(p);
        prop_assert!((a.contract(&d) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn stress_is_objective(d in sym(3), p in 1.05f64..6.0, axis in prop::array::uniform3(-1.0f64..1.0), angle in 0.0f64..6.3) {
        prop_assume!(axis.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let q = rotation_3d(axis, angle);
        let lhs = power_law_stress(&d.rotated(&q), p).unwrap();
        let rhs = power_law_stress(&d, p).unwrap().rotated(&q);
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
    }

    #[test]
    fn stress_is_symmetric_and_traceless_for_traceless_input(d in sym_any(), p in 1.05f64..6.0) {
        let dim = d.dim();
        let dev = d.sub(&SymTensor::identity(dim).scaled(d.trace() / dim as f64));
        let a = power_law_stress(&dev, p).unwrap();
        prop_assert!(a.asymmetry() == 0.0);
        prop_assert!(a.trace().abs() <= 1e-12 * a.norm().max(1e-300));
    }
}

fn grid_strategy() -> impl Strategy<Value = TorusGrid> {
    prop_oneof![
        (3usize..=10).prop_map(|m| TorusGrid::periodic(2, 2 * m).unwrap()),
        (2usize..=4).prop_map(|m| TorusGrid::periodic(3, 2 * m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leray_is_an_idempotent_projection(grid in grid_strategy(), seed in any::<u64>()) {
        let raw = fields::random(&grid, seed, 1.0, grid.max_shell(), false);
        let p1 = leray_project(&raw);
        let p2 = leray_project(&p1);
        let scale = raw.coeff_norm();
        prop_assert!(p1.max_abs_diff(&p2) <= 1e-15 * scale);
        prop_assert!(p1.divergence_defect() <= 1e-14 * scale);
        // Orthogonal projection: (u - Pu, Pu) = 0 and ||Pu|| <= ||u||.
        let mut rest = raw.clone();
        rest.add_scaled(-1.0, &p1);
        prop_assert!(rest.inner(&p1).abs() <= 1e-12 * raw.l2_norm_sq());
        prop_assert!(p1.l2_norm_sq() <= raw.l2_norm_sq() * (1.0 + 1e-14));
    }

    #[test]
    fn parseval_matches_quadrature(grid in grid_strategy(), seed in any::<u64>()) {
        let v = fields::random(&grid, seed, 1.0, grid.max_shell(), false);
        let mut tr = Transform::native(&grid);
        let quad: f64 = v.to_collocation(&mut tr).iter().map(|c| c.lebesgue_pow(2.0, tr.cell_volume())).sum();
        prop_assert!((quad - v.l2_norm_sq()).abs() <= 1e-12 * v.l2_norm_sq());
    }

    #[test]
    fn korn_identity_for_solenoidal_fields(grid in grid_strategy(), seed in any::<u64>()) {
        let v = fields::random(&grid, seed, 1.0, grid.max_shell(), true);
        let g = v.grad_norm_sq();
        prop_assert!((g - 2.0 * sym_gradient_norm_sq(&v)).abs() <= 1e-12 * g);
    }

    #[test]
    fn padded_round_trip_is_exact(grid in grid_strategy(), seed in any::<u64>()) {
        let v = fields::random(&grid, seed, 1.0, grid.max_shell(), false);
        let mut tr = Transform::padded(&grid);
        let mut vals = vec![0.0; tr.num_points()];
        let mut back = v.clone();
        for c in 0..grid.dim() {
            tr.to_grid(v.component(c), &mut vals);
            tr.from_grid(&vals, back.component_mut(c));
        }
        prop_assert!(v.max_abs_diff(&back) <= 1e-14 * v.coeff_norm());
    }

    #[test]
    fn truncation_is_a_monotone_projection(grid in grid_strategy(), seed in any::<u64>(), n in 1usize..4) {
        let v = fields::random(&grid, seed, 1.0, grid.max_shell(), true);
        let a = truncate(&v, n).unwrap();
        prop_assert_eq!(truncate(&a, n).unwrap(), a.clone());
        let b = truncate(&v, n + 1).unwrap();
        prop_assert!(a.l2_norm_sq() <= b.l2_norm_sq() * (1.0 + 1e-14));
        prop_assert!(a.divergence_defect() <= 1e-14 * v.coeff_norm());
    }

    #[test]
    fn transfer_up_and_down_is_identity(grid in grid_strategy(), seed in any::<u64>()) {
        let v = fields::random(&grid, seed, 1.0, grid.max_shell(), true);
        let fine = TorusGrid::new(grid.dim(), 2 * grid.modes(), grid.box_length()).unwrap();
        let back = v.transfer(&fine).unwrap().transfer(&grid).unwrap();
        prop_assert_eq!(back, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tendency_is_solenoidal_and_shell_limited(seed in any::<u64>(), p in 1.2f64..4.0, kappa in 0.01f64..2.0, n in 2usize..6) {
        let grid = TorusGrid::periodic(2, 12).unwrap();
        let v = truncate(&fields::random(&grid, seed, 1.0, grid.max_shell(), true), n).unwrap();
        let params = PdeParams::new(0.1, kappa, p).unwrap();
        let r = tendency(&v, 0.0, &params, n).unwrap();
        prop_assert!(r.divergence_defect() <= 1e-12 * r.coeff_norm().max(1e-300));
        prop_assert_eq!(truncate(&r, n).unwrap(), r.clone());
        prop_assert!(r.reality_defect() <= 1e-14 * r.coeff_norm().max(1e-300));
    }

    #[test]
    fn unforced_energy_never_increases(seed in any::<u64>(), p in 1.2f64..4.0, kappa in 0.01f64..2.0) {
        let grid = TorusGrid::periodic(2, 12).unwrap();
        let v0 = fields::random(&grid, seed, 1.0, 3, true);
        let params = PdeParams::new(0.05, kappa, p).unwrap();
        let dt = 0.05;
        let traj = integrate(&SimConfig::new(&grid, dt, 0.3), &params, &v0).unwrap();
        let e = traj.ledger.energies();
        for w in e.windows(2) {
            prop_assert!(w[1] <= w[0] + dt * dt * e[0]);
        }
    }

    #[test]
    fn sine_states_vanish_at_the_walls(coeffs in prop::collection::vec(-5.0f64..5.0, 1..16), length in 0.5f64..10.0) {
        let v = SineState { length, coeffs };
        prop_assert_eq!(v.eval(0.0), 0.0);
        prop_assert_eq!(v.eval(length), 0.0);
        let s = v.sample(17);
        prop_assert_eq!(s[0], 0.0);
        prop_assert_eq!(s[16], 0.0);
    }

    #[test]
    fn config_round_trips(nu in 0.001f64..1.0, kappa in 0.001f64..2.0, p in 1.1f64..5.0, modes in 4usize..40, dt in 1e-4f64..0.1) {
        let text = format!(
            "[model]\nnu = {nu:?}\nkappa = {kappa:?}\np = {p:?}\n\n[grid]\ndim = 2\nmodes = {modes}\n\n[time]\ndt = {dt:?}\nt_end = 1.0\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.model.nu, nu);
        prop_assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
