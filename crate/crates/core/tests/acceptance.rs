//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nsv_core::diagnostics::{dissipation_violations, energy_identity_residual, EnergyLedger};
use nsv_core::experiments::{
    apriori_sweep, relative_spread, run_gronwall, run_manufactured, run_regularization_sweep,
    run_taylor_green, trajectory_pressure_bounds, ManufacturedTarget, TargetShape,
};
use nsv_core::kv1d::{integrate_1d, Forcing1d, Kv1dConfig, Kv1dParams, SineState};
use nsv_core::pressure::{decompose_pressure, recover_pressure};
use nsv_core::solver::{integrate, Forcing, PdeParams, SimConfig, TimeProfile};
use nsv_core::spectral::{fields, leray_project, SpectralVelocity, TorusGrid};
use nsv_core::tensor::{check_monotone_inequality, power_law_stress};
use nsv_core::verify::{random_sym, tensor_suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn monotone_operator() -> Outcome {
    let start = Instant::now();
    let results = tensor_suite(1, 10_000, check_monotone_inequality);
    let elapsed = start.elapsed();
    let relevant: Vec<_> = results
        .iter()
        .filter(|r| r.name.starts_with("monotone inequality") || r.name.starts_with("gap positivity"))
        .collect();
    let failed: Vec<String> = relevant.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let ok = failed.is_empty() && relevant.len() == 10 && elapsed < Duration::from_secs(10);
    outcome(ok, format!("{} checks x 1e4 pairs, failed {failed:?}, {}", relevant.len(), secs(elapsed)))
}

fn homogeneity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for s in 0..1000 {
        let d = random_sym(&mut rng, 2 + s % 2);
        let p = rng.gen_range(1.1..5.0);
        let lambda = 10f64.powf(rng.gen_range(-2.0..2.0));
        let lhs = power_law_stress(&d.scaled(lambda), p).unwrap();
        let rhs = power_law_stress(&d, p).unwrap().scaled(lambda.powf(p - 1.0));
        worst = worst.max(lhs.sub(&rhs).norm() / rhs.norm());
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e} over 1e3 samples"))
}

fn taylor_green_anchor() -> Outcome {
    let start = Instant::now();
    let grid = TorusGrid::periodic(2, 32).unwrap();
    let params = PdeParams::new(0.1, 0.5, 2.0).unwrap();
    let config = SimConfig::new(&grid, 1e-3, 1.0);
    let r = run_taylor_green(&config, &params, 1.0).unwrap();
    let elapsed = start.elapsed();
    let ok = r.terminal_error <= 1e-6 && elapsed < Duration::from_secs(30);
    outcome(ok, format!("terminal L2 error {:.2e}, {}", r.terminal_error, secs(elapsed)))
}

fn terminal_defect(config: &SimConfig, params: &PdeParams, v0: &SpectralVelocity) -> f64 {
    let traj = integrate(config, params, v0).unwrap();
    energy_identity_residual(&traj.ledger).last().unwrap().abs()
}

fn energy_identity() -> Outcome {
    let g2 = TorusGrid::periodic(2, 16).unwrap();
    let g3 = TorusGrid::periodic(3, 8).unwrap();
    let cases = [
        (1.5, g2.clone(), PdeParams::new(0.05, 0.2, 1.5).unwrap(), fields::random(&g2, 5, 1.0, 4, true)),
        (
            2.0,
            g2.clone(),
            PdeParams::new(0.05, 0.5, 2.0)
                .unwrap()
                .with_forcing(Forcing::zero().with_term(TimeProfile::Exponential { rate: -0.5 }, fields::shear(&g2, 0.5, 1))),
            fields::random(&g2, 6, 1.0, 4, true),
        ),
        (3.0, g3.clone(), PdeParams::new(0.05, 0.2, 3.0).unwrap(), fields::random(&g3, 7, 1.0, 2, true)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, grid, params, v0) in cases {
        let ratio = terminal_defect(&SimConfig::new(&grid, 0.04, 0.4).with_tolerance(1e-13), &params, &v0)
            / terminal_defect(&SimConfig::new(&grid, 0.02, 0.4).with_tolerance(1e-13), &params, &v0);
        ok &= (3.5..=4.5).contains(&ratio);
        parts.push(format!("p={p}: {ratio:.3}"));
    }
    outcome(ok, format!("defect ratios dt/(dt/2) {}", parts.join(", ")))
}

fn dissipation() -> Outcome {
    let grid = TorusGrid::periodic(2, 16).unwrap();
    let v0 = fields::random(&grid, 12, 1.0, 5, true);
    let dt = 0.02;
    let mut bad = Vec::new();
    let mut count = 0;
    for p in [1.2, 1.5, 2.0, 3.0, 4.0] {
        for kappa in [0.01, 0.1, 1.0] {
            let params = PdeParams::new(0.05, kappa, p).unwrap();
            let traj = integrate(&SimConfig::new(&grid, dt, 0.5), &params, &v0).unwrap();
            let e0 = traj.ledger.records()[0].energy;
            if !dissipation_violations(&traj.ledger, dt * dt * e0).is_empty() {
                bad.push((p, kappa));
            }
            count += 1;
        }
    }
    outcome(bad.is_empty(), format!("{count} (p, kappa) pairs, increasing energy in {bad:?}"))
}

fn apriori_stability() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (dim, modes) in [(2, 34), (3, 24)] {
        let grid = TorusGrid::periodic(dim, modes).unwrap();
        let v0 = fields::random(&grid, 7, 1.0, 2, true);
        let f = fields::random(&grid, 8, 0.5, 2, true);
        let params = PdeParams::new(0.05, 0.2, 1.5).unwrap().with_forcing(Forcing::constant(f));
        let pts = apriori_sweep(&SimConfig::new(&grid, 0.05, 1.0), &params, &v0, &[4, 8, 16]).unwrap();
        let ce: Vec<f64> = pts.iter().map(|p| p.report.c_energy.unwrap()).collect();
        let cr: Vec<f64> = pts.iter().map(|p| p.report.c_rate.unwrap()).collect();
        let (se, sr) = (relative_spread(&ce), relative_spread(&cr));
        ok &= se <= 0.05 && sr <= 0.05;
        parts.push(format!("d={dim}: spread {se:.2e} / {sr:.2e}"));
    }
    outcome(ok, parts.join(", "))
}

fn regularizer_vanishing() -> Outcome {
    let grid = TorusGrid::periodic(3, 16).unwrap();
    let v0 = fields::random(&grid, 21, 1.0, 3, true);
    let params = PdeParams::new(0.05, 0.2, 1.4).unwrap();
    let beta = (3.0 * 3.0 - 4.0) / 3.0;
    let r = run_regularization_sweep(&SimConfig::new(&grid, 0.05, 0.5), &params, &v0, beta, &[1, 2, 4, 8, 16, 32]).unwrap();
    let slope = r.slope.unwrap_or(f64::NAN);
    outcome(slope <= -1.0, format!("log-log slope {slope:.3}"))
}

fn pressure_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for s in 0..100 {
        let (dim, modes) = if s % 4 == 3 { (3, 8) } else { (2, 16) };
        let grid = TorusGrid::periodic(dim, modes).unwrap();
        let v = fields::random(&grid, rng.gen(), rng.gen_range(0.1..3.0), rng.gen_range(1..=grid.max_shell()), true);
        let f = fields::random(&grid, rng.gen(), rng.gen_range(0.0..1.0), 3, true);
        let params = PdeParams::new(rng.gen_range(0.01..0.5), rng.gen_range(0.01..1.0), rng.gen_range(1.2..4.0))
            .unwrap()
            .with_forcing(Forcing::constant(f));
        let pi = recover_pressure(&v, 0.0, &params).unwrap();
        let mut d = decompose_pressure(&v, 0.0, &params).unwrap().total();
        for (x, y) in d.coeffs_mut().iter_mut().zip(pi.coeffs()) {
            *x -= y;
        }
        worst = worst.max((d.l2_norm_sq() / pi.l2_norm_sq()).sqrt());
    }
    let mut ok = worst <= 1e-10;
    let mut parts = vec![format!("max relative defect {worst:.2e}")];
    for p in [1.5, 3.0] {
        let mut ratios = [Vec::new(), Vec::new(), Vec::new()];
        for m in [16, 32, 64] {
            let grid = TorusGrid::periodic(2, m).unwrap();
            let v0 = SpectralVelocity::from_fn(&grid, |x| {
                let (a, b) = (x[0], x[1]);
                [
                    b.sin() + 0.5 * (2.0 * b + a).cos() - 0.3 * (a + 2.0 * b).sin(),
                    0.7 * a.cos() - 0.25 * (2.0 * b + a).cos() + 0.15 * (a + 2.0 * b).sin(),
                    0.0,
                ]
            });
            let v0 = leray_project(&v0);
            let params = PdeParams::new(0.05, 0.2, p).unwrap().with_forcing(Forcing::constant(fields::shear(&grid, 0.3, 2)));
            let r = trajectory_pressure_bounds(&SimConfig::new(&grid, 0.05, 0.5), &params, &v0, 2, p / (p - 1.0), 2.0).unwrap();
            for (slot, value) in ratios.iter_mut().zip([r.viscous, r.convective, r.gradient]) {
                slot.push(value.unwrap_or(f64::NAN));
            }
        }
        let finite = ratios.iter().flatten().all(|x| x.is_finite());
        let spread = ratios.iter().map(|r| relative_spread(r)).fold(0.0, f64::max);
        ok &= finite && spread <= 0.1;
        parts.push(format!("p={p}: bound spread {spread:.2e}"));
    }
    outcome(ok, parts.join(", "))
}

fn gronwall() -> Outcome {
    let grid = TorusGrid::periodic(2, 16).unwrap();
    let v0 = fields::random(&grid, 3, 1.0, 4, true);
    let config = SimConfig::new(&grid, 0.02, 2.0).with_tolerance(1e-13);
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.5, 3.0] {
        let params = PdeParams::new(0.05, 0.1, p).unwrap();
        let zero = run_gronwall(&config, &params, &v0, 0.0, 99).unwrap();
        let a = run_gronwall(&config, &params, &v0, 1e-6, 99).unwrap();
        let b = run_gronwall(&config, &params, &v0, 1e-8, 99).unwrap();
        let (ra, rb) = (a.rate.unwrap_or(f64::NAN), b.rate.unwrap_or(f64::NAN));
        let agree = (ra - rb).abs() <= 0.1 * ra.abs().max(rb.abs());
        let excess = a.max_excess.unwrap_or(f64::NAN).max(b.max_excess.unwrap_or(f64::NAN));
        ok &= zero.max_grad_w <= 1e-12 && agree && excess <= 1e-2;
        parts.push(format!(
            "p={p}: |grad w|(delta=0) {:.1e}, rates {ra:.5} / {rb:.5}, excess {excess:.1e}",
            zero.max_grad_w
        ));
    }
    outcome(ok, parts.join("; "))
}

fn manufactured() -> Outcome {
    let shape = TargetShape::Abc { a: 1.0, b: 0.5, c: 0.5 };
    let oscillating = ManufacturedTarget {
        shape,
        profile: TimeProfile::Oscillation { mean: 1.0, amplitude: 0.5, omega: 1.0, exponent: 1.0 },
    };
    let steady = ManufacturedTarget { shape, profile: TimeProfile::Constant };
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.5, 3.0] {
        let params = PdeParams::new(0.1, 0.5, p).unwrap();
        let g12 = TorusGrid::periodic(3, 12).unwrap();
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&dt| {
                run_manufactured(&oscillating, &params, &SimConfig::new(&g12, dt, 1.0).with_tolerance(1e-13))
                    .unwrap()
                    .terminal_error
            })
            .collect();
        let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
        let g24 = TorusGrid::periodic(3, 24).unwrap();
        let floor = |g: &TorusGrid| {
            run_manufactured(&steady, &params, &SimConfig::new(g, 0.1, 1.0).with_tolerance(1e-13))
                .unwrap()
                .terminal_error
        };
        let gain = floor(&g12) / floor(&g24);
        ok &= ratios.iter().all(|r| (3.5..=4.5).contains(r)) && gain >= 10.0;
        parts.push(format!("p={p}: dt ratios {:.3}, {:.3}; M 12->24 gain {gain:.1}", ratios[0], ratios[1]));
    }
    outcome(ok, parts.join("; "))
}

fn dirichlet_1d() -> Outcome {
    let (nu, kappa) = (0.1, 0.5);
    let length = std::f64::consts::PI;
    let v0 = SineState::single_mode(8, length, 1, 1.0).unwrap();
    let traj = integrate_1d(&v0, Kv1dParams::new(nu, kappa, 2.0).unwrap(), &Forcing1d::default(), Kv1dConfig::new(1e-4, 1.0)).unwrap();
    let mut worst: f64 = 0.0;
    let mut boundary_zero = true;
    for (t, v) in traj.times.iter().zip(&traj.states) {
        let exact = (-nu * t / (1.0 + kappa)).exp();
        let err: f64 = v
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (c - if i == 0 { exact } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
        let s = v.sample(33);
        boundary_zero &= v.eval(0.0) == 0.0 && v.eval(length) == 0.0 && s[0] == 0.0 && s[32] == 0.0;
    }
    outcome(worst <= 1e-9 && boundary_zero, format!("max coefficient error {worst:.2e}, boundary exactly zero: {boundary_zero}"))
}

fn determinism() -> Outcome {
    let g2 = TorusGrid::periodic(2, 16).unwrap();
    let g3 = TorusGrid::periodic(3, 8).unwrap();
    let torus = |cfg: &SimConfig, params: &PdeParams, v0: &SpectralVelocity| integrate(cfg, params, v0).unwrap().ledger;
    let fixtures: Vec<Box<dyn Fn() -> EnergyLedger>> = vec![
        Box::new(|| torus(&SimConfig::new(&g2, 0.01, 0.2), &PdeParams::new(0.1, 0.5, 2.0).unwrap(), &fields::taylor_green(&g2, 1.0))),
        Box::new(|| {
            let f = Forcing::zero().with_term(TimeProfile::Exponential { rate: -1.0 }, fields::shear(&g2, 0.4, 1));
            torus(&SimConfig::new(&g2, 0.02, 0.4), &PdeParams::new(0.05, 0.2, 1.5).unwrap().with_forcing(f), &fields::random(&g2, 5, 1.0, 4, true))
        }),
        Box::new(|| {
            let params = PdeParams::new(0.05, 0.2, 1.4).unwrap().with_regularization(5.0 / 3.0, 4);
            torus(&SimConfig::new(&g3, 0.05, 0.3), &params, &fields::random(&g3, 21, 1.0, 3, true))
        }),
        Box::new(|| {
            let v0 = SineState::single_mode(8, std::f64::consts::PI, 2, 1.0).unwrap();
            integrate_1d(&v0, Kv1dParams::new(0.1, 0.5, 3.0).unwrap(), &Forcing1d::default(), Kv1dConfig::new(0.01, 0.5))
                .unwrap()
                .ledger
        }),
    ];
    let identical = fixtures.iter().all(|run| run().to_csv_string() == run().to_csv_string());
    outcome(identical, format!("{} fixtures run twice", fixtures.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("monotone operator inequalities", monotone_operator),
        ("homogeneity of A", homogeneity),
        ("Taylor-Green anchor", taylor_green_anchor),
        ("energy identity defect order", energy_identity),
        ("dissipation without forcing", dissipation),
        ("a-priori constant stability", apriori_stability),
        ("regularizer vanishing", regularizer_vanishing),
        ("pressure decomposition and bounds", pressure_decomposition),
        ("uniqueness / Gronwall", gronwall),
        ("manufactured solutions", manufactured),
        ("1-D Dirichlet model", dirichlet_1d),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = run();
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark}: {name} ({}) [{}]", i + 1, r.detail, secs(start.elapsed()));
        if !r.passed {
            failures += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
