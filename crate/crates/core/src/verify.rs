//! Invariant suites run by `nsv verify`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{dissipation_violations, energy_identity_residual};
use crate::error::{NsvError, Result};
use crate::pressure::{decompose_pressure, pressure_gradient_residual, recover_pressure};
use crate::solver::{integrate, PdeParams, SimConfig};
use crate::spectral::{fields, leray_project, sym_gradient_norm_sq, truncate, Transform, TorusGrid};
use crate::tensor::{
    check_monotone_inequality, monotonicity_gap, power_law_stress, rotation_2d, rotation_3d,
    InequalityCheck, Mat3, SymTensor, INEQUALITY_REL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Tensor,
    Spectral,
    Energy,
    Pressure,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Tensor, Suite::Spectral, Suite::Energy, Suite::Pressure];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Tensor => "tensor",
            Suite::Spectral => "spectral",
            Suite::Energy => "energy",
            Suite::Pressure => "pressure",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = NsvError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                NsvError::Config(format!(
                    "unknown suite `{s}` (expected tensor, spectral, energy or pressure)"
                ))
            })
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn bound(name: impl Into<String>, value: f64, limit: f64) -> Self {
        CheckResult::new(name, value <= limit, format!("{value:.3e} <= {limit:.1e}"))
    }

    fn from_error(name: impl Into<String>, e: NsvError) -> Self {
        CheckResult::new(name, false, e.to_string())
    }
}

/// The monotonicity inequality under test; swapped out by fixtures.
pub type InequalityFn = fn(&SymTensor, &SymTensor, f64) -> Result<InequalityCheck>;

/// Exponents exercised by the tensor suite.
pub const SUITE_EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 4.0];

pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckResult> {
    match suite {
        Suite::Tensor => tensor_suite(seed, 10_000, check_monotone_inequality),
        Suite::Spectral => spectral_suite(seed),
        Suite::Energy => energy_suite(),
        Suite::Pressure => pressure_suite(seed),
    }
}

/// Random symmetric tensor with entries of magnitude about `10^[-2, 2]`.
pub fn random_sym(rng: &mut impl Rng, dim: usize) -> SymTensor {
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    let mut m: Mat3 = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in i..dim {
            let x = scale * rng.gen_range(-1.0..1.0);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    SymTensor::from_matrix(dim, m).expect("symmetric by construction")
}

fn random_rotation(rng: &mut impl Rng, dim: usize) -> Mat3 {
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    if dim == 2 {
        rotation_2d(angle)
    } else {
        let axis = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)];
        rotation_3d(axis, angle)
    }
}

fn rel_diff(a: &SymTensor, b: &SymTensor) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        a.sub(b).norm() / scale
    }
}

/// Monotonicity inequalities and gap positivity over `samples` random pairs
/// per exponent, homogeneity and objectivity of `A`.
pub fn tensor_suite(seed: u64, samples: usize, inequality: InequalityFn) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in SUITE_EXPONENTS {
        let mut failures = 0usize;
        let mut negative_gaps = 0usize;
        let mut first_error = None;
        for s in 0..samples {
            let dim = 2 + s % 2;
            let e = random_sym(&mut rng, dim);
            let f = random_sym(&mut rng, dim);
            match inequality(&e, &f, p) {
                Ok(c) if c.holds => {}
                Ok(_) => failures += 1,
                Err(err) => {
                    failures += 1;
                    first_error.get_or_insert(err);
                }
            }
            let gap = monotonicity_gap(&e, &f, p).unwrap_or(f64::NAN);
            let scale = (e.norm().powf(p - 1.0) + f.norm().powf(p - 1.0)) * e.sub(&f).norm();
            if !(gap >= -INEQUALITY_REL_TOL * scale) {
                negative_gaps += 1;
            }
        }
        let kind = if p >= 2.0 { "p>=2" } else { "p<2" };
        let mut detail = format!("{failures} of {samples} pairs violate");
        if let Some(e) = first_error {
            detail.push_str(&format!(" (first error: {e})"));
        }
        out.push(CheckResult::new(format!("monotone inequality {kind}, p = {p}"), failures == 0, detail));
        out.push(CheckResult::new(
            format!("gap positivity, p = {p}"),
            negative_gaps == 0,
            format!("{negative_gaps} of {samples} pairs negative"),
        ));
    }

    let mut worst: f64 = 0.0;
    for s in 0..1000 {
        let dim = 2 + s % 2;
        let d = random_sym(&mut rng, dim);
        let p = rng.gen_range(1.1..5.0);
        let lambda = 10f64.powf(rng.gen_range(-2.0..2.0));
        let lhs = power_law_stress(&d.scaled(lambda), p).expect("valid exponent");
        let rhs = power_law_stress(&d, p).expect("valid exponent").scaled(lambda.powf(p - 1.0));
        worst = worst.max(rel_diff(&lhs, &rhs));
    }
    out.push(CheckResult::bound("homogeneity A(lD) = l^(p-1) A(D)", worst, 1e-12));

    let mut worst: f64 = 0.0;
    for s in 0..1000 {
        let dim = 2 + s % 2;
        let d = random_sym(&mut rng, dim);
        let p = rng.gen_range(1.1..5.0);
        let q = random_rotation(&mut rng, dim);
        let lhs = power_law_stress(&d.rotated(&q), p).expect("valid exponent");
        let rhs = power_law_stress(&d, p).expect("valid exponent").rotated(&q);
        worst = worst.max(rel_diff(&lhs, &rhs));
    }
    out.push(CheckResult::bound("objectivity A(QDQ^T) = Q A(D) Q^T", worst, 1e-12));

    let zero_ok = SUITE_EXPONENTS
        .iter()
        .all(|&p| power_law_stress(&SymTensor::zeros(3), p).map(|a| a.norm() == 0.0).unwrap_or(false));
    out.push(CheckResult::new("A(0) = 0", zero_ok, ""));
    out
}

/// Projection, Parseval, Korn and transform round trips on seeded fields.
pub fn spectral_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (dim, modes) in [(2usize, 16usize), (3, 8)] {
        let grid = TorusGrid::periodic(dim, modes).expect("valid grid");
        let tag = format!("d = {dim}, M = {modes}");
        let raw = fields::random(&grid, seed, 1.0, grid.max_shell(), false);
        let p1 = leray_project(&raw);
        let p2 = leray_project(&p1);
        out.push(CheckResult::bound(
            format!("Leray idempotence ({tag})"),
            p1.max_abs_diff(&p2) / p1.coeff_norm(),
            1e-14,
        ));
        out.push(CheckResult::bound(
            format!("projected field is divergence-free ({tag})"),
            p1.divergence_defect() / p1.coeff_norm(),
            1e-14,
        ));
        out.push(CheckResult::bound(
            format!("reality ({tag})"),
            raw.reality_defect() / raw.coeff_norm(),
            1e-14,
        ));

        let mut tr = Transform::native(&grid);
        let quad: f64 = raw
            .to_collocation(&mut tr)
            .iter()
            .map(|c| c.lebesgue_pow(2.0, tr.cell_volume()))
            .sum();
        let l2 = raw.l2_norm_sq();
        out.push(CheckResult::bound(format!("Parseval ({tag})"), (quad - l2).abs() / l2, 1e-12));

        let grad = p1.grad_norm_sq();
        let korn = 2.0 * sym_gradient_norm_sq(&p1);
        out.push(CheckResult::bound(
            format!("Korn identity ||grad v||^2 = 2||Dv||^2 ({tag})"),
            (grad - korn).abs() / grad,
            1e-12,
        ));

        let mut padded = Transform::padded(&grid);
        let mut vals = vec![0.0; padded.num_points()];
        let mut back = raw.clone();
        for c in 0..dim {
            padded.to_grid(raw.component(c), &mut vals);
            padded.from_grid(&vals, back.component_mut(c));
        }
        out.push(CheckResult::bound(
            format!("transform round trip ({tag})"),
            raw.max_abs_diff(&back) / raw.coeff_norm(),
            1e-14,
        ));

        let n = grid.max_shell() / 2;
        let check = truncate(&p1, n).and_then(|t1| Ok((t1.clone(), truncate(&t1, n)?)));
        out.push(match check {
            Ok((t1, t2)) => CheckResult::bound(format!("truncation idempotence ({tag})"), t1.max_abs_diff(&t2), 0.0),
            Err(e) => CheckResult::from_error(format!("truncation idempotence ({tag})"), e),
        });
    }
    out
}

/// Energy identity, dissipation and the closed-form decay on the
/// Taylor-Green fixture, plus dissipation for non-Newtonian exponents.
pub fn energy_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = TorusGrid::periodic(2, 16).expect("valid grid");
    let (nu, kappa, amplitude) = (0.1, 0.5, 1.0);
    let dt = 1e-2;
    let config = SimConfig::new(&grid, dt, 0.5);
    let v0 = fields::taylor_green(&grid, amplitude);
    let run = PdeParams::new(nu, kappa, 2.0).and_then(|params| integrate(&config, &params, &v0));
    match run {
        Ok(traj) => {
            let e0 = traj.ledger.records()[0].energy;
            let rate = -2.0 * nu / (1.0 + 2.0 * kappa);
            let exact = v0.scaled((rate * traj.final_time()).exp());
            let mut err = traj.final_state().clone();
            err.add_scaled(-1.0, &exact);
            out.push(CheckResult::bound(
                "Taylor-Green closed-form decay",
                (err.l2_norm_sq() / exact.l2_norm_sq()).sqrt(),
                1e-5,
            ));
            let defect = energy_identity_residual(&traj.ledger).iter().fold(0.0f64, |m, r| m.max(r.abs()));
            out.push(CheckResult::bound("Taylor-Green energy identity", defect / e0, 1e-6));
            let bad = dissipation_violations(&traj.ledger, dt * dt * e0);
            out.push(CheckResult::new(
                "Taylor-Green energy nonincreasing",
                bad.is_empty(),
                format!("{} increasing steps", bad.len()),
            ));
        }
        Err(e) => out.push(CheckResult::from_error("Taylor-Green fixture run", e)),
    }
    let v0 = fields::random(&grid, 5, 1.0, 3, true);
    for p in [1.5, 3.0] {
        let name = format!("energy nonincreasing, p = {p}");
        let run = PdeParams::new(0.05, 0.2, p).and_then(|params| integrate(&SimConfig::new(&grid, 0.02, 0.4), &params, &v0));
        out.push(match run {
            Ok(traj) => {
                let e0 = traj.ledger.records()[0].energy;
                let bad = dissipation_violations(&traj.ledger, 4e-4 * e0);
                CheckResult::new(name, bad.is_empty(), format!("{} increasing steps", bad.len()))
            }
            Err(e) => CheckResult::from_error(name, e),
        });
    }
    out
}

/// Pressure recovery and the three-way decomposition on the Taylor-Green
/// vortex and on seeded random snapshots.
pub fn pressure_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = TorusGrid::periodic(2, 16).expect("valid grid");
    let a = 0.8;
    let tg = fields::taylor_green(&grid, a);
    let check = PdeParams::new(0.1, 0.5, 2.0).and_then(|params| recover_pressure(&tg, 0.0, &params));
    out.push(match check {
        Ok(pi) => {
            // a^2 (cos 2x + cos 2y) / 4
            let mut worst: f64 = 0.0;
            for (idx, z) in pi.coeffs().iter().enumerate() {
                let k = grid.ints(idx);
                let doubled = (k[0].abs() == 2 && k[1] == 0) || (k[0] == 0 && k[1].abs() == 2);
                let expect = if doubled { a * a / 8.0 } else { 0.0 };
                worst = worst.max((z.re - expect).abs()).max(z.im.abs());
            }
            CheckResult::bound("Taylor-Green pressure closed form", worst, 1e-14)
        }
        Err(e) => CheckResult::from_error("Taylor-Green pressure closed form", e),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in [1.5, 2.0, 3.0] {
        let mut worst_sum: f64 = 0.0;
        let mut worst_grad: f64 = 0.0;
        let mut first_error = None;
        for _ in 0..10 {
            let v = fields::random(&grid, rng.gen(), rng.gen_range(0.1..2.0), 5, true);
            let f = fields::random(&grid, rng.gen(), 0.5, 3, true);
            let params = match PdeParams::new(0.05, 0.3, p) {
                Ok(params) => params.with_forcing(crate::solver::Forcing::constant(f)),
                Err(e) => {
                    first_error.get_or_insert(e);
                    continue;
                }
            };
            let res = recover_pressure(&v, 0.0, &params).and_then(|pi| {
                let parts = decompose_pressure(&v, 0.0, &params)?;
                let mut d = parts.total();
                for (x, y) in d.coeffs_mut().iter_mut().zip(pi.coeffs()) {
                    *x -= y;
                }
                let sum = (d.l2_norm_sq() / pi.l2_norm_sq()).sqrt();
                Ok((sum, pressure_gradient_residual(&v, 0.0, &params)?))
            });
            match res {
                Ok((s, g)) => {
                    worst_sum = worst_sum.max(s);
                    worst_grad = worst_grad.max(g);
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
        if let Some(e) = first_error {
            out.push(CheckResult::from_error(format!("pressure decomposition, p = {p}"), e));
            continue;
        }
        out.push(CheckResult::bound(format!("pi1 + pi2 + pih = pi, p = {p}"), worst_sum, 1e-10));
        out.push(CheckResult::bound(format!("grad pi matches gradient part, p = {p}"), worst_grad, 1e-10));
    }
    out
}
