use nsv_core::diagnostics::{
    apriori_report, convective_norm_report, cumulative_trapezoid, dissipation_violations,
    energy_identity_residual, lebesgue_time_norm, trapezoid, EnergyLedger, LedgerParams,
    LedgerRecord, LEDGER_HEADER,
};
use nsv_core::solver::{integrate, Forcing, PdeParams, SimConfig};
use nsv_core::spectral::{fields, SpectralVelocity, TorusGrid};

fn params() -> LedgerParams {
    LedgerParams {
        nu: 0.1,
        kappa: 0.5,
        p: 2.0,
        reg_weight: 0.0,
        beta: 2.0,
        stress_factor: 2.0,
    }
}

fn record(step: usize, t: f64, energy: f64) -> LedgerRecord {
    LedgerRecord {
        step,
        t,
        l2_sq: 0.5 * energy,
        kappa_grad_sq: 0.5 * energy,
        energy,
        grad_p: 0.0,
        strain_p: 0.0,
        reg_grad_beta: 0.0,
        reg_strain_beta: 0.0,
        forcing_work: 0.0,
        dtv_l2_sq: 0.0,
        kappa_grad_dtv_sq: 0.0,
        forcing_pprime: 0.0,
        fixed_point_iters: 0,
    }
}

#[test]
fn csv_has_fixed_header_and_round_trip_numbers() {
    let grid = TorusGrid::periodic(2, 12).unwrap();
    let v0 = fields::random(&grid, 3, 1.0, 3, true);
    let p = PdeParams::new(0.05, 0.3, 1.7).unwrap();
    let traj = integrate(&SimConfig::new(&grid, 0.05, 0.2), &p, &v0).unwrap();
    let csv = traj.ledger.to_csv_string();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), LEDGER_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), traj.ledger.len());
    for (row, rec) in rows.iter().zip(traj.ledger.records()) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), LEDGER_HEADER.split(',').count());
        assert_eq!(cells[0].parse::<usize>().unwrap(), rec.step);
        assert_eq!(cells[1].parse::<f64>().unwrap(), rec.t);
        assert_eq!(cells[4].parse::<f64>().unwrap(), rec.energy);
        assert_eq!(cells[13].parse::<usize>().unwrap(), rec.fixed_point_iters);
    }
    let mut buf = Vec::new();
    traj.ledger.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), csv);
}

#[test]
fn trapezoid_integrates_linear_functions_exactly() {
    let recs: Vec<LedgerRecord> = (0..5).map(|i| record(i, 0.25 * i as f64, 1.0 + i as f64)).collect();
    let cum = cumulative_trapezoid(&recs, |r| r.t);
    assert_eq!(cum[0], 0.0);
    assert!((cum[4] - 0.5).abs() < 1e-15);
    assert!((trapezoid(&recs, |r| 2.0 * r.t + 1.0) - 2.0).abs() < 1e-15);
}

#[test]
fn dissipation_violations_flag_growth() {
    let recs = vec![record(0, 0.0, 2.0), record(1, 0.1, 1.5), record(2, 0.2, 1.6), record(3, 0.3, 1.60001)];
    let ledger = EnergyLedger::from_records(params(), recs);
    assert_eq!(dissipation_violations(&ledger, 0.0), vec![2, 3]);
    assert_eq!(dissipation_violations(&ledger, 1e-3), vec![2]);
}

#[test]
fn energy_residual_of_an_empty_ledger_is_empty() {
    let ledger = EnergyLedger::from_records(params(), Vec::new());
    assert!(energy_identity_residual(&ledger).is_empty());
    assert!(apriori_report(&ledger).is_trivial());
}

#[test]
fn zero_data_give_a_trivial_apriori_report() {
    let grid = TorusGrid::periodic(2, 8).unwrap();
    let p = PdeParams::new(0.1, 0.5, 1.5).unwrap();
    let traj = integrate(&SimConfig::new(&grid, 0.1, 0.3), &p, &SpectralVelocity::zeros(&grid)).unwrap();
    let rep = apriori_report(&traj.ledger);
    assert!(rep.is_trivial());
    assert_eq!(rep.lhs_energy, 0.0);
    assert_eq!(rep.rhs, 0.0);
}

#[test]
fn apriori_constants_are_finite_and_positive() {
    let grid = TorusGrid::periodic(2, 12).unwrap();
    let v0 = fields::random(&grid, 1, 1.0, 2, true);
    let f = fields::random(&grid, 2, 0.5, 2, true);
    let p = PdeParams::new(0.05, 0.2, 3.0).unwrap().with_forcing(Forcing::constant(f));
    let traj = integrate(&SimConfig::new(&grid, 0.05, 0.5), &p, &v0).unwrap();
    let rep = apriori_report(&traj.ledger);
    let (ce, cr) = (rep.c_energy.unwrap(), rep.c_rate.unwrap());
    assert!(ce.is_finite() && ce > 0.0);
    assert!(cr.is_finite() && cr > 0.0);
    assert!(rep.rhs > traj.ledger.records()[0].l2_sq);
}

#[test]
fn lebesgue_time_norm_at_two_matches_the_ledger() {
    let grid = TorusGrid::periodic(2, 12).unwrap();
    let v0 = fields::random(&grid, 4, 1.0, 3, true);
    let p = PdeParams::new(0.05, 0.2, 1.5).unwrap();
    let traj = integrate(&SimConfig::new(&grid, 0.05, 0.5).with_snapshots(1), &p, &v0).unwrap();
    let from_snapshots = lebesgue_time_norm(&traj, 2.0).unwrap();
    let from_ledger = trapezoid(traj.ledger.records(), |r| r.l2_sq);
    assert!((from_snapshots - from_ledger).abs() < 1e-12 * from_ledger);
    assert!(lebesgue_time_norm(&traj, 0.5).is_err());
}

#[test]
fn convective_report_checks_the_exponent_range() {
    let grid = TorusGrid::periodic(3, 8).unwrap();
    let v0 = fields::random(&grid, 4, 1.0, 2, true);
    let p = PdeParams::new(0.05, 0.2, 1.5).unwrap();
    let traj = integrate(&SimConfig::new(&grid, 0.1, 0.3).with_snapshots(1), &p, &v0).unwrap();
    let rep = convective_norm_report(&traj, 1.5).unwrap();
    assert!(rep.tensor > 0.0 && rep.divergence > 0.0);
    assert!(convective_norm_report(&traj, 1.6).is_err());
    assert!(convective_norm_report(&traj, 0.9).is_err());
}

#[test]
fn summary_reports_the_run() {
    let grid = TorusGrid::periodic(2, 16).unwrap();
    let p = PdeParams::new(0.1, 0.5, 2.0).unwrap();
    let traj = integrate(&SimConfig::new(&grid, 0.01, 0.1), &p, &fields::taylor_green(&grid, 1.0)).unwrap();
    let s = traj.ledger.summary();
    assert_eq!(s.steps, 10);
    assert_eq!(s.t_end, 0.1);
    assert!(s.final_energy < s.initial_energy);
    assert!(s.max_energy_identity_defect < 1e-6 * s.initial_energy);
    assert!((s.total_dissipation - (s.initial_energy - s.final_energy)).abs() < 1e-6 * s.initial_energy);
    assert_eq!(s.total_forcing_work, 0.0);
}
