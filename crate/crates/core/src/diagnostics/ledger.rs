use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::solver::PdeParams;

/// Column order of the ledger CSV.
pub const LEDGER_HEADER: &str = "step,t,l2_sq,kappa_grad_sq,energy,grad_p,strain_p,reg_grad_beta,reg_strain_beta,forcing_work,dtv_l2_sq,kappa_grad_dtv_sq,forcing_pprime,fixed_point_iters";

/// Functionals of the state at one time level. Space integrals use the
/// dealiasing-grid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRecord {
    pub step: usize,
    pub t: f64,
    /// `||v||_2^2`
    pub l2_sq: f64,
    /// `kappa ||grad v||_2^2`
    pub kappa_grad_sq: f64,
    /// `||v||_2^2 + kappa ||grad v||_2^2`
    pub energy: f64,
    /// `||grad v||_p^p`
    pub grad_p: f64,
    /// `||D v||_p^p`
    pub strain_p: f64,
    /// `(1/n_reg) ||grad v||_beta^beta`
    pub reg_grad_beta: f64,
    /// `(1/n_reg) ||D v||_beta^beta`
    pub reg_strain_beta: f64,
    /// `(f, v)`
    pub forcing_work: f64,
    /// `||dv/dt||_2^2`
    pub dtv_l2_sq: f64,
    /// `kappa ||grad dv/dt||_2^2`
    pub kappa_grad_dtv_sq: f64,
    /// `||f||_{p'}^{p'}`
    pub forcing_pprime: f64,
    /// Fixed-point iterations spent on the step that produced this state.
    pub fixed_point_iters: usize,
}

impl LedgerRecord {
    fn csv_row(&self) -> String {
        let vals = [
            self.t,
            self.l2_sq,
            self.kappa_grad_sq,
            self.energy,
            self.grad_p,
            self.strain_p,
            self.reg_grad_beta,
            self.reg_strain_beta,
            self.forcing_work,
            self.dtv_l2_sq,
            self.kappa_grad_dtv_sq,
            self.forcing_pprime,
        ];
        let mut row = self.step.to_string();
        for v in vals {
            row.push_str(&format!(",{v:.16e}"));
        }
        row.push_str(&format!(",{}", self.fixed_point_iters));
        row
    }
}

/// Model constants the ledger integrals are weighted with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerParams {
    pub nu: f64,
    pub kappa: f64,
    pub p: f64,
    /// `1/n_reg`, zero without regularization.
    pub reg_weight: f64,
    pub beta: f64,
    /// `c` in the viscous stress `c nu |D|^(p-2) D`.
    pub stress_factor: f64,
}

/// Per-step energy bookkeeping of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    params: LedgerParams,
    records: Vec<LedgerRecord>,
}

/// Cumulative trapezoid integral of `f` over the record times.
pub fn cumulative_trapezoid(records: &[LedgerRecord], f: impl Fn(&LedgerRecord) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(records.len());
    let mut acc = 0.0;
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            let prev = &records[i - 1];
            acc += 0.5 * (r.t - prev.t) * (f(r) + f(prev));
        }
        out.push(acc);
    }
    out
}

/// Trapezoid integral of `f` over the whole record.
pub fn trapezoid(records: &[LedgerRecord], f: impl Fn(&LedgerRecord) -> f64) -> f64 {
    cumulative_trapezoid(records, f).last().copied().unwrap_or(0.0)
}

impl EnergyLedger {
    pub fn new(params: &PdeParams) -> Self {
        EnergyLedger {
            params: LedgerParams {
                nu: params.nu,
                kappa: params.kappa,
                p: params.p,
                reg_weight: params.reg_weight(),
                beta: params.reg_beta(),
                stress_factor: 2.0,
            },
            records: Vec::new(),
        }
    }

    pub fn from_records(params: LedgerParams, records: Vec<LedgerRecord>) -> Self {
        EnergyLedger { params, records }
    }

    pub fn params(&self) -> &LedgerParams {
        &self.params
    }

    pub fn push(&mut self, rec: LedgerRecord) {
        self.records.push(rec);
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }

    /// Instantaneous dissipation `2c (nu ||D v||_p^p + (1/n_reg) ||D v||_beta^beta)`.
    pub fn dissipation_rate(&self, r: &LedgerRecord) -> f64 {
        2.0 * self.params.stress_factor * (self.params.nu * r.strain_p + r.reg_strain_beta)
    }

    /// Writes the CSV table with [`LEDGER_HEADER`].
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{LEDGER_HEADER}")?;
        for r in &self.records {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn summary(&self) -> LedgerSummary {
        let defect = super::energy_identity_residual(self);
        let first = self.records.first();
        let last = self.records.last();
        LedgerSummary {
            params: self.params,
            steps: self.records.len().saturating_sub(1),
            t_end: last.map_or(0.0, |r| r.t),
            initial_energy: first.map_or(0.0, |r| r.energy),
            final_energy: last.map_or(0.0, |r| r.energy),
            max_energy_identity_defect: defect.iter().fold(0.0, |m: f64, d| m.max(d.abs())),
            total_dissipation: trapezoid(&self.records, |r| self.dissipation_rate(r)),
            total_forcing_work: trapezoid(&self.records, |r| r.forcing_work),
            max_fixed_point_iters: self.records.iter().map(|r| r.fixed_point_iters).max().unwrap_or(0),
        }
    }
}

/// JSON summary of a ledger.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub params: LedgerParams,
    pub steps: usize,
    pub t_end: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_energy_identity_defect: f64,
    pub total_dissipation: f64,
    pub total_forcing_work: f64,
    pub max_fixed_point_iters: usize,
}
