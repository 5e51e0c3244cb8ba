//! Scripted studies built on the solver.

mod manufactured;
mod studies;

pub use manufactured::{
    manufactured_forcing, run_manufactured, ManufacturedReport, ManufacturedTarget, TargetShape,
};
pub use studies::{
    apriori_sweep, gronwall_compare, kappa_sweep, linear_fit, perturbation,
    regularizer_stress_norm, relative_spread, run_gronwall, run_refinement,
    run_regularization_sweep, run_taylor_green, trajectory_pressure_bounds, AprioriPoint,
    GronwallReport, KappaPoint, RefinementRow, RegularizationPoint, RegularizationReport,
    TaylorGreenReport,
};
