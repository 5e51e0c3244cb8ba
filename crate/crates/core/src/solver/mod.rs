//! Galerkin system and time stepping.

mod integrate;
mod params;
mod rhs;

pub use integrate::{
    integrate, integrate_observed, project_initial, solve_regularized, tendency, Scheme, SimConfig,
    Stepper, Trajectory, DEFAULT_FIXED_POINT_TOL, DEFAULT_MAX_FIXED_POINT_ITERS,
};
pub use params::{beta_range, Forcing, ForcingTerm, PdeParams, Regularization, TimeProfile};
pub use rhs::{Evaluator, Quadratures};
