//! Spectral Galerkin solver for the incompressible power-law
//! Navier-Stokes-Voigt equations
//!
//! ```text
//! d/dt (v - kappa lap v) + div(v (x) v) + grad pi - div(2 nu |D v|^(p-2) D v) = f,  div v = 0
//! ```
//!
//! on the periodic box, together with the diagnostics used to check its
//! energy balance, a-priori bounds, pressure decomposition and stability.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod kv1d;
pub mod pressure;
pub mod solver;
pub mod spectral;
pub mod tensor;
pub mod verify;

pub use error::{NsvError, Result};
