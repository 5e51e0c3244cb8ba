//! Fourier machinery on the periodic box: lattice bookkeeping, transforms,
//! Leray projection, Galerkin truncation and dealiased products.

mod fft;
mod field;
pub mod fields;
mod grid;
mod ops;

pub use fft::{FftNd, Transform};
pub use field::{sym_pairs, CollocationField, SpectralScalar, SpectralVelocity, StressField};
pub use grid::TorusGrid;
pub use ops::{
    dealiased_product, leray_project, leray_project_in_place, sym_gradient, sym_gradient_norm_sq,
    truncate,
};
pub(crate) use ops::truncate_in_place;
