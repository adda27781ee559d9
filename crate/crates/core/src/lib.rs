//! Spherical-mean and photoacoustic inversion on convex domains.

pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod forward;
pub mod transforms;
pub mod kernels;
pub mod inversion;

pub use error::{Error, Result};
