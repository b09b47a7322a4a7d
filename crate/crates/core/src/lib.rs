//! Fourier-side laboratory for the doubly damped σ-evolution equation:
//! exact multipliers, higher-order asymptotic profiles built from bivariate
//! jets, radial L² quadrature and decay-rate experiments.

pub mod error;
pub mod experiments;
pub mod jet2;
pub mod kernels;
pub mod model;
pub mod profiles;
pub mod quadrature;

pub use error::{Error, Result};
pub use jet2::Jet2;
pub use model::{ModelParams, RateCase};
