//! Monte Carlo and spectral tools for superdiffusive energy transport in a
//! one-dimensional harmonic chain of charged oscillators in a magnetic field.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boltzmann;
pub mod chain;
pub mod dispersion;
pub mod error;
pub mod fracdiff;
pub mod kinetic;
pub mod quadrature;
pub mod rng;
pub mod scaling;

pub use dispersion::{Branch, ModelParams, PhononState};
pub use error::{Error, Result};
pub use rng::{PathRng, RngStream};
