//! Periodic traveling waves of `u_t + u u_x − (Mu)_x = 0`: construction,
//! spectral analysis of the linearization and orbital-stability criteria.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod continuation;
pub mod criteria;
pub mod elliptic;
pub mod error;
pub mod evolution;
pub mod galerkin;
pub mod klcurve;
pub mod linalg;
pub mod multiplier;
pub mod profile;
pub mod spectral;

pub use error::{Error, Result};
