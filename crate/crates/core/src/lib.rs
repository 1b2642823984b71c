//! Rigged configurations and Kirillov–Reshetikhin crystals of type D_n^(1).
//!
//! The crate implements the bijection between highest weight paths in tensor
//! products of KR crystals and rigged configurations, the combinatorial
//! R-matrix it induces, the energy statistic and cocharge, and a harness that
//! checks the `X = M` identity on small cases.

pub mod error;
pub mod root_data;
pub mod crystal_core;
pub mod kr_crystal;
pub mod rigged_config;
pub mod bijection;
pub mod rmatrix_energy;
pub mod xm_harness;

pub use error::{Error, Result};
