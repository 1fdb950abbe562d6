//! Numerical tests of nonnegativity for `I(phi) = int |grad phi|^2 + f det grad phi`
//! over maps vanishing on the boundary, with piecewise-constant `f`.
//!
//! The pipeline is `mesh` -> `regions` -> `assembly` -> `himtest`, with
//! `bisect` locating critical scalings and `analytic` holding the
//! closed-form quantities used to cross-check the discrete results.

pub mod analytic;
pub mod assembly;
pub mod bisect;
pub mod error;
pub mod himtest;
pub mod linalg;
pub mod mesh;
pub mod regions;

pub use error::{Error, Result};
