//! Gradient-variance prediction for parameterized circuits whose generators
//! close into a known Lie algebra.
//!
//! The pipeline is: [`dla::lie_closure`] builds an orthonormal basis of the
//! algebra, [`ideals::decompose`] splits it into simple ideals and a center,
//! and [`variance::gradvar_predict`] evaluates the per-ideal Killing/Frobenius
//! product. [`simulator`] estimates the same quantity by sampling circuits.

pub mod algebra;
pub mod compound;
pub mod dense;
pub mod dla;
pub mod error;
pub mod experiments;
pub mod ideals;
pub mod io;
pub mod mixing;
pub mod pauli;
pub mod simulator;
pub mod state;
pub mod variance;

pub use error::{Error, Result};
