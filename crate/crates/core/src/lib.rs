//! Upper and lower Monte Carlo bounds for convex stochastic dynamic programs,
//! with pathwise iterative improvement via nested simulation.

pub mod approx;
pub mod dp;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod improve;
pub mod models;
pub mod path;
pub mod pathwise;
pub mod stats;

pub use error::{Error, Result, ResultExt};
