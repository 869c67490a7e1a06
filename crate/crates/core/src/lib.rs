//! Lindstedt–Poincaré series for bifurcated orbits around the collinear
//! libration points of the elliptic restricted three-body problem.
//!
//! The crate is generic over the real scalar ([`Scalar`], implemented for
//! `f32` and `f64`); the `f64` aliases below are what most callers want.

pub mod bifurcation;
pub mod error;
pub mod lp;
pub mod orbit;
pub mod params;
pub mod scalar;
pub mod series;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Context = params::LibrationContext<f64>;
pub type Solution = lp::SolutionSet<f64>;
pub type Form = bifurcation::BifurcationForm<f64>;
pub type Series = series::TrigSeries<f64>;
