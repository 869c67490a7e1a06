//! Trigonometric series in the angles `theta1, theta2, theta3, f` with
//! amplitude monomials and `eta`-polynomial coefficients.

mod eta;
mod eval;
mod freq;
mod keys;
mod trig;

pub use eta::{EtaPoly, PURGE};
pub use eval::EvalPoint;
pub use freq::{monomial, FreqSeries};
pub use keys::{AmplitudeKey, AngleKey, Parity};
pub use trig::{reduce_cos_power, TermKey, TrigSeries, Truncation};
