//! Checks of a series solution against the equations of motion and their numerical integration.

mod checks;
mod dynamics;
mod integrator;

pub use checks::{residual_check, series_vs_integration, symmetry_check, validate, Symmetry, ValidationReport};
pub use dynamics::{ertbp_rhs, jacobi_energy, Ertbp, LocalErtbp, OdeSystem, COLLISION_RADIUS};
pub use integrator::{integrate, integrate_fixed, IntegratorConfig};
