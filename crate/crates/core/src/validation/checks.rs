use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::SolutionSet;
use crate::orbit::{accel_at, check_constraint, delta_value, eval_point, state_at, OrbitParams, StateVector};
use crate::scalar::Scalar;

use super::dynamics::{Ertbp, LocalErtbp};
use super::integrator::{integrate, IntegratorConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    /// Reflection `Z -> -Z`.
    S1,
    /// Time reversal with `Y -> -Y`.
    S2,
    /// Time reversal with `Y -> -Y`, `Z -> -Z`.
    S3,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [Symmetry::S1, Symmetry::S2, Symmetry::S3];

    /// Image of a barycentric state under the symmetry.
    pub fn apply<T: Scalar>(self, sv: &StateVector<T>) -> StateVector<T> {
        let [x, y, z, vx, vy, vz] = sv.state;
        match self {
            Symmetry::S1 => StateVector { f: sv.f, state: [x, y, -z, vx, vy, -vz] },
            Symmetry::S2 => StateVector { f: -sv.f, state: [x, -y, z, -vx, vy, -vz] },
            Symmetry::S3 => StateVector { f: -sv.f, state: [x, -y, -z, -vx, vy, vz] },
        }
    }
}

fn local_system<T: Scalar>(sol: &SolutionSet<T>, e: T) -> LocalErtbp<T> {
    LocalErtbp { frame: sol.ctx.frame(), mu: sol.ctx.mu, e }
}

/// Largest acceleration mismatch between the series and the modified equations of motion on `grid`.
///
/// The exact force comes from the barycentric equations through the frame
/// map; the coupling `eta * Delta * source` is added to the coupled equation.
pub fn residual_check<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>, grid: &[T]) -> Result<T> {
    check_constraint(sol, params)?;
    let ep = eval_point(sol, params)?;
    let sys = local_system(sol, params.e);
    let delta = delta_value(sol, params)?;
    let case = sol.case();
    let mut worst = T::zero();
    for &f in grid {
        let sv = state_at(sol, &ep, f)?;
        let acc = accel_at(sol, &ep, f)?;
        let mut exact = sys.accel(f, &sv.state)?;
        exact[case.target()] += params.eta * delta * sv.state[case.source()];
        for i in 0..3 {
            worst = worst.max((acc[i] - exact[i]).abs());
        }
    }
    Ok(worst)
}

/// Largest position deviation between the series and a numerical integration started from the series state at `f0`.
pub fn series_vs_integration<T: Scalar>(
    sol: &SolutionSet<T>,
    params: &OrbitParams<T>,
    f0: T,
    span: T,
    samples: usize,
    cfg: &IntegratorConfig<T>,
) -> Result<T> {
    if params.eta != T::zero() {
        // The coupled equations are not the physical ones unless Delta = 0.
        check_constraint(sol, params)?;
    }
    let ep = eval_point(sol, params)?;
    let sys = local_system(sol, params.e);
    let n = samples.max(1);
    let nodes: Vec<T> = (0..=n).map(|i| f0 + span * T::lit(i as f64 / n as f64)).collect();
    let y0 = state_at(sol, &ep, f0)?.state;
    let traj = integrate(&sys, y0, &nodes, cfg)?;
    let mut worst = T::zero();
    for sv in &traj {
        let s = state_at(sol, &ep, sv.f)?;
        for i in 0..3 {
            worst = worst.max((s.state[i] - sv.state[i]).abs());
        }
    }
    Ok(worst)
}

/// Largest state mismatch between the symmetric image of a barycentric trajectory and the flow.
///
/// The image path is retraced from the image of the last state back to the
/// image of the first, so the check does not follow the steps that produced
/// `traj`. Exact sign flips would otherwise make the defect vanish identically.
pub fn symmetry_check<T: Scalar>(
    sys: &Ertbp<T>,
    traj: &[StateVector<T>],
    sym: Symmetry,
    cfg: &IntegratorConfig<T>,
) -> Result<T> {
    let Some(last) = traj.last() else {
        return Err(Error::Domain("empty trajectory".into()));
    };
    let image: Vec<StateVector<T>> = traj.iter().rev().map(|sv| sym.apply(sv)).collect();
    let nodes: Vec<T> = image.iter().map(|sv| sv.f).collect();
    let flown = integrate(sys, sym.apply(last).state, &nodes, cfg)?;
    let mut worst = T::zero();
    for (a, b) in flown.iter().zip(&image) {
        for i in 0..6 {
            worst = worst.max((a.state[i] - b.state[i]).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    pub params: OrbitParams<T>,
    pub order: u32,
    pub residual_max: T,
    pub deviation_max: T,
    /// Defects for S1, S2, S3 along the integrated barycentric trajectory.
    pub symmetry_defects: [T; 3],
}

/// Residual, series-versus-integration deviation and symmetry defects over `[0, span]`.
pub fn validate<T: Scalar>(
    sol: &SolutionSet<T>,
    params: &OrbitParams<T>,
    span: T,
    samples: usize,
    cfg: &IntegratorConfig<T>,
) -> Result<ValidationReport<T>> {
    let n = samples.max(1);
    let grid: Vec<T> = (0..=n).map(|i| span * T::lit(i as f64 / n as f64)).collect();
    let residual_max = residual_check(sol, params, &grid)?;
    let deviation_max = series_vs_integration(sol, params, T::zero(), span, n, cfg)?;
    let ep = eval_point(sol, params)?;
    let frame = sol.ctx.frame();
    let y0 = frame.to_global(&state_at(sol, &ep, T::zero())?.state);
    let sys = Ertbp { mu: sol.ctx.mu, e: params.e };
    let traj = integrate(&sys, y0, &grid, cfg)?;
    let mut defects = [T::zero(); 3];
    for (d, sym) in defects.iter_mut().zip(Symmetry::ALL) {
        *d = symmetry_check(&sys, &traj, sym, cfg)?;
    }
    Ok(ValidationReport { params: *params, order: sol.config.order, residual_max, deviation_max, symmetry_defects: defects })
}
