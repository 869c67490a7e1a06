//! Evaluating a solution at physical amplitudes, and naming the resulting orbit.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{EtaMode, SolutionSet};
use crate::params::CouplingCase;
use crate::scalar::Scalar;
use crate::series::EvalPoint;

/// Largest `|Delta|` accepted for a bifurcated orbit.
pub const CONSTRAINT_TOL: f64 = 1e-8;
/// Largest relative imaginary part tolerated before taking the real part.
pub const IMAG_TOL: f64 = 1e-10;

/// Physical amplitudes and phases of one orbit.
///
/// On the transit branch `alpha3` is purely imaginary, `i * alpha3`, and the
/// default third phase is `pi/2`, which keeps every coordinate real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitParams<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub alpha3: T,
    pub transit: bool,
    pub e: T,
    pub eta: T,
    pub phase: [T; 3],
}

impl<T: Scalar> OrbitParams<T> {
    pub fn new(alpha1: T, alpha2: T, alpha3: T, e: T, eta: T) -> Self {
        OrbitParams { alpha1, alpha2, alpha3, transit: false, e, eta, phase: [T::zero(); 3] }
    }

    /// Same amplitudes on the transit branch (`alpha3` imaginary, `phi3 = pi/2`).
    pub fn transit(mut self) -> Self {
        self.transit = true;
        self.phase[2] = T::FRAC_PI_2();
        self
    }

    pub fn with_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_phase(mut self, phase: [T; 3]) -> Self {
        self.phase = phase;
        self
    }

    /// Signed `alpha3^2`: negative on the transit branch.
    pub fn alpha3_sq(&self) -> T {
        let s = self.alpha3 * self.alpha3;
        if self.transit {
            -s
        } else {
            s
        }
    }

    pub fn alphas(&self) -> [Complex<T>; 3] {
        let z = T::zero();
        let a3 = if self.transit { Complex::new(z, self.alpha3) } else { Complex::new(self.alpha3, z) };
        [Complex::new(self.alpha1, z), Complex::new(self.alpha2, z), a3]
    }

    fn check(&self) -> Result<()> {
        let v = [self.alpha1, self.alpha2, self.alpha3, self.e, self.eta];
        if v.iter().chain(self.phase.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("orbit parameters must be finite".into()));
        }
        if self.e < T::zero() || self.e >= T::one() {
            return Err(Error::Domain(format!("eccentricity {} outside [0, 1)", self.e)));
        }
        Ok(())
    }
}

/// Local state `(x, y, z, x', y', z')` at true anomaly `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateVector<T> {
    pub f: T,
    pub state: [T; 6],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    PlanarLyapunov,
    VerticalLyapunov,
    Lissajous,
    Halo,
    QuasiHalo,
    Axial,
    QuasiAxial,
    PlanarHyperbolic,
    BifurcatedHyperbolic,
    Transit,
    NonTransit,
}

impl OrbitClass {
    pub fn label(self) -> &'static str {
        match self {
            OrbitClass::PlanarLyapunov => "planar-lyapunov",
            OrbitClass::VerticalLyapunov => "vertical-lyapunov",
            OrbitClass::Lissajous => "lissajous",
            OrbitClass::Halo => "halo",
            OrbitClass::QuasiHalo => "quasi-halo",
            OrbitClass::Axial => "axial",
            OrbitClass::QuasiAxial => "quasi-axial",
            OrbitClass::PlanarHyperbolic => "planar-hyperbolic",
            OrbitClass::BifurcatedHyperbolic => "bifurcated-hyperbolic",
            OrbitClass::Transit => "transit",
            OrbitClass::NonTransit => "non-transit",
        }
    }
}

fn real_part<T: Scalar>(v: Complex<T>, what: &str) -> Result<T> {
    if v.im.abs() > T::lit(IMAG_TOL) * v.re.abs().max(T::one()) {
        return Err(Error::ImaginaryResidue { what: what.to_string(), residue: v.im.abs().as_f64() });
    }
    Ok(v.re)
}

/// Substitutes the amplitudes into the frequency series, giving the evaluation point for the coordinates.
pub fn eval_point<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>) -> Result<EvalPoint<T>> {
    params.check()?;
    if let EtaMode::Numeric(v) = sol.config.eta {
        if v != params.eta {
            return Err(Error::Contract(format!("solution built at eta = {v}, evaluated at eta = {}", params.eta)));
        }
    }
    let amps = [params.alpha1, params.alpha2, params.alpha3, params.e];
    for (i, a) in amps.iter().enumerate() {
        if !sol.config.active[i] && *a != T::zero() {
            return Err(Error::Contract(format!("amplitude {} is not a variable of this solution", i + 1)));
        }
    }
    let alpha = params.alphas();
    let names = ["omega", "nu", "lambda"];
    let mut freq = [Complex::new(T::zero(), T::zero()); 3];
    for (k, fs) in sol.freqs().iter().enumerate() {
        let v = fs.eval(&alpha, params.e, params.eta);
        freq[k] = Complex::new(real_part(v, names[k])?, T::zero());
    }
    Ok(EvalPoint { alpha, e: params.e, eta: params.eta, phase: params.phase, freq })
}

/// `Delta` at the given amplitudes and `eta`.
pub fn delta_value<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>) -> Result<T> {
    let v = sol.delta.eval(&params.alphas(), params.e, params.eta);
    real_part(v, "Delta")
}

/// Fails unless `eta = 0` or the bifurcation equation holds.
pub fn check_constraint<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>) -> Result<()> {
    if params.eta == T::zero() {
        return Ok(());
    }
    let d = delta_value(sol, params)?;
    if d.abs() > T::lit(CONSTRAINT_TOL) {
        return Err(Error::Constraint { residual: d.abs().as_f64() });
    }
    Ok(())
}

fn coords_deriv<T: Scalar>(sol: &SolutionSet<T>, ep: &EvalPoint<T>, f: T, deriv: u32) -> Result<[T; 3]> {
    let names = ["x", "y", "z"];
    let mut out = [T::zero(); 3];
    for (k, ts) in sol.coords().iter().enumerate() {
        out[k] = real_part(ts.eval_deriv(ep, f, deriv), names[k])?;
    }
    Ok(out)
}

/// Position and velocity at `f` in local coordinates.
pub fn evaluate_state<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>, f: T) -> Result<StateVector<T>> {
    check_constraint(sol, params)?;
    let ep = eval_point(sol, params)?;
    state_at(sol, &ep, f)
}

pub(crate) fn state_at<T: Scalar>(sol: &SolutionSet<T>, ep: &EvalPoint<T>, f: T) -> Result<StateVector<T>> {
    let p = coords_deriv(sol, ep, f, 0)?;
    let v = coords_deriv(sol, ep, f, 1)?;
    Ok(StateVector { f, state: [p[0], p[1], p[2], v[0], v[1], v[2]] })
}

/// Second derivatives of the coordinates at `f`.
pub(crate) fn accel_at<T: Scalar>(sol: &SolutionSet<T>, ep: &EvalPoint<T>, f: T) -> Result<[T; 3]> {
    coords_deriv(sol, ep, f, 2)
}

pub fn sample_trajectory<T: Scalar>(
    sol: &SolutionSet<T>,
    params: &OrbitParams<T>,
    grid: &[T],
) -> Result<Vec<StateVector<T>>> {
    check_constraint(sol, params)?;
    let ep = eval_point(sol, params)?;
    grid.iter().map(|&f| state_at(sol, &ep, f)).collect()
}

/// Newton iteration on `Delta(eta) = 0` at fixed amplitudes, started from `eta0`.
///
/// Needs an `eta`-symbolic solution. Used to lift a root of the order-3
/// bifurcation equation to the full order of `sol`.
pub fn refine_eta<T: Scalar>(sol: &SolutionSet<T>, params: &OrbitParams<T>, eta0: T) -> Result<T> {
    if !sol.is_symbolic() {
        return Err(Error::Contract("eta refinement needs an eta-symbolic solution".into()));
    }
    let poly = sol.delta.eval_poly(&params.alphas(), params.e);
    let dpoly = poly.derivative();
    let mut eta = eta0;
    for _ in 0..100 {
        let d = real_part(poly.eval(eta), "Delta")?;
        let dd = real_part(dpoly.eval(eta), "dDelta")?;
        if dd == T::zero() || !dd.is_finite() {
            break;
        }
        let step = d / dd;
        eta -= step;
        if step.abs() <= T::epsilon() * T::lit(8.0) * eta.abs().max(T::one()) {
            break;
        }
    }
    let d = real_part(poly.eval(eta), "Delta")?;
    if !eta.is_finite() || d.abs() > T::lit(CONSTRAINT_TOL) {
        return Err(Error::Constraint { residual: d.abs().as_f64() });
    }
    Ok(eta)
}

/// Names the orbit from its amplitudes, `eta` and coupling case.
///
/// `delta_residual`, when given, must satisfy the bifurcation equation for a
/// coupled (`eta != 0`) orbit.
pub fn classify_orbit<T: Scalar>(
    params: &OrbitParams<T>,
    case: CouplingCase,
    delta_residual: Option<T>,
) -> Result<OrbitClass> {
    params.check()?;
    let zero = T::zero();
    let (a1, a2, a3) = (params.alpha1 != zero, params.alpha2 != zero, params.alpha3 != zero);
    let coupled = params.eta != zero;
    if coupled {
        if let Some(r) = delta_residual {
            if r.abs() > T::lit(CONSTRAINT_TOL) {
                return Err(Error::Constraint { residual: r.abs().as_f64() });
            }
        }
    }
    if !a1 && !a2 && !a3 {
        return Err(Error::Classification("all amplitudes are zero: equilibrium point".into()));
    }
    if a3 {
        if !a1 && !a2 {
            return Ok(if coupled { OrbitClass::BifurcatedHyperbolic } else { OrbitClass::PlanarHyperbolic });
        }
        return Ok(if params.transit { OrbitClass::Transit } else { OrbitClass::NonTransit });
    }
    if !coupled {
        return Ok(match (a1, a2) {
            (true, false) => OrbitClass::PlanarLyapunov,
            (false, true) => OrbitClass::VerticalLyapunov,
            _ => OrbitClass::Lissajous,
        });
    }
    match case {
        CouplingCase::XToZ => match (a1, a2) {
            (false, _) => Err(Error::Classification("a halo orbit needs a nonzero in-plane amplitude".into())),
            (true, false) => Ok(OrbitClass::Halo),
            (true, true) => Ok(OrbitClass::QuasiHalo),
        },
        CouplingCase::YToZ | CouplingCase::ZToY => Ok(if a1 && a2 { OrbitClass::QuasiAxial } else { OrbitClass::Axial }),
    }
}
