//! Libration point geometry and the constants of the linearized flow.
//!
//! Local coordinates are scaled by `gamma`, the distance from the libration
//! point to its closest primary, and centred on the point. The barycentric
//! pulsating frame puts the larger primary at `(mu, 0, 0)` and the smaller
//! one at `(mu - 1, 0, 0)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_N_POLY_MAX: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LibrationPoint {
    L1,
    L2,
    L3,
}

impl fmt::Display for LibrationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LibrationPoint::L1 => "L1",
            LibrationPoint::L2 => "L2",
            LibrationPoint::L3 => "L3",
        };
        f.write_str(s)
    }
}

impl FromStr for LibrationPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(LibrationPoint::L1),
            "L2" => Ok(LibrationPoint::L2),
            "L3" => Ok(LibrationPoint::L3),
            _ => Err(Error::Domain(format!("unknown libration point '{s}'"))),
        }
    }
}

/// Which coordinate drives which in the artificial coupling term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CouplingCase {
    /// `eta * Delta * x` added to the z equation (halo family).
    #[serde(rename = "x2z")]
    XToZ,
    /// `eta * Delta * y` added to the z equation (axial family).
    #[serde(rename = "y2z")]
    YToZ,
    /// `eta * Delta * z` added to the y equation (axial family).
    #[serde(rename = "z2y")]
    ZToY,
}

impl CouplingCase {
    pub const ALL: [CouplingCase; 3] = [CouplingCase::XToZ, CouplingCase::YToZ, CouplingCase::ZToY];

    pub fn label(self) -> &'static str {
        match self {
            CouplingCase::XToZ => "x2z",
            CouplingCase::YToZ => "y2z",
            CouplingCase::ZToY => "z2y",
        }
    }

    /// Index (0 = x, 1 = y, 2 = z) of the coordinate feeding the coupling.
    pub fn source(self) -> usize {
        match self {
            CouplingCase::XToZ => 0,
            CouplingCase::YToZ => 1,
            CouplingCase::ZToY => 2,
        }
    }

    /// Index of the equation receiving the coupling.
    pub fn target(self) -> usize {
        match self {
            CouplingCase::XToZ | CouplingCase::YToZ => 2,
            CouplingCase::ZToY => 1,
        }
    }

    /// True when the z coordinate is a sine series (symmetry about the y = 0 plane with time reversal).
    pub fn z_is_sine(self) -> bool {
        !matches!(self, CouplingCase::XToZ)
    }
}

impl fmt::Display for CouplingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CouplingCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "x2z" | "xtoz" => Ok(CouplingCase::XToZ),
            "y2z" | "ytoz" => Ok(CouplingCase::YToZ),
            "z2y" | "ztoy" => Ok(CouplingCase::ZToY),
            _ => Err(Error::Domain(format!("unknown coupling case '{s}'"))),
        }
    }
}

/// Residual of the quintic whose positive root is `gamma`.
pub fn gamma_quintic<T: Scalar>(mu: T, point: LibrationPoint, g: T) -> (T, T) {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let coeffs: [T; 6] = match point {
        LibrationPoint::L1 => [one, -(three - mu), three - two * mu, -mu, two * mu, -mu],
        LibrationPoint::L2 => [one, three - mu, three - two * mu, -mu, -two * mu, -mu],
        LibrationPoint::L3 => [one, two + mu, one + two * mu, -(one - mu), -two * (one - mu), -(one - mu)],
    };
    let mut p = T::zero();
    let mut dp = T::zero();
    for c in coeffs {
        dp = dp * g + p;
        p = p * g + c;
    }
    (p, dp)
}

fn check_mu<T: Scalar>(mu: T) -> Result<()> {
    if !(mu > T::zero() && mu <= T::lit(0.5)) {
        return Err(Error::Domain(format!("mass ratio {mu} outside (0, 0.5]")));
    }
    Ok(())
}

/// Distance from the libration point to its closest primary, in units of the primaries' separation.
///
/// Safeguarded Newton iteration on the bracketing interval, falling back to
/// bisection whenever a Newton step leaves the bracket.
pub fn solve_gamma<T: Scalar>(mu: T, point: LibrationPoint) -> Result<T> {
    check_mu(mu)?;
    let (mut lo, mut hi) = match point {
        LibrationPoint::L1 | LibrationPoint::L2 => (T::zero(), T::one()),
        LibrationPoint::L3 => (T::lit(0.5), T::lit(1.5)),
    };
    let (plo, _) = gamma_quintic(mu, point, lo);
    let (phi, _) = gamma_quintic(mu, point, hi);
    if plo.signum() == phi.signum() {
        return Err(Error::Internal(format!("gamma quintic not bracketed for mu = {mu}")));
    }
    let increasing = phi > T::zero();
    let mut g = match point {
        LibrationPoint::L3 => T::one() - T::lit(7.0 / 12.0) * mu,
        _ => (mu / T::lit(3.0)).cbrt().min(T::lit(0.9)),
    };
    for _ in 0..200 {
        let (p, dp) = gamma_quintic(mu, point, g);
        if p == T::zero() {
            return Ok(g);
        }
        if (p > T::zero()) == increasing {
            hi = g;
        } else {
            lo = g;
        }
        let newton = g - p / dp;
        let next = if dp != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        if (next - g).abs() <= T::epsilon() * g.abs() * T::lit(2.0) || hi - lo <= T::epsilon() * hi * T::lit(2.0) {
            return Ok(next);
        }
        g = next;
    }
    Ok(g)
}

/// Legendre expansion coefficients `c_n` for `n = 0..=n_max` (entries 0 and 1 are unused and zero).
pub fn c_coeffs<T: Scalar>(mu: T, point: LibrationPoint, gamma: T, n_max: usize) -> Result<Vec<T>> {
    check_mu(mu)?;
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("gamma {gamma} must be positive")));
    }
    if n_max < 2 {
        return Err(Error::Domain("n_max must be at least 2".into()));
    }
    let one = T::one();
    let g3 = gamma * gamma * gamma;
    let mut out = vec![T::zero(); n_max + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(2) {
        let np1 = (n + 1) as i32;
        let sgn = if n % 2 == 0 { one } else { -one };
        *slot = match point {
            LibrationPoint::L1 => (mu + sgn * (one - mu) * (gamma / (one - gamma)).powi(np1)) / g3,
            LibrationPoint::L2 => (sgn * mu + sgn * (one - mu) * (gamma / (one + gamma)).powi(np1)) / g3,
            LibrationPoint::L3 => sgn * ((one - mu) + mu * (gamma / (one + gamma)).powi(np1)) / g3,
        };
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearConstants<T> {
    pub omega0: T,
    pub nu0: T,
    pub lambda0: T,
    pub kappa1: T,
    pub kappa2: T,
}

/// In-plane, out-of-plane and hyperbolic frequencies of the linearized flow at a point with coefficient `c2`.
pub fn linear_constants<T: Scalar>(c2: T) -> Result<LinearConstants<T>> {
    let two = T::lit(2.0);
    let one = T::one();
    let disc = T::lit(9.0) * c2 * c2 - T::lit(8.0) * c2;
    if !(c2 > T::zero()) || !(disc > T::zero()) {
        return Err(Error::Domain(format!("c2 = {c2} gives no center x center x saddle linearization")));
    }
    let root = disc.sqrt();
    let w2 = (two - c2 + root) / two;
    let l2 = (c2 - two + root) / two;
    if !(w2 > T::zero()) || !(l2 > T::zero()) {
        return Err(Error::Domain(format!("c2 = {c2} gives no center x center x saddle linearization")));
    }
    let omega0 = w2.sqrt();
    let lambda0 = l2.sqrt();
    let nu0 = c2.sqrt();
    let kappa1 = -(w2 + two * c2 + one) / (two * omega0);
    let kappa2 = -(l2 - two * c2 - one) / (two * lambda0);
    Ok(LinearConstants { omega0, nu0, lambda0, kappa1, kappa2 })
}

/// Coupling-specific constants: `kappa3` and the order-zero value `d0000` of `Delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingConstants<T> {
    pub case: CouplingCase,
    pub kappa3: T,
    pub d0000: T,
}

/// Everything known about a libration point before any series is built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LibrationContext<T> {
    pub mu: T,
    pub point: LibrationPoint,
    pub gamma: T,
    /// `c[n]` for `n = 0..=n_poly_max + 1`; entries 0 and 1 are zero.
    pub c: Vec<T>,
    pub linear: LinearConstants<T>,
}

impl<T: Scalar> LibrationContext<T> {
    pub fn new(mu: T, point: LibrationPoint) -> Result<Self> {
        Self::with_poly_max(mu, point, DEFAULT_N_POLY_MAX)
    }

    pub fn with_poly_max(mu: T, point: LibrationPoint, n_poly_max: usize) -> Result<Self> {
        let gamma = solve_gamma(mu, point)?;
        let c = c_coeffs(mu, point, gamma, n_poly_max.max(2) + 1)?;
        let linear = linear_constants(c[2])?;
        Ok(LibrationContext { mu, point, gamma, c, linear })
    }

    pub fn c2(&self) -> T {
        self.c[2]
    }

    /// Highest Legendre degree available to the nonlinear terms.
    pub fn n_poly_max(&self) -> usize {
        self.c.len() - 2
    }

    pub fn coupling(&self, case: CouplingCase) -> CouplingConstants<T> {
        let LinearConstants { omega0, nu0, lambda0, kappa1, kappa2 } = self.linear;
        let (w2, n2, l2) = (omega0 * omega0, nu0 * nu0, lambda0 * lambda0);
        let two = T::lit(2.0);
        match case {
            CouplingCase::XToZ => CouplingConstants { case, kappa3: (n2 - w2) / (n2 + l2), d0000: n2 - w2 },
            CouplingCase::YToZ => CouplingConstants {
                case,
                kappa3: (kappa2 / kappa1) * (n2 - w2) / (n2 + l2),
                d0000: (n2 - w2) / kappa1,
            },
            CouplingCase::ZToY => CouplingConstants {
                case,
                kappa3: -T::one() / (two * nu0) - T::lit(1.5) * nu0,
                d0000: T::one() / (two * nu0) - nu0 / two,
            },
        }
    }

    pub fn frame(&self) -> FrameMap<T> {
        FrameMap::new(self.mu, self.point, self.gamma)
    }
}

/// Constant affine map between local scaled coordinates and the barycentric pulsating frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameMap<T> {
    pub gamma: T,
    /// Sign applied to local x and y.
    pub sign: T,
    /// Barycentric abscissa of the libration point.
    pub offset: T,
}

impl<T: Scalar> FrameMap<T> {
    pub fn new(mu: T, point: LibrationPoint, gamma: T) -> Self {
        let one = T::one();
        match point {
            LibrationPoint::L1 => FrameMap { gamma, sign: -one, offset: mu - one + gamma },
            LibrationPoint::L2 => FrameMap { gamma, sign: -one, offset: mu - one - gamma },
            LibrationPoint::L3 => FrameMap { gamma, sign: one, offset: mu + gamma },
        }
    }

    /// `[x, y, z, x', y', z']` local to barycentric.
    pub fn to_global(&self, s: &[T; 6]) -> [T; 6] {
        let g = self.gamma;
        let k = self.sign * g;
        [k * s[0] + self.offset, k * s[1], g * s[2], k * s[3], k * s[4], g * s[5]]
    }

    pub fn to_local(&self, s: &[T; 6]) -> [T; 6] {
        let g = self.gamma;
        let k = self.sign * g;
        [(s[0] - self.offset) / k, s[1] / k, s[2] / g, s[3] / k, s[4] / k, s[5] / g]
    }
}
