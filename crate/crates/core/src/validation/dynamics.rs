use crate::error::{Error, Result};
use crate::params::FrameMap;
use crate::scalar::Scalar;

/// Distances to a primary below this are treated as collisions.
pub const COLLISION_RADIUS: f64 = 1e-8;

/// First-order system `y' = F(f, y)` in six dimensions.
pub trait OdeSystem<T> {
    fn derivative(&self, f: T, y: &[T; 6]) -> Result<[T; 6]>;
}

/// Right-hand side of the elliptic problem in the barycentric pulsating frame.
///
/// State is `(X, Y, Z, X', Y', Z')`; derivatives are with respect to the true anomaly `f`.
pub fn ertbp_rhs<T: Scalar>(s: &[T; 6], f: T, mu: T, e: T) -> Result<[T; 6]> {
    let one = T::one();
    let two = T::lit(2.0);
    let [x, y, z, vx, vy, vz] = *s;
    let dx1 = x - mu;
    let dx2 = x - mu + one;
    let yz = y * y + z * z;
    let r1 = (dx1 * dx1 + yz).sqrt();
    let r2 = (dx2 * dx2 + yz).sqrt();
    let eps = T::lit(COLLISION_RADIUS);
    if !(r1 > eps) || !(r2 > eps) {
        return Err(Error::Singularity(format!("collision with a primary (r1 = {r1:e}, r2 = {r2:e})")));
    }
    let rho = one / (one + e * f.cos());
    let k1 = (one - mu) / (r1 * r1 * r1);
    let k2 = mu / (r2 * r2 * r2);
    let ox = rho * (x - k1 * dx1 - k2 * dx2);
    let oy = rho * (y - k1 * y - k2 * y);
    let oz = rho * (z - k1 * z - k2 * z);
    Ok([vx, vy, vz, two * vy + ox, -two * vx + oy, -z + oz])
}

/// Jacobi-type energy `v^2/2 - (r^2/2 + (1-mu)/r1 + mu/r2)`, conserved when `e = 0`.
pub fn jacobi_energy<T: Scalar>(s: &[T; 6], mu: T) -> T {
    let one = T::one();
    let half = T::lit(0.5);
    let [x, y, z, vx, vy, vz] = *s;
    let r1 = ((x - mu).powi(2) + y * y + z * z).sqrt();
    let r2 = ((x - mu + one).powi(2) + y * y + z * z).sqrt();
    half * (vx * vx + vy * vy + vz * vz) - (half * (x * x + y * y) + (one - mu) / r1 + mu / r2)
}

/// The barycentric equations as an [`OdeSystem`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ertbp<T> {
    pub mu: T,
    pub e: T,
}

impl<T: Scalar> OdeSystem<T> for Ertbp<T> {
    fn derivative(&self, f: T, y: &[T; 6]) -> Result<[T; 6]> {
        ertbp_rhs(y, f, self.mu, self.e)
    }
}

/// The same equations written in local scaled coordinates through the constant frame map.
///
/// Tolerances then apply to the small local coordinates instead of the
/// barycentric ones, which matters near a libration point close to a primary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalErtbp<T> {
    pub frame: FrameMap<T>,
    pub mu: T,
    pub e: T,
}

impl<T: Scalar> LocalErtbp<T> {
    pub fn accel(&self, f: T, y: &[T; 6]) -> Result<[T; 3]> {
        let g = self.frame.to_global(y);
        let d = ertbp_rhs(&g, f, self.mu, self.e)?;
        let k = self.frame.sign * self.frame.gamma;
        Ok([d[3] / k, d[4] / k, d[5] / self.frame.gamma])
    }
}

impl<T: Scalar> OdeSystem<T> for LocalErtbp<T> {
    fn derivative(&self, f: T, y: &[T; 6]) -> Result<[T; 6]> {
        let a = self.accel(f, y)?;
        Ok([y[3], y[4], y[5], a[0], a[1], a[2]])
    }
}
