use num_complex::Complex;

use super::freq::monomial;
use super::keys::Parity;
use super::trig::TrigSeries;
use crate::scalar::Scalar;

/// Numerical values substituted into a series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint<T> {
    pub alpha: [Complex<T>; 3],
    pub e: T,
    pub eta: T,
    /// Initial phases `phi1, phi2, phi3`.
    pub phase: [T; 3],
    /// Frequencies `omega, nu, lambda`; `theta3 = i lambda f + phi3`.
    pub freq: [Complex<T>; 3],
}

impl<T: Scalar> TrigSeries<T> {
    /// Value of the `deriv`-th derivative with respect to `f` (0, 1 or 2).
    pub fn eval_deriv(&self, p: &EvalPoint<T>, f: T, deriv: u32) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        let mut acc = Complex::new(T::zero(), T::zero());
        for ((m, a), c) in self.iter() {
            let [s, t, u, r] = a.0.map(|v| T::lit(v as f64));
            let w = p.freq[0] * s + p.freq[1] * t + i * p.freq[2] * u + Complex::new(r, T::zero());
            let phase = p.phase[0] * s + p.phase[1] * t + p.phase[2] * u;
            let ang = w * f + phase;
            let coef = c.eval(p.eta) * monomial(*m, &p.alpha, p.e);
            let (cs, sn) = (ang.cos(), ang.sin());
            let v = match (self.parity(), deriv % 4) {
                (Parity::Cos, 0) => cs,
                (Parity::Cos, 1) => -w * sn,
                (Parity::Cos, 2) => -w * w * cs,
                (Parity::Cos, _) => w * w * w * sn,
                (Parity::Sin, 0) => sn,
                (Parity::Sin, 1) => w * cs,
                (Parity::Sin, 2) => -w * w * sn,
                (Parity::Sin, _) => -w * w * w * cs,
            };
            acc += coef * v;
        }
        acc
    }

    pub fn eval(&self, p: &EvalPoint<T>, f: T) -> Complex<T> {
        self.eval_deriv(p, f, 0)
    }
}
