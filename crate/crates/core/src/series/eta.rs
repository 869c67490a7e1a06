use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients with modulus below this are treated as exact zeros.
pub const PURGE: f64 = 1e-300;

/// Polynomial in the coupling parameter `eta` with complex coefficients.
///
/// The coefficient vector never ends in a (purged) zero, so the empty
/// vector is the zero polynomial and equality is structural.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EtaPoly<T> {
    c: Vec<Complex<T>>,
}

impl<T: Scalar> EtaPoly<T> {
    pub fn zero() -> Self {
        EtaPoly { c: Vec::new() }
    }

    pub fn constant(v: Complex<T>) -> Self {
        Self::from_coeffs(vec![v])
    }

    pub fn real(v: T) -> Self {
        Self::constant(Complex::new(v, T::zero()))
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    /// The monomial `eta`.
    pub fn eta() -> Self {
        Self::from_coeffs(vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())])
    }

    pub fn from_coeffs(mut c: Vec<Complex<T>>) -> Self {
        let purge = T::lit(PURGE);
        for v in c.iter_mut() {
            if v.norm() < purge {
                *v = Complex::new(T::zero(), T::zero());
            }
        }
        while c.last().is_some_and(|v| v.re == T::zero() && v.im == T::zero()) {
            c.pop();
        }
        EtaPoly { c }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.c.get(k).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn max_abs(&self) -> T {
        self.c.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        EtaPoly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        if other.c.len() > self.c.len() {
            self.c.resize(other.c.len(), Complex::new(T::zero(), T::zero()));
        }
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += b;
        }
        let c = std::mem::take(&mut self.c);
        *self = Self::from_coeffs(c);
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_coeffs(self.c.iter().map(|v| v * s).collect())
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::from_coeffs(self.c.iter().map(|v| v * s).collect())
    }

    /// Product truncated to degree `cap`.
    pub fn mul_trunc(&self, other: &Self, cap: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = (self.c.len() + other.c.len() - 1).min(cap + 1);
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (i, a) in self.c.iter().enumerate().take(n) {
            for (j, b) in other.c.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn truncate(&self, cap: usize) -> Self {
        Self::from_coeffs(self.c.iter().take(cap + 1).copied().collect())
    }

    pub fn eval(&self, eta: T) -> Complex<T> {
        self.c.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, v| acc * eta + v)
    }

    /// Derivative with respect to `eta`.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(self.c.iter().enumerate().skip(1).map(|(k, v)| v * T::lit(k as f64)).collect())
    }

    /// Exact division by `eta`. The constant term must vanish to within `tol` relative to the largest coefficient.
    pub fn div_eta(&self, tol: T) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let c0 = self.coeff(0).norm();
        let scale = self.max_abs().max(T::one());
        if c0 > tol * scale {
            return Err(Error::Ring(format!("cannot divide by eta: constant term {c0:e}")));
        }
        Ok(Self::from_coeffs(self.c[1..].to_vec()))
    }

    /// Largest modulus among odd-degree (`odd = true`) or even-degree coefficients.
    pub fn parity_content(&self, odd: bool) -> T {
        self.c
            .iter()
            .enumerate()
            .filter(|(k, _)| (k % 2 == 1) == odd)
            .fold(T::zero(), |m, (_, v)| m.max(v.norm()))
    }
}
