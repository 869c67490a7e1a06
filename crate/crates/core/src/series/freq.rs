use std::collections::BTreeMap;

use num_complex::Complex;

use super::eta::EtaPoly;
use super::keys::AmplitudeKey;
use super::trig::{TrigSeries, Truncation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Power series in the amplitudes with `eta`-polynomial coefficients.
///
/// Used for the frequency corrections and for the coupling function `Delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqSeries<T> {
    trunc: Truncation,
    terms: BTreeMap<AmplitudeKey, EtaPoly<T>>,
}

impl<T: Scalar> FreqSeries<T> {
    pub fn new(trunc: Truncation) -> Self {
        FreqSeries { trunc, terms: BTreeMap::new() }
    }

    pub fn constant(trunc: Truncation, c: EtaPoly<T>) -> Self {
        let mut s = Self::new(trunc);
        s.add_term(AmplitudeKey::ZERO, &c);
        s
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AmplitudeKey, &EtaPoly<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, k: AmplitudeKey) -> EtaPoly<T> {
        self.terms.get(&k).cloned().unwrap_or_else(EtaPoly::zero)
    }

    pub fn add_term(&mut self, k: AmplitudeKey, c: &EtaPoly<T>) {
        if k.order() > self.trunc.order || c.is_zero() {
            return;
        }
        let c = c.truncate(self.trunc.eta_cap);
        let e = self.terms.entry(k).or_insert_with(EtaPoly::zero);
        e.add_assign(&c);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn check(&self, trunc: Truncation) -> Result<()> {
        if self.trunc != trunc {
            return Err(Error::Config(format!("{:?} vs {:?}", self.trunc, trunc)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other.trunc)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = Self::new(self.trunc);
        for (k, c) in &self.terms {
            out.add_term(*k, &c.scale(s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other.trunc)?;
        let mut out = Self::new(self.trunc);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = *ka + *kb;
                if k.order() <= self.trunc.order {
                    out.add_term(k, &ca.mul_trunc(cb, self.trunc.eta_cap));
                }
            }
        }
        Ok(out)
    }

    /// Product with a trigonometric series; the parity is that of `ts`.
    pub fn mul_trig(&self, ts: &TrigSeries<T>) -> Result<TrigSeries<T>> {
        self.check(ts.trunc())?;
        let mut out = TrigSeries::new(ts.parity(), ts.trunc());
        let cap = self.trunc.eta_cap;
        for (kf, cf) in &self.terms {
            for ((m, a), c) in ts.iter() {
                let k = *kf + *m;
                if k.order() <= self.trunc.order {
                    out.add_term(k, *a, &cf.mul_trunc(c, cap));
                }
            }
        }
        Ok(out)
    }

    pub fn homogeneous(&self, order: u32) -> Self {
        FreqSeries {
            trunc: self.trunc,
            terms: self.terms.iter().filter(|(k, _)| k.order() == order).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Sums the amplitude monomials, leaving a polynomial in `eta`.
    pub fn eval_poly(&self, alpha: &[Complex<T>; 3], e: T) -> EtaPoly<T> {
        let mut acc = EtaPoly::zero();
        for (k, c) in &self.terms {
            acc.add_assign(&c.scale(monomial(*k, alpha, e)));
        }
        acc
    }

    pub fn eval(&self, alpha: &[Complex<T>; 3], e: T, eta: T) -> Complex<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (k, c)| acc + c.eval(eta) * monomial(*k, alpha, e))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (k, c) in &self.terms {
            worst = worst.max(c.sub(&other.get(*k)).max_abs());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(c.max_abs());
            }
        }
        worst
    }
}

/// `alpha1^i alpha2^j alpha3^k e^m`.
pub fn monomial<T: Scalar>(k: AmplitudeKey, alpha: &[Complex<T>; 3], e: T) -> Complex<T> {
    let [i, j, kk, m] = k.0;
    alpha[0].powu(i as u32) * alpha[1].powu(j as u32) * alpha[2].powu(kk as u32) * e.powi(m as i32)
}
