use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use super::eta::EtaPoly;
use super::keys::{AmplitudeKey, AngleKey, Parity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncation shared by every series taking part in one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    /// Highest total amplitude order kept.
    pub order: u32,
    /// Highest power of `eta` kept in each coefficient.
    pub eta_cap: usize,
}

impl Truncation {
    pub fn new(order: u32, eta_cap: usize) -> Self {
        Truncation { order, eta_cap }
    }
}

pub type TermKey = (AmplitudeKey, AngleKey);

/// Sum of `c(eta) alpha^M e^m cos(A)` (or `sin(A)`) over amplitude keys `M` and canonical angle keys `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries<T> {
    parity: Parity,
    trunc: Truncation,
    terms: BTreeMap<TermKey, EtaPoly<T>>,
}

impl<T: Scalar> TrigSeries<T> {
    pub fn new(parity: Parity, trunc: Truncation) -> Self {
        TrigSeries { parity, trunc, terms: BTreeMap::new() }
    }

    /// Cosine series holding only the constant `c`.
    pub fn constant(trunc: Truncation, c: EtaPoly<T>) -> Self {
        let mut s = Self::new(Parity::Cos, trunc);
        s.add_term(AmplitudeKey::ZERO, AngleKey::ZERO, &c);
        s
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &EtaPoly<T>)> {
        self.terms.iter()
    }

    pub fn get(&self, amp: AmplitudeKey, angle: AngleKey) -> Option<&EtaPoly<T>> {
        self.terms.get(&(amp, angle))
    }

    /// Coefficient at a possibly non-canonical angle, with the sine sign flip applied.
    pub fn coeff(&self, amp: AmplitudeKey, angle: AngleKey) -> EtaPoly<T> {
        let (k, flipped) = angle.canonical();
        match self.terms.get(&(amp, k)) {
            Some(c) if flipped && self.parity == Parity::Sin => c.neg(),
            Some(c) => c.clone(),
            None => EtaPoly::zero(),
        }
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|(m, _)| m.order()).max().unwrap_or(0)
    }

    /// Adds `c` at `(amp, angle)`, canonicalizing the angle and dropping anything beyond the truncation.
    pub fn add_term(&mut self, amp: AmplitudeKey, angle: AngleKey, c: &EtaPoly<T>) {
        if amp.order() > self.trunc.order || c.is_zero() {
            return;
        }
        let (key, flipped) = angle.canonical();
        if key.is_zero() && self.parity == Parity::Sin {
            return;
        }
        let c = c.truncate(self.trunc.eta_cap);
        let c = if flipped && self.parity == Parity::Sin { c.neg() } else { c };
        self.accumulate((amp, key), c);
    }

    fn accumulate(&mut self, key: TermKey, c: EtaPoly<T>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::Config(format!("{:?} vs {:?}", self.trunc, other.trunc)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign_scaled(other, T::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign_scaled(other, -T::one())?;
        Ok(out)
    }

    /// `self += s * other`.
    pub fn add_assign_scaled(&mut self, other: &Self, s: T) -> Result<()> {
        self.check_compatible(other)?;
        if self.parity != other.parity {
            return Err(Error::Parity(format!("cannot add {:?} and {:?} series", self.parity, other.parity)));
        }
        for (k, c) in &other.terms {
            self.accumulate(*k, c.scale_real(s));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        self.scale_real(-T::one())
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map_coeffs(|c| c.scale_real(s))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    /// Multiplies every coefficient by the polynomial `p`.
    pub fn scale_poly(&self, p: &EtaPoly<T>) -> Self {
        let cap = self.trunc.eta_cap;
        self.map_coeffs(|c| c.mul_trunc(p, cap))
    }

    fn map_coeffs(&self, f: impl Fn(&EtaPoly<T>) -> EtaPoly<T>) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let v = f(c);
                (!v.is_zero()).then_some((*k, v))
            })
            .collect();
        TrigSeries { parity: self.parity, trunc: self.trunc, terms }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_upto(other, self.trunc.order)
    }

    /// Product keeping amplitude orders up to `order` (at most the truncation order).
    pub fn mul_upto(&self, other: &Self, order: u32) -> Result<Self> {
        self.check_compatible(other)?;
        let order = order.min(self.trunc.order);
        let parity = self.parity.product(other.parity);
        let mut out = Self::new(parity, self.trunc);
        let cap = self.trunc.eta_cap;
        let half = T::lit(0.5);
        let mut by_order: Vec<Vec<(&TermKey, &EtaPoly<T>)>> = vec![Vec::new(); order as usize + 1];
        for (k, c) in &other.terms {
            let o = k.0.order();
            if o <= order {
                by_order[o as usize].push((k, c));
            }
        }
        for ((ma, aa), ca) in &self.terms {
            let oa = ma.order();
            if oa > order {
                continue;
            }
            for bucket in by_order.iter().take((order - oa) as usize + 1) {
                for &(&(mb, ab), cb) in bucket {
                    let prod = ca.mul_trunc(cb, cap).scale_real(half);
                    if prod.is_zero() {
                        continue;
                    }
                    let m = *ma + mb;
                    let (sum, diff) = (*aa + ab, *aa - ab);
                    match (self.parity, other.parity) {
                        (Parity::Cos, Parity::Cos) => {
                            out.add_term(m, diff, &prod);
                            out.add_term(m, sum, &prod);
                        }
                        (Parity::Sin, Parity::Sin) => {
                            out.add_term(m, diff, &prod);
                            out.add_term(m, sum, &prod.neg());
                        }
                        (Parity::Sin, Parity::Cos) => {
                            out.add_term(m, sum, &prod);
                            out.add_term(m, diff, &prod);
                        }
                        (Parity::Cos, Parity::Sin) => {
                            out.add_term(m, sum, &prod);
                            out.add_term(m, diff, &prod.neg());
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Terms of total amplitude order exactly `order`.
    pub fn homogeneous(&self, order: u32) -> Self {
        self.filter(|m, _| m.order() == order)
    }

    /// Terms of total amplitude order at most `order`.
    pub fn truncated(&self, order: u32) -> Self {
        self.filter(|m, _| m.order() <= order)
    }

    pub fn filter(&self, keep: impl Fn(AmplitudeKey, AngleKey) -> bool) -> Self {
        let terms = self.terms.iter().filter(|((m, a), _)| keep(*m, *a)).map(|(k, c)| (*k, c.clone())).collect();
        TrigSeries { parity: self.parity, trunc: self.trunc, terms }
    }

    /// Largest coefficient difference over the union of keys.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (k, c) in &self.terms {
            let d = match other.terms.get(k) {
                Some(o) => c.sub(o).max_abs(),
                None => c.max_abs(),
            };
            worst = worst.max(d);
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(c.max_abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }
}

/// `cos^i f` as a finite cosine sum in the `r` harmonic, obtained by repeated multiplication.
pub fn reduce_cos_power<T: Scalar>(i: u32, trunc: Truncation) -> TrigSeries<T> {
    let mut cosf = TrigSeries::new(Parity::Cos, trunc);
    cosf.add_term(AmplitudeKey::ZERO, AngleKey::unit(3), &EtaPoly::one());
    let mut acc = TrigSeries::constant(trunc, EtaPoly::one());
    for _ in 0..i {
        acc = acc.mul(&cosf).expect("same truncation");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr() -> Truncation {
        Truncation::new(6, 0)
    }

    fn c(v: f64) -> EtaPoly<f64> {
        EtaPoly::real(v)
    }

    #[test]
    fn sine_of_zero_angle_dropped() {
        let mut s = TrigSeries::<f64>::new(Parity::Sin, tr());
        s.add_term(AmplitudeKey::unit(0), AngleKey::ZERO, &c(1.0));
        assert!(s.is_empty());
    }

    #[test]
    fn negative_angle_sine_flips_sign() {
        let mut s = TrigSeries::<f64>::new(Parity::Sin, tr());
        s.add_term(AmplitudeKey::unit(0), AngleKey::new(-1, 0, 0, 0), &c(2.0));
        assert_eq!(s.get(AmplitudeKey::unit(0), AngleKey::unit(0)), Some(&c(-2.0)));
    }

    #[test]
    fn cos_times_cos() {
        let mut a = TrigSeries::<f64>::new(Parity::Cos, tr());
        a.add_term(AmplitudeKey::unit(0), AngleKey::unit(0), &c(1.0));
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.get(AmplitudeKey::new(2, 0, 0, 0), AngleKey::ZERO), Some(&c(0.5)));
        assert_eq!(sq.get(AmplitudeKey::new(2, 0, 0, 0), AngleKey::new(2, 0, 0, 0)), Some(&c(0.5)));
    }

    #[test]
    fn sin_squared() {
        let mut a = TrigSeries::<f64>::new(Parity::Sin, tr());
        a.add_term(AmplitudeKey::unit(0), AngleKey::unit(0), &c(1.0));
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.parity(), Parity::Cos);
        assert_eq!(sq.get(AmplitudeKey::new(2, 0, 0, 0), AngleKey::ZERO), Some(&c(0.5)));
        assert_eq!(sq.get(AmplitudeKey::new(2, 0, 0, 0), AngleKey::new(2, 0, 0, 0)), Some(&c(-0.5)));
    }

    #[test]
    fn truncation_mismatch_is_config_error() {
        let a = TrigSeries::<f64>::new(Parity::Cos, Truncation::new(3, 0));
        let b = TrigSeries::<f64>::new(Parity::Cos, Truncation::new(4, 0));
        assert!(matches!(a.mul(&b), Err(Error::Config(_))));
        assert!(matches!(a.add(&b), Err(Error::Config(_))));
    }

    #[test]
    fn parity_mismatch_on_add() {
        let a = TrigSeries::<f64>::new(Parity::Cos, tr());
        let b = TrigSeries::<f64>::new(Parity::Sin, tr());
        assert!(matches!(a.add(&b), Err(Error::Parity(_))));
    }

    #[test]
    fn product_respects_order_truncation() {
        let t = Truncation::new(2, 0);
        let mut a = TrigSeries::<f64>::new(Parity::Cos, t);
        a.add_term(AmplitudeKey::unit(0), AngleKey::unit(0), &c(1.0));
        let cube = a.mul(&a).unwrap().mul(&a).unwrap();
        assert!(cube.is_empty());
    }
}
