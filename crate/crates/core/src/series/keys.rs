use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

/// Exponents `(i, j, k, m)` of `alpha1^i alpha2^j alpha3^k e^m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AmplitudeKey(pub [u8; 4]);

impl AmplitudeKey {
    pub const ZERO: AmplitudeKey = AmplitudeKey([0; 4]);

    pub fn new(i: u8, j: u8, k: u8, m: u8) -> Self {
        AmplitudeKey([i, j, k, m])
    }

    pub fn unit(idx: usize) -> Self {
        let mut k = [0; 4];
        k[idx] = 1;
        AmplitudeKey(k)
    }

    pub fn order(self) -> u32 {
        self.0.iter().map(|&v| v as u32).sum()
    }

    pub fn checked_sub(self, other: AmplitudeKey) -> Option<AmplitudeKey> {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(AmplitudeKey(out))
    }

    /// True if every exponent is zero wherever `active` is false.
    pub fn within(self, active: [bool; 4]) -> bool {
        (0..4).all(|i| active[i] || self.0[i] == 0)
    }
}

impl Add for AmplitudeKey {
    type Output = AmplitudeKey;
    fn add(self, rhs: AmplitudeKey) -> AmplitudeKey {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        AmplitudeKey(out)
    }
}

impl fmt::Display for AmplitudeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k, m] = self.0;
        write!(f, "{i}{j}{k}{m}")
    }
}

/// Harmonic `s*theta1 + t*theta2 + u*theta3 + r*f`.
///
/// Stored keys are canonical: the first nonzero entry is positive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AngleKey(pub [i8; 4]);

impl AngleKey {
    pub const ZERO: AngleKey = AngleKey([0; 4]);

    pub fn new(s: i8, t: i8, u: i8, r: i8) -> Self {
        AngleKey([s, t, u, r])
    }

    pub fn unit(idx: usize) -> Self {
        let mut k = [0; 4];
        k[idx] = 1;
        AngleKey(k)
    }

    pub fn is_zero(self) -> bool {
        self.0 == [0; 4]
    }

    pub fn is_canonical(self) -> bool {
        match self.0.iter().find(|&&v| v != 0) {
            Some(&v) => v > 0,
            None => true,
        }
    }

    /// Canonical representative and whether the sign was flipped.
    pub fn canonical(self) -> (AngleKey, bool) {
        if self.is_canonical() {
            (self, false)
        } else {
            (-self, true)
        }
    }
}

impl Neg for AngleKey {
    type Output = AngleKey;
    fn neg(self) -> AngleKey {
        AngleKey(self.0.map(|v| -v))
    }
}

impl Add for AngleKey {
    type Output = AngleKey;
    fn add(self, rhs: AngleKey) -> AngleKey {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        AngleKey(out)
    }
}

impl Sub for AngleKey {
    type Output = AngleKey;
    fn sub(self, rhs: AngleKey) -> AngleKey {
        self + (-rhs)
    }
}

impl fmt::Display for AngleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [s, t, u, r] = self.0;
        write!(f, "({s},{t},{u},{r})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Cos => Parity::Sin,
            Parity::Sin => Parity::Cos,
        }
    }

    /// Parity of a product of two series.
    pub fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Cos
        } else {
            Parity::Sin
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        }
    }
}
