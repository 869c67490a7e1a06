use serde::Serialize;

use super::SolutionSet;
use crate::scalar::Scalar;
use crate::series::{FreqSeries, TrigSeries};

/// One complex coefficient of one `eta` power, flattened for serialization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientRecord {
    pub coord: &'static str,
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub m: u8,
    pub s: i8,
    pub t: i8,
    pub u: i8,
    pub r: i8,
    pub parity: &'static str,
    pub eta_deg: usize,
    pub re: f64,
    pub im: f64,
}

fn trig_records<T: Scalar>(coord: &'static str, ts: &TrigSeries<T>, out: &mut Vec<CoefficientRecord>) {
    for ((m, a), c) in ts.iter() {
        for (deg, v) in c.coeffs().iter().enumerate() {
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            let [i, j, k, mm] = m.0;
            let [s, t, u, r] = a.0;
            out.push(CoefficientRecord {
                coord,
                i,
                j,
                k,
                m: mm,
                s,
                t,
                u,
                r,
                parity: ts.parity().label(),
                eta_deg: deg,
                re: v.re.as_f64(),
                im: v.im.as_f64(),
            });
        }
    }
}

fn freq_records<T: Scalar>(coord: &'static str, fs: &FreqSeries<T>, out: &mut Vec<CoefficientRecord>) {
    for (m, c) in fs.iter() {
        for (deg, v) in c.coeffs().iter().enumerate() {
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            let [i, j, k, mm] = m.0;
            out.push(CoefficientRecord {
                coord,
                i,
                j,
                k,
                m: mm,
                s: 0,
                t: 0,
                u: 0,
                r: 0,
                parity: "const",
                eta_deg: deg,
                re: v.re.as_f64(),
                im: v.im.as_f64(),
            });
        }
    }
}

impl<T: Scalar> SolutionSet<T> {
    /// Every stored coefficient in a fixed order: x, y, z, omega, nu, lambda, delta.
    pub fn records(&self) -> Vec<CoefficientRecord> {
        let mut out = Vec::new();
        trig_records("x", &self.x, &mut out);
        trig_records("y", &self.y, &mut out);
        trig_records("z", &self.z, &mut out);
        freq_records("omega", &self.omega, &mut out);
        freq_records("nu", &self.nu, &mut out);
        freq_records("lambda", &self.lambda, &mut out);
        freq_records("delta", &self.delta, &mut out);
        out
    }
}
