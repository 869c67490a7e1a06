//! Dormand–Prince 5(4) with step-size control, landing exactly on requested nodes.

use crate::error::{Error, Result};
use crate::orbit::StateVector;
use crate::scalar::Scalar;

use super::dynamics::OdeSystem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on `|h|`.
    pub max_step: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for IntegratorConfig<T> {
    fn default() -> Self {
        IntegratorConfig { rtol: T::lit(1e-12), atol: T::lit(1e-12), max_step: T::lit(0.1), max_steps: 1_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step: fifth-order solution and the embedded error estimate.
fn step<T: Scalar, S: OdeSystem<T>>(sys: &S, f: T, y: &[T; 6], k1: [T; 6], h: T) -> Result<([T; 6], [T; 6], [T; 6])> {
    let mut k = [[T::zero(); 6]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s][j]);
            if a != T::zero() {
                for i in 0..6 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = sys.derivative(f + T::lit(C[s]) * h, &ys)?;
    }
    let mut y5 = *y;
    let mut err = [T::zero(); 6];
    for (s, ks) in k.iter().enumerate() {
        let (b5, db) = (T::lit(B5[s]), T::lit(B5[s] - B4[s]));
        for i in 0..6 {
            y5[i] += h * b5 * ks[i];
            err[i] += h * db * ks[i];
        }
    }
    Ok((y5, err, k[6]))
}

/// States at every node; `nodes[0]` is the initial anomaly and the nodes must be monotone.
pub fn integrate<T: Scalar, S: OdeSystem<T>>(
    sys: &S,
    y0: [T; 6],
    nodes: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<Vec<StateVector<T>>> {
    let Some(&f0) = nodes.first() else {
        return Err(Error::Domain("no integration nodes".into()));
    };
    if nodes.iter().any(|v| !v.is_finite()) || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite initial data".into()));
    }
    let dir = match nodes.last() {
        Some(&l) if l < f0 => -T::one(),
        _ => T::one(),
    };
    if nodes.windows(2).any(|w| (w[1] - w[0]) * dir < T::zero()) {
        return Err(Error::Domain("integration nodes must be monotone".into()));
    }
    let mut out = vec![StateVector { f: f0, state: y0 }];
    let mut f = f0;
    let mut y = y0;
    let mut k1 = sys.derivative(f, &y)?;
    let mut h = dir * cfg.max_step.min(T::lit(1e-2));
    let mut steps = 0usize;
    let fifth = T::lit(0.2);
    for &target in &nodes[1..] {
        while (target - f) * dir > T::zero() {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::StepUnderflow { f: f.as_f64() });
            }
            let remaining = target - f;
            let mut hh = h;
            if hh.abs() > cfg.max_step {
                hh = dir * cfg.max_step;
            }
            let last = hh.abs() >= remaining.abs();
            if last {
                hh = remaining;
            }
            if hh.abs() <= T::lit(16.0) * T::epsilon() * f.abs().max(T::one()) && !last {
                return Err(Error::StepUnderflow { f: f.as_f64() });
            }
            let (y5, err, k7) = step(sys, f, &y, k1, hh)?;
            let mut norm = T::zero();
            for i in 0..6 {
                let sc = cfg.atol + cfg.rtol * y[i].abs().max(y5[i].abs());
                norm += (err[i] / sc).powi(2);
            }
            let norm = (norm / T::lit(6.0)).sqrt();
            if !norm.is_finite() {
                h = hh * T::lit(0.2);
                continue;
            }
            let fac = if norm == T::zero() { T::lit(5.0) } else { (T::lit(0.9) * norm.powf(-fifth)).min(T::lit(5.0)).max(T::lit(0.2)) };
            if norm <= T::one() {
                f = if last { target } else { f + hh };
                y = y5;
                k1 = k7;
                if !last || fac < T::one() {
                    h = hh * fac;
                }
            } else {
                h = hh * fac.min(T::one());
                if h.abs() <= T::lit(16.0) * T::epsilon() * f.abs().max(T::one()) {
                    return Err(Error::StepUnderflow { f: f.as_f64() });
                }
            }
        }
        out.push(StateVector { f: target, state: y });
    }
    Ok(out)
}

/// Fixed-step fifth-order integration, used to check the convergence order.
pub fn integrate_fixed<T: Scalar, S: OdeSystem<T>>(sys: &S, y0: [T; 6], f0: T, f1: T, n: usize) -> Result<[T; 6]> {
    if n == 0 {
        return Err(Error::Domain("need at least one step".into()));
    }
    let h = (f1 - f0) / T::lit(n as f64);
    let mut y = y0;
    let mut f = f0;
    for i in 0..n {
        let k1 = sys.derivative(f, &y)?;
        y = step(sys, f, &y, k1, h)?.0;
        f = f0 + h * T::lit((i + 1) as f64);
    }
    Ok(y)
}
