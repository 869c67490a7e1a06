use crate::error::Result;
use crate::params::LibrationContext;
use crate::scalar::Scalar;
use crate::series::{EtaPoly, TrigSeries};

/// `T_0..=T_n` and `R_0..R_{n-1}` built from the three-term recurrences, truncated at amplitude `order`.
///
/// `T_k = rho^k P_k(x / rho)` with `rho^2 = x^2 + y^2 + z^2`; the `R_k` carry the
/// derivative terms that multiply `y` and `z`.
pub fn legendre_polys<T: Scalar>(
    x: &TrigSeries<T>,
    y: &TrigSeries<T>,
    z: &TrigSeries<T>,
    n: usize,
    order: u32,
) -> Result<(Vec<TrigSeries<T>>, Vec<TrigSeries<T>>)> {
    let tr = x.trunc();
    let rho2 = x.mul_upto(x, order)?.add(&y.mul_upto(y, order)?)?.add(&z.mul_upto(z, order)?)?;
    let one = TrigSeries::constant(tr, EtaPoly::one());
    let mut t = vec![one.clone(), x.truncated(order)];
    let mut r = vec![one.neg(), x.truncated(order).scale_real(T::lit(-3.0))];
    for k in 2..=n {
        let kf = k as f64;
        let mut tk = x.mul_upto(&t[k - 1], order)?.scale_real(T::lit((2.0 * kf - 1.0) / kf));
        tk.add_assign_scaled(&rho2.mul_upto(&t[k - 2], order)?, T::lit(-(kf - 1.0) / kf))?;
        t.push(tk);
    }
    for k in 2..n {
        let kf = k as f64;
        let mut rk = x.mul_upto(&r[k - 1], order)?.scale_real(T::lit((2.0 * kf + 3.0) / (kf + 2.0)));
        rk.add_assign_scaled(&t[k], T::lit(-(2.0 * kf + 2.0) / (kf + 2.0)))?;
        rk.add_assign_scaled(&rho2.mul_upto(&r[k - 2], order)?, T::lit(-(kf + 1.0) / (kf + 2.0)))?;
        r.push(rk);
    }
    t.truncate(n + 1);
    r.truncate(n.max(1));
    Ok((t, r))
}

/// The two nonlinear sums `sum c_{n+1} (n+1) T_n` and `sum c_{n+1} R_{n-1}` over `n = 2..=n_poly`.
///
/// Degrees above the amplitude order cannot contribute, so `n_poly` is capped at `order`.
pub fn legendre_terms<T: Scalar>(
    ctx: &LibrationContext<T>,
    x: &TrigSeries<T>,
    y: &TrigSeries<T>,
    z: &TrigSeries<T>,
    n_poly: usize,
    order: u32,
) -> Result<(TrigSeries<T>, TrigSeries<T>)> {
    let n = n_poly.min(ctx.n_poly_max()).min(order as usize).max(2);
    let (t, r) = legendre_polys(x, y, z, n, order)?;
    let tr = x.trunc();
    let mut st = TrigSeries::new(x.parity(), tr);
    let mut sr = TrigSeries::new(x.parity(), tr);
    for k in 2..=n {
        st.add_assign_scaled(&t[k], ctx.c[k + 1] * T::lit((k + 1) as f64))?;
        sr.add_assign_scaled(&r[k - 1], ctx.c[k + 1])?;
    }
    Ok((st, sr))
}
