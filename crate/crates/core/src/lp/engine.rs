use std::collections::BTreeSet;

use num_complex::Complex;

use super::{BuildConfig, EtaMode, SolutionSet};
use crate::bifurcation::BifurcationForm;
use crate::error::{Error, Result};
use crate::params::{CouplingCase, LibrationContext};
use crate::scalar::Scalar;
use crate::series::{AmplitudeKey, AngleKey, EtaPoly, FreqSeries, Parity, TrigSeries, Truncation};

use super::legendre::legendre_terms;

/// Determinants below this magnitude are reported as resonances.
const DET_TOL: f64 = 1e-9;

/// One term per equation: x, y and z.
#[derive(Clone, Debug, PartialEq)]
pub struct Rhs<T> {
    pub p: TrigSeries<T>,
    pub q: TrigSeries<T>,
    pub tau: TrigSeries<T>,
}

impl<T: Scalar> Rhs<T> {
    fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Rhs { p: self.p.sub(&other.p)?, q: self.q.sub(&other.q)?, tau: self.tau.sub(&other.tau)? })
    }

    fn homogeneous(&self, order: u32) -> Self {
        Rhs { p: self.p.homogeneous(order), q: self.q.homogeneous(order), tau: self.tau.homogeneous(order) }
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty() && self.q.is_empty() && self.tau.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.p.max_abs().max(self.q.max_abs()).max(self.tau.max_abs())
    }

    fn get_mut(&mut self, idx: usize) -> &mut TrigSeries<T> {
        match idx {
            0 => &mut self.p,
            1 => &mut self.q,
            _ => &mut self.tau,
        }
    }
}

/// `sum_{i=0}^{order} (-e cos f)^i`, the expansion of `1 / (1 + e cos f)`.
pub fn eccentricity_factor<T: Scalar>(trunc: Truncation, order: u32, with_e: bool) -> TrigSeries<T> {
    let one = TrigSeries::constant(trunc, EtaPoly::one());
    if !with_e {
        return one;
    }
    let mut ecf = TrigSeries::new(Parity::Cos, trunc);
    ecf.add_term(AmplitudeKey::unit(3), AngleKey::unit(3), &EtaPoly::real(-T::one()));
    let mut acc = one.clone();
    let mut pow = one;
    for _ in 0..order {
        pow = pow.mul_upto(&ecf, order).expect("shared truncation");
        acc.add_assign_scaled(&pow, T::one()).expect("shared truncation");
    }
    acc
}

/// Derivative with respect to `f`, with the frequencies taken from the solution.
fn derivative<T: Scalar>(ts: &TrigSeries<T>, sol: &SolutionSet<T>, order: u32) -> TrigSeries<T> {
    let ring = sol.ring();
    let mut out = TrigSeries::new(ts.parity().flip(), ts.trunc());
    let sign = match ts.parity() {
        Parity::Cos => -T::one(),
        Parity::Sin => T::one(),
    };
    let i = Complex::new(T::zero(), T::one());
    for ((m, a), c) in ts.iter() {
        let [s, t, u, r] = a.0;
        let factors = [(s, &sol.omega, Complex::new(T::one(), T::zero())), (t, &sol.nu, Complex::new(T::one(), T::zero())), (u, &sol.lambda, i)];
        for (mult, freq, unit) in factors {
            if mult == 0 {
                continue;
            }
            let scale = unit * T::lit(mult as f64) * sign;
            for (k, w) in freq.iter() {
                let key = *m + *k;
                if key.order() <= order {
                    out.add_term(key, *a, &ring.mul(c, w).scale(scale));
                }
            }
        }
        if r != 0 {
            out.add_term(*m, *a, &c.scale_real(T::lit(r as f64) * sign));
        }
    }
    out
}

/// Left-hand sides `x'' - 2y' - (1+2c2)x`, `y'' + 2x' + (c2-1)y`, `z'' + c2 z` of the current series.
pub fn linear_operator<T: Scalar>(sol: &SolutionSet<T>, order: u32) -> Result<Rhs<T>> {
    let c2 = sol.ctx.c2();
    let one = T::one();
    let two = T::lit(2.0);
    let dx = derivative(&sol.x, sol, order);
    let dy = derivative(&sol.y, sol, order);
    let d2x = derivative(&dx, sol, order);
    let d2y = derivative(&dy, sol, order);
    let d2z = derivative(&derivative(&sol.z, sol, order), sol, order);
    let mut p = d2x;
    p.add_assign_scaled(&dy, -two)?;
    p.add_assign_scaled(&sol.x.truncated(order), -(one + two * c2))?;
    let mut q = d2y;
    q.add_assign_scaled(&dx, two)?;
    q.add_assign_scaled(&sol.y.truncated(order), c2 - one)?;
    let mut tau = d2z;
    tau.add_assign_scaled(&sol.z.truncated(order), c2)?;
    Ok(Rhs { p, q, tau })
}

/// Right-hand sides: the nonlinear and eccentricity terms plus the coupling `eta * Delta * source`.
pub fn nonlinear_terms<T: Scalar>(sol: &SolutionSet<T>, order: u32) -> Result<Rhs<T>> {
    let ctx = &sol.ctx;
    let c2 = ctx.c2();
    let one = T::one();
    let two = T::lit(2.0);
    let tr = sol.trunc();
    let (x, y, z) = (sol.x.truncated(order), sol.y.truncated(order), sol.z.truncated(order));
    let (st, sr) = legendre_terms(ctx, &x, &y, &z, sol.config.n_poly_max, order)?;
    let with_e = sol.config.active[3];
    let rho = eccentricity_factor(tr, order, with_e);
    let apply_rho = |h: TrigSeries<T>, lin: &TrigSeries<T>, k: T| -> Result<TrigSeries<T>> {
        let mut out = if with_e { rho.mul_upto(&h, order)? } else { h };
        out.add_assign_scaled(lin, -k)?;
        Ok(out)
    };
    let kx = one + two * c2;
    let ky = one - c2;
    let mut hx = st;
    hx.add_assign_scaled(&x, kx)?;
    let mut hy = y.mul_upto(&sr, order)?;
    hy.add_assign_scaled(&y, ky)?;
    let mut hz = z.mul_upto(&sr, order)?;
    hz.add_assign_scaled(&z, ky)?;
    let mut rhs = Rhs { p: apply_rho(hx, &x, kx)?, q: apply_rho(hy, &y, ky)?, tau: apply_rho(hz, &z, ky)? };

    let case = sol.case();
    let src = [&x, &y, &z][case.source()];
    let coupling = sol.delta.mul_trig(src)?.scale_poly(&sol.ring().eta()).truncated(order);
    rhs.get_mut(case.target()).add_assign_scaled(&coupling, one)?;
    Ok(rhs)
}

/// Known part of the order-`n` equations, given a solution complete through order `n - 1`.
///
/// Unknown order-`n` quantities are still zero in `sol`, so the order-`n`
/// part of `N - L` is exactly what the new coefficients must balance.
pub fn assemble_rhs<T: Scalar>(sol: &SolutionSet<T>, n: u32) -> Result<Rhs<T>> {
    if n < 2 || sol.completed_order + 1 != n {
        return Err(Error::Contract(format!(
            "order {n} requested but solution is complete through order {}",
            sol.completed_order
        )));
    }
    if n > sol.config.order {
        return Err(Error::Contract(format!("order {n} beyond truncation {}", sol.config.order)));
    }
    let nl = nonlinear_terms(sol, n)?;
    let lin = linear_operator(sol, n)?;
    Ok(nl.sub(&lin)?.homogeneous(n))
}

/// Order-one solution of one mode: generator, frequency and `dw/dfreq`.
struct Mode<T> {
    g: [EtaPoly<T>; 3],
    w: Complex<T>,
    jac: Complex<T>,
}

fn modes<T: Scalar>(sol: &SolutionSet<T>) -> [Mode<T>; 3] {
    let lin = sol.ctx.linear;
    let k3 = sol.coupling.kappa3;
    let eta = sol.ring().eta();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let c = |v: Complex<T>| EtaPoly::constant(v);
    let r = |v: T| EtaPoly::real(v);
    let g = match sol.case() {
        CouplingCase::XToZ => [
            [c(one), r(lin.kappa1), eta.clone()],
            [c(zero), c(zero), c(one)],
            [c(one), c(i * lin.kappa2), eta.scale_real(k3)],
        ],
        CouplingCase::YToZ => [
            [c(one), r(lin.kappa1), eta.clone()],
            [c(zero), c(zero), c(one)],
            [c(one), c(i * lin.kappa2), eta.scale(i * k3)],
        ],
        CouplingCase::ZToY => [
            [c(one), r(lin.kappa1), c(zero)],
            [eta.clone(), eta.scale_real(k3), c(one)],
            [c(one), c(i * lin.kappa2), c(zero)],
        ],
    };
    let [g0, g1, g2] = g;
    [
        Mode { g: g0, w: Complex::new(lin.omega0, T::zero()), jac: one },
        Mode { g: g1, w: Complex::new(lin.nu0, T::zero()), jac: one },
        Mode { g: g2, w: i * lin.lambda0, jac: i },
    ]
}

fn init_order_one<T: Scalar>(sol: &mut SolutionSet<T>) {
    let ms = modes(sol);
    for (r, m) in ms.iter().enumerate() {
        if !sol.config.active[r] {
            continue;
        }
        let amp = AmplitudeKey::unit(r);
        let ang = AngleKey::unit(r);
        sol.x.add_term(amp, ang, &m.g[0]);
        sol.y.add_term(amp, ang, &m.g[1]);
        sol.z.add_term(amp, ang, &m.g[2]);
    }
    sol.completed_order = 1;
}

fn scalar_of<T: Scalar>(p: &EtaPoly<T>) -> Result<Complex<T>> {
    match p.degree() {
        None => Ok(Complex::new(T::zero(), T::zero())),
        Some(0) => Ok(p.coeff(0)),
        Some(_) => Err(Error::Internal("expected an eta-independent matrix entry".into())),
    }
}

fn check_det<T: Scalar>(det: Complex<T>, angle: AngleKey) -> Result<Complex<T>> {
    if det.norm() < T::lit(DET_TOL) {
        return Err(Error::NearResonance { angle: angle.0, det: det.norm().as_f64() });
    }
    Ok(det)
}

/// Solves `[[a, b], [c, d]] [u; v] = [p; q]` with scalar matrix and polynomial right side.
fn solve2<T: Scalar>(
    m: [[Complex<T>; 2]; 2],
    p: &EtaPoly<T>,
    q: &EtaPoly<T>,
    angle: AngleKey,
) -> Result<(EtaPoly<T>, EtaPoly<T>)> {
    let det = check_det(m[0][0] * m[1][1] - m[0][1] * m[1][0], angle)?;
    let inv = Complex::new(T::one(), T::zero()) / det;
    let u = p.scale(m[1][1] * inv).sub(&q.scale(m[0][1] * inv));
    let v = q.scale(m[0][0] * inv).sub(&p.scale(m[1][0] * inv));
    Ok((u, v))
}

/// Fills in the order-`n` coefficients, frequency corrections and `Delta` corrections from `rhs`.
///
/// At the resonant angles `theta_r` the equations are made solvable by the
/// frequency correction of mode `r`, plus the `Delta` correction for the mode
/// carrying the coupling. The normalizations are: no `x` term at the in-plane
/// and hyperbolic resonances, and no term in the coupled coordinate at the
/// resonance that fixes `Delta`.
pub fn solve_order_n<T: Scalar>(sol: &mut SolutionSet<T>, rhs: &Rhs<T>, n: u32) -> Result<()> {
    if sol.completed_order + 1 != n {
        return Err(Error::Contract(format!("cannot solve order {n} after order {}", sol.completed_order)));
    }
    let ring = sol.ring();
    let case = sol.case();
    let c2 = Complex::new(sol.ctx.c2(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let two = Complex::new(T::lit(2.0), T::zero());
    let ms = modes(sol);
    let det_mode = match case {
        CouplingCase::XToZ | CouplingCase::YToZ => 0,
        CouplingCase::ZToY => 1,
    };
    let eta_d0 = ring.eta().scale_real(sol.coupling.d0000);
    let tr = sol.trunc();
    let mut dfreq = [FreqSeries::new(tr), FreqSeries::new(tr), FreqSeries::new(tr)];
    let mut ddelta = FreqSeries::new(tr);
    let mut undetermined = false;

    let mut keys = BTreeSet::new();
    for s in [&rhs.p, &rhs.q, &rhs.tau] {
        for ((m, a), _) in s.iter() {
            if m.order() != n {
                return Err(Error::Contract(format!("right-hand side term of order {} at order {n}", m.order())));
            }
            keys.insert((*m, *a));
        }
    }
    let resonant = |a: AngleKey| (0..3).find(|&r| a == AngleKey::unit(r));

    let mut new_terms: Vec<(AmplitudeKey, AngleKey, [EtaPoly<T>; 3])> = Vec::new();
    for pass in 0..2 {
        for &(m, a) in &keys {
            let r_mode = resonant(a);
            if (pass == 0) != (r_mode == Some(det_mode)) {
                continue;
            }
            let p = rhs.p.coeff(m, a);
            let q = rhs.q.coeff(m, a);
            let tau = rhs.tau.coeff(m, a);
            let [s, t, u, r] = a.0.map(|v| T::lit(v as f64));
            let w = ms[0].w * s + ms[1].w * t + ms[2].w * u + Complex::new(r, T::zero());
            let a11 = -w * w - one - two * c2;
            let a12 = -two * w;
            let a22 = -w * w + c2 - one;
            let a33 = c2 - w * w;
            let zero = EtaPoly::zero();

            let Some(rm) = r_mode else {
                // Ordinary angle: 2x2 in-plane block plus the vertical equation.
                let (xv, yv, zv) = match case {
                    CouplingCase::XToZ | CouplingCase::YToZ => {
                        let (xv, yv) = solve2([[a11, a12], [a12, a22]], &p, &q, a)?;
                        let s = if case == CouplingCase::XToZ { &xv } else { &yv };
                        let inv = one / check_det(a33, a)?;
                        let zv = tau.add(&ring.mul(&eta_d0, s)).scale(inv);
                        (xv, yv, zv)
                    }
                    CouplingCase::ZToY => {
                        let zv = tau.scale(one / check_det(a33, a)?);
                        let q2 = q.add(&ring.mul(&eta_d0, &zv));
                        let (xv, yv) = solve2([[a11, a12], [a12, a22]], &p, &q2, a)?;
                        (xv, yv, zv)
                    }
                };
                new_terms.push((m, a, [xv, yv, zv]));
                continue;
            };

            let key = m.checked_sub(AmplitudeKey::unit(rm)).ok_or_else(|| {
                Error::Consistency(format!("resonant term at {a} with amplitude key {m} has no frequency slot"))
            })?;
            let md = &ms[rm];
            let fx = md.g[0].scale(md.w * two).add(&md.g[1].scale(two)).scale(-md.jac);
            let fy = md.g[0].scale(two).add(&md.g[1].scale(md.w * two)).scale(-md.jac);
            let fz = md.g[2].scale(md.w * two).scale(-md.jac);
            let scale = p.max_abs().max(q.max_abs()).max(tau.max_abs());

            let (xv, yv, zv, dv, del) = match (case, rm) {
                (CouplingCase::XToZ | CouplingCase::YToZ, 0 | 2) => {
                    let (yv, dv) = solve2([[a12, scalar_of(&fx)?], [a22, scalar_of(&fy)?]], &p, &q, a)?;
                    let src = if case == CouplingCase::XToZ { zero.clone() } else { yv.clone() };
                    let gs = scalar_of(&md.g[case.source()])?;
                    let known = ring.mul(&fz, &dv).sub(&ring.mul(&eta_d0, &src));
                    if rm == 0 {
                        // Vertical equation with z = 0 fixes Delta.
                        let num = known.sub(&tau);
                        let (d, free) = ring.div_eta(&num, scale)?;
                        undetermined |= free;
                        let d = d.scale(one / gs);
                        (zero.clone(), yv, zero.clone(), dv, Some(d))
                    } else {
                        let d = ddelta.get(key);
                        let coupled = ring.mul(&ring.eta(), &d).scale(gs);
                        let zv = tau.sub(&known).add(&coupled).scale(one / check_det(a33, a)?);
                        (zero.clone(), yv, zv, dv, None)
                    }
                }
                (CouplingCase::XToZ | CouplingCase::YToZ, _) => {
                    let (xv, yv) = solve2([[a11, a12], [a12, a22]], &p, &q, a)?;
                    let src = if case == CouplingCase::XToZ { &xv } else { &yv };
                    let f = check_det(scalar_of(&fz)?, a)?;
                    let dv = tau.add(&ring.mul(&eta_d0, src)).scale(one / f);
                    (xv, yv, zero.clone(), dv, None)
                }
                (CouplingCase::ZToY, 1) => {
                    let f = check_det(scalar_of(&fz)?, a)?;
                    let dv = tau.scale(one / f);
                    let yv = p.sub(&ring.mul(&fx, &dv)).scale(one / check_det(a12, a)?);
                    let num = yv.scale(a22).add(&ring.mul(&fy, &dv)).sub(&q);
                    let (d, free) = ring.div_eta(&num, scale)?;
                    undetermined |= free;
                    (zero.clone(), yv, zero.clone(), dv, Some(d))
                }
                (CouplingCase::ZToY, _) => {
                    let zv = tau.scale(one / check_det(a33, a)?);
                    let q2 = q.add(&ring.mul(&eta_d0, &zv));
                    let (yv, dv) = solve2([[a12, scalar_of(&fx)?], [a22, scalar_of(&fy)?]], &p, &q2, a)?;
                    (zero.clone(), yv, zv, dv, None)
                }
            };
            dfreq[rm].add_term(key, &dv);
            if let Some(d) = del {
                ddelta.add_term(key, &d);
            }
            new_terms.push((m, a, [xv, yv, zv]));
        }
    }

    for (m, a, [xv, yv, zv]) in new_terms {
        sol.x.add_term(m, a, &xv);
        sol.y.add_term(m, a, &yv);
        sol.z.add_term(m, a, &zv);
    }
    let [d0, d1, d2] = dfreq;
    sol.omega = sol.omega.add(&d0)?;
    sol.nu = sol.nu.add(&d1)?;
    sol.lambda = sol.lambda.add(&d2)?;
    sol.delta = sol.delta.add(&ddelta)?;
    sol.delta_undetermined |= undetermined;
    sol.completed_order = n;
    Ok(())
}

/// Builds the full solution through `config.order`.
pub fn build_solution<T: Scalar>(
    ctx: &LibrationContext<T>,
    case: CouplingCase,
    config: BuildConfig<T>,
) -> Result<SolutionSet<T>> {
    config.validate()?;
    let mut sol = SolutionSet::empty(ctx, case, config);
    init_order_one(&mut sol);
    for n in 2..=config.order {
        let rhs = assemble_rhs(&sol, n)?;
        solve_order_n(&mut sol, &rhs, n)?;
    }
    Ok(sol)
}

/// Reads the quadratic-in-amplitude part of `Delta` as a bifurcation form.
pub fn extract_bifurcation_coeffs<T: Scalar>(sol: &SolutionSet<T>) -> Result<BifurcationForm<T>> {
    let EtaMode::Symbolic { degree } = sol.config.eta else {
        return Err(Error::Contract("bifurcation coefficients need an eta-symbolic solution".into()));
    };
    if sol.completed_order < 3 {
        return Err(Error::Contract("bifurcation coefficients need order 3".into()));
    }
    let need = match sol.case() {
        CouplingCase::ZToY => 2,
        _ => 4,
    };
    if degree < need {
        return Err(Error::Contract(format!("eta degree {degree} below the {need} needed")));
    }
    let d = |k: [u8; 4]| sol.delta.get(AmplitudeKey(k));
    let (d20, d02, d0020, d0002) = (d([2, 0, 0, 0]), d([0, 2, 0, 0]), d([0, 0, 2, 0]), d([0, 0, 0, 2]));
    let tol = T::lit(1e-9);
    let scale = [&d20, &d02, &d0020, &d0002].iter().fold(T::one(), |m, p| m.max(p.max_abs()));
    for (name, p) in [("2000", &d20), ("0200", &d02), ("0020", &d0020), ("0002", &d0002)] {
        if p.parity_content(true) > tol * scale {
            return Err(Error::Consistency(format!("odd eta powers in Delta_{name}")));
        }
        if p.coeffs().iter().any(|c| c.im.abs() > tol * scale) {
            return Err(Error::Consistency(format!("complex coefficient in Delta_{name}")));
        }
    }
    let re = |p: &EtaPoly<T>, k: usize| p.coeff(k).re;
    let mut coeffs = [T::zero(); 9];
    match sol.case() {
        CouplingCase::XToZ | CouplingCase::YToZ => {
            coeffs[0] = re(&d20, 4);
            coeffs[1] = re(&d0020, 4);
            coeffs[2] = re(&d20, 2);
            coeffs[3] = re(&d02, 2);
            coeffs[4] = re(&d0020, 2);
            coeffs[5] = re(&d20, 0);
            coeffs[6] = re(&d02, 0);
            coeffs[7] = re(&d0020, 0);
            coeffs[8] = re(&d0002, 0);
        }
        CouplingCase::ZToY => {
            coeffs[0] = re(&d02, 2);
            coeffs[1] = re(&d20, 0);
            coeffs[2] = re(&d02, 0);
            coeffs[3] = re(&d0020, 0);
            coeffs[4] = re(&d0002, 0);
        }
    }
    Ok(BifurcationForm {
        case: sol.case(),
        point: sol.ctx.point,
        mu: sol.ctx.mu,
        coeffs,
        constant: sol.coupling.d0000,
    })
}
