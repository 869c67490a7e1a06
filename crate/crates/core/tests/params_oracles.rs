use lindstedt::lp::legendre_terms;
use lindstedt::params::*;
use lindstedt::series::{AmplitudeKey, AngleKey, EtaPoly, EvalPoint, Parity, TrigSeries, Truncation};
use lindstedt::validation::LocalErtbp;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

const MU_SE: f64 = 3.040423398444176e-6;
const MU_EM: f64 = 0.0121505856;

/// Net in-line force of the rotating problem at barycentric `x`, primaries at `mu` and `mu - 1`.
fn axial_force(mu: f64, x: f64) -> f64 {
    let d1 = x - mu;
    let d2 = x - mu + 1.0;
    x - (1.0 - mu) * d1 / d1.abs().powi(3) - mu * d2 / d2.abs().powi(3)
}

fn gamma_by_bisection(mu: f64, point: LibrationPoint) -> f64 {
    let pos = |g: f64| match point {
        LibrationPoint::L1 => mu - 1.0 + g,
        LibrationPoint::L2 => mu - 1.0 - g,
        LibrationPoint::L3 => mu + g,
    };
    let (mut lo, mut hi) = match point {
        LibrationPoint::L3 => (0.5, 1.5),
        LibrationPoint::L1 => (1e-8, 1.0 - 1e-8),
        LibrationPoint::L2 => (1e-8, 2.0),
    };
    let f_lo = axial_force(mu, pos(lo));
    assert!(f_lo.signum() != axial_force(mu, pos(hi)).signum(), "oracle bracket for {point} at mu={mu}");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if axial_force(mu, pos(mid)).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn gamma_matches_force_balance() {
    for mu in [1e-9, MU_SE, 1e-3, MU_EM, 0.1, 0.3] {
        for point in [LibrationPoint::L1, LibrationPoint::L2, LibrationPoint::L3] {
            let g = solve_gamma(mu, point).unwrap();
            let oracle = gamma_by_bisection(mu, point);
            assert!((g - oracle).abs() < 1e-12 * oracle, "{point} mu={mu}: {g} vs {oracle}");
            let (p, _) = gamma_quintic(mu, point, g);
            assert!(p.abs() < 1e-13, "{point} mu={mu}: residual {p:e}");
        }
    }
}

#[test]
fn quoted_gamma_values() {
    let g = solve_gamma(MU_SE, LibrationPoint::L1).unwrap();
    assert!((g - 1.0011e-2).abs() < 1e-6);
    let g = solve_gamma(MU_EM, LibrationPoint::L2).unwrap();
    assert!((g - 0.1678).abs() < 1e-4);
    let g = solve_gamma(1e-9, LibrationPoint::L1).unwrap();
    let hill = (1e-9f64 / 3.0).cbrt();
    assert!((g / hill - 1.0).abs() < 0.01);
    assert!((hill - 6.934e-4).abs() < 1e-7);
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// `c_n` evaluated exactly in rational arithmetic from the same `mu` and `gamma`.
fn c_exact(mu: f64, point: LibrationPoint, gamma: f64, n: usize) -> f64 {
    let (mu, g) = (rational(mu), rational(gamma));
    let one = BigRational::one();
    let sgn = if n % 2 == 0 { one.clone() } else { -one.clone() };
    let pow = |b: &BigRational| num_traits::pow(b.clone(), n + 1);
    let num = match point {
        LibrationPoint::L1 => mu.clone() + sgn * (one.clone() - mu) * pow(&(g.clone() / (one.clone() - g.clone()))),
        LibrationPoint::L2 => sgn.clone() * mu.clone() + sgn * (one.clone() - mu) * pow(&(g.clone() / (one.clone() + g.clone()))),
        LibrationPoint::L3 => sgn * ((one.clone() - mu.clone()) + mu * pow(&(g.clone() / (one.clone() + g.clone())))),
    };
    (num / (g.clone() * g.clone() * g)).to_f64().unwrap()
}

#[test]
fn c_coefficients_in_exact_arithmetic() {
    for (mu, point) in [(MU_SE, LibrationPoint::L1), (MU_EM, LibrationPoint::L2), (0.3, LibrationPoint::L3)] {
        let g = solve_gamma(mu, point).unwrap();
        let c = c_coeffs(mu, point, g, 20).unwrap();
        for (n, cn) in c.iter().enumerate().skip(2) {
            let exact = c_exact(mu, point, g, n);
            assert!((cn - exact).abs() <= 1e-12 * exact.abs(), "{point} c{n}: {cn} vs {exact}");
        }
    }
    let ctx = LibrationContext::new(MU_SE, LibrationPoint::L1).unwrap();
    assert!((ctx.c2() - 4.0611).abs() < 1e-4);
}

#[test]
fn quoted_linear_constants() {
    let ctx = LibrationContext::new(MU_SE, LibrationPoint::L1).unwrap();
    let l = ctx.linear;
    for (v, want) in [(l.omega0, 2.0864), (l.nu0, 2.0152), (l.lambda0, 2.5327), (l.kappa1, -3.2293)] {
        assert!((v - want).abs() < 1e-4, "{v} vs {want}");
    }
    let k = ctx.coupling(CouplingCase::XToZ);
    assert!(k.d0000 < 0.0);
    assert!((k.d0000 - (l.nu0 * l.nu0 - l.omega0 * l.omega0)).abs() < 1e-12);
}

fn single(parity: Parity, idx: usize, trunc: Truncation) -> TrigSeries<f64> {
    let mut ts = TrigSeries::new(parity, trunc);
    ts.add_term(AmplitudeKey::unit(idx), AngleKey::unit(idx), &EtaPoly::one());
    ts
}

// The truncated Legendre sums reproduce the exact local force at small distances.
#[test]
fn legendre_sums_match_exact_force() {
    for (mu, point) in [(MU_SE, LibrationPoint::L1), (MU_EM, LibrationPoint::L2), (MU_EM, LibrationPoint::L3)] {
        let ctx = LibrationContext::new(mu, point).unwrap();
        let sys = LocalErtbp { frame: ctx.frame(), mu, e: 0.0 };
        let order = 16;
        let tr = Truncation::new(order, 0);
        let x = single(Parity::Cos, 0, tr);
        let y = single(Parity::Sin, 1, tr);
        let z = single(Parity::Cos, 2, tr);
        let (st, sr) = legendre_terms(&ctx, &x, &y, &z, 20, order).unwrap();
        let c2 = ctx.c2();
        for p in [[0.05, 0.0, 0.0], [-0.04, 0.03, 0.02], [0.01, -0.05, 0.06]] {
            let r = |v: f64| Complex::new(v, 0.0);
            let ep = EvalPoint {
                alpha: [r(p[0]), r(p[1]), r(p[2])],
                e: 0.0,
                eta: 0.0,
                phase: [0.0, std::f64::consts::FRAC_PI_2, 0.0],
                freq: [r(1.0), r(1.0), r(1.0)],
            };
            let (st, sr) = (st.eval(&ep, 0.0).re, sr.eval(&ep, 0.0).re);
            let series = [(1.0 + 2.0 * c2) * p[0] + st, (1.0 - c2) * p[1] + p[1] * sr, -c2 * p[2] + p[2] * sr];
            let exact = sys.accel(0.0, &[p[0], p[1], p[2], 0.0, 0.0, 0.0]).unwrap();
            for k in 0..3 {
                assert!((series[k] - exact[k]).abs() < 1e-11, "{point} {p:?} axis {k}: {} vs {}", series[k], exact[k]);
            }
        }
    }
}
