use lindstedt::lp::{build_solution, BuildConfig};
use lindstedt::params::{CouplingCase, LibrationContext, LibrationPoint};
use lindstedt::series::*;
use num_complex::Complex;
use proptest::prelude::*;

const TR: Truncation = Truncation { order: 20, eta_cap: 8 };

fn term() -> impl Strategy<Value = (AmplitudeKey, AngleKey, Vec<i32>)> {
    (
        prop::array::uniform4(0u8..=2),
        prop::array::uniform4(-2i8..=2),
        prop::collection::vec(-8i32..=8, 1..=3),
    )
        .prop_map(|(m, a, c)| (AmplitudeKey(m), AngleKey(a), c))
}

/// Up to five terms with small integer (so exactly representable) coefficients.
fn series() -> impl Strategy<Value = TrigSeries<f64>> {
    (prop::bool::ANY, prop::collection::vec(term(), 1..=5)).prop_map(|(sin, terms)| {
        let mut ts = TrigSeries::new(if sin { Parity::Sin } else { Parity::Cos }, TR);
        for (m, a, c) in terms {
            let poly = EtaPoly::from_coeffs(c.into_iter().map(|v| Complex::new(v as f64, 0.0)).collect());
            ts.add_term(m, a, &poly);
        }
        ts
    })
}

fn same_parity() -> impl Strategy<Value = (TrigSeries<f64>, TrigSeries<f64>, TrigSeries<f64>)> {
    (series(), series(), series()).prop_map(|(a, b, c)| {
        let p = a.parity();
        let fix = |s: TrigSeries<f64>| {
            if s.parity() == p {
                s
            } else {
                let mut out = TrigSeries::new(p, TR);
                for ((m, k), v) in s.iter() {
                    out.add_term(*m, *k, v);
                }
                out
            }
        };
        (a, fix(b), fix(c))
    })
}

fn point() -> EvalPoint<f64> {
    let r = |v: f64| Complex::new(v, 0.0);
    EvalPoint {
        alpha: [r(0.7), r(-0.4), r(0.3)],
        e: 0.3,
        eta: 0.6,
        phase: [0.1, -0.2, 0.3],
        freq: [r(2.08), r(2.01), r(2.53)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn product_evaluates_to_product_of_values(a in series(), b in series()) {
        let p = point();
        let f = 0.37;
        let lhs = a.mul(&b).unwrap().eval(&p, f);
        let rhs = a.eval(&p, f) * b.eval(&p, f);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn addition_is_associative_bitwise((a, b, c) in same_parity()) {
        let l = a.add(&b).unwrap().add(&c).unwrap();
        let r = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn product_commutes_and_distributes((a, b, c) in same_parity()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(l.max_abs_diff(&r) == 0.0);
    }

    #[test]
    fn stored_angles_are_canonical(a in series(), b in series()) {
        for ((_, k), _) in a.mul(&b).unwrap().iter() {
            prop_assert!(k.is_canonical());
        }
    }

    #[test]
    fn derivative_matches_finite_difference(a in series(), f in -1.0f64..1.0) {
        let p = point();
        let h = 1e-5;
        let fd = (a.eval(&p, f + h) - a.eval(&p, f - h)) / (2.0 * h);
        let d = a.eval_deriv(&p, f, 1);
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0));
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn cosine_powers_match_binomial_expansion() {
    let five = reduce_cos_power::<f64>(5, TR);
    let c = |r: i8| five.coeff(AmplitudeKey::ZERO, AngleKey::new(0, 0, 0, r)).coeff(0).re;
    assert_eq!((c(1), c(3), c(5)), (10.0 / 16.0, 5.0 / 16.0, 1.0 / 16.0));
    assert_eq!(five.len(), 3);
    for i in 0..=9u32 {
        let ts = reduce_cos_power::<f64>(i, TR);
        // cos^i f = 2^-i sum_k C(i,k) cos((i-2k) f)
        let mut want = std::collections::BTreeMap::new();
        for k in 0..=i {
            let r = (i as i32 - 2 * k as i32).unsigned_abs() as i8;
            *want.entry(r).or_insert(0.0) += binomial(i, k) / 2f64.powi(i as i32);
        }
        assert_eq!(ts.len(), want.len(), "i={i}");
        for (r, v) in want {
            assert_eq!(ts.coeff(AmplitudeKey::ZERO, AngleKey::new(0, 0, 0, r)).coeff(0).re, v, "i={i} r={r}");
        }
    }
}

#[test]
fn hyperbolic_mode_evaluates_to_cosh() {
    let ctx = LibrationContext::new(3.040423398444176e-6, LibrationPoint::L1).unwrap();
    let sol = build_solution(&ctx, CouplingCase::XToZ, BuildConfig::numeric(1, 0.0)).unwrap();
    let lin = ctx.linear;
    let r = |v: f64| Complex::new(v, 0.0);
    let (a1, a3) = (0.02, 0.001);
    let p = EvalPoint {
        alpha: [r(a1), r(0.0), r(a3)],
        e: 0.0,
        eta: 0.0,
        phase: [0.0; 3],
        freq: [r(lin.omega0), r(lin.nu0), r(lin.lambda0)],
    };
    for f in [0.0, 0.4, 1.3, 2.9] {
        let v = sol.x.eval(&p, f);
        let want = a1 * (lin.omega0 * f).cos() + a3 * (lin.lambda0 * f).cosh();
        assert!((v.re - want).abs() < 1e-14 * want.abs().max(1.0) && v.im.abs() < 1e-14, "{f}: {v} vs {want}");
    }
}
