use lindstedt::bifurcation::{solve_eta, EvalPoint as FormPoint};
use lindstedt::lp::{build_solution, extract_bifurcation_coeffs, BuildConfig, SolutionSet};
use lindstedt::orbit::*;
use lindstedt::params::*;
use lindstedt::validation::*;
use lindstedt::Error;
use std::f64::consts::PI;

const MU_SE: f64 = 3.040423398444176e-6;
const E_SE: f64 = 0.01671022;

fn ctx() -> LibrationContext<f64> {
    LibrationContext::new(MU_SE, LibrationPoint::L1).unwrap()
}

fn grid(span: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| span * i as f64 / n as f64).collect()
}

/// Full-order `eta` from the smallest positive order-3 root.
fn bifurcated(case: CouplingCase, order: u32, p: OrbitParams<f64>) -> (SolutionSet<f64>, OrbitParams<f64>) {
    let ctx = ctx();
    let form = extract_bifurcation_coeffs(&build_solution(&ctx, case, BuildConfig::symbolic(3)).unwrap()).unwrap();
    let pt = FormPoint::new(p.alpha1, p.alpha2, p.alpha3_sq(), p.e);
    let eta3 = *solve_eta(&form, &pt).unwrap().positive().first().expect("bifurcation at these amplitudes");
    let sol = build_solution(&ctx, case, BuildConfig::symbolic(order)).unwrap();
    let eta = refine_eta(&sol, &p, eta3).unwrap();
    (sol, p.with_eta(eta))
}

// Halving the amplitude divides the residual by 2^4.
#[test]
fn third_order_residual_is_fourth_order_in_amplitude() {
    let cfg = BuildConfig::numeric(3, 0.0).with_active([true, false, false, false]);
    let sol = build_solution(&ctx(), CouplingCase::XToZ, cfg).unwrap();
    let r = |a1: f64| residual_check(&sol, &OrbitParams::new(a1, 0.0, 0.0, 0.0, 0.0), &grid(2.0 * PI, 100)).unwrap();
    let ratio = r(0.05) / r(0.025);
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    assert!(r(0.05) < 1e3 * 0.05f64.powi(4));
}

#[test]
fn lissajous_residual_decays_with_order() {
    let p = OrbitParams::new(0.01, 0.01, 0.0, E_SE, 0.0);
    let mut last = f64::INFINITY;
    for n in [3, 5, 7] {
        let cfg = BuildConfig::numeric(n, 0.0).with_active([true, true, false, true]);
        let sol = build_solution(&ctx(), CouplingCase::XToZ, cfg).unwrap();
        let r = residual_check(&sol, &p, &grid(2.0 * PI, 60)).unwrap();
        assert!(r * 10.0 <= last, "order {n}: {r:e} after {last:e}");
        last = r;
    }
}

#[test]
fn transit_orbit_is_real_and_converges() {
    let p = OrbitParams::new(0.01, 0.0, 1e-3, E_SE, 0.0).transit();
    let mut last = f64::INFINITY;
    for n in [3, 5] {
        let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(n, 0.0)).unwrap();
        let traj = sample_trajectory(&sol, &p, &grid(1.0, 20)).unwrap();
        assert_eq!(traj.len(), 21);
        let r = residual_check(&sol, &p, &grid(1.0, 40)).unwrap();
        assert!(r * 100.0 < last);
        last = r;
    }
    // the hyperbolic part grows: transit, not bounded
    let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(3, 0.0)).unwrap();
    let x0 = evaluate_state(&sol, &p, 0.0).unwrap().state[0];
    let x1 = evaluate_state(&sol, &p, 1.0).unwrap().state[0];
    assert!((x1 - x0).abs() > 1e-3);
}

#[test]
fn halo_reference_inputs() {
    for (a1, a2) in [(0.15, 0.0), (0.15, 0.04)] {
        let (sol, p) = bifurcated(CouplingCase::XToZ, 5, OrbitParams::new(a1, a2, 0.0, E_SE, 0.0));
        let traj = sample_trajectory(&sol, &p, &grid(2.0 * PI, 50)).unwrap();
        assert!(traj.iter().any(|s| s.state[2].abs() > 0.05), "no out-of-plane motion");
        assert!(delta_value(&sol, &p).unwrap().abs() <= CONSTRAINT_TOL);
        let class = classify_orbit(&p, CouplingCase::XToZ, Some(delta_value(&sol, &p).unwrap())).unwrap();
        assert_eq!(class, if a2 == 0.0 { OrbitClass::Halo } else { OrbitClass::QuasiHalo });
    }
}

#[test]
fn axial_reference_inputs() {
    for (case, a1, a2, class) in [
        (CouplingCase::ZToY, 0.0, 1.0, OrbitClass::Axial),
        (CouplingCase::ZToY, 0.005, 1.0, OrbitClass::QuasiAxial),
        (CouplingCase::YToZ, 0.28, 0.0, OrbitClass::Axial),
        (CouplingCase::YToZ, 0.2, 0.0, OrbitClass::Axial),
    ] {
        let (sol, p) = bifurcated(case, 3, OrbitParams::new(a1, a2, 0.0, E_SE, 0.0));
        let traj = sample_trajectory(&sol, &p, &grid(2.0 * PI, 50)).unwrap();
        assert_eq!(traj.len(), 51);
        assert_eq!(classify_orbit(&p, case, Some(delta_value(&sol, &p).unwrap())).unwrap(), class);
    }
}

#[test]
fn halo_is_periodic_and_its_residual_falls_with_order() {
    let mut last = f64::INFINITY;
    for n in [3, 5, 7] {
        let (sol, p) = bifurcated(CouplingCase::XToZ, n, OrbitParams::new(0.15, 0.0, 0.0, 0.0, 0.0));
        let w = eval_point(&sol, &p).unwrap().freq[0].re;
        let per = 2.0 * PI / w;
        for f in [0.0, 0.7, 2.1] {
            let a = evaluate_state(&sol, &p, f).unwrap().state;
            let b = evaluate_state(&sol, &p, f + per).unwrap().state;
            assert!(a.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-12));
        }
        let r = residual_check(&sol, &p, &grid(per, 60)).unwrap();
        assert!(r < last / 4.0, "order {n}: {r:e} after {last:e}");
        last = r;
    }
}

#[test]
fn mirror_in_eta() {
    let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::symbolic(5).with_active([true, false, true, true])).unwrap();
    for eta in [0.3, 1.1] {
        let p = OrbitParams::new(0.15, 0.0, 0.002, E_SE, eta);
        let (up, down) = (eval_point(&sol, &p).unwrap(), eval_point(&sol, &p.with_eta(-eta)).unwrap());
        for f in [0.0, 0.4, 1.9] {
            assert!((sol.x.eval(&up, f) - sol.x.eval(&down, f)).norm() < 1e-12);
            assert!((sol.y.eval(&up, f) - sol.y.eval(&down, f)).norm() < 1e-12);
            assert!((sol.z.eval(&up, f) + sol.z.eval(&down, f)).norm() < 1e-12);
        }
    }
}

#[test]
fn constraint_and_contract_errors() {
    let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::symbolic(3)).unwrap();
    let p = OrbitParams::new(0.15, 0.0, 0.0, E_SE, 0.3);
    assert!(matches!(evaluate_state(&sol, &p, 0.0), Err(Error::Constraint { .. })));
    let num = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(3, 0.5)).unwrap();
    assert!(matches!(eval_point(&num, &p), Err(Error::Contract(_))));
    assert!(refine_eta(&num, &p, 0.5).is_err());
    let planar = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(3, 0.0).with_active([true, false, false, false])).unwrap();
    assert!(eval_point(&planar, &OrbitParams::new(0.1, 0.1, 0.0, 0.0, 0.0)).is_err());
    assert!(eval_point(&planar, &OrbitParams::new(0.1, 0.0, 0.0, 1.0, 0.0)).unwrap_err().is_domain());
}

#[test]
fn equilibrium_and_classes() {
    let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(3, 0.0)).unwrap();
    let p = OrbitParams::new(0.0, 0.0, 0.0, 0.0, 0.0);
    for s in sample_trajectory(&sol, &p, &grid(1.0, 4)).unwrap() {
        assert_eq!(s.state, [0.0; 6]);
    }
    let c = |a1, a2, a3, eta| classify_orbit(&OrbitParams::new(a1, a2, a3, 0.0, eta), CouplingCase::XToZ, None);
    assert_eq!(c(0.1, 0.0, 0.0, 0.0).unwrap(), OrbitClass::PlanarLyapunov);
    assert_eq!(c(0.0, 0.1, 0.0, 0.0).unwrap(), OrbitClass::VerticalLyapunov);
    assert_eq!(c(0.1, 0.1, 0.0, 0.0).unwrap(), OrbitClass::Lissajous);
    assert_eq!(c(0.1, 0.1, 0.0, 0.5).unwrap(), OrbitClass::QuasiHalo);
    assert_eq!(c(0.0, 0.0, 0.1, 0.5).unwrap(), OrbitClass::BifurcatedHyperbolic);
    assert_eq!(c(0.0, 0.0, 0.1, 0.0).unwrap(), OrbitClass::PlanarHyperbolic);
    assert_eq!(c(0.1, 0.0, 0.1, 0.0).unwrap(), OrbitClass::NonTransit);
    let t = classify_orbit(&OrbitParams::new(0.1, 0.0, 0.1, 0.0, 0.0).transit(), CouplingCase::XToZ, None).unwrap();
    assert_eq!(t, OrbitClass::Transit);
    assert!(matches!(c(0.0, 0.0, 0.0, 0.0), Err(Error::Classification(_))));
    let bad = classify_orbit(&OrbitParams::new(0.1, 0.0, 0.0, 0.0, 0.5), CouplingCase::XToZ, Some(1e-3));
    assert!(matches!(bad, Err(Error::Constraint { .. })));
}

#[test]
fn symmetry_defects_at_integrator_level() {
    let sol = build_solution(&ctx(), CouplingCase::XToZ, BuildConfig::numeric(5, 0.0)).unwrap();
    let p = OrbitParams::new(0.01, 0.01, 0.0, E_SE, 0.0);
    let rep = validate(&sol, &p, PI, 40, &IntegratorConfig::default()).unwrap();
    for d in rep.symmetry_defects {
        assert!(d > 0.0 && d <= 1e-9, "{d:e}");
    }
}

#[test]
fn vector_field_commutes_with_reflection() {
    let s = [0.3, -0.2, 0.1, 0.05, 0.4, -0.3];
    let a = ertbp_rhs(&s, 0.8, 0.0121505856, 0.3).unwrap();
    let b = ertbp_rhs(&[s[0], s[1], -s[2], s[3], s[4], -s[5]], 0.8, 0.0121505856, 0.3).unwrap();
    assert_eq!([a[0], a[1], -a[2], a[3], a[4], -a[5]], b);
    // time reversal: (X, -Y, Z, -X', Y', -Z') at -f
    let c = ertbp_rhs(&[s[0], -s[1], s[2], -s[3], s[4], -s[5]], -0.8, 0.0121505856, 0.3).unwrap();
    assert_eq!([-a[0], a[1], -a[2], a[3], -a[4], a[5]], c);
}

#[test]
fn energy_is_conserved_in_the_circular_problem() {
    let mu = 0.0121505856;
    let sys = Ertbp { mu, e: 0.0 };
    let y0 = [-0.8, 0.02, 0.01, 0.0, 0.1, 0.0];
    let traj = integrate(&sys, y0, &grid(PI, 20), &IntegratorConfig::default()).unwrap();
    let e0 = jacobi_energy(&y0, mu);
    for s in &traj {
        assert!((jacobi_energy(&s.state, mu) - e0).abs() < 1e-10);
    }
}

#[test]
fn integrator_self_convergence() {
    let sys = Ertbp { mu: 0.0121505856, e: 0.05 };
    let y0 = [-0.8, 0.02, 0.01, 0.0, 0.1, 0.0];
    let reference = integrate(&sys, y0, &[0.0, 1.0], &IntegratorConfig { rtol: 1e-13, atol: 1e-13, ..IntegratorConfig::default() }).unwrap()[1].state;
    let err = |n: usize| {
        let y = integrate_fixed(&sys, y0, 0.0, 1.0, n).unwrap();
        y.iter().zip(reference).map(|(a, b): (&f64, f64)| (a - b).abs()).fold(0.0, f64::max)
    };
    let rate = (err(20) / err(40)).log2();
    assert!(rate > 4.5, "observed order {rate}");
}

#[test]
fn collision_is_reported() {
    assert!(matches!(ertbp_rhs(&[0.0121505856, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0, 0.0121505856, 0.0), Err(Error::Singularity(_))));
}
