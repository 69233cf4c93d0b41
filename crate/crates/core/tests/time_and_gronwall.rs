use majorant_core::gronwall::*;
use majorant_core::quadrature::*;
use proptest::prelude::*;

fn traj(nt: usize, f: impl Fn(f64) -> f64) -> ScalarTrajectory<f64> {
    ScalarTrajectory::from_fn(nt, 1.0, f).unwrap()
}

#[test]
fn trapezoid_examples() {
    let c = vec![1.7f64; 21];
    assert!((time_integral(&c, 0.05, 20).unwrap() - 1.7).abs() < 1e-15);
    let s = traj(101, |t| t);
    assert!((time_integral(s.values(), s.dt(), 100).unwrap() - 0.5).abs() < 1e-15);
    let mut prev = f64::MAX;
    for nt in [11, 21, 41] {
        let q = traj(nt, |t| t * t);
        let dt = q.dt();
        let err = (time_integral(q.values(), dt, nt - 1).unwrap() - 1.0 / 3.0).abs();
        assert!(err <= dt * dt / 6.0 + 1e-15);
        assert!(err < prev / 3.9);
        prev = err;
    }
}

#[test]
fn exp_weighted_examples() {
    let nt = 201;
    let zero = vec![0.0; nt];
    let g = vec![1.3; nt];
    assert_eq!(exp_weighted_integral(&zero, &g, 0.005, nt - 1).unwrap(), 0.0);
    let c = vec![0.7; nt];
    let v = exp_weighted_integral(&c, &g, 0.005, nt - 1).unwrap();
    assert!((v - 0.7 * (1.3f64.exp() - 1.0)).abs() < 1e-12);
    let s: Vec<f64> = (0..nt).map(|k| k as f64 * 0.005).collect();
    // gamma(s) = s requires gamma > 0, so start the check past the first node.
    let mut shifted = s.clone();
    shifted[0] = 1e-300;
    let v = exp_weighted_integral(&vec![1.0; nt], &shifted, 0.005, nt - 1).unwrap();
    assert!((v - (0.5f64.exp() - 1.0)).abs() < 1e-5, "{v}");
    assert!(matches!(exp_weighted_integral(&c, &g, 0.005, nt), Err(majorant_core::Error::IndexOutOfRange { .. })));
}

#[test]
fn differential_form_examples() {
    let psi = traj(101, |t| (2.0 * t).cos());
    let phi0 = traj(101, |_| 0.0);
    let b = gronwall_differential(0.3, &phi0, &psi).unwrap();
    let direct = cumulative_trapezoid(psi.values(), psi.dt());
    for (x, y) in b.values().iter().zip(&direct) {
        assert!((x - (0.3 + y)).abs() < 1e-14);
    }
    let phic = traj(101, |_| 1.5);
    let b = gronwall_differential(2.0, &phic, &traj(101, |_| 0.0)).unwrap();
    assert!((b.last() - 2.0 * 1.5f64.exp()).abs() < 1e-12);
    let fast = gronwall_differential_const(2.0, 1.5, &psi).unwrap();
    let slow = gronwall_differential(2.0, &phic, &psi).unwrap();
    for (a, b) in fast.values().iter().zip(slow.values()) {
        assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }
}

#[test]
fn integral_form_examples() {
    let phi = traj(101, |t| 1.0 + t);
    let zero = traj(101, |_| 0.0);
    assert!(gronwall_integral(&phi, &zero).unwrap().values().iter().all(|v| *v == 0.0));
    let c = traj(101, |_| 0.8);
    let big_phi = cumulative_trapezoid(phi.values(), phi.dt());
    for (v, p) in gronwall_integral(&phi, &c).unwrap().values().iter().zip(&big_phi) {
        assert!((v - 0.8 * p.exp()).abs() < 1e-12);
    }
    let psi = traj(101, |t| (3.0 * t).sin() + 1.0);
    let fast = gronwall_integral_const(0.9, &psi).unwrap();
    let slow = gronwall_integral(&traj(101, |_| 0.9), &psi).unwrap();
    for (a, b) in fast.values().iter().zip(slow.values()) {
        assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }
}

#[test]
fn oracle_examples() {
    let r = gronwall_oracle_check(|_| 1.0, |_| 0.0, 1.0, 1001, 1.0, 4, 1e-6).unwrap();
    assert!(r.holds);
    assert!((r.bound.last().unwrap() - 1f64.exp()).abs() / 1f64.exp() < 1e-6);
    let r = gronwall_oracle_check(|_| 0.0, f64::sin, 0.0, 1001, 1.0, 4, 1e-6).unwrap();
    assert!(r.holds && r.max_relative_gap < 1e-6);
    assert!((r.bound.last().unwrap() - (1.0 - 1f64.cos())).abs() < 1e-6);
    // Strict inequality: u' = phi u + psi - 1 stays strictly below the bound.
    let strict = rk4_linear(0.5, |_| 0.5, |t: f64| t.cos() - 1.0, 101, 1.0, 8);
    let bound = gronwall_differential(0.5, &traj(101, |_| 0.5), &traj(101, f64::cos)).unwrap();
    assert!(strict.last().unwrap() + 0.5 < bound.last());
}

#[test]
fn builtin_suite_passes() {
    for case in builtin_suite() {
        let r = run_suite_case(&case, 1001, 1e-6, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.oracle_error < 1e-9, "{r:?}");
    }
}

#[test]
fn negative_phi_is_rejected() {
    let phi = traj(11, |_| -1.0);
    assert!(gronwall_differential(1.0, &phi, &traj(11, |_| 0.0)).is_err());
    assert!(gronwall_differential_const(1.0, -1.0, &traj(11, |_| 0.0)).is_err());
}

#[test]
fn stencils_reproduce_quadratics() {
    let d = TimeStencil::<f64>::first_derivative(7, 0.25);
    let v: Vec<f64> = (0..7).map(|k| (k as f64 * 0.25).powi(2) - 3.0 * k as f64 * 0.25).collect();
    for (k, x) in d.apply(&v).iter().enumerate() {
        assert!((x - (2.0 * k as f64 * 0.25 - 3.0)).abs() < 1e-13);
    }
    let dd = TimeStencil::<f64>::second_derivative(7, 0.25);
    assert!(dd.apply(&v).iter().all(|x| (x - 2.0).abs() < 1e-12));
    let t = d.transpose();
    for k in 0..7 {
        for &(j, c) in d.row(k) {
            assert!(t.row(j).contains(&(k, c)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bound_dominates_rk4(a in 0.0f64..2.0, b in 0.0f64..2.0, c in -1.0f64..1.0, u0 in 0.0f64..2.0) {
        let phi = move |t: f64| a + b * t * t;
        let psi = move |t: f64| c + (3.0 * t).sin();
        // Tolerance covers the O(dt^2) trapezoid error, amplified by e^Phi.
        let r = gronwall_oracle_check(phi, psi, u0, 1001, 1.0, 4, 2e-5).unwrap();
        prop_assert!(r.holds, "{:?}", r.worst_violation);
    }

    #[test]
    fn bounded_psi_gives_linear_growth_bound(seed in prop::collection::vec(0.0f64..3.0, 8), c in 0.1f64..2.0, u0 in 0.0f64..2.0) {
        let nt = 81;
        let phi = traj(nt, |t| seed[(t * 7.0) as usize % seed.len()] * (1.0 + t));
        let psi = traj(nt, |t| c * (0.5 + 0.5 * (5.0 * t).cos()));
        let b = gronwall_differential(u0, &phi, &psi).unwrap();
        let big_phi = cumulative_trapezoid(phi.values(), phi.dt());
        for (k, v) in b.values().iter().enumerate() {
            let t = k as f64 * phi.dt();
            prop_assert!(*v <= (u0 + c * t) * big_phi[k].exp() * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn forms_are_equivalent(a in 0.0f64..2.0, c in 0.0f64..2.0, u0 in 0.0f64..2.0) {
        let nt = 101;
        let phi = traj(nt, |t| a * (1.0 + t));
        let psi = traj(nt, |t| c * (1.0 + t.sin()));
        let diff = gronwall_differential(u0, &phi, &psi).unwrap();
        let tilde: Vec<f64> = cumulative_trapezoid(psi.values(), psi.dt()).iter().map(|v| v + u0).collect();
        let int = gronwall_integral(&phi, &ScalarTrajectory::new(tilde, psi.dt()).unwrap()).unwrap();
        for (x, y) in diff.values().iter().zip(int.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }
}
