use majorant_core::cases::{self, Bump};
use majorant_core::majorant::*;
use majorant_core::problem::build_case;
use majorant_core::quadrature::{cumulative_trapezoid, TimeStencil};
use majorant_core::*;
use proptest::prelude::*;

struct Case {
    p: Problem64,
    exact: SolveOutput<f64>,
}

fn case(n: usize, nt: usize, spec: CaseSpec) -> Case {
    let grid = Grid64::new(n, n, n, 1.0, 1.0, 1.0, nt, 1.0).unwrap();
    let cfg = ProblemConfig::vacuum(grid, spec);
    let p = assemble_problem(&cfg).unwrap();
    let exact = project_exact(&build_case(&cfg).unwrap(), &grid).unwrap();
    Case { p, exact }
}

fn cavity() -> CaseSpec {
    CaseSpec::new("cavity_mode").with("m", 1.0).with("n", 1.0)
}

fn bubble() -> CaseSpec {
    CaseSpec::new("poly_bubble").with("amplitude", 1.0)
}

fn perturbed(exact: &SolveOutput<f64>, delta: f64, bump: Bump) -> SolveOutput<f64> {
    SolveOutput {
        e: cases::perturb(&exact.e, delta, bump).unwrap(),
        e_t: Some(cases::perturb_rate(exact.e_t.as_ref().unwrap(), delta, bump).unwrap()),
        h: exact.h.clone(),
        h_t: exact.h_t.clone(),
        energy: None,
    }
}

fn params(p: &Problem64, approx: &SolveOutput<f64>, rho: f64, gamma: f64) -> MajorantParams<f64> {
    MajorantParams::new(rho, gamma, y_from_approx(p, approx).unwrap())
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max)
}

fn norm(f: &Field64, w: &Material64, grid: &Grid64) -> f64 {
    weighted_norm_sq(f, w, grid).unwrap()
}

/// Independent evaluation of `f` by summing the raw integrands.
fn f_oracle(p: &Problem64, approx: &SolveOutput<f64>, prm: &MajorantParams<f64>, theorem: Theorem) -> Vec<f64> {
    let grid = p.grid;
    let (nt, dt) = (grid.nt, grid.dt());
    let d = TimeStencil::first_derivative(nt, dt);
    let dd = TimeStencil::second_derivative(nt, dt);
    let rho = prm.rho.to_nodes(nt);
    let gamma = prm.gamma.to_nodes(nt);
    let e = &approx.e;
    let y = &prm.y;
    let de = e.apply_stencil(&d).unwrap();
    let dy = y.apply_stencil(&d).unwrap();
    let mu_inv_curl = |f: &Field64| p.mu_inv.apply(&curl_edge_to_face(f, &grid).unwrap()).unwrap();
    let ktilde: Vec<Field64> = (0..nt).map(|k| mu_inv_curl(&e.samples()[k]).sub(&y.samples()[k]).unwrap()).collect();
    let edge_res = |x: &Field64, k: usize| {
        let mut r = p.eps.apply(x).unwrap();
        r.axpy(1.0, &curl_face_to_edge(&y.samples()[k], &grid).unwrap()).unwrap();
        r.sub(&p.k.samples()[k]).unwrap()
    };
    let mut a = vec![0.0; nt];
    let mut b = vec![0.0; nt];
    let mut s = vec![0.0; nt];
    for k in 0..nt {
        if theorem.second_form() {
            let et = approx.e_t.as_ref().unwrap();
            let det = et.apply_stencil(&d).unwrap();
            a[k] = norm(&edge_res(&det.samples()[k], k), &p.eps_inv, &grid);
            let rt = mu_inv_curl(&et.samples()[k]).sub(&dy.samples()[k]).unwrap();
            b[k] = norm(&rt, &p.mu, &grid);
            let q = curl_edge_to_face(&et.samples()[k].sub(&de.samples()[k]).unwrap(), &grid).unwrap();
            s[k] = inner(&ktilde[k], &q, &grid).unwrap();
        } else {
            let d2 = e.apply_stencil(&dd).unwrap();
            a[k] = norm(&edge_res(&d2.samples()[k], k), &p.eps_inv, &grid);
            let dk = mu_inv_curl(&de.samples()[k]).sub(&dy.samples()[k]).unwrap();
            b[k] = norm(&dk, &p.mu, &grid);
        }
    }
    let et0 = if theorem.second_form() { approx.e_t.as_ref().unwrap().first().clone() } else { de.first().clone() };
    let e_t0 = p.e0_prime.sub(&et0).unwrap();
    let curl0 = curl_edge_to_face(&p.e0.sub(e.first()).unwrap(), &grid).unwrap();
    let z = norm(&e_t0, &p.eps, &grid) + 2.0 * norm(&curl0, &p.mu_inv, &grid) + norm(&ktilde[0], &p.mu, &grid);
    (0..nt)
        .map(|k| {
            let mut acc = z + norm(&ktilde[k], &p.mu, &grid) / (1.0 - rho[k]);
            for j in 0..=k {
                let w = if k == 0 { 0.0 } else if j == 0 || j == k { 0.5 * dt } else { dt };
                acc += w * (a[j] / gamma[j] + b[j] / (gamma[j] * rho[j]) + 2.0 * s[j]);
            }
            acc
        })
        .collect()
}

#[test]
fn residual_examples() {
    let c = case(5, 9, cavity());
    let y = y_from_approx(&c.p, &c.exact).unwrap();
    let r = residuals(&c.p, &c.exact, &y).unwrap();
    assert_eq!(r.ktilde.max_abs(), 0.0);
    let zero = optimize::zero_y(&c.p);
    let r0 = residuals(&c.p, &c.exact, &zero).unwrap();
    assert_eq!(r0.ktilde, y);
    assert!(r.khat.is_some() && r.kcheck.is_some() && r.rt.is_some());
}

#[test]
fn khat_vanishes_under_time_refinement() {
    // The Yee cavity mode is exact in space, so only the time stencil remains.
    let res = |nt: usize| {
        let c = case(6, nt, cavity());
        let y = y_from_approx(&c.p, &c.exact).unwrap();
        let khat = residuals(&c.p, &c.exact, &y).unwrap().khat.unwrap();
        let mid = (nt - 1) / 2;
        norm(&khat.samples()[mid], &c.p.eps_inv, &c.p.grid).sqrt()
    };
    let r = [res(17), res(33), res(65)];
    for w in r.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{r:?}");
    }
}

#[test]
fn direct_summation_oracles() {
    let c = case(6, 17, cavity());
    let approx = perturbed(&c.exact, 1e-2, Bump::Persistent);
    let prm = params(&c.p, &approx, 0.4, 1.7);
    let f1 = f_first_form(&c.p, &approx, &prm).unwrap();
    assert!(max_rel(f1.values(), &f_oracle(&c.p, &approx, &prm, Theorem::T1)) < 1e-12);

    let mut step = prm.clone();
    step.gamma = TimeParam::Nodes((0..17).map(|k| if k < 9 { 0.8 } else { 2.4 }).collect());
    let f3 = f_refined(&c.p, &approx, &step).unwrap();
    assert!(max_rel(f3.values(), &f_oracle(&c.p, &approx, &step, Theorem::T3)) < 1e-12);

    let lf = leapfrog_solve(&c.p, &SolverOptions::default()).unwrap();
    let lprm = params(&c.p, &lf, 0.5, 1.0);
    let f5 = f_second_form(&c.p, &lf, &lprm).unwrap();
    assert!(max_rel(f5.values(), &f_oracle(&c.p, &lf, &lprm, Theorem::T5)) < 1e-12);
    let mut lstep = lprm.clone();
    lstep.rho = TimeParam::Nodes((0..17).map(|k| 0.3 + 0.02 * k as f64).collect());
    let f4 = f_second_form(&c.p, &lf, &lstep).unwrap();
    assert!(max_rel(f4.values(), &f_oracle(&c.p, &lf, &lstep, Theorem::T4)) < 1e-12);
}

#[test]
fn zero_residuals_give_zero_functional() {
    let c = case(5, 9, bubble());
    let prm = params(&c.p, &c.exact, 0.5, 1.0);
    for th in [Theorem::T1, Theorem::T3, Theorem::T4, Theorem::T5] {
        let r = certify(&c.p, &c.exact, &prm, th, Some(&c.exact)).unwrap();
        assert!(r.f.iter().all(|v| v.abs() < 1e-24), "{th:?}");
        assert!(r.bound_b.iter().all(|v| v.abs() < 1e-24));
        assert!(r.true_n.as_ref().unwrap().iter().all(|v| *v < 1e-24));
    }
}

#[test]
fn doubling_gamma_halves_its_terms() {
    let c = case(5, 9, cavity());
    let approx = perturbed(&c.exact, 1e-2, Bump::Persistent);
    let f = |g: f64| *f_first_form(&c.p, &approx, &params(&c.p, &approx, 0.5, g)).unwrap().values().last().unwrap();
    let (a, b, d) = (f(1.0), f(2.0), f(4.0));
    assert!(((a - b) - 2.0 * (b - d)).abs() <= 1e-12 * a);
}

#[test]
fn bound_closed_forms() {
    let nt = 201;
    let f = ScalarTrajectory::constant(nt, 0.005, 0.6).unwrap();
    let gamma = TimeParam::Constant(1.4);
    let (b, big_u) = bound_b_and_big_b(&f, &gamma, BoundForm::Unweighted).unwrap();
    let (_, big_w) = bound_b_and_big_b(&f, &gamma, BoundForm::GammaWeighted).unwrap();
    for k in 0..nt {
        let t = k as f64 * 0.005;
        let e = (1.4 * t).exp();
        assert!((b.values()[k] - 0.6 * e).abs() < 1e-12);
        assert!((big_w.values()[k] - 0.6 * (e - 1.0)).abs() < 1e-12);
        assert!((big_u.values()[k] - 0.6 * (e - 1.0) / 1.4).abs() < 1e-12);
    }
    let zero = ScalarTrajectory::constant(nt, 0.005, 0.0).unwrap();
    let (b, bb) = bound_b_and_big_b(&zero, &gamma, BoundForm::Unweighted).unwrap();
    assert!(b.values().iter().chain(bb.values()).all(|v| *v == 0.0));
    let wavy = ScalarTrajectory::from_fn(nt, 1.0, |t: f64| 1.0 + (9.0 * t).sin()).unwrap();
    let (b, _) = bound_b_and_big_b(&wavy, &gamma, BoundForm::Unweighted).unwrap();
    assert!(b.values().iter().zip(wavy.values()).all(|(b, f)| b >= f));
    assert!(bound_b_and_big_b(&wavy, &TimeParam::Nodes(vec![1.0; nt]), BoundForm::Unweighted).is_err());
}

#[test]
fn true_error_examples() {
    let c = case(6, 17, bubble());
    let prm = params(&c.p, &c.exact, 0.5, 1.0);
    let (n, big_n) = true_error_norms(&c.exact, &c.exact, &c.p, &prm, Theorem::T5).unwrap();
    assert!(n.values().iter().chain(big_n.values()).all(|v| *v == 0.0));
    let big = |delta: f64| {
        let a = perturbed(&c.exact, delta, Bump::Vanishing);
        true_error_norms(&c.exact, &a, &c.p, &params(&c.p, &a, 0.5, 1.0), Theorem::T5).unwrap().1.last()
    };
    let ratio = big(5e-3) / big(1e-2);
    assert!((ratio - 0.25).abs() < 0.25e-8, "{ratio}");
}

#[test]
fn weighted_integral_tracks_gamma_times_n() {
    let gap = |nt: usize| {
        let c = case(5, nt, bubble());
        let a = perturbed(&c.exact, 1e-2, Bump::Persistent);
        let mut prm = params(&c.p, &a, 0.5, 1.0);
        prm.gamma = TimeParam::Nodes((0..nt).map(|k| 1.0 + (k as f64 / (nt - 1) as f64).powi(2)).collect());
        let (n, big_n) = true_error_norms(&c.exact, &a, &c.p, &prm, Theorem::T4).unwrap();
        let d = TimeStencil::first_derivative(nt, c.p.grid.dt()).apply(big_n.values());
        let g = prm.gamma.to_nodes(nt);
        (1..nt - 1).map(|k| (d[k] - g[k] * n.values()[k]).abs()).fold(0.0, f64::max)
    };
    let (a, b) = (gap(17), gap(33));
    assert!(a / b > 3.5, "{a} {b}");
}

#[test]
fn specialisations_agree() {
    let c = case(6, 17, cavity());
    let approx = perturbed(&c.exact, 1e-2, Bump::Persistent);
    let prm = params(&c.p, &approx, 0.3, 2.0);
    let t1 = certify(&c.p, &approx, &prm, Theorem::T1, None).unwrap();
    let t3 = certify(&c.p, &approx, &prm, Theorem::T3, None).unwrap();
    assert!(max_rel(&t1.f, &t3.f) < 1e-14);
    let d = TimeStencil::first_derivative(17, c.p.grid.dt());
    let same = SolveOutput { e_t: Some(approx.e.apply_stencil(&d).unwrap()), ..approx.clone() };
    let prm = params(&c.p, &same, 0.3, 2.0);
    let t3 = certify(&c.p, &same, &prm, Theorem::T3, None).unwrap();
    let t4 = certify(&c.p, &same, &prm, Theorem::T4, None).unwrap();
    assert!(max_rel(&t3.bound_b, &t4.bound_b) < 1e-12);
    assert!(max_rel(&t3.bound_big_b, &t4.bound_big_b) < 1e-12);
}

#[test]
fn preconditions() {
    let c = case(4, 4, cavity());
    let prm = params(&c.p, &c.exact, 0.5, 1.0);
    assert!(matches!(certify(&c.p, &c.exact, &prm, Theorem::T1, None), Err(Error::Precondition(_))));
    assert!(certify(&c.p, &c.exact, &prm, Theorem::T5, None).is_ok());
    let no_et = SolveOutput { e_t: None, ..c.exact.clone() };
    assert!(matches!(certify(&c.p, &no_et, &prm, Theorem::T5, None), Err(Error::Precondition(_))));
    let mut bad = c.exact.clone();
    for s in bad.e.samples_mut() {
        for v in s.values_mut() {
            *v += 1.0;
        }
    }
    assert!(matches!(certify(&c.p, &bad, &prm, Theorem::T5, None), Err(Error::Precondition(_))));
    let mut varying = prm.clone();
    varying.gamma = TimeParam::Nodes(vec![1.0; 4]);
    assert!(matches!(certify(&c.p, &c.exact, &varying, Theorem::T5, None), Err(Error::Parameter(_))));
    let mut bad_rho = prm.clone();
    bad_rho.rho = TimeParam::Constant(1.0);
    assert!(matches!(certify(&c.p, &c.exact, &bad_rho, Theorem::T5, None), Err(Error::Parameter(_))));
}

#[test]
fn efficiency_only_where_error_is_resolved() {
    let c = case(6, 17, cavity());
    let a = perturbed(&c.exact, 1e-2, Bump::Vanishing);
    let r = certify(&c.p, &a, &params(&c.p, &a, 0.5, 1.0), Theorem::T5, Some(&c.exact)).unwrap();
    let eff = r.efficiency.as_ref().unwrap();
    assert!(eff[0].is_none());
    assert!(eff[16].unwrap() >= 1.0);
    assert_eq!(r.dominates(), Some(true));
}

#[test]
fn combined_examples() {
    let c = case(6, 17, cavity());
    let prm = params(&c.p, &c.exact, 0.5, 1.0);
    let r = combined_estimate(&c.p, &c.exact, &prm, Theorem::T5, Some(&c.exact)).unwrap();
    let scale = c.p.energy_scale().unwrap();
    assert!(r.f_sq.iter().chain(&r.g_sq).all(|v| *v < 1e-24 * scale));
    assert!(matches!(combined_estimate(&c.p, &c.exact, &prm, Theorem::T1, None), Err(Error::Parameter(_))));

    // Perturbing only H~ leaves the electric part alone.
    let mut h_only = c.exact.clone();
    let h = h_only.h.as_mut().unwrap();
    for s in h.samples_mut() {
        for (i, v) in s.values_mut().enumerate() {
            *v += 1e-3 * (i as f64).sin();
        }
    }
    let rh = combined_estimate(&c.p, &h_only, &prm, Theorem::T5, Some(&c.exact)).unwrap();
    assert_eq!(rh.electric.bound_b, r.electric.bound_b);
    assert!(rh.f_sq.iter().all(|v| *v > 1e-12));
    assert!(rh.dominates().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bounds_nonnegative_and_dominating(delta in 1e-4f64..1e-1, rho in 0.1f64..0.9, lg in -2.0f64..2.0, persistent: bool) {
        let c = case(4, 9, bubble());
        let bump = if persistent { Bump::Persistent } else { Bump::Vanishing };
        let a = perturbed(&c.exact, delta, bump);
        let mut prm = params(&c.p, &a, rho, lg.exp());
        for v in [ZeroTermVariant::ZTilde, ZeroTermVariant::ZHat] {
            prm.zero_term = v;
            for th in [Theorem::T1, Theorem::T3] {
                let r = certify(&c.p, &a, &prm, th, Some(&c.exact)).unwrap();
                prop_assert!(r.bound_b.iter().chain(&r.bound_big_b).all(|x| *x >= 0.0));
                prop_assert_eq!(r.dominates(), Some(true));
            }
            prm.abs_coupling = true;
            for th in [Theorem::T4, Theorem::T5] {
                let r = certify(&c.p, &a, &prm, th, Some(&c.exact)).unwrap();
                prop_assert!(r.bound_b.iter().chain(&r.bound_big_b).all(|x| *x >= 0.0));
                prop_assert_eq!(r.dominates(), Some(true));
            }
            prm.abs_coupling = false;
        }
    }

    #[test]
    fn zero_term_ordering(seed in prop::collection::vec(-1.0f64..1.0, 3..11), ys in -1.0f64..1.0) {
        let c = case(4, 9, bubble());
        let mut a = c.exact.clone();
        for (i, v) in a.e.samples_mut()[0].values_mut().enumerate() {
            *v += 0.1 * seed[i % seed.len()];
        }
        a.e.samples_mut()[0].apply_boundary();
        let mut y = y_from_approx(&c.p, &a).unwrap();
        for (i, v) in y.samples_mut()[0].values_mut().enumerate() {
            *v += ys * seed[(i + 1) % seed.len()];
        }
        for th in [Theorem::T1, Theorem::T5] {
            let zp = ZeroTermParts::compute(&c.p, &a, &y, th).unwrap();
            let (z, zt, zh) = (zp.value(ZeroTermVariant::Z), zp.value(ZeroTermVariant::ZTilde), zp.value(ZeroTermVariant::ZHat));
            prop_assert!(z <= zt && zt <= zh);
        }
    }

    #[test]
    fn bound_scales_quadratically(delta in 1e-4f64..1e-1) {
        let c = case(4, 9, bubble());
        let r = |d: f64| {
            let a = perturbed(&c.exact, d, Bump::Persistent);
            certify(&c.p, &a, &params(&c.p, &a, 0.5, 1.0), Theorem::T5, None).unwrap().final_bound()
        };
        let ratio = r(delta) / r(0.5 * delta);
        prop_assert!((ratio - 4.0).abs() < 1e-8);
    }
}

#[test]
fn f32_certify_runs() {
    let grid = GridSpec::<f32>::new(6, 6, 6, 1.0, 1.0, 1.0, 17, 1.0).unwrap();
    let cfg = ProblemConfig::vacuum(grid, cavity());
    let p = assemble_problem(&cfg).unwrap();
    let approx = leapfrog_solve(&p, &SolverOptions::default()).unwrap();
    let exact = project_exact(&build_case(&cfg).unwrap(), &grid).unwrap();
    let prm = MajorantParams::new(0.5f32, 1.0, y_from_approx(&p, &approx).unwrap());
    let r = certify(&p, &approx, &prm, Theorem::T5, Some(&exact)).unwrap();
    assert!(r.final_bound().is_finite() && r.final_bound() > 0.0);
    assert_eq!(r.dominates(), Some(true));
    let _ = cumulative_trapezoid(&[0.0f32, 1.0], 1.0);
}
