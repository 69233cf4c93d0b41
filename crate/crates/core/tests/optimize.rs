use majorant_core::cases::{self, Bump};
use majorant_core::majorant::*;
use majorant_core::optimize::*;
use majorant_core::problem::build_case;
use majorant_core::*;

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
        h: None,
        h_t: None,
        energy: None,
    }
}

fn base(p: &Problem64, a: &SolveOutput<f64>) -> MajorantParams<f64> {
    MajorantParams::new(0.5, 1.0, y_from_approx(p, a).unwrap())
}

fn wiggle(y: &Trajectory64, amp: f64) -> Trajectory64 {
    y.map(|k, f| {
        let mut out = f.clone();
        for (i, v) in out.values_mut().enumerate() {
            *v += amp * ((i + 3 * k) as f64 * 0.71).sin();
        }
        Ok(out)
    })
    .unwrap()
}

#[test]
fn quadratic_matches_direct_bound() {
    let c = case(4, 7, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let y1 = wiggle(&y_from_approx(&c.p, &a).unwrap(), 0.03);
    let y2 = wiggle(&y1, 0.05);
    let gamma_nodes = TimeParam::Nodes((0..7).map(|k| 0.5 + 0.3 * k as f64).collect());
    let rho_nodes = TimeParam::Nodes((0..7).map(|k| 0.2 + 0.1 * k as f64).collect());
    for th in [Theorem::T1, Theorem::T3, Theorem::T4, Theorem::T5] {
        for zt in [ZeroTermVariant::Z, ZeroTermVariant::ZHat] {
            for k_star in [3, 6] {
                let (rho, gamma) = if th.constant_params() {
                    (TimeParam::Constant(0.35), TimeParam::Constant(1.7))
                } else {
                    (rho_nodes.clone(), gamma_nodes.clone())
                };
                let q = QuadraticY::new(&c.p, &a, th, &rho, &gamma, zt, k_star).unwrap();
                let b = |y: &Trajectory64| {
                    let prm = MajorantParams { rho: rho.clone(), gamma: gamma.clone(), y: y.clone(), zero_term: zt, abs_coupling: false };
                    bound_at(&c.p, &a, &prm, th, k_star).unwrap()
                };
                let direct = b(&y1) - b(&y2);
                let quad = q.value(&y1).unwrap() - q.value(&y2).unwrap();
                assert!(
                    (direct - quad).abs() <= 1e-9 * direct.abs().max(b(&y1)),
                    "{th:?} {zt:?} k*={k_star}: {direct} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn cg_descends_and_matches_optimum() {
    let c = case(3, 5, cavity());
    let a = perturbed(&c.exact, 0.1, Bump::Persistent);
    let rho = TimeParam::Constant(0.5);
    let gamma = TimeParam::Constant(1.0);
    let q = QuadraticY::new(&c.p, &a, Theorem::T1, &rho, &gamma, ZeroTermVariant::ZHat, 4).unwrap();
    let y0 = y_from_approx(&c.p, &a).unwrap();
    let r = conjugate_gradient(&q, &y0, 2000, 1e-12).unwrap();
    assert!(r.decrements.iter().all(|d| *d <= 0.0));
    assert!(q.value(&r.y).unwrap() <= q.value(&y0).unwrap());
    assert!(r.relative_residual <= 1e-12);
    // Stationarity: A y = r.
    let res = q.rhs().sub(&q.apply(&r.y).unwrap()).unwrap();
    assert!(res.max_abs() <= 1e-9 * q.rhs().max_abs());
}

#[test]
fn exact_solution_is_near_minimiser() {
    let c = case(4, 9, bubble());
    let prm = base(&c.p, &c.exact);
    let before = bound_at(&c.p, &c.exact, &prm, Theorem::T1, 8).unwrap();
    let cfg = OptimizeConfig::<f64>::default();
    let r = optimize_y(&c.p, &c.exact, &prm, Theorem::T1, &cfg).unwrap();
    assert!(r.bound <= before + 1e-24);
    assert!(before < 1e-24);
}

#[test]
fn golden_agrees_with_brute_force() {
    let c = case(4, 9, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let prm = base(&c.p, &a);
    let cfg = OptimizeConfig { rho_grid: vec![0.5], gamma_bracket: (1e-2, 1e2), ..OptimizeConfig::default() };
    let got = optimize_gamma_rho(&c.p, &a, &prm, Theorem::T5, &cfg).unwrap();
    let mut best = (f64::MAX, 0.0);
    for i in 0..=4000 {
        let g = 10f64.powf(-2.0 + 4.0 * i as f64 / 4000.0);
        let trial = MajorantParams { gamma: TimeParam::Constant(g), ..prm.clone() };
        let v = bound_at(&c.p, &a, &trial, Theorem::T5, 8).unwrap();
        if v < best.0 {
            best = (v, g);
        }
    }
    let g = got.gamma.constant().unwrap();
    assert!((g - best.1).abs() / best.1 < 1e-2, "{g} vs {}", best.1);
    assert!(got.bound <= best.0 * (1.0 + 1e-3));
}

#[test]
fn tie_break_and_monotone_rho() {
    // Exact data: the bound is zero for every pair, so the smallest win.
    let c = case(4, 9, bubble());
    let prm = base(&c.p, &c.exact);
    let cfg = OptimizeConfig::<f64>::default();
    let r = optimize_gamma_rho(&c.p, &c.exact, &prm, Theorem::T5, &cfg).unwrap();
    assert_eq!(r.gamma.constant().unwrap(), cfg.gamma_bracket.0);
    assert_eq!(r.rho.constant().unwrap(), 0.1);
    assert!(r.bound.abs() < 1e-24);

    // A time-constant shift of Y by a constant field only feeds the
    // (1 - rho)^-1 term, which grows with rho.
    let shifted = prm.y.map(|_, f| {
        let mut out = f.clone();
        out.values_mut().for_each(|v| *v += 0.2);
        Ok(out)
    })
    .unwrap();
    let prm = MajorantParams { y: shifted, ..prm };
    let r = optimize_gamma_rho(&c.p, &c.exact, &prm, Theorem::T1, &cfg).unwrap();
    assert_eq!(r.rho.constant().unwrap(), 0.1);
}

#[test]
fn bracket_edge_warns() {
    let c = case(4, 9, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let cfg = OptimizeConfig { gamma_bracket: (50.0, 100.0), ..OptimizeConfig::default() };
    let r = optimize_gamma_rho(&c.p, &a, &base(&c.p, &a), Theorem::T5, &cfg).unwrap();
    assert!(!r.warnings.is_empty());
}

#[test]
fn config_validation() {
    let bad = OptimizeConfig { gamma_bracket: (2.0, 1.0), ..OptimizeConfig::<f64>::default() };
    assert!(matches!(bad.validate(), Err(Error::EmptyBracket(_))));
    let bad = OptimizeConfig { rho_grid: vec![], ..OptimizeConfig::<f64>::default() };
    assert!(matches!(bad.validate(), Err(Error::EmptyBracket(_))));
    let bad = OptimizeConfig { rho_grid: vec![1.2], ..OptimizeConfig::<f64>::default() };
    assert!(matches!(bad.validate(), Err(Error::Parameter(_))));
    let bad = OptimizeConfig { cg_tol: 0.0, ..OptimizeConfig::<f64>::default() };
    assert!(bad.validate().is_err());
}

#[test]
fn zero_sweeps_return_initial_report() {
    let c = case(4, 9, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let prm = base(&c.p, &a);
    let cfg = OptimizeConfig { sweeps: 0, ..OptimizeConfig::default() };
    let opt = optimize_all(&c.p, &a, &cfg, Theorem::T5, &prm, Some(&c.exact)).unwrap();
    let plain = certify(&c.p, &a, &prm, Theorem::T5, Some(&c.exact)).unwrap();
    assert_eq!(opt, plain);
}

#[test]
fn every_sweep_improves_and_dominates() {
    let c = case(6, 17, cavity());
    let a = perturbed(&c.exact, 1e-2, Bump::Persistent);
    let prm = base(&c.p, &a);
    for th in [Theorem::T1, Theorem::T4, Theorem::T5] {
        let initial = certify(&c.p, &a, &prm, th, Some(&c.exact)).unwrap();
        let mut last = initial.final_bound();
        for sweeps in 1..=3 {
            let cfg = OptimizeConfig { sweeps, ..OptimizeConfig::default() };
            let r = optimize_all(&c.p, &a, &cfg, th, &prm, Some(&c.exact)).unwrap();
            assert!(r.final_bound() <= last * (1.0 + 1e-12), "{th:?} sweep {sweeps}");
            assert_eq!(r.dominates(), Some(true), "{th:?} sweep {sweeps}");
            last = r.final_bound();
            let eff = |rep: &MajorantReport<f64>| rep.efficiency.as_ref().unwrap().last().copied().flatten().unwrap();
            assert!(eff(&r) <= eff(&initial) * (1.0 + 1e-12));
        }
        assert!(last < initial.final_bound(), "{th:?}");
    }
}

#[test]
fn non_smooth_variants_never_get_worse() {
    let c = case(4, 9, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let mut prm = base(&c.p, &a);
    prm.zero_term = ZeroTermVariant::ZTilde;
    prm.abs_coupling = true;
    let before = bound_at(&c.p, &a, &prm, Theorem::T5, 8).unwrap();
    let r = optimize_y(&c.p, &a, &prm, Theorem::T5, &OptimizeConfig::default()).unwrap();
    assert!(r.bound <= before);
}

#[test]
fn piecewise_gamma_for_time_dependent_theorems() {
    let c = case(4, 17, cavity());
    let a = perturbed(&c.exact, 0.05, Bump::Persistent);
    let prm = base(&c.p, &a);
    let cfg = OptimizeConfig::<f64>::default();
    let pw = optimize_gamma_rho(&c.p, &a, &prm, Theorem::T4, &cfg).unwrap();
    let one = OptimizeConfig { gamma_pieces: 1, ..cfg.clone() };
    let flat = optimize_gamma_rho(&c.p, &a, &prm, Theorem::T4, &one).unwrap();
    assert!(pw.bound <= flat.bound);
    let check = MajorantParams { gamma: pw.gamma.clone(), rho: pw.rho.clone(), ..prm.clone() };
    let direct = bound_at(&c.p, &a, &check, Theorem::T4, 16).unwrap();
    assert!((direct - pw.bound).abs() <= 1e-12 * direct);
}
