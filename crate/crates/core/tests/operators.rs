use majorant_core::field::{gradient_node_to_edge, NodalScalar};
use majorant_core::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn random_field(kind: FieldKind, grid: &Grid64, seed: &[f64]) -> Field64 {
    let mut f = StaggeredField::zeros(kind, grid);
    for (i, v) in f.values_mut().enumerate() {
        *v = seed[i % seed.len()] * (1.0 + (i as f64 * 0.37).sin());
    }
    f
}

fn grid_strategy() -> impl Strategy<Value = Grid64> {
    (2usize..6, 2usize..6, 2usize..6, 0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0)
        .prop_map(|(nx, ny, nz, lx, ly, lz)| Grid64::new(nx, ny, nz, lx, ly, lz, 3, 1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curl_of_gradient_vanishes(grid in grid_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let phi = NodalScalar::from_fn(&grid, |x, y, z| (a * x + y).sin() * (b * z).cos() + a * x * y - z * z);
        let g = gradient_node_to_edge(&phi, &grid).unwrap();
        let c = curl_edge_to_face(&g, &grid).unwrap();
        prop_assert!(c.max_abs() <= 1e-12 * (1.0 + g.max_abs()));
    }

    #[test]
    fn curls_are_adjoint(grid in grid_strategy(), seed in prop::collection::vec(-1.0f64..1.0, 7..23)) {
        let mut e = random_field(FieldKind::Edge, &grid, &seed);
        e.apply_boundary();
        let h = random_field(FieldKind::Face, &grid, &seed[1..]);
        let lhs = inner(&curl_edge_to_face(&e, &grid).unwrap(), &h, &grid).unwrap();
        let rhs = inner(&e, &curl_face_to_edge(&h, &grid).unwrap(), &grid).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        // Raw coefficient sums agree as well.
        let lraw = curl_edge_to_face(&e, &grid).unwrap().dot_raw(&h).unwrap();
        let rraw = e.dot_raw(&curl_face_to_edge(&h, &grid).unwrap()).unwrap();
        let scale = grid.spacing().iter().fold(1.0f64, |m, h| m.max(1.0 / h));
        prop_assert!((lraw - rraw).abs() <= 1e-11 * scale * (1.0 + lraw.abs()));
    }

    #[test]
    fn weighted_inner_is_symmetric_and_positive(
        grid in grid_strategy(),
        seed in prop::collection::vec(-1.0f64..1.0, 5..17),
        diag in prop::array::uniform3(0.2f64..5.0),
    ) {
        let w = MaterialField::diagonal(&grid, diag).unwrap();
        for kind in [FieldKind::Edge, FieldKind::Face] {
            let u = random_field(kind, &grid, &seed);
            let v = random_field(kind, &grid, &seed[2..]);
            let uv = weighted_inner(&u, &v, &w, &grid).unwrap();
            let vu = weighted_inner(&v, &u, &w, &grid).unwrap();
            prop_assert!((uv - vu).abs() <= 1e-13 * (1.0 + uv.abs()));
            prop_assert!(weighted_norm_sq(&u, &w, &grid).unwrap() > 0.0);
        }
    }

    #[test]
    fn energy_norm_matches_direct_sum(
        grid in grid_strategy(),
        seed in prop::collection::vec(-1.0f64..1.0, 5..17),
        rho in 0.05f64..0.95,
    ) {
        let eps = MaterialField::diagonal(&grid, [1.5, 2.0, 0.7]).unwrap();
        let mu_inv = MaterialField::scalar(&grid, 0.4).unwrap();
        let et = random_field(FieldKind::Edge, &grid, &seed);
        let ch = random_field(FieldKind::Face, &grid, &seed[1..]);
        let n = energy_norm_n(&et, &ch, &eps, &mu_inv, rho, &grid).unwrap();
        let want = weighted_inner(&et, &et, &eps, &grid).unwrap() + rho * weighted_inner(&ch, &ch, &mu_inv, &grid).unwrap();
        prop_assert!((n - want).abs() <= 1e-13 * want.abs().max(1.0));
    }
}

#[test]
fn weight_two_doubles_the_product() {
    let grid = Grid64::new(3, 4, 2, 1.0, 1.5, 0.5, 2, 1.0).unwrap();
    let u = random_field(FieldKind::Edge, &grid, &[0.3, -0.8, 0.5]);
    let v = random_field(FieldKind::Edge, &grid, &[0.1, 0.9]);
    let one = weighted_inner(&u, &v, &MaterialField::identity(&grid), &grid).unwrap();
    let two = weighted_inner(&u, &v, &MaterialField::scalar(&grid, 2.0).unwrap(), &grid).unwrap();
    assert_eq!(two, 2.0 * one);
}

#[test]
fn energy_norm_examples() {
    let grid = Grid64::unit_cube(3, 2).unwrap();
    let id = MaterialField::identity(&grid);
    let ze = StaggeredField::zeros(FieldKind::Edge, &grid);
    let zf = StaggeredField::zeros(FieldKind::Face, &grid);
    assert_eq!(energy_norm_n(&ze, &zf, &id, &id, 0.5, &grid).unwrap(), 0.0);
    // ||curl phi||^2 = 4 from a constant face field of value 2/sqrt(3).
    let c = StaggeredField::from_fn(FieldKind::Face, &grid, |_, _, _, _| 2.0 / 3f64.sqrt());
    let n = energy_norm_n(&ze, &c, &id, &id, 0.5, &grid).unwrap();
    assert!((n - 2.0).abs() < 1e-14);
    assert!(matches!(energy_norm_n(&ze, &zf, &id, &id, 1.0, &grid), Err(Error::Parameter(_))));
}

#[test]
fn constant_face_field_has_zero_curl() {
    let grid = Grid64::unit_cube(4, 2).unwrap();
    let h = StaggeredField::from_fn(FieldKind::Face, &grid, |c, _, _, _| [1.0, -2.0, 0.5][c]);
    assert_eq!(curl_face_to_edge(&h, &grid).unwrap().max_abs(), 0.0);
}

fn analytic_curl_error(n: usize, swap: bool) -> f64 {
    // The field does not depend on z, so two layers suffice.
    let grid = Grid64::new(n, n, 2, 1.0, 1.0, 1.0, 2, 1.0).unwrap();
    let s = |x: f64, y: f64| (PI * x).sin() * (PI * y).sin();
    if !swap {
        let mut e = StaggeredField::from_fn(FieldKind::Edge, &grid, |c, x, y, _| if c == 2 { s(x, y) } else { 0.0 });
        e.apply_boundary();
        let want = StaggeredField::from_fn(FieldKind::Face, &grid, |c, x, y, _| match c {
            0 => PI * (PI * x).sin() * (PI * y).cos(),
            1 => -PI * (PI * x).cos() * (PI * y).sin(),
            _ => 0.0,
        });
        curl_edge_to_face(&e, &grid).unwrap().sub(&want).unwrap().max_abs()
    } else {
        let h = StaggeredField::from_fn(FieldKind::Face, &grid, |c, x, y, _| if c == 2 { s(x, y) } else { 0.0 });
        let mut want = StaggeredField::from_fn(FieldKind::Edge, &grid, |c, x, y, _| match c {
            0 => PI * (PI * x).sin() * (PI * y).cos(),
            1 => -PI * (PI * x).cos() * (PI * y).sin(),
            _ => 0.0,
        });
        want.apply_boundary();
        curl_face_to_edge(&h, &grid).unwrap().sub(&want).unwrap().max_abs()
    }
}

#[test]
fn analytic_curls_converge_at_second_order() {
    for swap in [false, true] {
        let errs: Vec<f64> = [16, 32, 64].iter().map(|n| analytic_curl_error(*n, swap)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "swap={swap}: {errs:?}");
        }
    }
}

#[test]
fn f32_fields_work() {
    let grid = GridSpec::<f32>::unit_cube(3, 2).unwrap();
    let u = StaggeredField::from_fn(FieldKind::Edge, &grid, |_, _, _, _| 1.0f32);
    let n = weighted_norm_sq(&u, &MaterialField::identity(&grid), &grid).unwrap();
    assert!((n - 3.0).abs() < 1e-5);
}

#[test]
fn grid_validation() {
    assert!(Grid64::new(0, 2, 2, 1.0, 1.0, 1.0, 3, 1.0).is_err());
    assert!(Grid64::new(2, 2, 2, -1.0, 1.0, 1.0, 3, 1.0).is_err());
    assert!(Grid64::new(2, 2, 2, 1.0, 1.0, 1.0, 1, 1.0).is_err());
    let a = Grid64::unit_cube(2, 3).unwrap();
    let b = Grid64::unit_cube(3, 3).unwrap();
    assert!(matches!(a.check_same(&b), Err(Error::GridMismatch(_))));
}
