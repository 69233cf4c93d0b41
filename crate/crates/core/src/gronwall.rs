//! Gronwall inequalities in differential and integral form, and an ODE
//! oracle to check them against.
//!
//! Differential form: `u' <= phi u + psi` implies
//! `u(t) <= e^{Phi(t)} (u(0) + int_0^t e^{-Phi} psi)`.
//! Integral form: `u <= psi + int_0^t phi u` implies
//! `u(t) <= e^{Phi(t)} int_0^t e^{-Phi} phi psi + psi(t)`.
//! `Phi` is the running integral of `phi`.

use crate::error::{Error, Result};
use crate::quadrature::{
    check_nonnegative, cumulative_trapezoid, phi_weighted_running, plain_weighted_running, ScalarTrajectory,
};
use crate::scalar::Real;

/// Differential-form bound at every node.
pub fn gronwall_differential<T: Real>(
    u0: T,
    phi: &ScalarTrajectory<T>,
    psi: &ScalarTrajectory<T>,
) -> Result<ScalarTrajectory<T>> {
    phi.check_same(psi)?;
    check_nonnegative("phi", phi.values())?;
    let integral = plain_weighted_running(phi.values(), psi.values(), phi.dt());
    let big_phi = cumulative_trapezoid(phi.values(), phi.dt());
    let values = integral.iter().zip(&big_phi).map(|(i, p)| u0 * p.exp() + *i).collect();
    ScalarTrajectory::new(values, phi.dt())
}

/// Constant-`phi` specialisation `u0 e^{c t} + e^{c t} int_0^t e^{-c s} psi`.
pub fn gronwall_differential_const<T: Real>(u0: T, c: T, psi: &ScalarTrajectory<T>) -> Result<ScalarTrajectory<T>> {
    if !(c >= T::zero()) {
        return Err(Error::Parameter(format!("phi must be nonnegative, got {c}")));
    }
    let dt = psi.dt();
    let g = (c * dt).exp();
    let half = T::lit(0.5);
    let w = half * (g + T::one()) * half * dt;
    let mut acc = u0;
    let mut out = Vec::with_capacity(psi.len());
    out.push(acc);
    for k in 0..psi.len() - 1 {
        acc = acc * g + w * (psi[k] + psi[k + 1]);
        out.push(acc);
    }
    ScalarTrajectory::new(out, dt)
}

/// Integral-form bound at every node.
pub fn gronwall_integral<T: Real>(phi: &ScalarTrajectory<T>, psi: &ScalarTrajectory<T>) -> Result<ScalarTrajectory<T>> {
    phi.check_same(psi)?;
    check_nonnegative("phi", phi.values())?;
    let running = phi_weighted_running(phi.values(), psi.values(), phi.dt());
    let values = running.iter().zip(psi.values()).map(|(r, p)| *r + *p).collect();
    ScalarTrajectory::new(values, phi.dt())
}

/// Constant-`phi` specialisation `c e^{c t} int_0^t e^{-c s} psi + psi(t)`.
pub fn gronwall_integral_const<T: Real>(c: T, psi: &ScalarTrajectory<T>) -> Result<ScalarTrajectory<T>> {
    if !(c >= T::zero()) {
        return Err(Error::Parameter(format!("phi must be nonnegative, got {c}")));
    }
    let dt = psi.dt();
    let g = (c * dt).exp();
    let gm1 = (c * dt).exp_m1() * T::lit(0.5);
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(psi.len());
    out.push(psi[0]);
    for k in 0..psi.len() - 1 {
        acc = acc * g + gm1 * (psi[k] + psi[k + 1]);
        out.push(acc + psi[k + 1]);
    }
    ScalarTrajectory::new(out, dt)
}

/// Classical fourth-order Runge-Kutta for `u' = phi(t) u + psi(t)` with
/// `refine` steps per time-grid interval. Returns the solution on the
/// coarse nodes.
pub fn rk4_linear<T: Real>(
    u0: T,
    phi: impl Fn(T) -> T,
    psi: impl Fn(T) -> T,
    nt: usize,
    t_final: T,
    refine: usize,
) -> Vec<T> {
    let steps = (nt - 1) * refine.max(1);
    let h = t_final / T::from_usize_lossy(steps);
    let rhs = |t: T, u: T| phi(t) * u + psi(t);
    let half = T::lit(0.5);
    let mut u = u0;
    let mut out = Vec::with_capacity(nt);
    out.push(u);
    for n in 0..steps {
        let t = T::from_usize_lossy(n) * h;
        let k1 = rhs(t, u);
        let k2 = rhs(t + half * h, u + half * h * k1);
        let k3 = rhs(t + half * h, u + half * h * k2);
        let k4 = rhs(t + h, u + h * k3);
        u += h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4);
        if (n + 1) % refine.max(1) == 0 {
            out.push(u);
        }
    }
    out
}

/// Outcome of [`gronwall_oracle_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    pub bound: Vec<T>,
    pub oracle: Vec<T>,
    /// Largest `(oracle - bound) / max(1, |oracle|)` over the nodes.
    pub worst_violation: T,
    /// Largest `|bound - oracle| / max(1, |oracle|)`.
    pub max_relative_gap: T,
    /// `true` when the oracle never exceeds the bound by more than `tol`.
    pub holds: bool,
}

/// Integrates `u' = phi u + psi`, `u(0) = u0` by RK4 on a grid refined
/// `refine` times and compares it with [`gronwall_differential`].
pub fn gronwall_oracle_check<T: Real>(
    phi: impl Fn(T) -> T,
    psi: impl Fn(T) -> T,
    u0: T,
    nt: usize,
    t_final: T,
    refine: usize,
    tol: T,
) -> Result<OracleReport<T>> {
    let phi_s = ScalarTrajectory::from_fn(nt, t_final, &phi)?;
    let psi_s = ScalarTrajectory::from_fn(nt, t_final, &psi)?;
    let bound = gronwall_differential(u0, &phi_s, &psi_s)?.into_values();
    let oracle = rk4_linear(u0, phi, psi, nt, t_final, refine);
    let mut worst = T::neg_infinity();
    let mut gap = T::zero();
    for (b, o) in bound.iter().zip(&oracle) {
        let scale = o.abs().max(T::one());
        worst = worst.max((*o - *b) / scale);
        gap = gap.max((*b - *o).abs() / scale);
    }
    Ok(OracleReport { bound, oracle, worst_violation: worst, max_relative_gap: gap, holds: worst <= tol })
}

/// One entry of the built-in verification suite.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub name: &'static str,
    pub phi: fn(f64) -> f64,
    pub psi: fn(f64) -> f64,
    pub u0: f64,
    pub exact: fn(f64) -> f64,
}

/// Cases with closed-form solutions of `u' = phi u + psi` on `[0, 1]`.
pub fn builtin_suite() -> Vec<SuiteCase> {
    vec![
        SuiteCase { name: "exp_growth", phi: |_| 1.0, psi: |_| 0.0, u0: 1.0, exact: f64::exp },
        SuiteCase { name: "sin_forcing", phi: |_| 0.0, psi: f64::sin, u0: 0.0, exact: |t| 1.0 - t.cos() },
        SuiteCase { name: "constant_forcing", phi: |_| 0.0, psi: |_| 1.0, u0: 0.5, exact: |t| 0.5 + t },
        SuiteCase { name: "linear_phi", phi: |t| t, psi: |_| 0.0, u0: 1.0, exact: |t| (0.5 * t * t).exp() },
        SuiteCase {
            name: "growth_with_forcing",
            phi: |_| 2.0,
            psi: |_| 1.0,
            u0: 0.0,
            exact: |t| 0.5 * ((2.0 * t).exp() - 1.0),
        },
        SuiteCase {
            name: "growth_with_sin",
            phi: |_| 1.0,
            psi: f64::sin,
            u0: 0.0,
            exact: |t| 0.5 * (t.exp() - t.sin() - t.cos()),
        },
    ]
}

/// Result of running one suite case.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    /// Bound dominates the RK4 oracle at every node (within `tol`).
    pub dominates: bool,
    /// Largest relative gap between bound and oracle.
    pub gap: f64,
    /// Largest relative deviation of the oracle from the closed form.
    pub oracle_error: f64,
    /// Differential form reproduced through the integral form.
    pub equivalence_error: f64,
    pub passed: bool,
}

/// Runs one case at `nt` nodes on `[0, 1]`.
///
/// `tight_tol` bounds the bound/oracle gap (the hypothesis holds with
/// equality in every suite case) and `equiv_tol` the relative difference
/// between the two lemma forms.
pub fn run_suite_case(case: &SuiteCase, nt: usize, tight_tol: f64, equiv_tol: f64) -> Result<SuiteResult> {
    let report = gronwall_oracle_check(case.phi, case.psi, case.u0, nt, 1.0, 4, tight_tol)?;
    let dt = 1.0 / (nt - 1) as f64;
    let oracle_error = report
        .oracle
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let e = (case.exact)(k as f64 * dt);
            (o - e).abs() / e.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let equivalence_error = equivalence_error(case, nt)?;
    let dominates = report.holds;
    let passed = dominates && report.max_relative_gap <= tight_tol && equivalence_error <= equiv_tol;
    Ok(SuiteResult { name: case.name, dominates, gap: report.max_relative_gap, oracle_error, equivalence_error, passed })
}

/// Feeds the differential hypothesis through the integral lemma with
/// `psi~(t) = u0 + int_0^t psi` and returns the largest relative difference
/// to the differential-form bound.
pub fn equivalence_error(case: &SuiteCase, nt: usize) -> Result<f64> {
    let phi = ScalarTrajectory::from_fn(nt, 1.0, case.phi)?;
    let psi = ScalarTrajectory::from_fn(nt, 1.0, case.psi)?;
    let diff = gronwall_differential(case.u0, &phi, &psi)?;
    let tilde: Vec<f64> = cumulative_trapezoid(psi.values(), psi.dt()).iter().map(|v| v + case.u0).collect();
    let integral = gronwall_integral(&phi, &ScalarTrajectory::new(tilde, psi.dt())?)?;
    Ok(diff
        .values()
        .iter()
        .zip(integral.values())
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max))
}
