use rayon::prelude::*;

use super::functional::f_functional;
use super::{MajorantParams, Theorem, TimeParam};
use crate::error::{Error, Result};
use crate::field::curl_edge_to_face;
use crate::norms::energy_norm_n;
use crate::problem::ProblemData;
use crate::quadrature::{cumulative_trapezoid, phi_weighted_running, ScalarTrajectory, TimeStencil};
use crate::scalar::Real;
use crate::solver::SolveOutput;

/// How `B` relates to the exponentially weighted integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    /// `B = e^{gamma t} int_0^t e^{-gamma s} f`, bounding the plain time
    /// integral of `n` (constant `gamma` only).
    Unweighted,
    /// `B = e^{Gamma(t)} int_0^t e^{-Gamma} gamma f`, bounding the
    /// `gamma`-weighted time integral of `n`.
    GammaWeighted,
}

/// `b = W + f` and `B`, where `W = e^{Gamma} int e^{-Gamma} gamma f`.
pub fn bound_b_and_big_b<T: Real>(
    f: &ScalarTrajectory<T>,
    gamma: &TimeParam<T>,
    form: BoundForm,
) -> Result<(ScalarTrajectory<T>, ScalarTrajectory<T>)> {
    let nt = f.len();
    let g = gamma.nodes_checked(nt)?;
    crate::quadrature::check_positive("gamma", &g)?;
    let w = phi_weighted_running(&g, f.values(), f.dt());
    let b: Vec<T> = w.iter().zip(f.values()).map(|(w, f)| *w + *f).collect();
    let big_b = match form {
        BoundForm::GammaWeighted => w,
        BoundForm::Unweighted => {
            let c = gamma
                .constant()
                .ok_or_else(|| Error::Parameter("the unweighted form needs a constant gamma".into()))?;
            w.into_iter().map(|v| v / c).collect()
        }
    };
    Ok((ScalarTrajectory::new(b, f.dt())?, ScalarTrajectory::new(big_b, f.dt())?))
}

/// True error norms `n` (per node) and `N` (running time integral).
///
/// First-form theorems measure `e_t` as `dE/dt - dE~/dt` (time difference of
/// `E~`), second-form theorems as `dE/dt - E~_t`. `N` is weighted by `gamma`
/// for the time-dependent theorems.
pub fn true_error_norms<T: Real>(
    exact: &SolveOutput<T>,
    approx: &SolveOutput<T>,
    p: &ProblemData<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
) -> Result<(ScalarTrajectory<T>, ScalarTrajectory<T>)> {
    let grid = p.grid;
    grid.check_same(exact.grid())?;
    grid.check_same(approx.grid())?;
    let exact_t = exact.e_t()?;
    let approx_t = if theorem.second_form() { Some(approx.e_t()?) } else { None };
    let d = TimeStencil::first_derivative(grid.nt, grid.dt());
    let rho = params.rho.nodes_checked(grid.nt)?;
    let n = (0..grid.nt)
        .into_par_iter()
        .map(|k| -> Result<T> {
            let at = match approx_t {
                Some(t) => t.samples()[k].clone(),
                None => approx.e.stencil_at(&d, k),
            };
            let e_t = exact_t.samples()[k].sub(&at)?;
            let curl_e = curl_edge_to_face(&exact.e.samples()[k].sub(&approx.e.samples()[k])?, &grid)?;
            energy_norm_n(&e_t, &curl_e, &p.eps, &p.mu_inv, rho[k], &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let big_n = match theorem.bound_form() {
        BoundForm::Unweighted => cumulative_trapezoid(&n, grid.dt()),
        BoundForm::GammaWeighted => {
            let g = params.gamma.nodes_checked(grid.nt)?;
            let w: Vec<T> = n.iter().zip(&g).map(|(a, b)| *a * *b).collect();
            cumulative_trapezoid(&w, grid.dt())
        }
    };
    Ok((ScalarTrajectory::new(n, grid.dt())?, ScalarTrajectory::new(big_n, grid.dt())?))
}

/// Bounds per time node plus, in verification mode, the true errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantReport<T> {
    pub theorem: Theorem,
    pub times: Vec<T>,
    pub f: Vec<T>,
    pub bound_b: Vec<T>,
    pub bound_big_b: Vec<T>,
    pub true_n: Option<Vec<T>>,
    pub true_big_n: Option<Vec<T>>,
    /// `bound_b / true_n` where the true error is resolvable.
    pub efficiency: Option<Vec<Option<T>>>,
    pub zero_term: T,
    pub params: MajorantParams<T>,
    /// Scale of the initial data, `||E0'||^2_eps + ||curl E0||^2_{mu^-1}`.
    pub energy_scale: T,
    pub cg_iterations: usize,
    pub warnings: Vec<String>,
}

impl<T: Real> MajorantReport<T> {
    pub fn final_bound(&self) -> T {
        self.bound_b[self.bound_b.len() - 1]
    }

    /// Smallest `(b - n) / b` over the nodes where `b` exceeds rounding
    /// level; `None` without true errors.
    pub fn worst_relative_margin(&self) -> Option<T> {
        let n = self.true_n.as_ref()?;
        let floor = efficiency_threshold(self.energy_scale);
        Some(
            self.bound_b
                .iter()
                .zip(n)
                .filter(|(b, _)| **b > floor)
                .map(|(b, n)| (*b - *n) / *b)
                .fold(T::infinity(), |m, v| m.min(v)),
        )
    }

    /// `true_n <= bound_b` at every node, up to rounding of the data
    /// (`1e3 eps` times the energy scale).
    pub fn dominates(&self) -> Option<bool> {
        let n = self.true_n.as_ref()?;
        let tol = efficiency_threshold(self.energy_scale);
        Some(self.bound_b.iter().zip(n).all(|(b, n)| *n <= *b + tol))
    }
}

pub(crate) fn efficiency_threshold<T: Real>(energy_scale: T) -> T {
    T::lit(1e3) * T::epsilon() * energy_scale
}

/// Evaluates the majorant of `theorem` and, when `exact` is given, the true
/// error norms and efficiency indices.
pub fn certify<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
    exact: Option<&SolveOutput<T>>,
) -> Result<MajorantReport<T>> {
    let tol = T::lit(1e3) * T::epsilon() * (T::one() + approx.e.max_abs());
    if approx.e.samples().iter().any(|s| s.tangential_trace_max() > tol) {
        return Err(Error::Precondition("approximation violates the tangential boundary condition".into()));
    }
    let (f, _, z) = f_functional(p, approx, params, theorem)?;
    let (b, big_b) = bound_b_and_big_b(&f, &params.gamma, theorem.bound_form())?;
    let energy_scale = p.energy_scale()?;
    let (true_n, true_big_n, efficiency) = match exact {
        Some(ex) => {
            let (n, big_n) = true_error_norms(ex, approx, p, params, theorem)?;
            let thr = efficiency_threshold(energy_scale);
            let eff = b
                .values()
                .iter()
                .zip(n.values())
                .map(|(b, n)| (*n > thr && *n > T::zero()).then(|| *b / *n))
                .collect();
            (Some(n.into_values()), Some(big_n.into_values()), Some(eff))
        }
        None => (None, None, None),
    };
    Ok(MajorantReport {
        theorem,
        times: p.grid.times(),
        f: f.into_values(),
        bound_b: b.into_values(),
        bound_big_b: big_b.into_values(),
        true_n,
        true_big_n,
        efficiency,
        zero_term: z,
        params: params.clone(),
        energy_scale,
        cg_iterations: 0,
        warnings: Vec::new(),
    })
}
