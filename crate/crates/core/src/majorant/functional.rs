use super::residuals::node_norms;
use super::{MajorantParams, NodeNorms, Theorem, TimeParam, ZeroTermVariant};
use crate::error::{Error, Result};
use crate::field::{curl_edge_to_face, inner, weighted_norm_sq};
use crate::problem::ProblemData;
use crate::quadrature::{cumulative_trapezoid, ScalarTrajectory, TimeStencil};
use crate::scalar::Real;
use crate::solver::SolveOutput;
use crate::trajectory::FieldTrajectory;

/// Ingredients of the initial-error term at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTermParts<T> {
    /// `||e_t(0)||^2_eps`
    pub et_sq: T,
    /// `||curl e(0)||^2_{mu^-1}`
    pub curl_sq: T,
    /// `<ktilde(0), curl e(0)>`
    pub cross: T,
    /// `||ktilde(0)||^2_mu`
    pub ktilde_sq: T,
}

impl<T: Real> ZeroTermParts<T> {
    /// Evaluates the parts. The first form measures `e_t(0)` against the
    /// time difference of `E~`, the second form against `E~_t(0)`.
    pub fn compute(
        p: &ProblemData<T>,
        approx: &SolveOutput<T>,
        y: &FieldTrajectory<T>,
        theorem: Theorem,
    ) -> Result<Self> {
        let grid = &p.grid;
        approx.validate()?;
        grid.check_same(approx.grid())?;
        let et0 = if theorem.second_form() {
            approx.e_t()?.first().clone()
        } else {
            approx.e.stencil_at(&TimeStencil::first_derivative(grid.nt, grid.dt()), 0)
        };
        let e_t = p.e0_prime.sub(&et0)?;
        let curl_e = curl_edge_to_face(&p.e0.sub(approx.e.first())?, grid)?;
        let mut ktilde = p.mu_inv.apply(&curl_edge_to_face(approx.e.first(), grid)?)?;
        ktilde.axpy(-T::one(), y.first())?;
        Ok(Self {
            et_sq: weighted_norm_sq(&e_t, &p.eps, grid)?,
            curl_sq: weighted_norm_sq(&curl_e, &p.mu_inv, grid)?,
            cross: inner(&ktilde, &curl_e, grid)?,
            ktilde_sq: weighted_norm_sq(&ktilde, &p.mu, grid)?,
        })
    }

    pub fn value(&self, variant: ZeroTermVariant) -> T {
        let two = T::lit(2.0);
        match variant {
            ZeroTermVariant::Z => self.et_sq + self.curl_sq + two * self.cross,
            ZeroTermVariant::ZTilde => self.et_sq + self.curl_sq + two * self.cross.abs(),
            ZeroTermVariant::ZHat => self.et_sq + two * self.curl_sq + self.ktilde_sq,
        }
    }
}

/// Initial-error term of `theorem` in the requested variant.
pub fn zero_term<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    y: &FieldTrajectory<T>,
    variant: ZeroTermVariant,
    theorem: Theorem,
) -> Result<T> {
    Ok(ZeroTermParts::compute(p, approx, y, theorem)?.value(variant))
}

fn weighted_running<T: Real>(values: &[T], weight: impl Fn(usize) -> T, dt: T) -> Vec<T> {
    let w: Vec<T> = values.iter().enumerate().map(|(k, v)| weight(k) * *v).collect();
    cumulative_trapezoid(&w, dt)
}

/// `g` of `theorem` from precomputed residual norms.
pub fn g_from_norms<T: Real>(
    norms: &NodeNorms<T>,
    theorem: Theorem,
    rho: &TimeParam<T>,
    gamma: &TimeParam<T>,
    abs_coupling: bool,
    dt: T,
) -> Result<Vec<T>> {
    let nt = norms.ktilde.len();
    let rho = rho.nodes_checked(nt)?;
    let gamma = gamma.nodes_checked(nt)?;
    let missing = || Error::Precondition(format!("residual norms for {} not evaluated", theorem.key()));
    let (a, b) = if theorem.second_form() {
        (norms.kcheck.as_ref().ok_or_else(missing)?, norms.rt.as_ref().ok_or_else(missing)?)
    } else {
        (norms.khat.as_ref().ok_or_else(missing)?, norms.dktilde.as_ref().ok_or_else(missing)?)
    };
    let one = T::one();
    let (ia, ib) = if theorem.constant_params() {
        // weights outside the integrals
        let (g0, r0) = (gamma[0], rho[0]);
        let ia = cumulative_trapezoid(a, dt).into_iter().map(|v| v / g0).collect::<Vec<_>>();
        let ib = cumulative_trapezoid(b, dt).into_iter().map(|v| v / (g0 * r0)).collect::<Vec<_>>();
        (ia, ib)
    } else {
        (
            weighted_running(a, |k| gamma[k].recip(), dt),
            weighted_running(b, |k| (gamma[k] * rho[k]).recip(), dt),
        )
    };
    let coupling = if theorem.second_form() {
        let s = norms.coupling.as_ref().ok_or_else(missing)?;
        cumulative_trapezoid(s, dt)
            .into_iter()
            .map(|v| T::lit(2.0) * if abs_coupling { v.abs() } else { v })
            .collect()
    } else {
        vec![T::zero(); nt]
    };
    Ok((0..nt)
        .map(|k| norms.ktilde[k] / (one - rho[k]) + coupling[k] + ia[k] + ib[k])
        .collect())
}

/// `f = g + z` for `theorem`.
pub(crate) fn f_functional<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
) -> Result<(ScalarTrajectory<T>, NodeNorms<T>, T)> {
    params.validate(theorem, p.grid.nt)?;
    let norms = node_norms(p, approx, &params.y, theorem)?;
    let z = zero_term(p, approx, &params.y, params.zero_term, theorem)?;
    let g = g_from_norms(&norms, theorem, &params.rho, &params.gamma, params.abs_coupling, p.grid.dt())?;
    let f = ScalarTrajectory::new(g.into_iter().map(|v| v + z).collect(), p.grid.dt())?;
    Ok((f, norms, z))
}

/// `f` of the first-form estimate with constant parameters.
pub fn f_first_form<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
) -> Result<ScalarTrajectory<T>> {
    Ok(f_functional(p, approx, params, Theorem::T1)?.0)
}

/// `f` of the first-form estimate with time-dependent weights inside the
/// time integrals.
pub fn f_refined<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
) -> Result<ScalarTrajectory<T>> {
    Ok(f_functional(p, approx, params, Theorem::T3)?.0)
}

/// `f` of the second-form estimate. Constant parameters give the
/// constant-parameter variant, trajectories the time-dependent one.
pub fn f_second_form<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
) -> Result<ScalarTrajectory<T>> {
    let theorem = if params.rho.is_constant() && params.gamma.is_constant() { Theorem::T5 } else { Theorem::T4 };
    Ok(f_functional(p, approx, params, theorem)?.0)
}
