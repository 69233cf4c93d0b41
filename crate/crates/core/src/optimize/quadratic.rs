//! The majorant at a fixed node as a quadratic functional of `Y`, and a
//! matrix-free conjugate-gradient solver for it.
//!
//! With `b(t*) = sum_m beta_m f_m` and `W_j = sum_m beta_m tau_{m,j}`
//! (`tau` the trapezoid weights), the `Y`-dependent part of `b(t*)` is
//!
//! ```text
//!   sum_m beta_m (1-rho_m)^-1 ||Z_m - Y_m||^2_mu
//! + sum_j W_j gamma_j^-1 ||X_j + curl Y_j||^2_{eps^-1}
//! + sum_j W_j (gamma_j rho_j)^-1 ||R_j - (D Y)_j||^2_mu
//! + sum_j 2 W_j <Z_j - Y_j, q_j>                         (second form)
//! + (sum_m beta_m) * zero term                            (via Y_0)
//! ```
//!
//! with `Z = mu^-1 curl E~`, `X = eps D2E~ - K` or `eps D E~_t - K`,
//! `R = mu^-1 curl D E~` or `mu^-1 curl E~_t`, and
//! `q = curl(E~_t - D E~)`. Inner products use the dual-cell quadrature, in
//! which the edge-to-face curl (restricted to interior edges) is the
//! adjoint of the face-to-edge curl.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{curl_edge_to_face, curl_face_to_edge, inner, FieldKind, StaggeredField};
use crate::majorant::{Theorem, TimeParam, ZeroTermVariant};
use crate::problem::ProblemData;
use crate::quadrature::{phi_weighted_running, trapezoid_weight, TimeStencil};
use crate::scalar::Real;
use crate::solver::SolveOutput;
use crate::trajectory::FieldTrajectory;

/// Weights `beta_m` with `b(t_star) = sum_m beta_m f_m`.
pub fn bound_weights<T: Real>(gamma: &[T], dt: T, k_star: usize) -> Vec<T> {
    let nt = gamma.len();
    (0..nt)
        .map(|m| {
            let mut unit = vec![T::zero(); nt];
            unit[m] = T::one();
            let w = phi_weighted_running(gamma, &unit, dt)[k_star];
            if m == k_star {
                w + T::one()
            } else {
                w
            }
        })
        .collect()
}

/// Plain dual-cell inner product summed over all nodes.
pub fn traj_inner<T: Real>(a: &FieldTrajectory<T>, b: &FieldTrajectory<T>) -> Result<T> {
    let grid = *a.grid();
    let parts = a
        .samples()
        .par_iter()
        .zip(b.samples().par_iter())
        .map(|(x, y)| inner(x, y, &grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().sum())
}

/// `Q(Y) = 1/2 <A Y, Y> - <r, Y> + const` for the majorant at node `k_star`.
pub struct QuadraticY<'a, T> {
    p: &'a ProblemData<T>,
    /// Coefficient of `||Y_m - Z_m||^2_mu`, times two.
    c: Vec<T>,
    omega: Vec<T>,
    kappa: Vec<T>,
    d: TimeStencil<T>,
    dt_t: TimeStencil<T>,
    rhs: FieldTrajectory<T>,
}

impl<'a, T: Real> QuadraticY<'a, T> {
    /// Assembles the quadratic. Non-smooth variants (absolute coupling,
    /// `z_tilde`) are replaced by their signed counterparts.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: &'a ProblemData<T>,
        approx: &SolveOutput<T>,
        theorem: Theorem,
        rho: &TimeParam<T>,
        gamma: &TimeParam<T>,
        zero_term: ZeroTermVariant,
        k_star: usize,
    ) -> Result<Self> {
        let grid = p.grid;
        let nt = grid.nt;
        let dt = grid.dt();
        if k_star >= nt {
            return Err(Error::IndexOutOfRange { index: k_star, len: nt });
        }
        let rho = rho.nodes_checked(nt)?;
        let gamma = gamma.nodes_checked(nt)?;
        let beta = bound_weights(&gamma, dt, k_star);
        let beta_sum: T = beta.iter().copied().sum();
        let w: Vec<T> = (0..nt)
            .map(|j| (j..nt).map(|m| beta[m] * trapezoid_weight(dt, m, j)).sum())
            .collect();
        let two = T::lit(2.0);
        let mut c: Vec<T> = (0..nt).map(|m| two * beta[m] / (T::one() - rho[m])).collect();
        if zero_term == ZeroTermVariant::ZHat {
            c[0] += two * beta_sum;
        }
        let omega: Vec<T> = (0..nt).map(|j| two * w[j] / gamma[j]).collect();
        let kappa: Vec<T> = (0..nt).map(|j| two * w[j] / (gamma[j] * rho[j])).collect();
        let d = TimeStencil::first_derivative(nt, dt);
        let dd = TimeStencil::second_derivative(nt, dt);
        let dt_t = d.transpose();

        let e = &approx.e;
        let e_t = if theorem.second_form() { Some(approx.e_t()?) } else { None };
        let mu_inv_curl = |x: &StaggeredField<T>| p.mu_inv.apply(&curl_edge_to_face(x, &grid)?);

        // kappa_j mu R_j
        let kr = (0..nt)
            .into_par_iter()
            .map(|j| -> Result<StaggeredField<T>> {
                let r = match e_t {
                    Some(et) => mu_inv_curl(&et.samples()[j])?,
                    None => mu_inv_curl(&e.stencil_at(&d, j))?,
                };
                Ok(p.mu.apply(&r)?.scaled(kappa[j]))
            })
            .collect::<Result<Vec<_>>>()?;
        let kr = FieldTrajectory::new(grid, kr)?;
        let curl_e0 = curl_edge_to_face(&p.e0.sub(e.first())?, &grid)?;

        let rhs = (0..nt)
            .into_par_iter()
            .map(|i| -> Result<StaggeredField<T>> {
                let z = mu_inv_curl(&e.samples()[i])?;
                let mut out = p.mu.apply(&z)?.scaled(c[i]);
                // X_i = eps (D2 E or D E_t)_i - K_i
                let x = match e_t {
                    Some(et) => et.stencil_at(&d, i),
                    None => e.stencil_at(&dd, i),
                };
                let mut x = p.eps.apply(&x)?;
                x.axpy(-T::one(), &p.k.samples()[i])?;
                x.apply_boundary();
                out.axpy(-omega[i], &curl_edge_to_face(&p.eps_inv.apply(&x)?, &grid)?)?;
                out.axpy(T::one(), &kr.stencil_at(&dt_t, i))?;
                if let Some(et) = e_t {
                    let mut q = et.samples()[i].clone();
                    q.axpy(-T::one(), &e.stencil_at(&d, i))?;
                    out.axpy(two * w[i], &curl_edge_to_face(&q, &grid)?)?;
                }
                if i == 0 && zero_term != ZeroTermVariant::ZHat {
                    out.axpy(two * beta_sum, &curl_e0)?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let rhs = FieldTrajectory::new(grid, rhs)?;
        Ok(Self { p, c, omega, kappa, d, dt_t, rhs })
    }

    pub fn rhs(&self) -> &FieldTrajectory<T> {
        &self.rhs
    }

    /// Matrix-free product `A v`.
    pub fn apply(&self, v: &FieldTrajectory<T>) -> Result<FieldTrajectory<T>> {
        let p = self.p;
        let grid = p.grid;
        let u = v.map(|j, _| Ok(p.mu.apply(&v.stencil_at(&self.d, j))?.scaled(self.kappa[j])))?;
        v.map(|i, vi| {
            let mut out = p.mu.apply(vi)?.scaled(self.c[i]);
            let cc = curl_edge_to_face(&p.eps_inv.apply(&curl_face_to_edge(vi, &grid)?)?, &grid)?;
            out.axpy(self.omega[i], &cc)?;
            out.axpy(T::one(), &u.stencil_at(&self.dt_t, i))?;
            Ok(out)
        })
    }

    /// `1/2 <A y, y> - <r, y>` (the objective up to a `Y`-independent constant).
    pub fn value(&self, y: &FieldTrajectory<T>) -> Result<T> {
        let ay = self.apply(y)?;
        Ok(T::lit(0.5) * traj_inner(&ay, y)? - traj_inner(&self.rhs, y)?)
    }
}

/// Outcome of [`conjugate_gradient`].
#[derive(Debug, Clone, PartialEq)]
pub struct CgResult<T> {
    pub y: FieldTrajectory<T>,
    pub iterations: usize,
    /// `||r_k|| / ||r_0||` at exit.
    pub relative_residual: T,
    /// Change of the quadratic objective after every iteration.
    pub decrements: Vec<T>,
}

/// Conjugate gradients for `A y = r` from `y0`. Stops once the residual
/// has dropped by `tol` relative to the initial residual, or after
/// `max_iter` iterations. A non-positive curvature `<p, A p>` aborts with
/// [`Error::CgBreakdown`].
pub fn conjugate_gradient<T: Real>(
    q: &QuadraticY<'_, T>,
    y0: &FieldTrajectory<T>,
    max_iter: usize,
    tol: T,
) -> Result<CgResult<T>> {
    let mut y = y0.clone();
    let mut r = q.rhs.sub(&q.apply(&y)?)?;
    let mut rr = traj_inner(&r, &r)?;
    let r0 = rr.sqrt();
    let mut decrements = Vec::new();
    if r0 == T::zero() {
        return Ok(CgResult { y, iterations: 0, relative_residual: T::zero(), decrements });
    }
    let mut dir = r.clone();
    let mut iterations = 0;
    let mut rel = T::one();
    while iterations < max_iter {
        let ad = q.apply(&dir)?;
        let curv = traj_inner(&dir, &ad)?;
        if !(curv > T::zero()) {
            return Err(Error::CgBreakdown(format!("curvature {curv} at iteration {iterations}")));
        }
        let alpha = rr / curv;
        y = y.axpy(alpha, &dir)?;
        r = r.axpy(-alpha, &ad)?;
        decrements.push(-T::lit(0.5) * alpha * rr);
        iterations += 1;
        let rr_new = traj_inner(&r, &r)?;
        rel = rr_new.sqrt() / r0;
        if rel <= tol {
            break;
        }
        dir = r.axpy(rr_new / rr, &dir)?;
        rr = rr_new;
    }
    Ok(CgResult { y, iterations, relative_residual: rel, decrements })
}

/// Zero face trajectory on the grid of `p`.
pub fn zero_y<T: Real>(p: &ProblemData<T>) -> FieldTrajectory<T> {
    FieldTrajectory::zeros(FieldKind::Face, &p.grid)
}
