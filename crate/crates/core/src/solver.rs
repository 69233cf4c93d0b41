//! Staggered-in-time leapfrog solver and exact projection of catalog cases.

use crate::cases::ManufacturedCase;
use crate::error::{Error, Result};
use crate::field::{curl_edge_to_face, curl_face_to_edge, weighted_inner, FieldKind, StaggeredField};
use crate::grid::GridSpec;
use crate::problem::ProblemData;
use crate::quadrature::TimeStencil;
use crate::scalar::Real;
use crate::trajectory::FieldTrajectory;

/// Approximate (or exact) fields on the report time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput<T> {
    pub e: FieldTrajectory<T>,
    /// Independent approximation of `dE/dt`.
    pub e_t: Option<FieldTrajectory<T>>,
    pub h: Option<FieldTrajectory<T>>,
    pub h_t: Option<FieldTrajectory<T>>,
    /// Conserved leapfrog energy after every internal step.
    pub energy: Option<Vec<T>>,
}

impl<T: Real> SolveOutput<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        self.e.grid()
    }

    pub fn e_t(&self) -> Result<&FieldTrajectory<T>> {
        self.e_t
            .as_ref()
            .ok_or_else(|| Error::Precondition("approximation carries no E_t trajectory".into()))
    }

    pub fn h(&self) -> Result<&FieldTrajectory<T>> {
        self.h.as_ref().ok_or_else(|| Error::Precondition("approximation carries no H trajectory".into()))
    }

    pub fn h_t(&self) -> Result<&FieldTrajectory<T>> {
        self.h_t
            .as_ref()
            .ok_or_else(|| Error::Precondition("approximation carries no H_t trajectory".into()))
    }

    /// Checks kinds and time grids of every present trajectory.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if self.e.kind() != FieldKind::Edge {
            return Err(Error::Dimension("E must be an edge trajectory".into()));
        }
        for (name, t, kind) in [
            ("E_t", &self.e_t, FieldKind::Edge),
            ("H", &self.h, FieldKind::Face),
            ("H_t", &self.h_t, FieldKind::Face),
        ] {
            if let Some(t) = t {
                grid.check_same(t.grid())?;
                if t.kind() != kind {
                    return Err(Error::Dimension(format!("{name} has the wrong field kind")));
                }
            }
        }
        Ok(())
    }
}

/// Leapfrog controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Fraction of the stability limit the internal step may use, in `(0, 1]`.
    pub cfl: T,
    /// Internal steps per report interval.
    pub substeps: usize,
    pub record_energy: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self { cfl: T::one(), substeps: 1, record_energy: false }
    }
}

/// Largest stable leapfrog step for the grid and materials.
pub fn stability_limit<T: Real>(p: &ProblemData<T>) -> T {
    let c2 = (p.eps.lambda_min() * p.mu.lambda_min()).recip();
    let s: T = p.grid.spacing().iter().map(|h| (*h * *h).recip()).sum();
    (c2 * s).sqrt().recip()
}

/// Source value at time `t`: linear interpolation between report nodes,
/// linear extrapolation with the one-sided derivative outside `[0, T]`.
struct SourceSampler<'a, T> {
    traj: &'a FieldTrajectory<T>,
    deriv_first: StaggeredField<T>,
    deriv_last: StaggeredField<T>,
    dt: T,
}

impl<'a, T: Real> SourceSampler<'a, T> {
    fn new(traj: &'a FieldTrajectory<T>) -> Self {
        let n = traj.len();
        let d = TimeStencil::first_derivative(n, traj.grid().dt());
        Self {
            deriv_first: traj.stencil_at(&d, 0),
            deriv_last: traj.stencil_at(&d, n - 1),
            traj,
            dt: traj.grid().dt(),
        }
    }

    fn at(&self, t: T) -> StaggeredField<T> {
        let n = self.traj.len();
        let s = self.traj.samples();
        let t_final = self.dt * T::from_usize_lossy(n - 1);
        if t <= T::zero() {
            let mut out = s[0].clone();
            out.axpy(t, &self.deriv_first).expect("same layout");
            return out;
        }
        if t >= t_final {
            let mut out = s[n - 1].clone();
            out.axpy(t - t_final, &self.deriv_last).expect("same layout");
            return out;
        }
        let x = t / self.dt;
        let j = x.floor().to_usize().unwrap_or(0).min(n - 2);
        let w = x - T::from_usize_lossy(j);
        StaggeredField::lincomb(&[(T::one() - w, &s[j]), (w, &s[j + 1])]).expect("same layout")
    }
}

/// Leapfrog (Yee) solution of the first-order system.
///
/// `E` lives on integer internal steps and `H` on half steps. The start-up
/// half steps `H(+-dt/2)` come from a second-order Taylor expansion around
/// `t = 0`. Reported `H` is the mean of the two neighbouring half steps,
/// reported `E_t` the centred difference of `E` on the internal grid, and
/// `H_t = G - mu^-1 curl E`.
pub fn leapfrog_solve<T: Real>(p: &ProblemData<T>, opts: &SolverOptions<T>) -> Result<SolveOutput<T>> {
    if !(opts.cfl > T::zero() && opts.cfl <= T::one()) {
        return Err(Error::Parameter(format!("cfl must lie in (0, 1], got {}", opts.cfl)));
    }
    if opts.substeps == 0 {
        return Err(Error::Parameter("substeps must be positive".into()));
    }
    let grid = p.grid;
    let dt = grid.dt() / T::from_usize_lossy(opts.substeps);
    let limit = stability_limit(p);
    if dt > opts.cfl * limit {
        return Err(Error::Stability { dt: dt.to_f64_lossy(), limit: (opts.cfl * limit).to_f64_lossy() });
    }
    let half = T::lit(0.5);
    let f_at = SourceSampler::new(&p.f);
    let g_at = SourceSampler::new(&p.g);
    let g_dot0 = p.g.stencil_at(&TimeStencil::first_derivative(grid.nt, grid.dt()), 0);

    // dH/dt(0) and d2H/dt2(0)
    let mut h_rate = g_at.at(T::zero());
    h_rate.axpy(-T::one(), &p.mu_inv.apply(&curl_edge_to_face(&p.e0, &grid)?)?)?;
    let mut h_acc = g_dot0;
    h_acc.axpy(-T::one(), &p.mu_inv.apply(&curl_edge_to_face(&p.e0_prime, &grid)?)?)?;
    let taylor = |sign: T| -> Result<StaggeredField<T>> {
        StaggeredField::lincomb(&[
            (T::one(), &p.h0),
            (sign * half * dt, &h_rate),
            (dt * dt / T::lit(8.0), &h_acc),
        ])
    };
    let h_minus = taylor(-T::one())?;
    let mut h_half = taylor(T::one())?;

    let e_step = |e: &StaggeredField<T>, h: &StaggeredField<T>, t_mid: T, sign: T| -> Result<StaggeredField<T>> {
        let mut rate = p.eps_inv.apply(&curl_face_to_edge(h, &grid)?)?;
        rate.axpy(T::one(), &f_at.at(t_mid))?;
        let mut out = e.clone();
        out.axpy(sign * dt, &rate)?;
        out.apply_boundary();
        Ok(out)
    };
    let h_step = |h: &StaggeredField<T>, e: &StaggeredField<T>, t: T| -> Result<StaggeredField<T>> {
        let mut rate = g_at.at(t);
        rate.axpy(-T::one(), &p.mu_inv.apply(&curl_edge_to_face(e, &grid)?)?)?;
        let mut out = h.clone();
        out.axpy(dt, &rate)?;
        Ok(out)
    };
    let energy_of = |e: &StaggeredField<T>, h_prev: &StaggeredField<T>, h_next: &StaggeredField<T>| -> Result<T> {
        Ok(weighted_inner(e, e, &p.eps, &grid)? + weighted_inner(h_prev, h_next, &p.mu, &grid)?)
    };

    let total = (grid.nt - 1) * opts.substeps;
    let mut e_prev = e_step(&p.e0, &h_minus, -half * dt, -T::one())?;
    let mut e_cur = p.e0.clone();
    let mut h_prev = h_minus;
    let mut energy = Vec::new();
    if opts.record_energy {
        energy.push(energy_of(&e_cur, &h_prev, &h_half)?);
    }

    let mut e_out = Vec::with_capacity(grid.nt);
    let mut et_out = Vec::with_capacity(grid.nt);
    let mut h_out = Vec::with_capacity(grid.nt);
    let inv_2dt = (T::lit(2.0) * dt).recip();

    for n in 0..=total {
        let t = T::from_usize_lossy(n) * dt;
        let e_next = e_step(&e_cur, &h_half, t + half * dt, T::one())?;
        if n % opts.substeps == 0 {
            e_out.push(e_cur.clone());
            et_out.push(StaggeredField::lincomb(&[(inv_2dt, &e_next), (-inv_2dt, &e_prev)])?);
            h_out.push(StaggeredField::lincomb(&[(half, &h_prev), (half, &h_half)])?);
        }
        if n == total {
            break;
        }
        let h_next = h_step(&h_half, &e_next, t + dt)?;
        if opts.record_energy {
            energy.push(energy_of(&e_next, &h_half, &h_next)?);
        }
        e_prev = std::mem::replace(&mut e_cur, e_next);
        h_prev = std::mem::replace(&mut h_half, h_next);
    }

    let e = FieldTrajectory::new(grid, e_out)?;
    let h_t = e.map(|k, ek| {
        let mut out = p.g.samples()[k].clone();
        out.axpy(-T::one(), &p.mu_inv.apply(&curl_edge_to_face(ek, &grid)?)?)?;
        Ok(out)
    })?;
    Ok(SolveOutput {
        e,
        e_t: Some(FieldTrajectory::new(grid, et_out)?),
        h: Some(FieldTrajectory::new(grid, h_out)?),
        h_t: Some(h_t),
        energy: opts.record_energy.then_some(energy),
    })
}

/// Samples the exact fields and time derivatives of `case` on every node.
pub fn project_exact<T: Real>(case: &ManufacturedCase<T>, grid: &GridSpec<T>) -> Result<SolveOutput<T>> {
    Ok(SolveOutput {
        e: FieldTrajectory::from_fn(FieldKind::Edge, grid, |_, t| case.sample_e(grid, t))?,
        e_t: Some(FieldTrajectory::from_fn(FieldKind::Edge, grid, |_, t| case.sample_e_t(grid, t))?),
        h: Some(FieldTrajectory::from_fn(FieldKind::Face, grid, |_, t| case.sample_h(grid, t))?),
        h_t: Some(FieldTrajectory::from_fn(FieldKind::Face, grid, |_, t| case.sample_h_t(grid, t))?),
        energy: None,
    })
}
