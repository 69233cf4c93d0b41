use rayon::prelude::*;

use super::Theorem;
use crate::error::{Error, Result};
use crate::field::{curl_edge_to_face, curl_face_to_edge, inner, weighted_norm_sq, FieldKind, StaggeredField};
use crate::problem::ProblemData;
use crate::quadrature::TimeStencil;
use crate::scalar::Real;
use crate::solver::SolveOutput;
use crate::trajectory::FieldTrajectory;

/// Residual trajectories of the majorants.
///
/// * `ktilde = mu^-1 curl E~ - Y` (faces)
/// * `khat = eps d2E~/dt2 + curl Y - K` (edges; needs at least five nodes)
/// * `kcheck = eps dE~_t/dt + curl Y - K` (edges; needs `E~_t`)
/// * `rt = mu^-1 curl E~_t - dY/dt` (faces; needs `E~_t`)
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals<T> {
    pub ktilde: FieldTrajectory<T>,
    pub khat: Option<FieldTrajectory<T>>,
    pub kcheck: Option<FieldTrajectory<T>>,
    pub rt: Option<FieldTrajectory<T>>,
}

/// Minimum node count for second time differences.
pub(crate) const MIN_NODES_SECOND_DIFF: usize = 5;

/// Per-node residual evaluation shared by the materialising and the
/// streaming paths.
pub(crate) struct ResidualCtx<'a, T> {
    pub p: &'a ProblemData<T>,
    pub e: &'a FieldTrajectory<T>,
    pub e_t: Option<&'a FieldTrajectory<T>>,
    pub y: &'a FieldTrajectory<T>,
    pub d: TimeStencil<T>,
    pub dd: TimeStencil<T>,
}

impl<'a, T: Real> ResidualCtx<'a, T> {
    pub fn new(p: &'a ProblemData<T>, approx: &'a SolveOutput<T>, y: &'a FieldTrajectory<T>) -> Result<Self> {
        approx.validate()?;
        p.grid.check_same(approx.grid())?;
        p.grid.check_same(y.grid())?;
        if y.kind() != FieldKind::Face {
            return Err(Error::Dimension("Y must be a face trajectory".into()));
        }
        let nt = p.grid.nt;
        let dt = p.grid.dt();
        Ok(Self {
            p,
            e: &approx.e,
            e_t: approx.e_t.as_ref(),
            y,
            d: TimeStencil::first_derivative(nt, dt),
            dd: TimeStencil::second_derivative(nt, dt),
        })
    }

    fn e_t(&self) -> Result<&'a FieldTrajectory<T>> {
        self.e_t.ok_or_else(|| Error::Precondition("approximation carries no E_t trajectory".into()))
    }

    fn mu_inv_curl(&self, e: &StaggeredField<T>) -> Result<StaggeredField<T>> {
        self.p.mu_inv.apply(&curl_edge_to_face(e, &self.p.grid)?)
    }

    /// `eps * x + curl Y_k - K_k`
    fn edge_residual(&self, x: &StaggeredField<T>, k: usize) -> Result<StaggeredField<T>> {
        let mut out = self.p.eps.apply(x)?;
        out.axpy(T::one(), &curl_face_to_edge(&self.y.samples()[k], &self.p.grid)?)?;
        out.axpy(-T::one(), &self.p.k.samples()[k])?;
        Ok(out)
    }

    pub fn ktilde(&self, k: usize) -> Result<StaggeredField<T>> {
        let mut out = self.mu_inv_curl(&self.e.samples()[k])?;
        out.axpy(-T::one(), &self.y.samples()[k])?;
        Ok(out)
    }

    pub fn dktilde(&self, k: usize) -> Result<StaggeredField<T>> {
        let mut out = self.mu_inv_curl(&self.e.stencil_at(&self.d, k))?;
        out.axpy(-T::one(), &self.y.stencil_at(&self.d, k))?;
        Ok(out)
    }

    pub fn khat(&self, k: usize) -> Result<StaggeredField<T>> {
        self.edge_residual(&self.e.stencil_at(&self.dd, k), k)
    }

    pub fn kcheck(&self, k: usize) -> Result<StaggeredField<T>> {
        self.edge_residual(&self.e_t()?.stencil_at(&self.d, k), k)
    }

    pub fn rt(&self, k: usize) -> Result<StaggeredField<T>> {
        let mut out = self.mu_inv_curl(&self.e_t()?.samples()[k])?;
        out.axpy(-T::one(), &self.y.stencil_at(&self.d, k))?;
        Ok(out)
    }

    /// `<ktilde_k, curl(E~_t - dE~/dt)_k>`
    pub fn coupling(&self, k: usize, ktilde: &StaggeredField<T>) -> Result<T> {
        let mut diff = self.e_t()?.samples()[k].clone();
        diff.axpy(-T::one(), &self.e.stencil_at(&self.d, k))?;
        inner(ktilde, &curl_edge_to_face(&diff, &self.p.grid)?, &self.p.grid)
    }
}

/// Materialises all residual trajectories available for `approx`.
pub fn residuals<T: Real>(p: &ProblemData<T>, approx: &SolveOutput<T>, y: &FieldTrajectory<T>) -> Result<Residuals<T>> {
    let ctx = ResidualCtx::new(p, approx, y)?;
    let grid = p.grid;
    let build = |kind: FieldKind, f: &(dyn Fn(usize) -> Result<StaggeredField<T>> + Sync)| {
        let samples = (0..grid.nt).into_par_iter().map(f).collect::<Result<Vec<_>>>()?;
        let out = FieldTrajectory::new(grid, samples)?;
        debug_assert_eq!(out.kind(), kind);
        Ok::<_, crate::error::Error>(out)
    };
    let ktilde = build(FieldKind::Face, &|k| ctx.ktilde(k))?;
    let khat = if grid.nt >= MIN_NODES_SECOND_DIFF {
        Some(build(FieldKind::Edge, &|k| ctx.khat(k))?)
    } else {
        None
    };
    let (kcheck, rt) = if approx.e_t.is_some() {
        (Some(build(FieldKind::Edge, &|k| ctx.kcheck(k))?), Some(build(FieldKind::Face, &|k| ctx.rt(k))?))
    } else {
        (None, None)
    };
    Ok(Residuals { ktilde, khat, kcheck, rt })
}

/// Squared residual norms per node.
///
/// `ktilde` and `dktilde`/`rt` are measured in the `mu` norm, `khat` and
/// `kcheck` in the `eps^-1` norm; `coupling` is the plain L2 pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeNorms<T> {
    pub ktilde: Vec<T>,
    pub khat: Option<Vec<T>>,
    pub dktilde: Option<Vec<T>>,
    pub kcheck: Option<Vec<T>>,
    pub rt: Option<Vec<T>>,
    pub coupling: Option<Vec<T>>,
}

struct NodeRow<T> {
    ktilde: T,
    a: T,
    b: T,
    s: T,
}

/// Evaluates the residual norms needed by `theorem` node by node without
/// storing the residual fields.
pub fn node_norms<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    y: &FieldTrajectory<T>,
    theorem: Theorem,
) -> Result<NodeNorms<T>> {
    let ctx = ResidualCtx::new(p, approx, y)?;
    let grid = p.grid;
    if theorem.second_form() {
        ctx.e_t()?;
    } else if grid.nt < MIN_NODES_SECOND_DIFF {
        return Err(Error::Precondition(format!(
            "{} needs second time differences, which require at least {MIN_NODES_SECOND_DIFF} nodes",
            theorem.key()
        )));
    }
    let rows = (0..grid.nt)
        .into_par_iter()
        .map(|k| -> Result<NodeRow<T>> {
            let kt = ctx.ktilde(k)?;
            let ktilde = weighted_norm_sq(&kt, &p.mu, &grid)?;
            if theorem.second_form() {
                Ok(NodeRow {
                    ktilde,
                    a: weighted_norm_sq(&ctx.kcheck(k)?, &p.eps_inv, &grid)?,
                    b: weighted_norm_sq(&ctx.rt(k)?, &p.mu, &grid)?,
                    s: ctx.coupling(k, &kt)?,
                })
            } else {
                Ok(NodeRow {
                    ktilde,
                    a: weighted_norm_sq(&ctx.khat(k)?, &p.eps_inv, &grid)?,
                    b: weighted_norm_sq(&ctx.dktilde(k)?, &p.mu, &grid)?,
                    s: T::zero(),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let ktilde = rows.iter().map(|r| r.ktilde).collect();
    let a: Vec<T> = rows.iter().map(|r| r.a).collect();
    let b: Vec<T> = rows.iter().map(|r| r.b).collect();
    Ok(if theorem.second_form() {
        NodeNorms {
            ktilde,
            khat: None,
            dktilde: None,
            kcheck: Some(a),
            rt: Some(b),
            coupling: Some(rows.iter().map(|r| r.s).collect()),
        }
    } else {
        NodeNorms { ktilde, khat: Some(a), dktilde: Some(b), kcheck: None, rt: None, coupling: None }
    })
}
