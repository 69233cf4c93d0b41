//! Minimisation of the majorant over its free parameters.
//!
//! `gamma` and `rho` enter through scalar weights only, so for a fixed `Y`
//! the residual norms are computed once and the search runs on scalars.
//! For fixed `(gamma, rho)` the bound at the target node is a convex
//! quadratic in `Y`, minimised by conjugate gradients.

mod golden;
mod quadratic;

pub use golden::{golden_section, GoldenResult};
pub use quadratic::{bound_weights, conjugate_gradient, traj_inner, zero_y, CgResult, QuadraticY};

use crate::error::{Error, Result};
use crate::majorant::{
    bound_b_and_big_b, certify, g_from_norms, node_norms, y_from_approx, MajorantParams, MajorantReport, NodeNorms,
    Theorem, TimeParam, ZeroTermParts, ZeroTermVariant,
};
use crate::problem::ProblemData;
use crate::quadrature::ScalarTrajectory;
use crate::scalar::Real;
use crate::solver::SolveOutput;
use crate::trajectory::FieldTrajectory;

/// Starting point for `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YInit {
    Zero,
    #[default]
    MuInvCurlE,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig<T> {
    /// Search interval for `gamma` (searched in `log gamma`).
    pub gamma_bracket: (T, T),
    /// Candidate values of `rho`.
    pub rho_grid: Vec<T>,
    pub cg_max_iter: usize,
    /// Relative residual reduction at which CG stops.
    pub cg_tol: T,
    pub y_init: YInit,
    /// Outer alternations between `Y` and `(gamma, rho)`.
    pub sweeps: usize,
    /// Pieces of the piecewise-constant `gamma(t)` for time-dependent theorems.
    pub gamma_pieces: usize,
    /// Node whose bound is minimised; `None` means the last node.
    pub target: Option<usize>,
    /// Bracket length (in `log gamma`) at which golden-section search stops.
    pub golden_tol: T,
    /// Also optimise `Y` (otherwise only `gamma` and `rho`).
    pub optimize_y: bool,
    pub initial_rho: T,
    pub initial_gamma: T,
}

impl<T: Real> Default for OptimizeConfig<T> {
    fn default() -> Self {
        Self {
            gamma_bracket: (T::lit(1e-3), T::lit(1e3)),
            rho_grid: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9].iter().map(|v| T::lit(*v)).collect(),
            cg_max_iter: 200,
            cg_tol: T::lit(1e-8),
            y_init: YInit::MuInvCurlE,
            sweeps: 3,
            gamma_pieces: 4,
            target: None,
            golden_tol: T::lit(1e-6),
            optimize_y: true,
            initial_rho: T::lit(0.5),
            initial_gamma: T::one(),
        }
    }
}

impl<T: Real> OptimizeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.gamma_bracket;
        if !(a > T::zero() && a < b && b.is_finite()) {
            return Err(Error::EmptyBracket(format!("gamma bracket [{a}, {b}]")));
        }
        if self.rho_grid.is_empty() {
            return Err(Error::EmptyBracket("rho grid is empty".into()));
        }
        if self.rho_grid.iter().any(|r| !(*r > T::zero() && *r < T::one())) {
            return Err(Error::Parameter("rho candidates must lie in (0, 1)".into()));
        }
        if !(self.cg_tol > T::zero() && self.cg_tol < T::one()) {
            return Err(Error::Parameter("cg_tol must lie in (0, 1)".into()));
        }
        if self.gamma_pieces == 0 {
            return Err(Error::Parameter("gamma_pieces must be positive".into()));
        }
        Ok(())
    }

    fn target_node(&self, nt: usize) -> Result<usize> {
        let k = self.target.unwrap_or(nt - 1);
        if k >= nt {
            return Err(Error::IndexOutOfRange { index: k, len: nt });
        }
        Ok(k)
    }
}

/// Initial `Y` per the configuration.
pub fn initial_y<T: Real>(p: &ProblemData<T>, approx: &SolveOutput<T>, init: YInit) -> Result<FieldTrajectory<T>> {
    match init {
        YInit::Zero => Ok(zero_y(p)),
        YInit::MuInvCurlE => y_from_approx(p, approx),
    }
}

/// `b(t_star)` for the given parameters, evaluated directly.
pub fn bound_at<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
    k_star: usize,
) -> Result<T> {
    params.validate(theorem, p.grid.nt)?;
    let norms = node_norms(p, approx, &params.y, theorem)?;
    let zp = ZeroTermParts::compute(p, approx, &params.y, theorem)?;
    ScalarSearch { norms: &norms, z: zp.value(params.zero_term), theorem, abs: params.abs_coupling, dt: p.grid.dt() }
        .bound(&params.rho, &params.gamma, k_star)
}

/// Scalar-only evaluation of `b(t_star)` with fixed residual norms.
struct ScalarSearch<'a, T> {
    norms: &'a NodeNorms<T>,
    z: T,
    theorem: Theorem,
    abs: bool,
    dt: T,
}

impl<T: Real> ScalarSearch<'_, T> {
    fn bound(&self, rho: &TimeParam<T>, gamma: &TimeParam<T>, k: usize) -> Result<T> {
        let g = g_from_norms(self.norms, self.theorem, rho, gamma, self.abs, self.dt)?;
        let f = ScalarTrajectory::new(g.into_iter().map(|v| v + self.z).collect(), self.dt)?;
        let (b, _) = bound_b_and_big_b(&f, gamma, self.theorem.bound_form())?;
        Ok(b[k])
    }

    fn bound_or_inf(&self, rho: &TimeParam<T>, gamma: &TimeParam<T>, k: usize) -> T {
        self.bound(rho, gamma, k).ok().filter(|v| v.is_finite()).unwrap_or(T::infinity())
    }
}

/// Result of [`optimize_gamma_rho`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRhoResult<T> {
    pub gamma: TimeParam<T>,
    pub rho: TimeParam<T>,
    pub bound: T,
    pub warnings: Vec<String>,
}

fn piece_of(k: usize, nt: usize, pieces: usize) -> usize {
    (k * pieces / nt).min(pieces - 1)
}

fn expand_pieces<T: Real>(values: &[T], nt: usize) -> TimeParam<T> {
    TimeParam::Nodes((0..nt).map(|k| values[piece_of(k, nt, values.len())]).collect())
}

/// Minimises `b(t_star)` over `gamma` and `rho` for fixed `Y`.
///
/// For every `rho` candidate a golden-section search over `log gamma` runs
/// on the configured bracket; the best pair wins, ties going to the smaller
/// `gamma` and then the smaller `rho`. Time-dependent theorems then refine
/// a piecewise-constant `gamma(t)` by coordinate descent.
pub fn optimize_gamma_rho<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
    cfg: &OptimizeConfig<T>,
) -> Result<GammaRhoResult<T>> {
    cfg.validate()?;
    let nt = p.grid.nt;
    let k_star = cfg.target_node(nt)?;
    let norms = node_norms(p, approx, &params.y, theorem)?;
    let zp = ZeroTermParts::compute(p, approx, &params.y, theorem)?;
    let search =
        ScalarSearch { norms: &norms, z: zp.value(params.zero_term), theorem, abs: params.abs_coupling, dt: p.grid.dt() };
    let (la, lb) = (cfg.gamma_bracket.0.ln(), cfg.gamma_bracket.1.ln());
    // Endpoints map back exactly; exp(ln a) need not round-trip.
    let to_gamma = |lg: T| {
        if lg == la {
            cfg.gamma_bracket.0
        } else if lg == lb {
            cfg.gamma_bracket.1
        } else {
            lg.exp()
        }
    };

    let mut rhos = cfg.rho_grid.clone();
    rhos.sort_by(|a, b| a.partial_cmp(b).expect("finite rho"));
    let mut best: Option<(T, T, T)> = None; // (bound, gamma, rho)
    for &rho in &rhos {
        let r = TimeParam::Constant(rho);
        let res = golden_section(
            |lg| search.bound_or_inf(&r, &TimeParam::Constant(to_gamma(lg)), k_star),
            la,
            lb,
            cfg.golden_tol,
        )?;
        let gamma = to_gamma(res.x);
        let better = match best {
            None => true,
            Some((v, g, _)) => res.value < v || (res.value == v && gamma < g),
        };
        if better {
            best = Some((res.value, gamma, rho));
        }
    }
    let (mut value, gamma, rho) = best.expect("rho grid is not empty");
    let mut warnings = Vec::new();
    let edge_tol = T::lit(10.0) * cfg.golden_tol;
    if (gamma.ln() - la).abs() <= edge_tol || (lb - gamma.ln()).abs() <= edge_tol {
        let msg = format!("optimal gamma {gamma} lies on the search bracket edge; consider widening it");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let rho_p = TimeParam::Constant(rho);
    let mut gamma_p = TimeParam::Constant(gamma);

    if !theorem.constant_params() && cfg.gamma_pieces > 1 {
        let mut pieces = vec![gamma; cfg.gamma_pieces];
        for _ in 0..3 {
            let before = value;
            for i in 0..pieces.len() {
                let res = golden_section(
                    |lg| {
                        let mut trial = pieces.clone();
                        trial[i] = to_gamma(lg);
                        search.bound_or_inf(&rho_p, &expand_pieces(&trial, nt), k_star)
                    },
                    la,
                    lb,
                    cfg.golden_tol,
                )?;
                if res.value < value {
                    pieces[i] = to_gamma(res.x);
                    value = res.value;
                }
            }
            if !(value < before) {
                break;
            }
        }
        if pieces.iter().any(|g| *g != gamma) {
            gamma_p = expand_pieces(&pieces, nt);
        }
    }
    Ok(GammaRhoResult { gamma: gamma_p, rho: rho_p, bound: value, warnings })
}

/// Result of [`optimize_y`].
#[derive(Debug, Clone, PartialEq)]
pub struct YResult<T> {
    pub y: FieldTrajectory<T>,
    pub iterations: usize,
    pub relative_residual: T,
    /// `b(t_star)` at the returned `Y`.
    pub bound: T,
}

/// Minimises `b(t_star)` over `Y` for fixed `(gamma, rho)`, starting from
/// `params.y`. Non-smooth variants are handled through their signed
/// surrogate; the better of the start and the CG result (measured by the
/// exact bound) is returned.
pub fn optimize_y<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
    cfg: &OptimizeConfig<T>,
) -> Result<YResult<T>> {
    cfg.validate()?;
    params.validate(theorem, p.grid.nt)?;
    let k_star = cfg.target_node(p.grid.nt)?;
    let q = QuadraticY::new(p, approx, theorem, &params.rho, &params.gamma, params.zero_term, k_star)?;
    let cg = conjugate_gradient(&q, &params.y, cfg.cg_max_iter, cfg.cg_tol)?;
    let start = bound_at(p, approx, params, theorem, k_star)?;
    let mut trial = params.clone();
    trial.y = cg.y;
    let end = bound_at(p, approx, &trial, theorem, k_star)?;
    let smooth = !params.abs_coupling && params.zero_term != ZeroTermVariant::ZTilde;
    if smooth || end <= start {
        Ok(YResult { y: trial.y, iterations: cg.iterations, relative_residual: cg.relative_residual, bound: end })
    } else {
        Ok(YResult { y: params.y.clone(), iterations: cg.iterations, relative_residual: cg.relative_residual, bound: start })
    }
}

/// Alternates [`optimize_y`] and [`optimize_gamma_rho`] for `cfg.sweeps`
/// sweeps, starting from `cfg.y_init` with the initial `(gamma, rho)`. With
/// zero sweeps the initial report is returned unchanged. A step is only
/// accepted if it does not increase the bound at the target node.
pub fn optimize_all<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    cfg: &OptimizeConfig<T>,
    theorem: Theorem,
    base: &MajorantParams<T>,
    exact: Option<&SolveOutput<T>>,
) -> Result<MajorantReport<T>> {
    cfg.validate()?;
    let k_star = cfg.target_node(p.grid.nt)?;
    let mut params = base.clone();
    if cfg.sweeps == 0 {
        return certify(p, approx, &params, theorem, exact);
    }
    let mut value = bound_at(p, approx, &params, theorem, k_star)?;
    let mut iterations = 0;
    let mut warnings = Vec::new();
    for sweep in 0..cfg.sweeps {
        if cfg.optimize_y {
            let r = optimize_y(p, approx, &params, theorem, cfg)?;
            iterations += r.iterations;
            if r.bound <= value {
                params.y = r.y;
                value = r.bound;
            }
        }
        let gr = optimize_gamma_rho(p, approx, &params, theorem, cfg)?;
        if gr.bound <= value {
            params.gamma = gr.gamma;
            params.rho = gr.rho;
            value = gr.bound;
        }
        warnings.extend(gr.warnings);
        log::debug!("sweep {sweep}: b(t*) = {value}");
    }
    warnings.dedup();
    let mut report = certify(p, approx, &params, theorem, exact)?;
    report.cg_iterations = iterations;
    report.warnings = warnings;
    Ok(report)
}

/// Default parameters: constant `rho`, `gamma` from the configuration and
/// `Y` from `cfg.y_init`.
pub fn initial_params<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    cfg: &OptimizeConfig<T>,
    zero_term: ZeroTermVariant,
    abs_coupling: bool,
) -> Result<MajorantParams<T>> {
    let mut params = MajorantParams::new(cfg.initial_rho, cfg.initial_gamma, initial_y(p, approx, cfg.y_init)?);
    params.zero_term = zero_term;
    params.abs_coupling = abs_coupling;
    Ok(params)
}
