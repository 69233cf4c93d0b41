use std::path::{Path, PathBuf};
use std::time::Instant;

use majorant_core::cases::{perturb, perturb_rate};
use majorant_core::gronwall::{builtin_suite, gronwall_differential, rk4_linear, run_suite_case, SuiteCase};
use majorant_core::majorant::certify;
use majorant_core::optimize::initial_y;
use majorant_core::problem::build_case;
use majorant_core::{
    assemble_problem, leapfrog_solve, optimize_all, project_exact, MajorantReport, ProblemConfig, ProblemData,
    ScalarTrajectory, SolveOutput, Theorem,
};
use serde::{Deserialize, Serialize};

use crate::config::{Config, OptimizeMode, ParamValue, SolverMethod, TheoremKey};
use crate::error::{CliError, CliResult};
use crate::report::{fmt_f64, write_text, Num, ReportFile};
use crate::snapshot;

pub const SNAPSHOT_FILE: &str = "snapshot.msnap";

/// Problem data, exact solution and approximation described by `cfg`.
pub struct Pipeline {
    pub problem: ProblemData<f64>,
    pub exact: SolveOutput<f64>,
}

impl Pipeline {
    pub fn build(pc: &ProblemConfig<f64>) -> CliResult<Self> {
        let problem = assemble_problem(pc)?;
        let exact = project_exact(&build_case(pc)?, &pc.grid)?;
        Ok(Self { problem, exact })
    }

    pub fn approximation(&self, cfg: &Config) -> CliResult<SolveOutput<f64>> {
        let mut out = match cfg.solver.method {
            SolverMethod::Leapfrog => leapfrog_solve(&self.problem, &cfg.solver_options())?,
            SolverMethod::Exact => self.exact.clone(),
        };
        if let Some((delta, bump)) = cfg.bump() {
            out.e = perturb(&out.e, delta, bump)?;
            if let Some(et) = &out.e_t {
                out.e_t = Some(perturb_rate(et, delta, bump)?);
            }
        }
        Ok(out)
    }
}

/// Solves and writes the snapshot archive; returns its path.
pub fn solve(cfg: &Config, out_dir: &Path) -> CliResult<PathBuf> {
    let pipe = Pipeline::build(&cfg.problem_config()?)?;
    let approx = pipe.approximation(cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let path = out_dir.join(SNAPSHOT_FILE);
    snapshot::write(&path, &approx)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn mode_key(m: OptimizeMode) -> &'static str {
    match m {
        OptimizeMode::None => "none",
        OptimizeMode::Params => "params",
        OptimizeMode::Full => "full",
    }
}

/// Evaluates (and optionally optimizes) the majorant of `approx`.
pub fn evaluate(
    cfg: &Config,
    pipe: &Pipeline,
    approx: &SolveOutput<f64>,
    theorem: Theorem,
    mode: OptimizeMode,
) -> CliResult<MajorantReport<f64>> {
    let mut ocfg = cfg.optimize_config();
    ocfg.optimize_y = mode == OptimizeMode::Full;
    let y = initial_y(&pipe.problem, approx, ocfg.y_init)?;
    let params = cfg.params(y);
    let report = match mode {
        OptimizeMode::None => certify(&pipe.problem, approx, &params, theorem, Some(&pipe.exact))?,
        OptimizeMode::Params | OptimizeMode::Full => {
            optimize_all(&pipe.problem, approx, &ocfg, theorem, &params, Some(&pipe.exact))?
        }
    };
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub theorem: Option<TheoremKey>,
    pub optimize: Option<OptimizeMode>,
}

/// Writes `report.json`, `report.csv` and `timing.json` into `out_dir`.
/// Fails with a verification error (after writing) when the bound does not
/// dominate the true error.
pub fn certify_cmd(cfg: &Config, snapshot_path: &Path, out_dir: &Path, opts: &CertifyOptions) -> CliResult<ReportFile> {
    let start = Instant::now();
    let pc = cfg.problem_config()?;
    let approx = snapshot::read(snapshot_path)?;
    pc.grid.check_same(approx.grid())?;
    let pipe = Pipeline::build(&pc)?;
    let theorem: Theorem = opts.theorem.unwrap_or(cfg.majorant.theorem).into();
    let mode = opts.optimize.unwrap_or(cfg.majorant.optimize);
    let report = evaluate(cfg, &pipe, &approx, theorem, mode)?;
    let mut echo = cfg.clone();
    echo.majorant.theorem = opts.theorem.unwrap_or(cfg.majorant.theorem);
    echo.majorant.optimize = mode;
    let file = ReportFile::new(&echo, mode_key(mode), &report);

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_text(&out_dir.join("report.json"), &file.to_json())?;
    write_text(&out_dir.join("report.csv"), &file.to_csv())?;
    let timing = serde_json::json!({ "command": "certify", "wall_seconds": start.elapsed().as_secs_f64() });
    write_text(&out_dir.join("timing.json"), &format!("{timing:#}\n"))?;

    if report.dominates() == Some(false) {
        return Err(CliError::Verification(format!(
            "{} bound does not dominate the true error (worst margin {})",
            theorem.key(),
            report.worst_relative_margin().map_or("n/a".into(), fmt_f64)
        )));
    }
    Ok(file)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub level: usize,
    pub nx: usize,
    pub nt: usize,
    pub h: Num,
    pub dt: Num,
    pub true_n: Num,
    #[serde(rename = "true_N")]
    pub true_big_n: Num,
    pub bound_b: Num,
    #[serde(rename = "bound_B")]
    pub bound_big_b: Num,
    pub efficiency: Option<Num>,
    /// Largest `b` when the sampled exact solution is the approximation.
    pub exact_bound: Num,
    pub energy_scale: Num,
    pub dominates: bool,
    /// Observed order of `sqrt(true_n)` against the previous level.
    pub order_true: Option<Num>,
    pub order_bound: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyTable {
    pub theorem: &'static str,
    pub rows: Vec<VerifyRow>,
}

impl VerifyTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "level,nx,nt,h,dt,true_n,true_N,bound_b,bound_B,efficiency,exact_bound,order_true,order_bound\n",
        );
        let opt = |v: Option<Num>| v.map_or(String::new(), |n| fmt_f64(n.0));
        for r in &self.rows {
            let cells = [
                r.level.to_string(),
                r.nx.to_string(),
                r.nt.to_string(),
                fmt_f64(r.h.0),
                fmt_f64(r.dt.0),
                fmt_f64(r.true_n.0),
                fmt_f64(r.true_big_n.0),
                fmt_f64(r.bound_b.0),
                fmt_f64(r.bound_big_b.0),
                opt(r.efficiency),
                fmt_f64(r.exact_bound.0),
                opt(r.order_true),
                opt(r.order_bound),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Refinement study: every level halves all spacings and the time step.
pub fn verify(cfg: &Config, levels: usize, out_dir: Option<&Path>) -> CliResult<VerifyTable> {
    if levels == 0 {
        return Err(CliError::Config("verify needs at least one level".into()));
    }
    if matches!(cfg.majorant.rho, ParamValue::Nodes(_)) || matches!(cfg.majorant.gamma, ParamValue::Nodes(_)) {
        return Err(CliError::Config("verify needs constant rho and gamma".into()));
    }
    let theorem: Theorem = cfg.majorant.theorem.into();
    let mut pc = cfg.problem_config()?;
    let mut rows: Vec<VerifyRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            pc.grid = pc.grid.refined();
        }
        let mut level_cfg = cfg.clone();
        level_cfg.grid.nx = pc.grid.nx;
        level_cfg.grid.ny = pc.grid.ny;
        level_cfg.grid.nz = pc.grid.nz;
        level_cfg.grid.nt = pc.grid.nt;
        let pipe = Pipeline::build(&pc)?;
        let approx = pipe.approximation(&level_cfg)?;
        let r = evaluate(&level_cfg, &pipe, &approx, theorem, OptimizeMode::None)?;
        let exact_r = evaluate(&level_cfg, &pipe, &pipe.exact, theorem, OptimizeMode::None)?;
        let last = |v: &Option<Vec<f64>>| v.as_ref().map_or(f64::NAN, |v| v[v.len() - 1]);
        let true_n = last(&r.true_n);
        let bound_b = r.final_bound();
        let order = |prev: f64, cur: f64| {
            let o = (prev.sqrt() / cur.sqrt()).log2();
            o.is_finite().then_some(Num(o))
        };
        let (order_true, order_bound) = match rows.last() {
            Some(p) => (order(p.true_n.0, true_n), order(p.bound_b.0, bound_b)),
            None => (None, None),
        };
        let row = VerifyRow {
            level,
            nx: pc.grid.nx,
            nt: pc.grid.nt,
            h: Num(pc.grid.hx()),
            dt: Num(pc.grid.dt()),
            true_n: Num(true_n),
            true_big_n: Num(last(&r.true_big_n)),
            bound_b: Num(bound_b),
            bound_big_b: Num(r.bound_big_b[r.bound_big_b.len() - 1]),
            efficiency: r.efficiency.as_ref().and_then(|e| e[e.len() - 1]).map(Num),
            exact_bound: Num(exact_r.bound_b.iter().copied().fold(0.0, f64::max)),
            energy_scale: Num(r.energy_scale),
            dominates: r.dominates().unwrap_or(false),
            order_true,
            order_bound,
        };
        log::info!("level {level}: {}^3 cells, nt={}, b(T)={}", row.nx, row.nt, fmt_f64(bound_b));
        rows.push(row);
    }
    let table = VerifyTable { theorem: theorem.key(), rows };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let json = serde_json::to_string_pretty(&table).expect("table serializes");
        write_text(&dir.join("verify.json"), &format!("{json}\n"))?;
        write_text(&dir.join("verify.csv"), &table.to_csv())?;
    }
    Ok(table)
}

/// Optional JSON input of the `gronwall` command. Every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GronwallSpec {
    pub nt: usize,
    pub tight_tol: f64,
    pub equiv_tol: f64,
    /// Subset of the builtin cases; all of them when absent.
    pub cases: Option<Vec<String>>,
    pub inject: Option<Fault>,
}

impl Default for GronwallSpec {
    fn default() -> Self {
        Self { nt: 1001, tight_tol: 1e-6, equiv_tol: 1e-12, cases: None, inject: None }
    }
}

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Evaluates the bound with `-psi` while the oracle keeps `psi`.
    FlipPsiSign,
}

impl GronwallSpec {
    /// An empty or whitespace-only document means the defaults.
    pub fn from_json(text: &str) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        crate::config::parse_json(text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn flipped_case(case: &SuiteCase, spec: &GronwallSpec) -> CliResult<GronwallLine> {
    let phi = ScalarTrajectory::from_fn(spec.nt, 1.0, case.phi)?;
    let psi = ScalarTrajectory::from_fn(spec.nt, 1.0, |t| -(case.psi)(t))?;
    let bound = gronwall_differential(case.u0, &phi, &psi)?;
    let oracle = rk4_linear(case.u0, case.phi, case.psi, spec.nt, 1.0, 4);
    let worst = bound
        .values()
        .iter()
        .zip(&oracle)
        .map(|(b, o)| (o - b) / o.abs().max(1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GronwallLine {
        name: case.name,
        passed: worst <= spec.tight_tol,
        detail: format!("worst violation {} (psi sign flipped)", fmt_f64(worst)),
    })
}

pub fn gronwall(spec: &GronwallSpec) -> CliResult<Vec<GronwallLine>> {
    let suite = builtin_suite();
    let selected: Vec<&SuiteCase> = match &spec.cases {
        None => suite.iter().collect(),
        Some(names) => names
            .iter()
            .map(|n| {
                suite
                    .iter()
                    .find(|c| c.name == n)
                    .ok_or_else(|| CliError::Config(format!("unknown gronwall case `{n}`")))
            })
            .collect::<CliResult<_>>()?,
    };
    selected
        .into_iter()
        .map(|case| match spec.inject {
            Some(Fault::FlipPsiSign) => flipped_case(case, spec),
            None => {
                let r = run_suite_case(case, spec.nt, spec.tight_tol, spec.equiv_tol)?;
                Ok(GronwallLine {
                    name: r.name,
                    passed: r.passed,
                    detail: format!(
                        "gap {}, oracle error {}, equivalence {}",
                        fmt_f64(r.gap),
                        fmt_f64(r.oracle_error),
                        fmt_f64(r.equivalence_error)
                    ),
                })
            }
        })
        .collect()
}
