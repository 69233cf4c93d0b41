//! JSON experiment configuration.
//!
//! Every block rejects unknown keys. Parsing reports the JSON path of the
//! offending field, so `grid.nt` rather than a bare serde message.

use std::collections::BTreeMap;
use std::path::Path;

use majorant_core::cases::{Bump, Dispersion};
use majorant_core::majorant::TimeParam;
use majorant_core::optimize::YInit;
use majorant_core::{
    CaseSpec, GridSpec, MajorantParams, MaterialSpec, OptimizeConfig, ProblemConfig, SolverOptions, Theorem,
    ZeroTermVariant,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: GridBlock,
    #[serde(default)]
    pub materials: MaterialsBlock,
    pub case: CaseBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationBlock>,
    #[serde(default)]
    pub majorant: MajorantBlock,
    #[serde(default)]
    pub solver: SolverBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
    #[serde(default = "one")]
    pub lz: f64,
    pub nt: usize,
    #[serde(rename = "T", default = "one")]
    pub t_final: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsBlock {
    #[serde(default)]
    pub eps: MaterialBlock,
    #[serde(default)]
    pub mu: MaterialBlock,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialBlock {
    #[default]
    Vacuum,
    Scalar {
        value: f64,
    },
    Diagonal {
        values: [f64; 3],
    },
    Full {
        values: [[f64; 3]; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseBlock {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub dispersion: DispersionKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKey {
    #[default]
    Yee,
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKey {
    Vanishing,
    Persistent,
}

/// Smooth perturbation `delta * bump` added to `E` (and its rate to `E_t`)
/// of the computed approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationBlock {
    pub bump: BumpKey,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[value(rename_all = "verbatim")]
pub enum TheoremKey {
    T1,
    T3,
    T4,
    T5,
}

impl From<TheoremKey> for Theorem {
    fn from(k: TheoremKey) -> Self {
        match k {
            TheoremKey::T1 => Theorem::T1,
            TheoremKey::T3 => Theorem::T3,
            TheoremKey::T4 => Theorem::T4,
            TheoremKey::T5 => Theorem::T5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroTermKey {
    Z,
    ZTilde,
    #[default]
    ZHat,
}

impl From<ZeroTermKey> for ZeroTermVariant {
    fn from(k: ZeroTermKey) -> Self {
        match k {
            ZeroTermKey::Z => ZeroTermVariant::Z,
            ZeroTermKey::ZTilde => ZeroTermVariant::ZTilde,
            ZeroTermKey::ZHat => ZeroTermVariant::ZHat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YInitKey {
    Zero,
    #[default]
    MuInvCurlE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeMode {
    #[default]
    None,
    /// Only `gamma` and `rho`.
    Params,
    /// `gamma`, `rho` and `Y`.
    Full,
}

/// A constant or one value per time node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Constant(f64),
    Nodes(Vec<f64>),
}

impl ParamValue {
    fn to_time_param(&self) -> TimeParam<f64> {
        match self {
            ParamValue::Constant(v) => TimeParam::Constant(*v),
            ParamValue::Nodes(v) => TimeParam::Nodes(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MajorantBlock {
    #[serde(default = "default_theorem")]
    pub theorem: TheoremKey,
    #[serde(default = "default_rho")]
    pub rho: ParamValue,
    #[serde(default = "default_gamma")]
    pub gamma: ParamValue,
    #[serde(default)]
    pub zero_term: ZeroTermKey,
    #[serde(default)]
    pub abs_coupling: bool,
    #[serde(default)]
    pub y: YInitKey,
    #[serde(default)]
    pub optimize: OptimizeMode,
    #[serde(default)]
    pub optimize_config: OptimizeBlock,
}

fn default_theorem() -> TheoremKey {
    TheoremKey::T5
}
fn default_rho() -> ParamValue {
    ParamValue::Constant(0.5)
}
fn default_gamma() -> ParamValue {
    ParamValue::Constant(1.0)
}

impl Default for MajorantBlock {
    fn default() -> Self {
        Self {
            theorem: default_theorem(),
            rho: default_rho(),
            gamma: default_gamma(),
            zero_term: ZeroTermKey::default(),
            abs_coupling: false,
            y: YInitKey::default(),
            optimize: OptimizeMode::default(),
            optimize_config: OptimizeBlock::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeBlock {
    pub gamma_bracket: [f64; 2],
    pub rho_grid: Vec<f64>,
    pub cg_max_iter: usize,
    pub cg_tol: f64,
    pub sweeps: usize,
    pub gamma_pieces: usize,
    pub target_node: Option<usize>,
    pub golden_tol: f64,
}

impl Default for OptimizeBlock {
    fn default() -> Self {
        let d = OptimizeConfig::<f64>::default();
        Self {
            gamma_bracket: [d.gamma_bracket.0, d.gamma_bracket.1],
            rho_grid: d.rho_grid,
            cg_max_iter: d.cg_max_iter,
            cg_tol: d.cg_tol,
            sweeps: d.sweeps,
            gamma_pieces: d.gamma_pieces,
            target_node: d.target,
            golden_tol: d.golden_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    Leapfrog,
    /// Samples the manufactured solution instead of solving.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub method: SolverMethod,
    pub cfl: f64,
    pub substeps: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOptions::<f64>::default();
        Self { method: SolverMethod::default(), cfl: d.cfl, substeps: d.substeps }
    }
}

/// Deserializes `text`, naming the JSON path of the first bad field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("at `{path}`: {}", e.into_inner()))
    })
}

impl Config {
    pub fn from_json(text: &str) -> CliResult<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> CliResult<GridSpec<f64>> {
        let g = &self.grid;
        GridSpec::new(g.nx, g.ny, g.nz, g.lx, g.ly, g.lz, g.nt, g.t_final)
            .map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn problem_config(&self) -> CliResult<ProblemConfig<f64>> {
        let material = |m: &MaterialBlock| match m {
            MaterialBlock::Vacuum => MaterialSpec::Vacuum,
            MaterialBlock::Scalar { value } => MaterialSpec::Scalar(*value),
            MaterialBlock::Diagonal { values } => MaterialSpec::Diagonal(*values),
            MaterialBlock::Full { values } => MaterialSpec::Full(*values),
        };
        let case = CaseSpec {
            name: self.case.name.clone(),
            params: self.case.params.clone(),
            dispersion: match self.case.dispersion {
                DispersionKey::Yee => Dispersion::Yee,
                DispersionKey::Continuum => Dispersion::Continuum,
            },
        };
        Ok(ProblemConfig {
            grid: self.grid()?,
            eps: material(&self.materials.eps),
            mu: material(&self.materials.mu),
            case,
        })
    }

    pub fn bump(&self) -> Option<(f64, Bump)> {
        self.perturbation.map(|p| {
            let bump = match p.bump {
                BumpKey::Vanishing => Bump::Vanishing,
                BumpKey::Persistent => Bump::Persistent,
            };
            (p.delta, bump)
        })
    }

    pub fn solver_options(&self) -> SolverOptions<f64> {
        SolverOptions { cfl: self.solver.cfl, substeps: self.solver.substeps, record_energy: false }
    }

    pub fn optimize_config(&self) -> OptimizeConfig<f64> {
        let o = &self.majorant.optimize_config;
        let m = &self.majorant;
        OptimizeConfig {
            gamma_bracket: (o.gamma_bracket[0], o.gamma_bracket[1]),
            rho_grid: o.rho_grid.clone(),
            cg_max_iter: o.cg_max_iter,
            cg_tol: o.cg_tol,
            y_init: match m.y {
                YInitKey::Zero => YInit::Zero,
                YInitKey::MuInvCurlE => YInit::MuInvCurlE,
            },
            sweeps: o.sweeps,
            gamma_pieces: o.gamma_pieces,
            target: o.target_node,
            golden_tol: o.golden_tol,
            optimize_y: m.optimize == OptimizeMode::Full,
            initial_rho: m.rho.first(),
            initial_gamma: m.gamma.first(),
        }
    }

    /// Majorant parameters with `Y` taken from `y`.
    pub fn params(&self, y: majorant_core::Trajectory64) -> MajorantParams<f64> {
        let m = &self.majorant;
        MajorantParams {
            rho: m.rho.to_time_param(),
            gamma: m.gamma.to_time_param(),
            y,
            zero_term: m.zero_term.into(),
            abs_coupling: m.abs_coupling,
        }
    }
}

impl ParamValue {
    fn first(&self) -> f64 {
        match self {
            ParamValue::Constant(v) => *v,
            ParamValue::Nodes(v) => v.first().copied().unwrap_or(f64::NAN),
        }
    }
}
