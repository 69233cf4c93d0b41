//! Guaranteed a-posteriori error majorants for the time-domain Maxwell
//! system on staggered (Yee) grids.
//!
//! The crate covers the discrete field algebra, manufactured problems, a
//! leapfrog reference solver, Gronwall-type scalar bounds, the majorant
//! functionals themselves and their parameter optimisation. Everything is
//! generic over [`Real`] (`f32` or `f64`); the [`f64`] aliases at the crate
//! root are the usual entry points.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cases;
pub mod error;
pub mod field;
pub mod grid;
pub mod gronwall;
pub mod majorant;
pub mod material;
pub mod norms;
pub mod optimize;
pub mod problem;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod trajectory;

pub use cases::{Bump, Dispersion, ManufacturedCase};
pub use error::{Error, Result};
pub use field::{curl_edge_to_face, curl_face_to_edge, inner, weighted_inner, weighted_norm_sq, FieldKind, StaggeredField};
pub use grid::GridSpec;
pub use majorant::{
    certify, combined_estimate, CombinedReport, MajorantParams, MajorantReport, Theorem, TimeParam, ZeroTermVariant,
};
pub use material::MaterialField;
pub use norms::energy_norm_n;
pub use optimize::{optimize_all, OptimizeConfig};
pub use problem::{assemble_problem, CaseSpec, MaterialSpec, ProblemConfig, ProblemData};
pub use quadrature::ScalarTrajectory;
pub use scalar::Real;
pub use solver::{leapfrog_solve, project_exact, SolveOutput, SolverOptions};
pub use trajectory::FieldTrajectory;

pub type Grid64 = GridSpec<f64>;
pub type Grid32 = GridSpec<f32>;
pub type Field64 = StaggeredField<f64>;
pub type Field32 = StaggeredField<f32>;
pub type Material64 = MaterialField<f64>;
pub type Material32 = MaterialField<f32>;
pub type Trajectory64 = FieldTrajectory<f64>;
pub type Trajectory32 = FieldTrajectory<f32>;
pub type Problem64 = ProblemData<f64>;
pub type Problem32 = ProblemData<f32>;
pub type Report64 = MajorantReport<f64>;
pub type Report32 = MajorantReport<f32>;
