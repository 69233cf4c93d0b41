//! Problem data for the first-order Maxwell system
//!
//! ```text
//! dE/dt - eps^-1 curl H = F,   dH/dt + mu^-1 curl E = G,
//! ```
//!
//! and the derived data of its curl-curl form
//! `eps d2E/dt2 + curl mu^-1 curl E = K` with `K = eps dF/dt + curl G`
//! and `dE/dt(0) = eps^-1 curl H0 + F(0)`.

use std::collections::BTreeMap;

use crate::cases::{self, Dispersion, ManufacturedCase};
use crate::error::{Error, Result};
use crate::field::{curl_face_to_edge, FieldKind, StaggeredField};
use crate::grid::GridSpec;
use crate::material::{MaterialField, Tensor3};
use crate::scalar::Real;
use crate::trajectory::FieldTrajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData<T> {
    pub grid: GridSpec<T>,
    pub eps: MaterialField<T>,
    pub mu: MaterialField<T>,
    pub eps_inv: MaterialField<T>,
    pub mu_inv: MaterialField<T>,
    /// Electric source (edge type).
    pub f: FieldTrajectory<T>,
    /// Magnetic source (face type).
    pub g: FieldTrajectory<T>,
    pub e0: StaggeredField<T>,
    pub h0: StaggeredField<T>,
    /// Right-hand side of the curl-curl form.
    pub k: FieldTrajectory<T>,
    /// Initial time derivative of `E`.
    pub e0_prime: StaggeredField<T>,
}

impl<T: Real> ProblemData<T> {
    /// Validates the inputs and derives `K` and `E0'`.
    pub fn from_parts(
        grid: GridSpec<T>,
        eps: MaterialField<T>,
        mu: MaterialField<T>,
        f: FieldTrajectory<T>,
        g: FieldTrajectory<T>,
        e0: StaggeredField<T>,
        h0: StaggeredField<T>,
    ) -> Result<Self> {
        if f.kind() != FieldKind::Edge || e0.kind() != FieldKind::Edge {
            return Err(Error::Dimension("F and E0 must be edge fields".into()));
        }
        if g.kind() != FieldKind::Face || h0.kind() != FieldKind::Face {
            return Err(Error::Dimension("G and H0 must be face fields".into()));
        }
        grid.check_same(f.grid())?;
        grid.check_same(g.grid())?;
        e0.check_grid(&grid)?;
        h0.check_grid(&grid)?;
        if eps.cells() != grid.cells() || mu.cells() != grid.cells() {
            return Err(Error::Dimension("material does not match grid".into()));
        }
        let tol = T::lit(1e3) * T::epsilon() * (T::one() + e0.max_abs());
        if e0.tangential_trace_max() > tol {
            return Err(Error::Precondition("E0 violates the tangential boundary condition".into()));
        }
        let mut e0 = e0;
        e0.apply_boundary();

        let eps_inv = eps.inverse();
        let mu_inv = mu.inverse();
        let df = f.time_derivative();
        let k = df.map(|n, dfn| {
            let mut kn = eps.apply(dfn)?;
            kn.axpy(T::one(), &curl_face_to_edge(&g.samples()[n], &grid)?)?;
            kn.apply_boundary();
            Ok(kn)
        })?;
        let mut e0_prime = eps_inv.apply(&curl_face_to_edge(&h0, &grid)?)?;
        e0_prime.axpy(T::one(), f.first())?;
        e0_prime.apply_boundary();

        Ok(Self { grid, eps, mu, eps_inv, mu_inv, f, g, e0, h0, k, e0_prime })
    }

    /// `||E0'||^2_eps + ||curl E0||^2_{mu^-1}`: the scale used for relative
    /// tolerances.
    pub fn energy_scale(&self) -> Result<T> {
        let curl = crate::field::curl_edge_to_face(&self.e0, &self.grid)?;
        Ok(crate::field::weighted_norm_sq(&self.e0_prime, &self.eps, &self.grid)?
            + crate::field::weighted_norm_sq(&curl, &self.mu_inv, &self.grid)?)
    }
}

/// Material description used by [`ProblemConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialSpec<T> {
    Vacuum,
    Scalar(T),
    Diagonal([T; 3]),
    Full(Tensor3<T>),
}

impl<T: Real> MaterialSpec<T> {
    pub fn build(&self, grid: &GridSpec<T>) -> Result<MaterialField<T>> {
        match self {
            MaterialSpec::Vacuum => Ok(MaterialField::identity(grid)),
            MaterialSpec::Scalar(v) => MaterialField::scalar(grid, *v),
            MaterialSpec::Diagonal(d) => MaterialField::diagonal(grid, *d),
            MaterialSpec::Full(t) => MaterialField::full(grid, *t),
        }
    }
}

/// Catalog case selection: a name plus named scalar parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaseSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub dispersion: Dispersion,
}

impl CaseSpec {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Self::default() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig<T> {
    pub grid: GridSpec<T>,
    pub eps: MaterialSpec<T>,
    pub mu: MaterialSpec<T>,
    pub case: CaseSpec,
}

impl<T: Real> ProblemConfig<T> {
    pub fn vacuum(grid: GridSpec<T>, case: CaseSpec) -> Self {
        Self { grid, eps: MaterialSpec::Vacuum, mu: MaterialSpec::Vacuum, case }
    }
}

/// Builds the catalog case named in `config`.
pub fn build_case<T: Real>(config: &ProblemConfig<T>) -> Result<ManufacturedCase<T>> {
    cases::from_spec(&config.case, &config.grid)
}

/// Samples the catalog case of `config` and derives the second-order data.
pub fn assemble_problem<T: Real>(config: &ProblemConfig<T>) -> Result<ProblemData<T>> {
    let grid = config.grid;
    let eps = config.eps.build(&grid)?;
    let mu = config.mu.build(&grid)?;
    let case = build_case(config)?;
    case.check_materials(&eps, &mu)?;
    let (f, g) = case.sources(&grid, &eps, &mu)?;
    let e0 = case.sample_e(&grid, T::zero());
    let h0 = case.sample_h(&grid, T::zero());
    ProblemData::from_parts(grid, eps, mu, f, g, e0, h0)
}
