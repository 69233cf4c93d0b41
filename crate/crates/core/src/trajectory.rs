//! Time-indexed sequences of staggered fields.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldKind, StaggeredField};
use crate::grid::GridSpec;
use crate::quadrature::TimeStencil;
use crate::scalar::Real;

/// One staggered field per time node of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrajectory<T> {
    grid: GridSpec<T>,
    kind: FieldKind,
    samples: Vec<StaggeredField<T>>,
}

impl<T: Real> FieldTrajectory<T> {
    pub fn new(grid: GridSpec<T>, samples: Vec<StaggeredField<T>>) -> Result<Self> {
        if samples.len() != grid.nt {
            return Err(Error::Dimension(format!(
                "trajectory has {} samples, grid has {} time nodes",
                samples.len(),
                grid.nt
            )));
        }
        let kind = samples[0].kind();
        for s in &samples {
            if s.kind() != kind {
                return Err(Error::Dimension("samples of mixed kind".into()));
            }
            s.check_grid(&grid)?;
        }
        Ok(Self { grid, kind, samples })
    }

    pub fn zeros(kind: FieldKind, grid: &GridSpec<T>) -> Self {
        Self {
            grid: *grid,
            kind,
            samples: vec![StaggeredField::zeros(kind, grid); grid.nt],
        }
    }

    /// Builds node `k` from `f(k, t_k)`.
    pub fn from_fn(
        kind: FieldKind,
        grid: &GridSpec<T>,
        f: impl Fn(usize, T) -> StaggeredField<T> + Sync,
    ) -> Result<Self> {
        let samples: Vec<_> = (0..grid.nt).into_par_iter().map(|k| f(k, grid.time(k))).collect();
        let out = Self::new(*grid, samples)?;
        if out.kind != kind {
            return Err(Error::Dimension(format!("expected {kind:?} samples")));
        }
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    pub fn kind(&self) -> FieldKind {
        self.kind
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn samples(&self) -> &[StaggeredField<T>] {
        &self.samples
    }
    pub fn samples_mut(&mut self) -> &mut [StaggeredField<T>] {
        &mut self.samples
    }
    pub fn into_samples(self) -> Vec<StaggeredField<T>> {
        self.samples
    }
    pub fn get(&self, k: usize) -> Result<&StaggeredField<T>> {
        self.samples
            .get(k)
            .ok_or(Error::IndexOutOfRange { index: k, len: self.samples.len() })
    }
    pub fn first(&self) -> &StaggeredField<T> {
        &self.samples[0]
    }
    pub fn last(&self) -> &StaggeredField<T> {
        &self.samples[self.samples.len() - 1]
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.kind != other.kind {
            return Err(Error::Dimension(format!("{:?} vs {:?} trajectory", self.kind, other.kind)));
        }
        Ok(())
    }

    /// Nodewise map, parallel over nodes.
    pub fn map(&self, f: impl Fn(usize, &StaggeredField<T>) -> Result<StaggeredField<T>> + Sync) -> Result<Self> {
        let samples = self
            .samples
            .par_iter()
            .enumerate()
            .map(|(k, s)| f(k, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.grid, samples)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.map(|k, s| {
            let mut out = s.clone();
            out.axpy(a, &other.samples[k])?;
            Ok(out)
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            grid: self.grid,
            kind: self.kind,
            samples: self.samples.iter().map(|s| s.scaled(a)).collect(),
        }
    }

    /// Value of the time stencil applied at node `k`.
    pub fn stencil_at(&self, stencil: &TimeStencil<T>, k: usize) -> StaggeredField<T> {
        let mut out = StaggeredField::zeros(self.kind, &self.grid);
        for &(j, c) in stencil.row(k) {
            out.axpy(c, &self.samples[j]).expect("samples share one layout");
        }
        out
    }

    pub fn apply_stencil(&self, stencil: &TimeStencil<T>) -> Result<Self> {
        if stencil.len() != self.len() {
            return Err(Error::Dimension("stencil and trajectory lengths differ".into()));
        }
        let samples = (0..self.len()).into_par_iter().map(|k| self.stencil_at(stencil, k)).collect();
        Self::new(self.grid, samples)
    }

    /// Discrete time derivative (centred inside, one-sided at the ends).
    pub fn time_derivative(&self) -> Self {
        self.apply_stencil(&TimeStencil::first_derivative(self.len(), self.grid.dt()))
            .expect("stencil built for this length")
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, s| m.max(s.max_abs()))
    }
}
