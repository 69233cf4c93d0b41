use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rectangular box `[0,lx]x[0,ly]x[0,lz]` split into `nx*ny*nz` cells, plus a
/// uniform time grid of `nt` nodes on `[0, t_final]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: T,
    pub ly: T,
    pub lz: T,
    pub nt: usize,
    pub t_final: T,
}

impl<T: Real> GridSpec<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        lx: T,
        ly: T,
        lz: T,
        nt: usize,
        t_final: T,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 || nz < 2 {
            return Err(Error::Parameter(format!(
                "cell counts must be >= 2, got {nx}x{ny}x{nz}"
            )));
        }
        if nt < 2 {
            return Err(Error::Parameter(format!("nt must be >= 2, got {nt}")));
        }
        for (name, v) in [("lx", lx), ("ly", ly), ("lz", lz), ("T", t_final)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive and finite")));
            }
        }
        Ok(Self { nx, ny, nz, lx, ly, lz, nt, t_final })
    }

    /// Unit cube with `n^3` cells and `nt` nodes on `[0, 1]`.
    pub fn unit_cube(n: usize, nt: usize) -> Result<Self> {
        Self::new(n, n, n, T::one(), T::one(), T::one(), nt, T::one())
    }

    pub fn hx(&self) -> T {
        self.lx / T::from_usize_lossy(self.nx)
    }
    pub fn hy(&self) -> T {
        self.ly / T::from_usize_lossy(self.ny)
    }
    pub fn hz(&self) -> T {
        self.lz / T::from_usize_lossy(self.nz)
    }
    pub fn spacing(&self) -> [T; 3] {
        [self.hx(), self.hy(), self.hz()]
    }
    pub fn cell_volume(&self) -> T {
        self.hx() * self.hy() * self.hz()
    }
    pub fn volume(&self) -> T {
        self.lx * self.ly * self.lz
    }
    pub fn cells(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn dt(&self) -> T {
        self.t_final / T::from_usize_lossy(self.nt - 1)
    }
    pub fn time(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.dt()
    }
    pub fn times(&self) -> Vec<T> {
        (0..self.nt).map(|k| self.time(k)).collect()
    }

    /// Same spatial box and final time with every spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            ny: 2 * self.ny,
            nz: 2 * self.nz,
            nt: 2 * (self.nt - 1) + 1,
            ..*self
        }
    }

    pub fn with_nt(&self, nt: usize) -> Result<Self> {
        Self::new(self.nx, self.ny, self.nz, self.lx, self.ly, self.lz, nt, self.t_final)
    }

    /// True when both grids describe the same spatial discretization.
    pub fn same_space(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.nz == other.nz
            && self.lx == other.lx
            && self.ly == other.ly
            && self.lz == other.lz
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_space(other) && self.nt == other.nt && self.t_final == other.t_final {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
