//! Discrete vector fields on the Yee staggered grid and the operators acting
//! on them.
//!
//! Edge fields (electric type) store the x-component on x-edges, and so on.
//! Face fields (magnetic type) store the x-component on x-normal faces. The
//! two discrete curls map between the two layouts and are mutually adjoint
//! with respect to [`inner`] on edge fields with vanishing tangential trace.
//!
//! Inner products use the dual-cell quadrature of the staggered grid: every
//! value is weighted by the volume of its dual cell, which is halved along
//! each axis where the location sits on the boundary of the box.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::material::{MaterialField, TensorLayout};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// Electric type: components on cell edges.
    Edge,
    /// Magnetic type: components on cell faces.
    Face,
}

impl FieldKind {
    pub fn dual(self) -> Self {
        match self {
            FieldKind::Edge => FieldKind::Face,
            FieldKind::Face => FieldKind::Edge,
        }
    }

    /// Whether component `comp` sits on a grid node (rather than a cell
    /// midpoint) along `axis`.
    #[inline]
    pub fn on_node(self, comp: usize, axis: usize) -> bool {
        match self {
            FieldKind::Edge => axis != comp,
            FieldKind::Face => axis == comp,
        }
    }
}

/// Array extents of component `comp` for a grid with `cells` cells per axis.
pub fn extents(kind: FieldKind, comp: usize, cells: [usize; 3]) -> [usize; 3] {
    std::array::from_fn(|axis| cells[axis] + usize::from(kind.on_node(comp, axis)))
}

/// Three-component field on the Yee grid, components stored `k`-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField<T> {
    kind: FieldKind,
    cells: [usize; 3],
    comps: [Vec<T>; 3],
}

impl<T: Real> StaggeredField<T> {
    pub fn zeros(kind: FieldKind, grid: &GridSpec<T>) -> Self {
        Self::zeros_for(kind, grid.cells())
    }

    pub fn zeros_for(kind: FieldKind, cells: [usize; 3]) -> Self {
        let comps = std::array::from_fn(|c| {
            let e = extents(kind, c, cells);
            vec![T::zero(); e[0] * e[1] * e[2]]
        });
        Self { kind, cells, comps }
    }

    /// Samples `f(component, x, y, z)` at every staggered location.
    pub fn from_fn(kind: FieldKind, grid: &GridSpec<T>, f: impl Fn(usize, T, T, T) -> T) -> Self {
        let mut out = Self::zeros(kind, grid);
        let h = grid.spacing();
        let half = T::lit(0.5);
        for c in 0..3 {
            let e = extents(kind, c, grid.cells());
            let offset: [T; 3] =
                std::array::from_fn(|a| if kind.on_node(c, a) { T::zero() } else { half });
            let mut idx = 0;
            for i in 0..e[0] {
                let x = (T::from_usize_lossy(i) + offset[0]) * h[0];
                for j in 0..e[1] {
                    let y = (T::from_usize_lossy(j) + offset[1]) * h[1];
                    for k in 0..e[2] {
                        let z = (T::from_usize_lossy(k) + offset[2]) * h[2];
                        out.comps[c][idx] = f(c, x, y, z);
                        idx += 1;
                    }
                }
            }
        }
        out
    }

    /// Builds a field from raw component arrays, checking the extents.
    pub fn from_components(kind: FieldKind, cells: [usize; 3], comps: [Vec<T>; 3]) -> Result<Self> {
        for (c, v) in comps.iter().enumerate() {
            let e = extents(kind, c, cells);
            if v.len() != e[0] * e[1] * e[2] {
                return Err(Error::Dimension(format!(
                    "component {c} has {} values, layout needs {}",
                    v.len(),
                    e[0] * e[1] * e[2]
                )));
            }
        }
        Ok(Self { kind, cells, comps })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }
    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }
    pub fn extents(&self, comp: usize) -> [usize; 3] {
        extents(self.kind, comp, self.cells)
    }
    pub fn component(&self, comp: usize) -> &[T] {
        &self.comps[comp]
    }
    pub fn components(&self) -> &[Vec<T>; 3] {
        &self.comps
    }
    pub fn components_mut(&mut self) -> &mut [Vec<T>; 3] {
        &mut self.comps
    }
    pub fn len(&self) -> usize {
        self.comps.iter().map(Vec::len).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, comp: usize, i: usize, j: usize, k: usize) -> usize {
        let e = self.extents(comp);
        (i * e[1] + j) * e[2] + k
    }
    #[inline]
    pub fn get(&self, comp: usize, i: usize, j: usize, k: usize) -> T {
        self.comps[comp][self.index(comp, i, j, k)]
    }

    /// Iterates over all values, component after component.
    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.comps.iter().flat_map(|c| c.iter())
    }
    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.comps.iter_mut().flat_map(|c| c.iter_mut())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind || self.cells != other.cells {
            return Err(Error::Dimension(format!(
                "{:?} field on {:?} cells vs {:?} field on {:?} cells",
                self.kind, self.cells, other.kind, other.cells
            )));
        }
        Ok(())
    }

    pub fn check_grid(&self, grid: &GridSpec<T>) -> Result<()> {
        if self.cells != grid.cells() {
            return Err(Error::Dimension(format!(
                "field has {:?} cells, grid has {:?}",
                self.cells,
                grid.cells()
            )));
        }
        Ok(())
    }

    pub fn scale(&mut self, a: T) {
        self.values_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: T, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (dst, src) in self.comps.iter_mut().zip(&other.comps) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * *s;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(T::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    /// `sum_i w_i * f_i` over fields of identical layout.
    pub fn lincomb(terms: &[(T, &Self)]) -> Result<Self> {
        let (first_w, first) = terms
            .first()
            .ok_or_else(|| Error::Dimension("empty linear combination".into()))?;
        let mut out = first.scaled(*first_w);
        for (w, f) in &terms[1..] {
            out.axpy(*w, f)?;
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> T {
        self.values().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Plain sum of products over all stored values (no quadrature weights).
    pub fn dot_raw(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x * *y).sum::<T>())
            .sum())
    }

    /// Whether the value at `(comp, i, j, k)` is tangential to the box boundary.
    /// Only meaningful for edge fields.
    #[inline]
    pub fn is_boundary_edge(&self, comp: usize, idx: [usize; 3]) -> bool {
        (0..3).any(|a| a != comp && (idx[a] == 0 || idx[a] == self.cells[a]))
    }

    /// Zeroes the tangential components on the box boundary (perfect
    /// electric conductor). No-op for face fields.
    pub fn apply_boundary(&mut self) {
        if self.kind != FieldKind::Edge {
            return;
        }
        for c in 0..3 {
            let e = self.extents(c);
            let cells = self.cells;
            let comp = &mut self.comps[c];
            let mut idx = 0;
            for i in 0..e[0] {
                for j in 0..e[1] {
                    for k in 0..e[2] {
                        let p = [i, j, k];
                        if (0..3).any(|a| a != c && (p[a] == 0 || p[a] == cells[a])) {
                            comp[idx] = T::zero();
                        }
                        idx += 1;
                    }
                }
            }
        }
    }

    /// Largest tangential boundary value of an edge field.
    pub fn tangential_trace_max(&self) -> T {
        if self.kind != FieldKind::Edge {
            return T::zero();
        }
        let mut m = T::zero();
        for c in 0..3 {
            let e = self.extents(c);
            let mut idx = 0;
            for i in 0..e[0] {
                for j in 0..e[1] {
                    for k in 0..e[2] {
                        if self.is_boundary_edge(c, [i, j, k]) {
                            m = m.max(self.comps[c][idx].abs());
                        }
                        idx += 1;
                    }
                }
            }
        }
        m
    }
}

/// Per-axis dual-cell length factors (1 inside, 1/2 on boundary nodes) for
/// component `comp` of a field of `kind`.
fn dual_factors<T: Real>(kind: FieldKind, comp: usize, cells: [usize; 3]) -> [Vec<T>; 3] {
    let half = T::lit(0.5);
    std::array::from_fn(|axis| {
        let n = cells[axis];
        if kind.on_node(comp, axis) {
            (0..=n).map(|p| if p == 0 || p == n { half } else { T::one() }).collect()
        } else {
            vec![T::one(); n]
        }
    })
}

/// Visits every stored location with its dual-cell volume factor.
fn for_each_weighted<T: Real>(
    kind: FieldKind,
    cells: [usize; 3],
    mut f: impl FnMut(usize, usize, T),
) {
    for c in 0..3 {
        let [fx, fy, fz] = dual_factors::<T>(kind, c, cells);
        let mut idx = 0;
        for wx in &fx {
            for wy in &fy {
                let wxy = *wx * *wy;
                for wz in &fz {
                    f(c, idx, wxy * *wz);
                    idx += 1;
                }
            }
        }
    }
}

/// Unweighted L2 inner product with dual-cell quadrature.
pub fn inner<T: Real>(u: &StaggeredField<T>, v: &StaggeredField<T>, grid: &GridSpec<T>) -> Result<T> {
    u.check_compatible(v)?;
    u.check_grid(grid)?;
    let mut sum = T::zero();
    for_each_weighted::<T>(u.kind, u.cells, |c, idx, w| {
        sum += w * u.comps[c][idx] * v.comps[c][idx];
    });
    Ok(sum * grid.cell_volume())
}

/// Material-weighted inner product `<w u, v>` over the box.
///
/// Scalar and diagonal materials are applied on the staggered locations
/// with the dual-cell quadrature of [`inner`]. Full tensors need all three
/// components at one point, so for them the components are first averaged
/// to cell centres and the cell tensor is applied there.
pub fn weighted_inner<T: Real>(
    u: &StaggeredField<T>,
    v: &StaggeredField<T>,
    w: &MaterialField<T>,
    grid: &GridSpec<T>,
) -> Result<T> {
    u.check_compatible(v)?;
    u.check_grid(grid)?;
    if w.cells() != u.cells {
        return Err(Error::Dimension("material and field cell counts differ".into()));
    }
    if w.layout() == TensorLayout::Full {
        return cell_averaged_inner(u, v, w, grid);
    }
    let coeff = w.staggered(u.kind)?;
    let mut sum = T::zero();
    for_each_weighted::<T>(u.kind, u.cells, |c, idx, f| {
        sum += f * coeff[c][idx] * u.comps[c][idx] * v.comps[c][idx];
    });
    Ok(sum * grid.cell_volume())
}

/// `weighted_inner(u, u, w)`
pub fn weighted_norm_sq<T: Real>(u: &StaggeredField<T>, w: &MaterialField<T>, grid: &GridSpec<T>) -> Result<T> {
    weighted_inner(u, u, w, grid)
}

/// Component values averaged to the centre of cell `(i, j, k)`.
pub fn cell_center_value<T: Real>(f: &StaggeredField<T>, i: usize, j: usize, k: usize) -> [T; 3] {
    let cell = [i, j, k];
    std::array::from_fn(|c| {
        let e = f.extents(c);
        let mut sum = T::zero();
        let mut count = 0usize;
        let span = |a: usize| if f.kind.on_node(c, a) { 2 } else { 1 };
        for di in 0..span(0) {
            for dj in 0..span(1) {
                for dk in 0..span(2) {
                    let p = [cell[0] + di, cell[1] + dj, cell[2] + dk];
                    sum += f.comps[c][(p[0] * e[1] + p[1]) * e[2] + p[2]];
                    count += 1;
                }
            }
        }
        sum / T::from_usize_lossy(count)
    })
}

fn cell_averaged_inner<T: Real>(
    u: &StaggeredField<T>,
    v: &StaggeredField<T>,
    w: &MaterialField<T>,
    grid: &GridSpec<T>,
) -> Result<T> {
    let [nx, ny, nz] = u.cells;
    let mut sum = T::zero();
    let mut cell = 0;
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let ub = cell_center_value(u, i, j, k);
                let vb = cell_center_value(v, i, j, k);
                let t = w.tensor(cell);
                for a in 0..3 {
                    for b in 0..3 {
                        sum += t[a][b] * ub[b] * vb[a];
                    }
                }
                cell += 1;
            }
        }
    }
    Ok(sum * grid.cell_volume())
}

/// Discrete curl of an edge field, evaluated on faces.
pub fn curl_edge_to_face<T: Real>(e: &StaggeredField<T>, grid: &GridSpec<T>) -> Result<StaggeredField<T>> {
    if e.kind != FieldKind::Edge {
        return Err(Error::Dimension("curl_edge_to_face expects an edge field".into()));
    }
    e.check_grid(grid)?;
    let [nx, ny, nz] = grid.cells();
    let [hx, hy, hz] = grid.spacing().map(|h| h.recip());
    let mut out = StaggeredField::zeros(FieldKind::Face, grid);
    let (ex, ey, ez) = (&e.comps[0], &e.comps[1], &e.comps[2]);
    let ee = [e.extents(0), e.extents(1), e.extents(2)];
    let at = |c: usize, i: usize, j: usize, k: usize| (i * ee[c][1] + j) * ee[c][2] + k;

    let mut idx = 0;
    for i in 0..=nx {
        for j in 0..ny {
            for k in 0..nz {
                out.comps[0][idx] = (ez[at(2, i, j + 1, k)] - ez[at(2, i, j, k)]) * hy
                    - (ey[at(1, i, j, k + 1)] - ey[at(1, i, j, k)]) * hz;
                idx += 1;
            }
        }
    }
    idx = 0;
    for i in 0..nx {
        for j in 0..=ny {
            for k in 0..nz {
                out.comps[1][idx] = (ex[at(0, i, j, k + 1)] - ex[at(0, i, j, k)]) * hz
                    - (ez[at(2, i + 1, j, k)] - ez[at(2, i, j, k)]) * hx;
                idx += 1;
            }
        }
    }
    idx = 0;
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..=nz {
                out.comps[2][idx] = (ey[at(1, i + 1, j, k)] - ey[at(1, i, j, k)]) * hx
                    - (ex[at(0, i, j + 1, k)] - ex[at(0, i, j, k)]) * hy;
                idx += 1;
            }
        }
    }
    Ok(out)
}

/// Discrete curl of a face field, evaluated on edges. Values on boundary
/// edges are set to zero: those degrees of freedom are fixed by the
/// tangential boundary condition.
pub fn curl_face_to_edge<T: Real>(h: &StaggeredField<T>, grid: &GridSpec<T>) -> Result<StaggeredField<T>> {
    if h.kind != FieldKind::Face {
        return Err(Error::Dimension("curl_face_to_edge expects a face field".into()));
    }
    h.check_grid(grid)?;
    let [nx, ny, nz] = grid.cells();
    let [hx, hy, hz] = grid.spacing().map(|h| h.recip());
    let mut out = StaggeredField::zeros(FieldKind::Edge, grid);
    let (fx, fy, fz) = (&h.comps[0], &h.comps[1], &h.comps[2]);
    let fe = [h.extents(0), h.extents(1), h.extents(2)];
    let at = |c: usize, i: usize, j: usize, k: usize| (i * fe[c][1] + j) * fe[c][2] + k;
    let oe = [out.extents(0), out.extents(1), out.extents(2)];
    let out_at = |c: usize, i: usize, j: usize, k: usize| (i * oe[c][1] + j) * oe[c][2] + k;

    for i in 0..nx {
        for j in 1..ny {
            for k in 1..nz {
                out.comps[0][out_at(0, i, j, k)] = (fz[at(2, i, j, k)] - fz[at(2, i, j - 1, k)]) * hy
                    - (fy[at(1, i, j, k)] - fy[at(1, i, j, k - 1)]) * hz;
            }
        }
    }
    for i in 1..nx {
        for j in 0..ny {
            for k in 1..nz {
                out.comps[1][out_at(1, i, j, k)] = (fx[at(0, i, j, k)] - fx[at(0, i, j, k - 1)]) * hz
                    - (fz[at(2, i, j, k)] - fz[at(2, i - 1, j, k)]) * hx;
            }
        }
    }
    for i in 1..nx {
        for j in 1..ny {
            for k in 0..nz {
                out.comps[2][out_at(2, i, j, k)] = (fy[at(1, i, j, k)] - fy[at(1, i - 1, j, k)]) * hx
                    - (fx[at(0, i, j, k)] - fx[at(0, i, j - 1, k)]) * hy;
            }
        }
    }
    Ok(out)
}

/// Nodal scalar with `(nx+1)(ny+1)(nz+1)` values, `k` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalScalar<T> {
    pub cells: [usize; 3],
    pub values: Vec<T>,
}

impl<T: Real> NodalScalar<T> {
    pub fn from_fn(grid: &GridSpec<T>, f: impl Fn(T, T, T) -> T) -> Self {
        let [nx, ny, nz] = grid.cells();
        let h = grid.spacing();
        let mut values = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for i in 0..=nx {
            for j in 0..=ny {
                for k in 0..=nz {
                    values.push(f(
                        T::from_usize_lossy(i) * h[0],
                        T::from_usize_lossy(j) * h[1],
                        T::from_usize_lossy(k) * h[2],
                    ));
                }
            }
        }
        Self { cells: grid.cells(), values }
    }
}

/// Discrete gradient of a nodal scalar, evaluated on edges.
pub fn gradient_node_to_edge<T: Real>(phi: &NodalScalar<T>, grid: &GridSpec<T>) -> Result<StaggeredField<T>> {
    if phi.cells != grid.cells() {
        return Err(Error::Dimension("nodal scalar does not match grid".into()));
    }
    let [nx, ny, nz] = grid.cells();
    let inv_h = grid.spacing().map(|h| h.recip());
    let node = |i: usize, j: usize, k: usize| phi.values[(i * (ny + 1) + j) * (nz + 1) + k];
    let mut out = StaggeredField::zeros(FieldKind::Edge, grid);
    for c in 0..3 {
        let e = out.extents(c);
        let mut idx = 0;
        for i in 0..e[0] {
            for j in 0..e[1] {
                for k in 0..e[2] {
                    let (i1, j1, k1) = match c {
                        0 => (i + 1, j, k),
                        1 => (i, j + 1, k),
                        _ => (i, j, k + 1),
                    };
                    out.comps[c][idx] = (node(i1, j1, k1) - node(i, j, k)) * inv_h[c];
                    idx += 1;
                }
            }
        }
    }
    let _ = (nx, nz);
    Ok(out)
}
