//! Per-cell symmetric positive definite material tensors (permittivity,
//! permeability) and their inverses.

use crate::error::{Error, Result};
use crate::field::{extents, FieldKind, StaggeredField};
use crate::grid::GridSpec;
use crate::scalar::Real;

pub type Tensor3<T> = [[T; 3]; 3];

/// How the per-cell tensors are populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorLayout {
    Scalar,
    Diagonal,
    Full,
}

/// Symmetric positive definite 3x3 tensor per cell together with its inverse.
///
/// Scalar and diagonal materials also carry coefficients sampled on the Yee
/// edge and face locations: the arithmetic mean over the cells sharing the
/// location. The inverse material carries the reciprocals of those means, so
/// applying a material and then its inverse on a staggered field is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialField<T> {
    cells: [usize; 3],
    layout: TensorLayout,
    tensors: Vec<Tensor3<T>>,
    inverses: Vec<Tensor3<T>>,
    lambda_min: T,
    lambda_max: T,
    edge: Option<[Vec<T>; 3]>,
    face: Option<[Vec<T>; 3]>,
}

impl<T: Real> MaterialField<T> {
    pub fn identity(grid: &GridSpec<T>) -> Self {
        Self::scalar(grid, T::one()).expect("identity is SPD")
    }

    pub fn scalar(grid: &GridSpec<T>, value: T) -> Result<Self> {
        let mut t = [[T::zero(); 3]; 3];
        for (d, row) in t.iter_mut().enumerate() {
            row[d] = value;
        }
        Self::from_cells(grid, TensorLayout::Scalar, vec![t; grid.n_cells()])
    }

    pub fn diagonal(grid: &GridSpec<T>, diag: [T; 3]) -> Result<Self> {
        let mut t = [[T::zero(); 3]; 3];
        for d in 0..3 {
            t[d][d] = diag[d];
        }
        Self::from_cells(grid, TensorLayout::Diagonal, vec![t; grid.n_cells()])
    }

    pub fn full(grid: &GridSpec<T>, tensor: Tensor3<T>) -> Result<Self> {
        Self::from_cells(grid, TensorLayout::Full, vec![tensor; grid.n_cells()])
    }

    /// Heterogeneous material; `f(i, j, k)` gives the tensor of cell `(i, j, k)`.
    pub fn from_fn(
        grid: &GridSpec<T>,
        layout: TensorLayout,
        f: impl Fn(usize, usize, usize) -> Tensor3<T>,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(grid.n_cells());
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                for k in 0..grid.nz {
                    cells.push(f(i, j, k));
                }
            }
        }
        Self::from_cells(grid, layout, cells)
    }

    pub fn from_cells(grid: &GridSpec<T>, layout: TensorLayout, tensors: Vec<Tensor3<T>>) -> Result<Self> {
        if tensors.len() != grid.n_cells() {
            return Err(Error::Dimension(format!(
                "{} tensors for {} cells",
                tensors.len(),
                grid.n_cells()
            )));
        }
        let mut lambda_min = T::infinity();
        let mut lambda_max = T::zero();
        let mut inverses = Vec::with_capacity(tensors.len());
        for (c, t) in tensors.iter().enumerate() {
            for a in 0..3 {
                for b in 0..3 {
                    if t[a][b] != t[b][a] {
                        return Err(Error::NotSpd(format!("cell {c}: tensor not symmetric")));
                    }
                    if !t[a][b].is_finite() {
                        return Err(Error::NotSpd(format!("cell {c}: non-finite entry")));
                    }
                    if layout != TensorLayout::Full && a != b && t[a][b] != T::zero() {
                        return Err(Error::NotSpd(format!(
                            "cell {c}: off-diagonal entry in {layout:?} material"
                        )));
                    }
                }
            }
            let eig = symmetric_eigenvalues(t);
            if !(eig[0] > T::zero()) {
                return Err(Error::NotSpd(format!(
                    "cell {c}: smallest eigenvalue {} not positive",
                    eig[0]
                )));
            }
            lambda_min = lambda_min.min(eig[0]);
            lambda_max = lambda_max.max(eig[2]);
            inverses.push(inverse(t));
        }
        let cells = grid.cells();
        let (edge, face) = if layout == TensorLayout::Full {
            (None, None)
        } else {
            (
                Some(staggered_means(&tensors, cells, FieldKind::Edge)),
                Some(staggered_means(&tensors, cells, FieldKind::Face)),
            )
        };
        Ok(Self { cells, layout, tensors, inverses, lambda_min, lambda_max, edge, face })
    }

    /// Material whose cell tensors are the inverses of `self`.
    pub fn inverse(&self) -> Self {
        let recip = |arr: &[Vec<T>; 3]| arr.clone().map(|v| v.into_iter().map(|x| x.recip()).collect());
        Self {
            cells: self.cells,
            layout: self.layout,
            tensors: self.inverses.clone(),
            inverses: self.tensors.clone(),
            lambda_min: self.lambda_max.recip(),
            lambda_max: self.lambda_min.recip(),
            edge: self.edge.as_ref().map(recip),
            face: self.face.as_ref().map(recip),
        }
    }

    pub fn layout(&self) -> TensorLayout {
        self.layout
    }
    pub fn lambda_min(&self) -> T {
        self.lambda_min
    }
    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }
    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }
    pub fn tensor(&self, cell: usize) -> &Tensor3<T> {
        &self.tensors[cell]
    }
    pub fn tensors(&self) -> &[Tensor3<T>] {
        &self.tensors
    }
    pub fn inverse_tensor(&self, cell: usize) -> &Tensor3<T> {
        &self.inverses[cell]
    }

    /// True when every cell holds the identity tensor.
    pub fn is_identity(&self) -> bool {
        self.tensors.iter().all(|t| {
            (0..3).all(|a| (0..3).all(|b| t[a][b] == if a == b { T::one() } else { T::zero() }))
        })
    }

    /// Coefficients on the staggered locations of `kind`, if the layout has them.
    pub fn staggered(&self, kind: FieldKind) -> Result<&[Vec<T>; 3]> {
        let c = match kind {
            FieldKind::Edge => self.edge.as_ref(),
            FieldKind::Face => self.face.as_ref(),
        };
        c.ok_or_else(|| {
            Error::Unsupported("full-tensor materials cannot act on staggered locations".into())
        })
    }

    /// Pointwise product of the material with a staggered field.
    pub fn apply(&self, field: &StaggeredField<T>) -> Result<StaggeredField<T>> {
        if field.cells() != self.cells {
            return Err(Error::Dimension("material and field cell counts differ".into()));
        }
        let coeff = self.staggered(field.kind())?;
        let mut out = field.clone();
        for (c, comp) in out.components_mut().iter_mut().enumerate() {
            for (v, w) in comp.iter_mut().zip(&coeff[c]) {
                *v *= *w;
            }
        }
        Ok(out)
    }
}

fn staggered_means<T: Real>(tensors: &[Tensor3<T>], cells: [usize; 3], kind: FieldKind) -> [Vec<T>; 3] {
    let [nx, ny, nz] = cells;
    std::array::from_fn(|c| {
        let ext = extents(kind, c, cells);
        let mut out = Vec::with_capacity(ext[0] * ext[1] * ext[2]);
        for i in 0..ext[0] {
            for j in 0..ext[1] {
                for k in 0..ext[2] {
                    let idx = [i, j, k];
                    // Cell ranges touching this location along each axis.
                    let range = |axis: usize| -> (usize, usize) {
                        let n = [nx, ny, nz][axis];
                        let on_node = match kind {
                            FieldKind::Edge => axis != c,
                            FieldKind::Face => axis == c,
                        };
                        if on_node {
                            let p = idx[axis];
                            (p.saturating_sub(1), p.min(n - 1))
                        } else {
                            (idx[axis], idx[axis])
                        }
                    };
                    let (x0, x1) = range(0);
                    let (y0, y1) = range(1);
                    let (z0, z1) = range(2);
                    let mut sum = T::zero();
                    let mut count = 0usize;
                    for a in x0..=x1 {
                        for b in y0..=y1 {
                            for d in z0..=z1 {
                                sum += tensors[(a * ny + b) * nz + d][c][c];
                                count += 1;
                            }
                        }
                    }
                    out.push(sum / T::from_usize_lossy(count));
                }
            }
        }
        out
    })
}

/// Inverse of a symmetric 3x3 matrix via the adjugate.
pub fn inverse<T: Real>(m: &Tensor3<T>) -> Tensor3<T> {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let inv_det = det.recip();
    let c11 = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    let c12 = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    let c22 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let mut out = [[T::zero(); 3]; 3];
    out[0][0] = c00 * inv_det;
    out[1][1] = c11 * inv_det;
    out[2][2] = c22 * inv_det;
    out[0][1] = c01 * inv_det;
    out[1][0] = out[0][1];
    out[0][2] = c02 * inv_det;
    out[2][0] = out[0][2];
    out[1][2] = c12 * inv_det;
    out[2][1] = out[1][2];
    out
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order (trigonometric
/// closed form).
pub fn symmetric_eigenvalues<T: Real>(m: &Tensor3<T>) -> [T; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let mut eig = if p1 == T::zero() {
        [m[0][0], m[1][1], m[2][2]]
    } else {
        let three = T::lit(3.0);
        let q = (m[0][0] + m[1][1] + m[2][2]) / three;
        let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + T::lit(2.0) * p1;
        let p = (p2 / T::lit(6.0)).sqrt();
        let mut b = [[T::zero(); 3]; 3];
        for a in 0..3 {
            for c in 0..3 {
                let id = if a == c { q } else { T::zero() };
                b[a][c] = (m[a][c] - id) / p;
            }
        }
        let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let r = (det_b / T::lit(2.0)).max(-T::one()).min(T::one());
        let phi = r.acos() / three;
        let two_pi_3 = T::lit(2.0) * T::PI() / three;
        let e1 = q + T::lit(2.0) * p * phi.cos();
        let e3 = q + T::lit(2.0) * p * (phi + two_pi_3).cos();
        let e2 = three * q - e1 - e3;
        [e1, e2, e3]
    };
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    eig
}
