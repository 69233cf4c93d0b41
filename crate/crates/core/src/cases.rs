//! Catalog of manufactured solutions and perturbation bumps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldKind, StaggeredField};
use crate::grid::GridSpec;
use crate::material::MaterialField;
use crate::problem::CaseSpec;
use crate::scalar::Real;
use crate::trajectory::FieldTrajectory;

/// `f(component, x, y, z, t)`
pub type PointFn<T> = Arc<dyn Fn(usize, T, T, T, T) -> T + Send + Sync>;

/// Dispersion relation used by [`cavity_mode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// Discrete wavenumbers of the staggered grid; the sampled mode then
    /// solves the spatially discrete equations exactly.
    #[default]
    Yee,
    /// Wavenumbers of the continuous problem.
    Continuum,
}

/// Exact solution of the Maxwell system together with the pieces needed to
/// derive its sources.
#[derive(Clone)]
pub struct ManufacturedCase<T> {
    name: String,
    params: BTreeMap<String, f64>,
    e: PointFn<T>,
    e_t: PointFn<T>,
    h: PointFn<T>,
    h_t: PointFn<T>,
    /// Analytic `curl E` (sampled on faces) and `curl H` (sampled on edges);
    /// `None` means the case is source free under unit materials.
    curls: Option<(PointFn<T>, PointFn<T>)>,
    unit_materials_only: bool,
}

impl<T> std::fmt::Debug for ManufacturedCase<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).field("params", &self.params).finish()
    }
}

fn sample<T: Real>(kind: FieldKind, grid: &GridSpec<T>, f: &PointFn<T>, t: T) -> StaggeredField<T> {
    let mut s = StaggeredField::from_fn(kind, grid, |c, x, y, z| f(c, x, y, z, t));
    s.apply_boundary();
    s
}

impl<T: Real> ManufacturedCase<T> {
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn sample_e(&self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        sample(FieldKind::Edge, grid, &self.e, t)
    }
    pub fn sample_e_t(&self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        sample(FieldKind::Edge, grid, &self.e_t, t)
    }
    pub fn sample_h(&self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        sample(FieldKind::Face, grid, &self.h, t)
    }
    pub fn sample_h_t(&self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        sample(FieldKind::Face, grid, &self.h_t, t)
    }

    pub fn check_materials(&self, eps: &MaterialField<T>, mu: &MaterialField<T>) -> Result<()> {
        if self.unit_materials_only && !(eps.is_identity() && mu.is_identity()) {
            return Err(Error::Unsupported(format!("case `{}` requires unit materials", self.name)));
        }
        Ok(())
    }

    /// Sources `F = dE/dt - eps^-1 curl H` and `G = dH/dt + mu^-1 curl E`
    /// on every time node.
    pub fn sources(
        &self,
        grid: &GridSpec<T>,
        eps: &MaterialField<T>,
        mu: &MaterialField<T>,
    ) -> Result<(FieldTrajectory<T>, FieldTrajectory<T>)> {
        self.check_materials(eps, mu)?;
        let Some((curl_e, curl_h)) = &self.curls else {
            return Ok((
                FieldTrajectory::zeros(FieldKind::Edge, grid),
                FieldTrajectory::zeros(FieldKind::Face, grid),
            ));
        };
        let eps_inv = eps.inverse();
        let mu_inv = mu.inverse();
        let f = FieldTrajectory::from_fn(FieldKind::Edge, grid, |_, t| {
            let mut out = self.sample_e_t(grid, t);
            let ch = eps_inv
                .apply(&sample(FieldKind::Edge, grid, curl_h, t))
                .expect("scalar or diagonal material");
            out.axpy(-T::one(), &ch).expect("same layout");
            out
        })?;
        let g = FieldTrajectory::from_fn(FieldKind::Face, grid, |_, t| {
            let mut out = self.sample_h_t(grid, t);
            let ce = mu_inv
                .apply(&sample(FieldKind::Face, grid, curl_e, t))
                .expect("scalar or diagonal material");
            out.axpy(T::one(), &ce).expect("same layout");
            out
        })?;
        Ok((f, g))
    }
}

fn param(spec: &CaseSpec, key: &str, default: f64) -> f64 {
    spec.params.get(key).copied().unwrap_or(default)
}

fn check_keys(spec: &CaseSpec, allowed: &[&str]) -> Result<()> {
    for key in spec.params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parameter(format!("case `{}` has no parameter `{key}`", spec.name)));
        }
    }
    Ok(())
}

/// Catalog lookup.
pub fn from_spec<T: Real>(spec: &CaseSpec, grid: &GridSpec<T>) -> Result<ManufacturedCase<T>> {
    match spec.name.as_str() {
        "zero" => {
            check_keys(spec, &[])?;
            Ok(zero_case())
        }
        "cavity_mode" => {
            check_keys(spec, &["m", "n", "amplitude"])?;
            let as_index = |key: &str| -> Result<u32> {
                let v = param(spec, key, 1.0);
                if v < 1.0 || v.fract() != 0.0 || v > 1e6 {
                    return Err(Error::Parameter(format!("mode index `{key}` must be a positive integer")));
                }
                Ok(v as u32)
            };
            cavity_mode(grid, as_index("m")?, as_index("n")?, T::lit(param(spec, "amplitude", 1.0)), spec.dispersion)
        }
        "poly_bubble" => {
            check_keys(spec, &["amplitude"])?;
            Ok(poly_bubble(grid, T::lit(param(spec, "amplitude", 1.0))))
        }
        other => Err(Error::UnknownCase(other.to_string())),
    }
}

/// Identically zero fields and sources.
pub fn zero_case<T: Real>() -> ManufacturedCase<T> {
    let z: PointFn<T> = Arc::new(|_, _, _, _, _| T::zero());
    ManufacturedCase {
        name: "zero".into(),
        params: BTreeMap::new(),
        e: z.clone(),
        e_t: z.clone(),
        h: z.clone(),
        h_t: z,
        curls: None,
        unit_materials_only: false,
    }
}

/// Source-free TM standing wave in the box with unit materials:
///
/// ```text
/// Ez = A sin(kx x) sin(ky y) cos(w t)
/// Hx = -A (cy / w) sin(kx x) cos(ky y) sin(w t)
/// Hy =  A (cx / w) cos(kx x) sin(ky y) sin(w t)
/// ```
///
/// with `kx = m pi / lx`, `ky = n pi / ly`. For [`Dispersion::Continuum`]
/// `cx = kx`, `cy = ky`; for [`Dispersion::Yee`] `cx = (2/hx) sin(kx hx/2)`
/// and likewise `cy`. In both cases `w = sqrt(cx^2 + cy^2)`.
pub fn cavity_mode<T: Real>(
    grid: &GridSpec<T>,
    m: u32,
    n: u32,
    amplitude: T,
    dispersion: Dispersion,
) -> Result<ManufacturedCase<T>> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter("mode indices must be positive".into()));
    }
    let pi = T::PI();
    let kx = T::from_u32(m).unwrap() * pi / grid.lx;
    let ky = T::from_u32(n).unwrap() * pi / grid.ly;
    let two = T::lit(2.0);
    let (cx, cy) = match dispersion {
        Dispersion::Continuum => (kx, ky),
        Dispersion::Yee => {
            let (hx, hy) = (grid.hx(), grid.hy());
            (two / hx * (kx * hx / two).sin(), two / hy * (ky * hy / two).sin())
        }
    };
    let w = (cx * cx + cy * cy).sqrt();
    let a = amplitude;
    let e: PointFn<T> = Arc::new(move |c, x, y, _, t| {
        if c == 2 { a * (kx * x).sin() * (ky * y).sin() * (w * t).cos() } else { T::zero() }
    });
    let e_t: PointFn<T> = Arc::new(move |c, x, y, _, t| {
        if c == 2 { -a * w * (kx * x).sin() * (ky * y).sin() * (w * t).sin() } else { T::zero() }
    });
    let h: PointFn<T> = Arc::new(move |c, x, y, _, t| match c {
        0 => -a * cy / w * (kx * x).sin() * (ky * y).cos() * (w * t).sin(),
        1 => a * cx / w * (kx * x).cos() * (ky * y).sin() * (w * t).sin(),
        _ => T::zero(),
    });
    let h_t: PointFn<T> = Arc::new(move |c, x, y, _, t| match c {
        0 => -a * cy * (kx * x).sin() * (ky * y).cos() * (w * t).cos(),
        1 => a * cx * (kx * x).cos() * (ky * y).sin() * (w * t).cos(),
        _ => T::zero(),
    });
    let mut params = BTreeMap::new();
    params.insert("m".into(), m as f64);
    params.insert("n".into(), n as f64);
    params.insert("amplitude".into(), a.to_f64_lossy());
    params.insert("omega".into(), w.to_f64_lossy());
    Ok(ManufacturedCase {
        name: "cavity_mode".into(),
        params,
        e,
        e_t,
        h,
        h_t,
        curls: None,
        unit_materials_only: true,
    })
}

/// Polynomial case on which every discrete operator is exact:
///
/// ```text
/// Ez = p(t) phi(x, y),   H = s(t) (-dphi/dy, dphi/dx, 0)
/// phi = 16 x (lx - x) y (ly - y) / (lx^2 ly^2)
/// p(t) = A (1 + t/2 - 3 t^2/4),   s(t) = A (1/2 + t/4 - t^2/2)
/// ```
///
/// Sources are chosen so the pair solves the system for any scalar or
/// diagonal material. Centred and one-sided time differences of these
/// quadratics, and the staggered curls of these fields, carry no truncation
/// error.
pub fn poly_bubble<T: Real>(grid: &GridSpec<T>, amplitude: T) -> ManufacturedCase<T> {
    let (lx, ly) = (grid.lx, grid.ly);
    let c = T::lit(16.0) / (lx * lx * ly * ly);
    let a = amplitude;
    let (two, half, quarter) = (T::lit(2.0), T::lit(0.5), T::lit(0.25));
    let p = move |t: T| a * (T::one() + half * t - T::lit(0.75) * t * t);
    let dp = move |t: T| a * (half - T::lit(1.5) * t);
    let s = move |t: T| a * (half + quarter * t - half * t * t);
    let ds = move |t: T| a * (quarter - t);
    let phi = move |x: T, y: T| c * x * (lx - x) * y * (ly - y);
    let phi_x = move |x: T, y: T| c * (lx - two * x) * y * (ly - y);
    let phi_y = move |x: T, y: T| c * x * (lx - x) * (ly - two * y);
    // laplacian of phi
    let lap = move |x: T, y: T| -two * c * (y * (ly - y) + x * (lx - x));

    let e: PointFn<T> = Arc::new(move |k, x, y, _, t| if k == 2 { p(t) * phi(x, y) } else { T::zero() });
    let e_t: PointFn<T> = Arc::new(move |k, x, y, _, t| if k == 2 { dp(t) * phi(x, y) } else { T::zero() });
    let h: PointFn<T> = Arc::new(move |k, x, y, _, t| match k {
        0 => -s(t) * phi_y(x, y),
        1 => s(t) * phi_x(x, y),
        _ => T::zero(),
    });
    let h_t: PointFn<T> = Arc::new(move |k, x, y, _, t| match k {
        0 => -ds(t) * phi_y(x, y),
        1 => ds(t) * phi_x(x, y),
        _ => T::zero(),
    });
    // curl E = (dEz/dy, -dEz/dx, 0);  curl H = (0, 0, s lap phi)
    let curl_e: PointFn<T> = Arc::new(move |k, x, y, _, t| match k {
        0 => p(t) * phi_y(x, y),
        1 => -p(t) * phi_x(x, y),
        _ => T::zero(),
    });
    let curl_h: PointFn<T> = Arc::new(move |k, x, y, _, t| if k == 2 { s(t) * lap(x, y) } else { T::zero() });
    let mut params = BTreeMap::new();
    params.insert("amplitude".into(), a.to_f64_lossy());
    ManufacturedCase {
        name: "poly_bubble".into(),
        params,
        e,
        e_t,
        h,
        h_t,
        curls: Some((curl_e, curl_h)),
        unit_materials_only: false,
    }
}

/// Smooth perturbation profiles with zero tangential trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bump {
    /// `t^2 * profile`: the perturbation and its rate vanish at `t = 0`.
    Vanishing,
    /// `(1 + t) * profile`.
    Persistent,
}

impl Bump {
    pub fn from_key(key: &str) -> Result<Self> {
        match key {
            "vanishing" => Ok(Bump::Vanishing),
            "persistent" => Ok(Bump::Persistent),
            other => Err(Error::UnknownCase(other.to_string())),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Bump::Vanishing => "vanishing",
            Bump::Persistent => "persistent",
        }
    }

    fn amplitude<T: Real>(self, t: T) -> T {
        match self {
            Bump::Vanishing => t * t,
            Bump::Persistent => T::one() + t,
        }
    }

    fn rate<T: Real>(self, t: T) -> T {
        match self {
            Bump::Vanishing => T::lit(2.0) * t,
            Bump::Persistent => T::one(),
        }
    }

    /// Spatial profile; each component vanishes on the faces it is tangential to.
    pub fn profile<T: Real>(grid: &GridSpec<T>) -> StaggeredField<T> {
        let pi = T::PI();
        let (lx, ly, lz) = (grid.lx, grid.ly, grid.lz);
        let two = T::lit(2.0);
        let mut f = StaggeredField::from_fn(FieldKind::Edge, grid, |c, x, y, z| {
            let (sx, sy, sz) = ((pi * x / lx).sin(), (pi * y / ly).sin(), (pi * z / lz).sin());
            match c {
                0 => (pi * x / lx).cos() * (two * pi * y / ly).sin() * sz,
                1 => sx * (pi * y / ly).cos() * (two * pi * z / lz).sin(),
                _ => (two * pi * x / lx).sin() * sy * (pi * z / lz).cos() + sx * sy,
            }
        });
        f.apply_boundary();
        f
    }

    pub fn sample<T: Real>(self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        Self::profile(grid).scaled(self.amplitude(t))
    }

    pub fn sample_rate<T: Real>(self, grid: &GridSpec<T>, t: T) -> StaggeredField<T> {
        Self::profile(grid).scaled(self.rate(t))
    }
}

/// `traj + delta * bump` at every node.
pub fn perturb<T: Real>(traj: &FieldTrajectory<T>, delta: T, bump: Bump) -> Result<FieldTrajectory<T>> {
    perturb_with(traj, delta, bump, false)
}

/// `traj + delta * d(bump)/dt` at every node; the matching perturbation of
/// a time-derivative trajectory.
pub fn perturb_rate<T: Real>(traj: &FieldTrajectory<T>, delta: T, bump: Bump) -> Result<FieldTrajectory<T>> {
    perturb_with(traj, delta, bump, true)
}

fn perturb_with<T: Real>(traj: &FieldTrajectory<T>, delta: T, bump: Bump, rate: bool) -> Result<FieldTrajectory<T>> {
    if traj.kind() != FieldKind::Edge {
        return Err(Error::Dimension("bumps perturb edge trajectories".into()));
    }
    let grid = *traj.grid();
    let profile = Bump::profile(&grid);
    traj.map(|k, s| {
        let t = grid.time(k);
        let a = if rate { bump.rate(t) } else { bump.amplitude(t) };
        let mut out = s.clone();
        out.axpy(delta * a, &profile)?;
        Ok(out)
    })
}
