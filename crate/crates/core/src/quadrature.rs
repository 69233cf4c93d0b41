//! Time-grid quadrature: scalar trajectories, trapezoid integrals,
//! exponentially weighted integrals and finite-difference stencils.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scalar samples on a uniform time grid `t_k = k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrajectory<T> {
    values: Vec<T>,
    dt: T,
}

impl<T: Real> ScalarTrajectory<T> {
    pub fn new(values: Vec<T>, dt: T) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Parameter("a trajectory needs at least two nodes".into()));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::Parameter("time step must be positive".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite value at node {k}")));
        }
        Ok(Self { values, dt })
    }

    pub fn constant(nt: usize, dt: T, c: T) -> Result<Self> {
        Self::new(vec![c; nt], dt)
    }

    /// Samples `f(t)` on `nt` nodes over `[0, t_final]`.
    pub fn from_fn(nt: usize, t_final: T, f: impl Fn(T) -> T) -> Result<Self> {
        if nt < 2 {
            return Err(Error::Parameter("a trajectory needs at least two nodes".into()));
        }
        let dt = t_final / T::from_usize_lossy(nt - 1);
        Self::new((0..nt).map(|k| f(T::from_usize_lossy(k) * dt)).collect(), dt)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn into_values(self) -> Vec<T> {
        self.values
    }
    pub fn dt(&self) -> T {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn time(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.dt
    }
    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }
    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(*v))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { values: self.values.iter().map(|v| f(*v)).collect(), dt: self.dt }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            dt: self.dt,
        })
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.dt != other.dt {
            return Err(Error::GridMismatch(format!(
                "{} nodes (dt {}) vs {} nodes (dt {})",
                self.len(),
                self.dt,
                other.len(),
                other.dt
            )));
        }
        Ok(())
    }
}

impl<T> std::ops::Index<usize> for ScalarTrajectory<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.values[k]
    }
}

/// Composite trapezoid rule of `values` over `[t_0, t_upto]`.
pub fn time_integral<T: Real>(values: &[T], dt: T, up_to: usize) -> Result<T> {
    if up_to >= values.len() {
        return Err(Error::IndexOutOfRange { index: up_to, len: values.len() });
    }
    let half = T::lit(0.5);
    Ok(values[..=up_to].windows(2).map(|w| half * (w[0] + w[1])).sum::<T>() * dt)
}

/// Running trapezoid integral at every node (first entry is zero).
pub fn cumulative_trapezoid<T: Real>(values: &[T], dt: T) -> Vec<T> {
    let half = T::lit(0.5) * dt;
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in values.windows(2) {
        acc += half * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoid weights `tau_{k,j}` with `sum_j tau_{k,j} v_j = time_integral(v, k)`.
pub fn trapezoid_weight<T: Real>(dt: T, k: usize, j: usize) -> T {
    if j > k || k == 0 {
        T::zero()
    } else if j == 0 || j == k {
        T::lit(0.5) * dt
    } else {
        dt
    }
}

pub(crate) fn check_positive<T: Real>(name: &str, values: &[T]) -> Result<()> {
    if let Some(k) = values.iter().position(|g| !(*g > T::zero()) || !g.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be positive, node {k} has {}", values[k])));
    }
    Ok(())
}

pub(crate) fn check_nonnegative<T: Real>(name: &str, values: &[T]) -> Result<()> {
    if let Some(k) = values.iter().position(|g| !(*g >= T::zero()) || !g.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be nonnegative, node {k} has {}", values[k])));
    }
    Ok(())
}

/// `e^{Phi(t_k)} int_0^{t_k} e^{-Phi} phi psi ds` at every node, with `Phi`
/// the cumulative trapezoid integral of `phi`.
///
/// On each interval the weight `e^{-Phi} phi` is integrated exactly against
/// the trapezoid-linear `Phi` (its antiderivative is `-e^{-Phi}`), and `psi`
/// is replaced by its interval mean. Constant `psi` is therefore reproduced
/// exactly. The running value is propagated with the interval growth factor
/// so nothing overflows before the final result does.
pub(crate) fn phi_weighted_running<T: Real>(phi: &[T], psi: &[T], dt: T) -> Vec<T> {
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(psi.len());
    let mut acc = T::zero();
    out.push(acc);
    for k in 0..psi.len() - 1 {
        let dphi = half * dt * (phi[k] + phi[k + 1]);
        acc = acc * dphi.exp() + dphi.exp_m1() * half * (psi[k] + psi[k + 1]);
        out.push(acc);
    }
    out
}

/// `e^{Phi(t_k)} int_0^{t_k} e^{-Phi} psi ds` at every node. The weight
/// `e^{-Phi}` and `psi` are both replaced by interval means.
pub(crate) fn plain_weighted_running<T: Real>(phi: &[T], psi: &[T], dt: T) -> Vec<T> {
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(psi.len());
    let mut acc = T::zero();
    out.push(acc);
    for k in 0..psi.len() - 1 {
        let g = (half * dt * (phi[k] + phi[k + 1])).exp();
        acc = acc * g + half * (g + T::one()) * half * dt * (psi[k] + psi[k + 1]);
        out.push(acc);
    }
    out
}

/// `e^{Gamma(t)} int_0^t e^{-Gamma(s)} gamma(s) f(s) ds` at `t = t_upto`.
pub fn exp_weighted_integral<T: Real>(f: &[T], gamma: &[T], dt: T, up_to: usize) -> Result<T> {
    exp_weighted_all(f, gamma, dt)?
        .get(up_to)
        .copied()
        .ok_or(Error::IndexOutOfRange { index: up_to, len: f.len() })
}

/// [`exp_weighted_integral`] at every node.
pub fn exp_weighted_all<T: Real>(f: &[T], gamma: &[T], dt: T) -> Result<Vec<T>> {
    if f.len() != gamma.len() {
        return Err(Error::Dimension(format!("{} values vs {} weights", f.len(), gamma.len())));
    }
    if f.is_empty() {
        return Err(Error::Dimension("empty sequence".into()));
    }
    check_positive("gamma", gamma)?;
    Ok(phi_weighted_running(gamma, f, dt))
}

/// Sparse first-derivative stencil on a uniform time grid.
///
/// Interior rows are centred differences; the end rows use the second-order
/// one-sided three-point formulas (first order when only two nodes exist).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStencil<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> TimeStencil<T> {
    pub fn first_derivative(nt: usize, dt: T) -> Self {
        let inv = dt.recip();
        let h = T::lit(0.5) * inv;
        let rows = if nt == 2 {
            vec![vec![(0, -inv), (1, inv)]; 2]
        } else {
            (0..nt)
                .map(|k| {
                    if k == 0 {
                        vec![(0, T::lit(-3.0) * h), (1, T::lit(4.0) * h), (2, -h)]
                    } else if k == nt - 1 {
                        vec![(nt - 3, h), (nt - 2, T::lit(-4.0) * h), (nt - 1, T::lit(3.0) * h)]
                    } else {
                        vec![(k - 1, -h), (k + 1, h)]
                    }
                })
                .collect()
        };
        Self { rows }
    }

    /// Second derivative as the first-derivative stencil applied twice.
    pub fn second_derivative(nt: usize, dt: T) -> Self {
        let d = Self::first_derivative(nt, dt);
        d.compose(&d)
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &Self) -> Self {
        let n = inner.rows.len();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut dense = vec![T::zero(); n];
                let mut touched = vec![false; n];
                for &(m, a) in row {
                    for &(j, b) in &inner.rows[m] {
                        dense[j] += a * b;
                        touched[j] = true;
                    }
                }
                (0..n).filter(|&j| touched[j]).map(|j| (j, dense[j])).collect()
            })
            .collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn row(&self, k: usize) -> &[(usize, T)] {
        &self.rows[k]
    }

    /// Transposed stencil: row `j` lists `(k, coeff)` for every row `k` using node `j`.
    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                rows[j].push((k, c));
            }
        }
        Self { rows }
    }

    pub fn apply(&self, values: &[T]) -> Vec<T> {
        self.rows.iter().map(|row| row.iter().map(|&(j, c)| c * values[j]).sum()).collect()
    }
}

/// Discrete time derivative of a scalar sequence.
pub fn time_derivative<T: Real>(values: &[T], dt: T) -> Vec<T> {
    TimeStencil::first_derivative(values.len(), dt).apply(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear_are_exact() {
        let v = vec![2.5; 11];
        assert_eq!(time_integral(&v, 0.1, 10).unwrap(), 2.5 * 0.1 * 10.0);
        let s: Vec<f64> = (0..101).map(|k| k as f64 / 100.0).collect();
        assert!((time_integral(&s, 0.01, 100).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_index() {
        let v = vec![1.0; 5];
        assert_eq!(time_integral(&v, 0.1, 5), Err(Error::IndexOutOfRange { index: 5, len: 5 }));
    }

    #[test]
    fn quadratic_error_bound() {
        for n in [11usize, 101] {
            let dt = 1.0 / (n - 1) as f64;
            let s: Vec<f64> = (0..n).map(|k| (k as f64 * dt).powi(2)).collect();
            let err = (time_integral(&s, dt, n - 1).unwrap() - 1.0 / 3.0).abs();
            assert!(err <= dt * dt / 6.0 + 1e-15);
        }
    }

    #[test]
    fn exp_weighted_closed_forms() {
        let n = 201;
        let dt = 1.0 / 200.0;
        let zero = vec![0.0; n];
        let g = vec![0.7; n];
        assert_eq!(exp_weighted_integral(&zero, &g, dt, n - 1).unwrap(), 0.0);
        let c = vec![3.0; n];
        let got = exp_weighted_integral(&c, &g, dt, n - 1).unwrap();
        assert!((got - 3.0 * (0.7f64.exp() - 1.0)).abs() < 1e-13);
        let s: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let one = vec![1.0; n];
        // gamma(s) = s would be zero at s = 0; shift by a tiny positive floor
        let sg: Vec<f64> = s.iter().map(|v| v.max(1e-300)).collect();
        let got = exp_weighted_integral(&one, &sg, dt, n - 1).unwrap();
        assert!((got - (0.5f64.exp() - 1.0)).abs() < 1e-4);
        assert!(exp_weighted_integral(&one, &zero, dt, 3).is_err());
    }

    #[test]
    fn stencils_are_exact_on_quadratics() {
        let n = 7;
        let dt = 0.25;
        let v: Vec<f64> = (0..n).map(|k| {
            let t = k as f64 * dt;
            1.0 + 2.0 * t + 3.0 * t * t
        })
        .collect();
        let d = time_derivative(&v, dt);
        for (k, dk) in d.iter().enumerate() {
            let t = k as f64 * dt;
            assert!((dk - (2.0 + 6.0 * t)).abs() < 1e-12);
        }
        let dd = TimeStencil::second_derivative(n, dt).apply(&v);
        for x in dd {
            assert!((x - 6.0).abs() < 1e-11);
        }
    }

    #[test]
    fn transpose_matches_dense() {
        let s = TimeStencil::first_derivative(6, 0.5f64).compose(&TimeStencil::first_derivative(6, 0.5));
        let t = s.transpose();
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let y: Vec<f64> = (0..6).map(|i| (i as f64 * 0.3).cos()).collect();
        let lhs: f64 = s.apply(&x).iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = t.apply(&y).iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
