use rayon::prelude::*;

use super::{certify, MajorantParams, MajorantReport, Theorem};
use crate::error::{Error, Result};
use crate::field::{curl_edge_to_face, curl_face_to_edge, weighted_norm_sq};
use crate::problem::ProblemData;
use crate::scalar::Real;
use crate::solver::SolveOutput;

/// Estimate for the error of the pair `(E~, H~)` in the first-order system.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedReport<T> {
    /// Electric majorant (second form).
    pub electric: MajorantReport<T>,
    /// `||F - E~_t + eps^-1 curl H~||^2_eps` per node.
    pub f_sq: Vec<T>,
    /// `||G - H~_t - mu^-1 curl E~||^2_mu` per node.
    pub g_sq: Vec<T>,
    /// `3 b + 2 ||f||^2_eps + 2 ||g||^2_mu`
    pub bound: Vec<T>,
    /// `n[e_t, e] + rho ||h_t||^2_mu + ||curl h||^2_{eps^-1}` when the exact
    /// solution is known.
    pub true_value: Option<Vec<T>>,
}

impl<T: Real> CombinedReport<T> {
    /// Same rounding allowance as [`MajorantReport::dominates`].
    pub fn dominates(&self) -> Option<bool> {
        let t = self.true_value.as_ref()?;
        let tol = super::certify::efficiency_threshold(self.electric.energy_scale);
        Some(self.bound.iter().zip(t).all(|(b, n)| *n <= *b + tol))
    }
}

/// Combined electric and magnetic estimate built on a second-form
/// electric majorant (`T4` or `T5`).
pub fn combined_estimate<T: Real>(
    p: &ProblemData<T>,
    approx: &SolveOutput<T>,
    params: &MajorantParams<T>,
    theorem: Theorem,
    exact: Option<&SolveOutput<T>>,
) -> Result<CombinedReport<T>> {
    if !theorem.second_form() {
        return Err(Error::Parameter("the combined estimate uses a second-form majorant".into()));
    }
    let grid = p.grid;
    let (h, h_t, e_t) = (approx.h()?, approx.h_t()?, approx.e_t()?);
    let electric = certify(p, approx, params, theorem, exact)?;
    let residual_norms = (0..grid.nt)
        .into_par_iter()
        .map(|k| -> Result<(T, T)> {
            let mut f = p.f.samples()[k].sub(&e_t.samples()[k])?;
            f.axpy(T::one(), &p.eps_inv.apply(&curl_face_to_edge(&h.samples()[k], &grid)?)?)?;
            let mut g = p.g.samples()[k].sub(&h_t.samples()[k])?;
            g.axpy(-T::one(), &p.mu_inv.apply(&curl_edge_to_face(&approx.e.samples()[k], &grid)?)?)?;
            Ok((weighted_norm_sq(&f, &p.eps, &grid)?, weighted_norm_sq(&g, &p.mu, &grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (f_sq, g_sq): (Vec<T>, Vec<T>) = residual_norms.into_iter().unzip();
    let two = T::lit(2.0);
    let bound = (0..grid.nt)
        .map(|k| T::lit(3.0) * electric.bound_b[k] + two * f_sq[k] + two * g_sq[k])
        .collect();

    let true_value = match (exact, &electric.true_n) {
        (Some(ex), Some(n)) => {
            let (hx, hxt) = (ex.h()?, ex.h_t()?);
            let mag = (0..grid.nt)
                .into_par_iter()
                .map(|k| -> Result<T> {
                    let ht = hxt.samples()[k].sub(&h_t.samples()[k])?;
                    let hh = hx.samples()[k].sub(&h.samples()[k])?;
                    let curl_h = curl_face_to_edge(&hh, &grid)?;
                    Ok(params.rho.at(k) * weighted_norm_sq(&ht, &p.mu, &grid)?
                        + weighted_norm_sq(&curl_h, &p.eps_inv, &grid)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(n.iter().zip(mag).map(|(a, b)| *a + b).collect())
        }
        _ => None,
    };
    Ok(CombinedReport { electric, f_sq, g_sq, bound, true_value })
}
