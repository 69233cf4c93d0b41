//! Energy norms of error fields.

use crate::error::{Error, Result};
use crate::field::{weighted_norm_sq, StaggeredField};
use crate::grid::GridSpec;
use crate::material::MaterialField;
use crate::scalar::Real;

/// `n_rho = ||phi_t||^2_eps + rho ||curl phi||^2_{mu^-1}`.
///
/// `phi_t` is an edge field (a time derivative or an independent
/// approximation of one), `curl_phi` a face field.
pub fn energy_norm_n<T: Real>(
    phi_t: &StaggeredField<T>,
    curl_phi: &StaggeredField<T>,
    eps: &MaterialField<T>,
    mu_inv: &MaterialField<T>,
    rho: T,
    grid: &GridSpec<T>,
) -> Result<T> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::Parameter(format!("rho must lie in (0, 1), got {rho}")));
    }
    energy_norm_unchecked(phi_t, curl_phi, eps, mu_inv, rho, grid)
}

/// Same as [`energy_norm_n`] without the range check on `rho`; the zero
/// terms use `rho = 1`.
pub(crate) fn energy_norm_unchecked<T: Real>(
    phi_t: &StaggeredField<T>,
    curl_phi: &StaggeredField<T>,
    eps: &MaterialField<T>,
    mu_inv: &MaterialField<T>,
    rho: T,
    grid: &GridSpec<T>,
) -> Result<T> {
    Ok(weighted_norm_sq(phi_t, eps, grid)? + rho * weighted_norm_sq(curl_phi, mu_inv, grid)?)
}
