//! Golden-section search for unimodal scalar functions.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimiser found by [`golden_section`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Minimises `f` over `[a, b]` until the bracket is shorter than `tol`.
///
/// The bracket endpoints are evaluated as well and win ties, so a monotone
/// function returns the endpoint exactly. Among equal values the smaller
/// abscissa is preferred.
pub fn golden_section<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Result<GoldenResult<T>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::EmptyBracket(format!("[{a}, {b}]")));
    }
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let v = f(x);
        evaluations += 1;
        if v < best.1 || (v == best.1 && x < best.0) {
            best = (x, v);
        }
    }
    Ok(GoldenResult { x: best.0, value: best.1, evaluations })
}
