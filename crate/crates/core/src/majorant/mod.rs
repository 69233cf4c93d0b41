//! Functional a-posteriori majorants for the curl-curl form of the Maxwell
//! system: residuals, zero terms, the functionals `f`, the Gronwall-type
//! bounds `b` and `B`, true error norms and the combined estimate for the
//! electric and magnetic fields.

mod certify;
mod combined;
mod functional;
mod residuals;

pub use certify::{bound_b_and_big_b, certify, true_error_norms, BoundForm, MajorantReport};
pub use combined::{combined_estimate, CombinedReport};
pub use functional::{f_first_form, f_refined, f_second_form, g_from_norms, zero_term, ZeroTermParts};
pub use residuals::{node_norms, residuals, NodeNorms, Residuals};

use crate::error::{Error, Result};
use crate::field::curl_edge_to_face;
use crate::problem::ProblemData;
use crate::quadrature::ScalarTrajectory;
use crate::scalar::Real;
use crate::solver::SolveOutput;
use crate::trajectory::FieldTrajectory;

/// Which estimate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// First form, constant parameters, second time differences of `E~`.
    T1,
    /// First form with time-dependent parameters.
    T3,
    /// Second form (independent `E~_t`) with time-dependent parameters.
    T4,
    /// Second form with constant parameters.
    T5,
}

impl Theorem {
    pub fn key(self) -> &'static str {
        match self {
            Theorem::T1 => "T1",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        match s {
            "T1" => Ok(Theorem::T1),
            "T3" => Ok(Theorem::T3),
            "T4" => Ok(Theorem::T4),
            "T5" => Ok(Theorem::T5),
            other => Err(Error::Parameter(format!("unknown theorem `{other}`"))),
        }
    }

    /// Uses an independent approximation of `dE/dt`.
    pub fn second_form(self) -> bool {
        matches!(self, Theorem::T4 | Theorem::T5)
    }

    /// Requires constant `rho` and `gamma`.
    pub fn constant_params(self) -> bool {
        matches!(self, Theorem::T1 | Theorem::T5)
    }

    pub fn bound_form(self) -> BoundForm {
        if self.constant_params() {
            BoundForm::Unweighted
        } else {
            BoundForm::GammaWeighted
        }
    }
}

/// Variant of the initial-error term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZeroTermVariant {
    /// Signed cross term.
    Z,
    /// Absolute value of the cross term.
    ZTilde,
    /// Cross term split by Young's inequality.
    #[default]
    ZHat,
}

impl ZeroTermVariant {
    pub fn key(self) -> &'static str {
        match self {
            ZeroTermVariant::Z => "z",
            ZeroTermVariant::ZTilde => "z_tilde",
            ZeroTermVariant::ZHat => "z_hat",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        match s {
            "z" => Ok(ZeroTermVariant::Z),
            "z_tilde" => Ok(ZeroTermVariant::ZTilde),
            "z_hat" => Ok(ZeroTermVariant::ZHat),
            other => Err(Error::Parameter(format!("unknown zero-term variant `{other}`"))),
        }
    }

    /// The variant is nonnegative for every input.
    pub fn nonnegative(self) -> bool {
        !matches!(self, ZeroTermVariant::Z)
    }
}

/// Scalar parameter that is either constant or given per time node.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeParam<T> {
    Constant(T),
    Nodes(Vec<T>),
}

impl<T: Real> TimeParam<T> {
    pub fn at(&self, k: usize) -> T {
        match self {
            TimeParam::Constant(c) => *c,
            TimeParam::Nodes(v) => v[k],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeParam::Constant(_))
    }

    pub fn constant(&self) -> Option<T> {
        match self {
            TimeParam::Constant(c) => Some(*c),
            TimeParam::Nodes(_) => None,
        }
    }

    pub fn to_nodes(&self, nt: usize) -> Vec<T> {
        (0..nt).map(|k| self.at(k)).collect()
    }

    /// Expands to node values, checking the length.
    pub fn nodes_checked(&self, nt: usize) -> Result<Vec<T>> {
        if let TimeParam::Nodes(v) = self {
            if v.len() != nt {
                return Err(Error::Dimension(format!("parameter has {} nodes, grid has {nt}", v.len())));
            }
        }
        Ok(self.to_nodes(nt))
    }

    pub fn from_trajectory(t: &ScalarTrajectory<T>) -> Self {
        TimeParam::Nodes(t.values().to_vec())
    }

    fn check(&self, name: &str, nt: usize, ok: impl Fn(T) -> bool) -> Result<()> {
        for v in self.nodes_checked(nt)? {
            if !ok(v) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} = {v} out of range")));
            }
        }
        Ok(())
    }
}

/// Free variables of the majorant.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantParams<T> {
    pub rho: TimeParam<T>,
    pub gamma: TimeParam<T>,
    /// Face-type trajectory standing in for `mu^-1 curl E`.
    pub y: FieldTrajectory<T>,
    pub zero_term: ZeroTermVariant,
    /// Replace the signed coupling integral of the second form by its
    /// absolute value.
    pub abs_coupling: bool,
}

impl<T: Real> MajorantParams<T> {
    pub fn new(rho: T, gamma: T, y: FieldTrajectory<T>) -> Self {
        Self {
            rho: TimeParam::Constant(rho),
            gamma: TimeParam::Constant(gamma),
            y,
            zero_term: ZeroTermVariant::default(),
            abs_coupling: false,
        }
    }

    pub fn with_zero_term(mut self, v: ZeroTermVariant) -> Self {
        self.zero_term = v;
        self
    }

    pub fn validate(&self, theorem: Theorem, nt: usize) -> Result<()> {
        self.rho.check("rho", nt, |r| r > T::zero() && r < T::one())?;
        self.gamma.check("gamma", nt, |g| g > T::zero())?;
        if theorem.constant_params() && !(self.rho.is_constant() && self.gamma.is_constant()) {
            return Err(Error::Parameter(format!("{} needs constant rho and gamma", theorem.key())));
        }
        if self.y.kind() != crate::field::FieldKind::Face {
            return Err(Error::Dimension("Y must be a face trajectory".into()));
        }
        Ok(())
    }
}

/// `Y = mu^-1 curl E~` at every node: the natural choice that removes the
/// dominant residual.
pub fn y_from_approx<T: Real>(p: &ProblemData<T>, approx: &SolveOutput<T>) -> Result<FieldTrajectory<T>> {
    approx.e.map(|_, e| p.mu_inv.apply(&curl_edge_to_face(e, &p.grid)?))
}
