//! True chains near δ-chains.
//!
//! Three solvers are provided. [`shadow_contraction`] iterates from the first
//! point of the chain, [`shadow_linear_hyperbolic`] sums link errors along the
//! stable and unstable directions of a hyperbolic toral automorphism, and
//! [`shadow_newton`] runs Gauss–Newton on the lifted link residuals of any IFS
//! whose maps carry Jacobians. [`shadow`] picks one of them.

mod checks;
mod contraction;
mod hyperbolic;
mod newton;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{link_residuals, ChainKind, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::space::{Space, SpacePoint};

pub use checks::{
    check_uniqueness, finite_shadow_probe, verify_shadowing, ProbeReport, ShadowVerdict, UniquenessReport,
    UniquenessVerdict, WindowReport,
};
pub use contraction::{contraction_factor, lipschitz_estimate, shadow_contraction, LIPSCHITZ_GRID};
pub use hyperbolic::{hyperbolic_series, shadow_linear_hyperbolic, HyperbolicSplitting};
pub use newton::{refine, shadow_newton, NewtonOptions, NewtonOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    /// Contraction for cube contractions, hyperbolic for torus maps sharing one
    /// linear part, Gauss–Newton otherwise.
    Auto,
    Contraction,
    Hyperbolic,
    Newton,
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Solver::Auto),
            "contraction" => Ok(Solver::Contraction),
            "hyperbolic" | "linear-hyperbolic" => Ok(Solver::Hyperbolic),
            "newton" | "gauss-newton" => Ok(Solver::Newton),
            _ => Err(Error::InvalidParameter(format!("unknown solver `{s}`"))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Auto => "auto",
            Solver::Contraction => "contraction",
            Solver::Hyperbolic => "hyperbolic",
            Solver::Newton => "newton",
        })
    }
}

impl Solver {
    /// The concrete solver `Auto` stands for on this IFS.
    pub fn resolve(self, ifs: &Ifs) -> Solver {
        if self != Solver::Auto {
            return self;
        }
        let affine: Option<Vec<_>> = ifs.maps().iter().map(|m| m.as_affine().map(|a| a.matrix().clone())).collect();
        match (ifs.space(), affine) {
            (Space::Cube(_), Some(ms)) if ms.iter().all(|m| crate::maps::spectral_norm(m) < 1.0) => {
                Solver::Contraction
            }
            (Space::Torus(_), Some(ms)) if ms.iter().all(|m| *m == ms[0]) => Solver::Hyperbolic,
            _ => Solver::Newton,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShadowResult {
    /// The true chain, on the same window as the input.
    pub shadow: ChainRecord,
    /// `max_k dist(x_k, y_k)` over the window.
    pub sup_dist: f64,
    pub solver: Solver,
    pub iterations: usize,
    /// Largest link residual of `shadow`.
    pub residual: f64,
    /// A priori bound on `sup_dist` when the solver has one.
    pub bound: Option<f64>,
}

/// The scalar part of a [`ShadowResult`], as written to JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowSummary {
    pub solver: Solver,
    pub sup_dist: f64,
    pub residual: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<f64>,
}

impl ShadowResult {
    pub fn summary(&self) -> ShadowSummary {
        ShadowSummary {
            solver: self.solver,
            sup_dist: self.sup_dist,
            residual: self.residual,
            iterations: self.iterations,
            bound: self.bound,
        }
    }

    pub(crate) fn assemble(
        ifs: &Ifs,
        xi: &ChainRecord,
        points: Vec<SpacePoint>,
        solver: Solver,
        iterations: usize,
        bound: Option<f64>,
    ) -> Result<Self> {
        let shadow = ChainRecord::new(xi.start, points, xi.sigma.clone(), 0.0, ChainKind::ExactChain)?;
        let residual = link_residuals(ifs, &shadow)?.into_iter().fold(0.0, f64::max);
        Ok(Self { sup_dist: sup_dist(ifs.space(), &xi.points, &shadow.points), shadow, solver, iterations, residual, bound })
    }
}

pub(crate) fn sup_dist(space: Space, a: &[SpacePoint], b: &[SpacePoint]) -> f64 {
    a.iter().zip(b).map(|(p, q)| space.dist(p, q)).fold(0.0, f64::max)
}

/// Shadows `xi` with the requested solver.
pub fn shadow(ifs: &Ifs, xi: &ChainRecord, solver: Solver, opts: &NewtonOptions) -> Result<ShadowResult> {
    match solver.resolve(ifs) {
        Solver::Contraction => shadow_contraction(ifs, xi),
        Solver::Hyperbolic => shadow_linear_hyperbolic(ifs, xi),
        Solver::Newton | Solver::Auto => shadow_newton(ifs, xi, opts.tol, opts.max_iter),
    }
}
