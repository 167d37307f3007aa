//! Evaluable maps with optional inverse and Jacobian.

mod affine;
mod bump;
mod compose;
mod poly;
mod skew;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use affine::AffineMap;
pub use bump::{bump_profile, bump_profile_slope, max_profile_slope, BumpDiffeo};
pub use compose::Composite;
pub use poly::{Monomial, PolyMap};
pub use skew::{Coupling, TorusSkewMap};

use crate::error::{Error, Result};
use crate::space::{Space, SpacePoint};

/// Iteration cap for Newton inversion.
pub const NEWTON_MAX_ITER: usize = 50;
/// Newton stops once the step norm drops below this.
pub const NEWTON_STEP_TOL: f64 = 1e-12;
/// Accepted round-trip residual of any inversion.
pub const INVERSE_TOL: f64 = 1e-10;

pub type MapRef = Arc<dyn SmoothMap>;

pub trait SmoothMap: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    fn space(&self) -> Space;

    /// Image of `p`, normalized into the space. Callers guarantee the dimension.
    fn eval(&self, p: &SpacePoint) -> SpacePoint;

    fn has_jacobian(&self) -> bool {
        false
    }

    fn jacobian(&self, _p: &SpacePoint) -> Option<DMatrix<f64>> {
        None
    }

    /// Whether `invert` can be called. Maps with a Jacobian are inverted by
    /// Newton's method unless they provide a closed form.
    fn is_invertible(&self) -> bool {
        self.has_jacobian()
    }

    fn invert(&self, p: &SpacePoint) -> Result<SpacePoint> {
        newton_invert(self, p, &self.inverse_guess(p))
    }

    /// Starting point for Newton inversion.
    fn inverse_guess(&self, p: &SpacePoint) -> SpacePoint {
        p.clone()
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        None
    }
}

pub fn eval_map(m: &dyn SmoothMap, p: &SpacePoint) -> Result<SpacePoint> {
    m.space().check(p)?;
    Ok(m.eval(p))
}

/// Preimage of `p`, checked to satisfy `dist(m(q), p) <= 1e-10`.
pub fn invert_map(m: &dyn SmoothMap, p: &SpacePoint) -> Result<SpacePoint> {
    m.space().check(p)?;
    if !m.is_invertible() {
        return Err(Error::NotInvertible { label: m.label() });
    }
    let q = m.invert(p)?;
    let residual = m.space().dist(&m.eval(&q), p);
    if residual > INVERSE_TOL {
        return Err(Error::NewtonFailed { label: m.label(), residual });
    }
    Ok(q)
}

/// Newton's method for `m(q) = target` with residuals lifted to the cover.
pub fn newton_invert<M: SmoothMap + ?Sized>(
    m: &M,
    target: &SpacePoint,
    guess: &SpacePoint,
) -> Result<SpacePoint> {
    if !m.has_jacobian() {
        return Err(Error::NotInvertible { label: m.label() });
    }
    let space = m.space();
    let mut q = guess.clone();
    let mut best = (f64::INFINITY, q.clone());
    for _ in 0..NEWTON_MAX_ITER {
        let r = space.displacement(target, &m.eval(&q));
        let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < best.0 {
            best = (norm, q.clone());
        }
        if norm == 0.0 {
            return Ok(q);
        }
        let j = m.jacobian(&q).ok_or_else(|| Error::MissingJacobian { label: m.label() })?;
        let Some(step) = j.lu().solve(&DVector::from_vec(r)) else {
            break;
        };
        let step_norm = step.norm();
        let neg: Vec<f64> = step.iter().map(|c| -c).collect();
        q = space.translate(&q, &neg);
        if step_norm <= NEWTON_STEP_TOL {
            let res = space.dist(&m.eval(&q), target);
            if res <= INVERSE_TOL {
                return Ok(q);
            }
            break;
        }
    }
    let res = space.dist(&m.eval(&best.1), target);
    if res <= INVERSE_TOL {
        return Ok(best.1);
    }
    Err(Error::NewtonFailed { label: m.label(), residual: res })
}

/// Central finite-difference Jacobian on the universal cover.
pub fn fd_jacobian(m: &dyn SmoothMap, p: &SpacePoint, h: f64) -> DMatrix<f64> {
    let space = m.space();
    let d = space.dim();
    let mut jac = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut plus = p.coords().to_vec();
        let mut minus = p.coords().to_vec();
        plus[j] += h;
        minus[j] -= h;
        let fp = m.eval(&space.point(plus));
        let fm = m.eval(&space.point(minus));
        let diff = space.displacement(&fm, &fp);
        for i in 0..d {
            jac[(i, j)] = diff[i] / (2.0 * h);
        }
    }
    jac
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|c| *c == 0.0) {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}
