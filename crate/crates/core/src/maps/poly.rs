use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SmoothMap;
use crate::error::{Error, Result};
use crate::space::{Space, SpacePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    fn eval(&self, x: &[f64]) -> f64 {
        self.coeff * x.iter().zip(&self.powers).map(|(v, p)| v.powi(*p as i32)).product::<f64>()
    }

    fn partial(&self, x: &[f64], j: usize) -> f64 {
        let pj = self.powers[j];
        if pj == 0 {
            return 0.0;
        }
        let rest: f64 = x
            .iter()
            .zip(&self.powers)
            .enumerate()
            .map(|(i, (v, p))| if i == j { v.powi(*p as i32 - 1) } else { v.powi(*p as i32) })
            .product();
        self.coeff * pj as f64 * rest
    }
}

/// Polynomial map evaluated on the normalized coordinates of a point.
///
/// On the torus the result is reduced mod 1; it is up to the author of the
/// polynomial to make that well defined (integer linear part plus periodic
/// corrections, for instance). Inversion goes through Newton's method when
/// `invertible` is set.
#[derive(Debug, Clone)]
pub struct PolyMap {
    space: Space,
    components: Vec<Vec<Monomial>>,
    invertible: bool,
}

impl PolyMap {
    pub fn new(space: Space, components: Vec<Vec<Monomial>>, invertible: bool) -> Result<Self> {
        let d = space.dim();
        if components.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: components.len() });
        }
        if let Some(m) = components.iter().flatten().find(|m| m.powers.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: m.powers.len() });
        }
        Ok(Self { space, components, invertible })
    }
}

impl SmoothMap for PolyMap {
    fn label(&self) -> String {
        format!("poly{:?}", self.components)
    }

    fn space(&self) -> Space {
        self.space
    }

    fn eval(&self, p: &SpacePoint) -> SpacePoint {
        let x = p.coords();
        self.space.point(self.components.iter().map(|c| c.iter().map(|m| m.eval(x)).sum()).collect())
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, p: &SpacePoint) -> Option<DMatrix<f64>> {
        let x = p.coords();
        let d = self.space.dim();
        Some(DMatrix::from_fn(d, d, |i, j| self.components[i].iter().map(|m| m.partial(x, j)).sum()))
    }

    fn is_invertible(&self) -> bool {
        self.invertible
    }
}
