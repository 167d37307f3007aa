use nalgebra::DMatrix;

use super::{MapRef, SmoothMap};
use crate::error::{Error, Result};
use crate::space::{Space, SpacePoint};

/// `outer ∘ inner`.
#[derive(Debug, Clone)]
pub struct Composite {
    outer: MapRef,
    inner: MapRef,
}

impl Composite {
    pub fn new(outer: MapRef, inner: MapRef) -> Result<Self> {
        if outer.space() != inner.space() {
            return Err(Error::InvalidParameter(format!(
                "cannot compose `{}` on {:?} with `{}` on {:?}",
                outer.label(),
                outer.space(),
                inner.label(),
                inner.space()
            )));
        }
        Ok(Self { outer, inner })
    }

    pub fn outer(&self) -> &MapRef {
        &self.outer
    }

    pub fn inner(&self) -> &MapRef {
        &self.inner
    }
}

impl SmoothMap for Composite {
    fn label(&self) -> String {
        format!("{}∘{}", self.outer.label(), self.inner.label())
    }

    fn space(&self) -> Space {
        self.inner.space()
    }

    fn eval(&self, p: &SpacePoint) -> SpacePoint {
        self.outer.eval(&self.inner.eval(p))
    }

    fn has_jacobian(&self) -> bool {
        self.outer.has_jacobian() && self.inner.has_jacobian()
    }

    fn jacobian(&self, p: &SpacePoint) -> Option<DMatrix<f64>> {
        let ji = self.inner.jacobian(p)?;
        let jo = self.outer.jacobian(&self.inner.eval(p))?;
        Some(jo * ji)
    }

    fn is_invertible(&self) -> bool {
        self.outer.is_invertible() && self.inner.is_invertible()
    }

    fn invert(&self, p: &SpacePoint) -> Result<SpacePoint> {
        self.inner.invert(&self.outer.invert(p)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{fd_jacobian, invert_map, AffineMap};
    use std::sync::Arc;

    #[test]
    fn composes_in_order() {
        let cat: MapRef = Arc::new(AffineMap::cat());
        let rot: MapRef = Arc::new(AffineMap::rotation(vec![0.1, 0.0]).unwrap());
        let c = Composite::new(rot.clone(), cat.clone()).unwrap();
        let x = SpacePoint::new(vec![0.25, 0.5]);
        // cat sends x to (0, 0.75), then the rotation adds 0.1
        let y = c.eval(&x);
        assert!((y.coords()[0] - 0.1).abs() < 1e-15);
        assert!(Space::Torus(2).dist(&invert_map(&c, &y).unwrap(), &x) < 1e-12);
        assert!((c.jacobian(&x).unwrap() - fd_jacobian(&c, &x, 1e-6)).amax() < 1e-6);
        let line: MapRef = Arc::new(AffineMap::rotation(vec![0.1]).unwrap());
        assert!(Composite::new(line, cat).is_err());
    }
}
