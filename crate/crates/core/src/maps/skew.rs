use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::SmoothMap;
use crate::error::Result;
use crate::space::{Space, SpacePoint};

/// Which coupling function modulates the fibre map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `c(u, v) = cos^2(pi (u + v))`
    Sum,
    /// `c(u, v) = cos^2(pi (u - v))`
    Difference,
}

impl Coupling {
    fn phase(&self, u: f64, v: f64) -> f64 {
        match self {
            Coupling::Sum => u + v,
            Coupling::Difference => u - v,
        }
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        let c = (PI * self.phase(u, v)).cos();
        c * c
    }

    /// `(dc/du, dc/dv)`
    pub fn gradient(&self, u: f64, v: f64) -> (f64, f64) {
        let g = -PI * (2.0 * PI * self.phase(u, v)).sin();
        match self {
            Coupling::Sum => (g, g),
            Coupling::Difference => (g, -g),
        }
    }
}

fn fibre(x: f64) -> f64 {
    (2.0 * PI * x).sin() / (2.0 * PI)
}

fn fibre_slope(x: f64) -> f64 {
    (2.0 * PI * x).cos()
}

/// Skew product on `T^4` over the cat map:
///
/// `(x, y, u, v) -> (2x - c(u,v) f(x) + y, x - c(u,v) f(x) + y, 2u + v, u + v)`
/// with `f(x) = sin(2 pi x) / (2 pi)`.
#[derive(Debug, Clone, Copy)]
pub struct TorusSkewMap {
    coupling: Coupling,
}

impl TorusSkewMap {
    pub fn new(coupling: Coupling) -> Self {
        Self { coupling }
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }
}

impl SmoothMap for TorusSkewMap {
    fn label(&self) -> String {
        match self.coupling {
            Coupling::Sum => "torus_F1".into(),
            Coupling::Difference => "torus_F2".into(),
        }
    }

    fn space(&self) -> Space {
        Space::Torus(4)
    }

    fn eval(&self, p: &SpacePoint) -> SpacePoint {
        let [x, y, u, v] = <[f64; 4]>::try_from(p.coords()).expect("4-dimensional point");
        let cf = self.coupling.value(u, v) * fibre(x);
        Space::Torus(4).point(vec![2.0 * x - cf + y, x - cf + y, 2.0 * u + v, u + v])
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, p: &SpacePoint) -> Option<DMatrix<f64>> {
        let [x, _, u, v] = <[f64; 4]>::try_from(p.coords()).ok()?;
        let c = self.coupling.value(u, v);
        let (cu, cv) = self.coupling.gradient(u, v);
        let (f, fp) = (fibre(x), fibre_slope(x));
        #[rustfmt::skip]
        let j = DMatrix::from_row_slice(4, 4, &[
            2.0 - c * fp, 1.0, -cu * f, -cv * f,
            1.0 - c * fp, 1.0, -cu * f, -cv * f,
            0.0,          0.0, 2.0,     1.0,
            0.0,          0.0, 1.0,     1.0,
        ]);
        Some(j)
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn invert(&self, p: &SpacePoint) -> Result<SpacePoint> {
        let [xx, yy, uu, vv] = <[f64; 4]>::try_from(p.coords()).expect("4-dimensional point");
        let (u, v) = (uu - vv, 2.0 * vv - uu);
        let x = xx - yy;
        let y = yy - x + self.coupling.value(u, v) * fibre(x);
        Ok(Space::Torus(4).point(vec![x, y, u, v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn origin_is_fixed() {
        let f1 = TorusSkewMap::new(Coupling::Sum);
        let o = SpacePoint::new(vec![0.0; 4]);
        assert_eq!(f1.eval(&o), o);
    }

    #[test]
    fn coupling_vanishes_on_the_antidiagonal() {
        assert_abs_diff_eq!(Coupling::Sum.value(0.25, 0.25), 0.0, epsilon = 1e-16);
        // the fibre map reduces to (2x + y, x + y) there
        let f1 = TorusSkewMap::new(Coupling::Sum);
        let y = f1.eval(&SpacePoint::new(vec![0.1, 0.3, 0.25, 0.25]));
        assert_abs_diff_eq!(y.coords()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(y.coords()[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn coupling_bounded_on_grid() {
        let g = crate::space::MetricGrid::new(Space::Torus(2), 64).unwrap();
        for q in g.points() {
            for c in [Coupling::Sum, Coupling::Difference] {
                let val = c.value(q.coords()[0], q.coords()[1]);
                assert!((0.0..=1.0 + 1e-15).contains(&val));
            }
        }
    }

    #[test]
    fn fibre_block_is_area_preserving() {
        let f2 = TorusSkewMap::new(Coupling::Difference);
        let j = f2.jacobian(&SpacePoint::new(vec![0.13, 0.4, 0.7, 0.2])).unwrap();
        assert_abs_diff_eq!(j.determinant(), 1.0, epsilon = 1e-12);
    }
}
