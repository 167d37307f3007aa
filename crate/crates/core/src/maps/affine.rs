use nalgebra::{DMatrix, DVector};

use super::SmoothMap;
use crate::error::{Error, Result};
use crate::space::{Space, SpacePoint};

/// `x -> A x + b`, on the torus (integer unimodular `A`) or on the cube.
#[derive(Debug, Clone)]
pub struct AffineMap {
    label: String,
    space: Space,
    matrix: DMatrix<f64>,
    inverse: Option<DMatrix<f64>>,
    offset: DVector<f64>,
}

impl AffineMap {
    pub fn new(space: Space, matrix: DMatrix<f64>, offset: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d || offset.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows().max(offset.len()) });
        }
        let inverse = matrix.clone().try_inverse();
        let inverse = match space {
            Space::Torus(_) => {
                if matrix.iter().any(|c| c.fract() != 0.0) {
                    return Err(Error::InvalidParameter("torus affine maps need an integer matrix".into()));
                }
                let det = matrix.determinant();
                if (det.abs() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "torus affine map has determinant {det}; it must be +-1"
                    )));
                }
                inverse.map(|m| m.map(f64::round))
            }
            Space::Cube(_) => inverse,
        };
        Ok(Self { label: label.into(), space, matrix, inverse, offset: DVector::from_vec(offset) })
    }

    /// The hyperbolic toral automorphism `(u, v) -> (2u + v, u + v)`.
    pub fn cat() -> Self {
        Self::new(Space::Torus(2), DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]), vec![0.0; 2], "cat")
            .expect("cat matrix is unimodular")
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self::new(space, DMatrix::identity(d, d), vec![0.0; d], format!("identity[{d}]"))
            .expect("identity is unimodular")
    }

    /// Rigid translation of the torus by `shift`.
    pub fn rotation(shift: Vec<f64>) -> Result<Self> {
        let d = shift.len();
        let label = format!("rotation{shift:?}");
        Self::new(Space::Torus(d), DMatrix::identity(d, d), shift, label)
    }

    /// `x -> q x + offset` on the unit cube, `0 < q < 1`.
    pub fn contraction(q: f64, offset: Vec<f64>) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("contraction factor {q} outside (0, 1)")));
        }
        if offset.iter().any(|b| *b < 0.0 || b + q > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "offset {offset:?} does not map the cube into itself"
            )));
        }
        let d = offset.len();
        let label = format!("contraction[{q}]{offset:?}");
        Self::new(Space::Cube(d), DMatrix::identity(d, d) * q, offset, label)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }
}

impl SmoothMap for AffineMap {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn space(&self) -> Space {
        self.space
    }

    fn eval(&self, p: &SpacePoint) -> SpacePoint {
        let x = DVector::from_column_slice(p.coords());
        let y = &self.matrix * x + &self.offset;
        self.space.point(y.iter().copied().collect())
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, _p: &SpacePoint) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }

    fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    fn invert(&self, p: &SpacePoint) -> Result<SpacePoint> {
        let inv = self.inverse.as_ref().ok_or_else(|| Error::NotInvertible { label: self.label() })?;
        let x = DVector::from_column_slice(p.coords()) - &self.offset;
        let y = inv * x;
        if let Space::Cube(_) = self.space {
            // only the image of the cube has a preimage
            if y.iter().any(|c| *c < -1e-12 || *c > 1.0 + 1e-12) {
                return Err(Error::OutsideImage { label: self.label() });
            }
        }
        Ok(self.space.point(y.iter().copied().collect()))
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::invert_map;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cat_map_examples() {
        let g = AffineMap::cat();
        let y = g.eval(&SpacePoint::new(vec![0.25, 0.5]));
        assert_abs_diff_eq!(y.coords()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y.coords()[1], 0.75, epsilon = 1e-15);
        let back = invert_map(&g, &SpacePoint::new(vec![0.0, 0.75])).unwrap();
        assert_abs_diff_eq!(back.coords()[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(back.coords()[1], 0.5, epsilon = 1e-15);
        assert_eq!(g.inverse.as_ref().unwrap(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]));
    }

    #[test]
    fn identity_is_identity() {
        let id = AffineMap::identity(Space::Torus(3));
        let p = SpacePoint::new(vec![0.1, 0.2, 0.9]);
        assert_eq!(id.eval(&p), p);
        assert_eq!(invert_map(&id, &p).unwrap(), p);
    }

    #[test]
    fn torus_maps_must_be_unimodular() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(AffineMap::new(Space::Torus(2), m, vec![0.0; 2], "x").is_err());
        let m = DMatrix::from_row_slice(1, 1, &[0.5]);
        assert!(AffineMap::new(Space::Torus(1), m, vec![0.0], "x").is_err());
    }

    #[test]
    fn contraction_inverse_only_on_image() {
        let f = AffineMap::contraction(0.5, vec![0.5]).unwrap();
        let y = f.eval(&Space::Cube(1).point(vec![1.0]));
        assert_eq!(y.coords(), &[1.0]);
        let back = invert_map(&f, &Space::Cube(1).point(vec![0.75])).unwrap();
        assert_abs_diff_eq!(back.coords()[0], 0.5);
        assert!(matches!(
            f.invert(&Space::Cube(1).point(vec![0.25])),
            Err(Error::OutsideImage { .. })
        ));
        assert!(AffineMap::contraction(1.0, vec![0.0]).is_err());
        assert!(AffineMap::contraction(0.5, vec![0.7]).is_err());
    }
}
