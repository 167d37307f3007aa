//! Phase spaces and their metrics.
//!
//! Two spaces are supported: the flat torus `T^d = R^d / Z^d` with the
//! quotient metric, and the closed unit cube `[0,1]^d` with the Euclidean
//! metric. The cube hosts maps that are not well defined on the circle, such
//! as the affine contractions `x -> x/2 + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The manifold a map or an IFS lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dim", rename_all = "snake_case")]
pub enum Space {
    Torus(usize),
    Cube(usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Torus(d) | Space::Cube(d) => d,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Space::Torus(_))
    }

    /// Builds a point, normalizing every coordinate into the space.
    pub fn point(&self, coords: Vec<f64>) -> SpacePoint {
        let mut p = SpacePoint { coords };
        self.normalize(&mut p);
        p
    }

    pub fn normalize(&self, p: &mut SpacePoint) {
        match self {
            Space::Torus(_) => p.coords.iter_mut().for_each(|c| *c = wrap_unit(*c)),
            Space::Cube(_) => p.coords.iter_mut().for_each(|c| *c = c.clamp(0.0, 1.0)),
        }
    }

    pub fn check(&self, p: &SpacePoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        Ok(())
    }

    pub fn dist(&self, p: &SpacePoint, q: &SpacePoint) -> f64 {
        debug_assert_eq!(p.dim(), q.dim());
        p.coords
            .iter()
            .zip(&q.coords)
            .map(|(a, b)| {
                let d = self.axis_delta(*a, *b);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Shortest displacement `v` with `p + v == q` in the space. On the torus
    /// each component lies in `[-0.5, 0.5]`; ties are broken toward `+0.5`.
    pub fn displacement(&self, p: &SpacePoint, q: &SpacePoint) -> Vec<f64> {
        p.coords.iter().zip(&q.coords).map(|(a, b)| self.axis_delta(*a, *b)).collect()
    }

    /// Moves `p` by `v` and normalizes.
    pub fn translate(&self, p: &SpacePoint, v: &[f64]) -> SpacePoint {
        debug_assert_eq!(p.dim(), v.len());
        self.point(p.coords.iter().zip(v).map(|(a, b)| a + b).collect())
    }

    pub fn diameter(&self) -> f64 {
        let d = self.dim() as f64;
        match self {
            Space::Torus(_) => d.sqrt() / 2.0,
            Space::Cube(_) => d.sqrt(),
        }
    }

    /// Distance from `p` to the boundary of the space (infinite on the torus).
    pub fn boundary_distance(&self, p: &SpacePoint) -> f64 {
        match self {
            Space::Torus(_) => f64::INFINITY,
            Space::Cube(_) => p.coords.iter().map(|c| c.min(1.0 - c)).fold(f64::INFINITY, f64::min),
        }
    }

    fn axis_delta(&self, a: f64, b: f64) -> f64 {
        match self {
            Space::Torus(_) => {
                let d = b - a;
                let d = d - d.round();
                // keep the range (-0.5, 0.5]
                if d <= -0.5 { d + 1.0 } else { d }
            }
            Space::Cube(_) => b - a,
        }
    }
}

/// Reduces `x` into `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 { 0.0 } else { r }
}

/// A point of `T^d` or `[0,1]^d`, stored with normalized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpacePoint {
    coords: Vec<f64>,
}

impl SpacePoint {
    /// Torus point; coordinates are reduced mod 1.
    pub fn new(coords: Vec<f64>) -> Self {
        Space::Torus(coords.len()).point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl From<&[f64]> for SpacePoint {
    fn from(c: &[f64]) -> Self {
        SpacePoint::new(c.to_vec())
    }
}

/// Flat torus distance: `sqrt(sum_i min(|d_i|, 1 - |d_i|)^2)`.
pub fn dist(p: &SpacePoint, q: &SpacePoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    Ok(Space::Torus(p.dim()).dist(p, q))
}

/// Shortest torus displacement from `p` to `q`.
///
/// Fails when some axis difference is exactly one half, since the shortest
/// path is then not unique.
pub fn geodesic_displacement(p: &SpacePoint, q: &SpacePoint) -> Result<Vec<f64>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    let v = Space::Torus(p.dim()).displacement(p, q);
    if let Some(axis) = v.iter().position(|c| (c.abs() - 0.5).abs() < 1e-15) {
        return Err(Error::Antipodal { axis });
    }
    Ok(v)
}

/// Regular grid used as a finite stand-in for the whole space.
///
/// Torus grids hold `n^d` points `i/n`; cube grids hold `(n+1)^d` points so
/// both faces are included. Doubling the resolution nests the grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricGrid {
    pub space: Space,
    pub resolution: usize,
}

impl MetricGrid {
    pub fn new(space: Space, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidParameter("grid resolution must be positive".into()));
        }
        Ok(Self { space, resolution })
    }

    /// Default resolution per dimension: 4096 (d=1), 256 (d=2), 24 (d=4).
    pub fn default_for(space: Space) -> Self {
        let resolution = match space.dim() {
            1 => 4096,
            2 => 256,
            3 => 64,
            _ => 24,
        };
        Self { space, resolution }
    }

    fn per_axis(&self) -> usize {
        match self.space {
            Space::Torus(_) => self.resolution,
            Space::Cube(_) => self.resolution + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.per_axis().pow(self.space.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut index: usize) -> SpacePoint {
        let n = self.per_axis();
        let coords = (0..self.space.dim())
            .map(|_| {
                let i = index % n;
                index /= n;
                i as f64 / self.resolution as f64
            })
            .collect();
        self.space.point(coords)
    }

    pub fn points(&self) -> impl Iterator<Item = SpacePoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Covering radius of the grid, `sqrt(d) / (2n)`.
    pub fn net_radius(&self) -> f64 {
        (self.space.dim() as f64).sqrt() / (2.0 * self.resolution as f64)
    }
}
