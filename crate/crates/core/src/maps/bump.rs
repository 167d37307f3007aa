use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::SmoothMap;
use crate::error::{Error, Result};
use crate::space::{Space, SpacePoint};

/// Smooth compactly supported radial profile `exp(1 - 1/(1 - t^2))` on `[0, 1)`.
pub fn bump_profile(t: f64) -> f64 {
    let t = t.abs();
    if t >= 1.0 {
        return 0.0;
    }
    (1.0 - 1.0 / (1.0 - t * t)).exp()
}

pub fn bump_profile_slope(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t * t;
    -2.0 * t / (s * s) * bump_profile(t)
}

/// `max |profile'|` over `[0, 1]`, about 2.17.
pub fn max_profile_slope() -> f64 {
    static SLOPE: OnceLock<f64> = OnceLock::new();
    *SLOPE.get_or_init(|| {
        let n = 200_000;
        let coarse = (0..n)
            .map(|i| i as f64 / n as f64)
            .max_by(|a, b| bump_profile_slope(*a).abs().total_cmp(&bump_profile_slope(*b).abs()))
            .unwrap();
        // refine around the coarse argmax with a golden-section search
        let (mut lo, mut hi) = ((coarse - 1.0 / n as f64).max(0.0), (coarse + 1.0 / n as f64).min(1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if bump_profile_slope(a).abs() > bump_profile_slope(b).abs() {
                hi = b;
            } else {
                lo = a;
            }
        }
        bump_profile_slope(0.5 * (lo + hi)).abs()
    })
}

/// Largest support radius allowed on the torus, keeping each ball well inside
/// a fundamental domain.
const TORUS_RADIUS_CAP: f64 = 0.25;
/// Fraction of the minimal pairwise distance used as support radius.
const SUPPORT_FRACTION: f64 = 0.4;

/// Identity plus radial bumps: `x -> x + sum_i phi(|x - p_i| / r) d_i`.
///
/// Supports are disjoint balls, so `p_i` is sent exactly to `p_i + d_i`.
#[derive(Debug, Clone)]
pub struct BumpDiffeo {
    space: Space,
    centers: Vec<SpacePoint>,
    displacements: Vec<Vec<f64>>,
    support_radius: f64,
}

impl BumpDiffeo {
    /// Diffeomorphism moving each `p_i` to `q_i`, with `dist(p_i, q_i) < delta`.
    pub fn move_points(space: Space, pairs: &[(SpacePoint, SpacePoint)], delta: f64) -> Result<Self> {
        if space.dim() < 2 {
            return Err(Error::InvalidParameter("point-moving diffeomorphisms need dim >= 2".into()));
        }
        for (p, q) in pairs {
            space.check(p)?;
            space.check(q)?;
            let d = space.dist(p, q);
            if d >= delta {
                return Err(Error::InvalidParameter(format!("pair is {d} apart, not below delta = {delta}")));
            }
        }
        let centers: Vec<SpacePoint> = pairs.iter().map(|(p, _)| p.clone()).collect();
        let images: Vec<SpacePoint> = pairs.iter().map(|(_, q)| q.clone()).collect();
        let min_center = min_pairwise(space, &centers);
        let min_image = min_pairwise(space, &images);
        if min_center == 0.0 || min_image == 0.0 {
            return Err(Error::InvalidParameter("centers and images must be pairwise distinct".into()));
        }
        let mut radius = SUPPORT_FRACTION * min_center.min(min_image);
        radius = radius.min(match space {
            Space::Torus(_) => TORUS_RADIUS_CAP,
            Space::Cube(_) => {
                let edge = centers.iter().map(|p| space.boundary_distance(p)).fold(0.5, f64::min);
                edge * (1.0 - 1e-9)
            }
        });
        let displacements = pairs.iter().map(|(p, q)| space.displacement(p, q)).collect();
        Self::with_radius(space, centers, displacements, radius)
    }

    /// Builds a bump family with an explicit support radius.
    pub fn with_radius(
        space: Space,
        centers: Vec<SpacePoint>,
        displacements: Vec<Vec<f64>>,
        support_radius: f64,
    ) -> Result<Self> {
        if centers.len() != displacements.len() {
            return Err(Error::InvalidParameter("one displacement per center".into()));
        }
        if !(support_radius > 0.0) {
            return Err(Error::InfeasibleBump(format!(
                "support radius {support_radius} is not positive; move the centers off the boundary"
            )));
        }
        if space.is_torus() && support_radius >= 0.5 {
            return Err(Error::InfeasibleBump("support radius must stay below 0.5 on the torus".into()));
        }
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                if space.dist(a, b) < 2.0 * support_radius {
                    return Err(Error::InfeasibleBump(format!(
                        "supports of radius {support_radius} overlap; use a smaller radius"
                    )));
                }
            }
        }
        let largest = displacements
            .iter()
            .map(|d| d.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let stretch = largest * max_profile_slope() / support_radius;
        if stretch >= 1.0 {
            return Err(Error::InfeasibleBump(format!(
                "displacement {largest:e} is too large for support radius {support_radius:e} \
                 (perturbation Lipschitz constant {stretch:.3} >= 1)"
            )));
        }
        Ok(Self { space, centers, displacements, support_radius })
    }

    pub fn identity(space: Space) -> Self {
        Self { space, centers: Vec::new(), displacements: Vec::new(), support_radius: TORUS_RADIUS_CAP }
    }

    pub fn centers(&self) -> &[SpacePoint] {
        &self.centers
    }

    pub fn displacements(&self) -> &[Vec<f64>] {
        &self.displacements
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Lipschitz constant of `x -> f(x) - x`.
    pub fn perturbation_lipschitz(&self) -> f64 {
        let largest = self
            .displacements
            .iter()
            .map(|d| d.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        largest * max_profile_slope() / self.support_radius
    }

    fn shift(&self, p: &SpacePoint) -> Vec<f64> {
        let mut v = vec![0.0; self.space.dim()];
        for (c, d) in self.centers.iter().zip(&self.displacements) {
            let w = bump_profile(self.space.dist(p, c) / self.support_radius);
            if w > 0.0 {
                v.iter_mut().zip(d).for_each(|(a, b)| *a += w * b);
            }
        }
        v
    }
}

fn min_pairwise(space: Space, pts: &[SpacePoint]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            m = m.min(space.dist(a, b));
        }
    }
    m
}

impl SmoothMap for BumpDiffeo {
    fn label(&self) -> String {
        format!(
            "bump[r={:e}]{:?}->{:?}",
            self.support_radius,
            self.centers.iter().map(|c| c.coords()).collect::<Vec<_>>(),
            self.displacements
        )
    }

    fn space(&self) -> Space {
        self.space
    }

    fn eval(&self, p: &SpacePoint) -> SpacePoint {
        self.space.translate(p, &self.shift(p))
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, p: &SpacePoint) -> Option<DMatrix<f64>> {
        let n = self.space.dim();
        let mut j = DMatrix::identity(n, n);
        for (c, d) in self.centers.iter().zip(&self.displacements) {
            let offset = self.space.displacement(c, p);
            let r = offset.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r == 0.0 || r >= self.support_radius {
                continue;
            }
            let scale = bump_profile_slope(r / self.support_radius) / (self.support_radius * r);
            for a in 0..n {
                for b in 0..n {
                    j[(a, b)] += d[a] * scale * offset[b];
                }
            }
        }
        Some(j)
    }

    fn inverse_guess(&self, p: &SpacePoint) -> SpacePoint {
        let v: Vec<f64> = self.shift(p).iter().map(|c| -c).collect();
        self.space.translate(p, &v)
    }
}
