//! Map distances `ρ₀`, `ρ₁` and the IFS distances built on them.
//!
//! Every supremum is taken over a [`MetricGrid`], so the values are lower
//! estimates of the true suprema.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::maps::{spectral_norm, SmoothMap};
use crate::space::MetricGrid;

/// How member maps of two families are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingMode {
    /// Every map of one family against every map of the other.
    AllPairs,
    /// Maps with equal index only.
    Matched,
}

impl FromStr for PairingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-pairs" | "all" => Ok(PairingMode::AllPairs),
            "matched" => Ok(PairingMode::Matched),
            _ => Err(Error::InvalidParameter(format!("unknown pairing mode `{s}`"))),
        }
    }
}

fn check_pair(f: &dyn SmoothMap, g: &dyn SmoothMap, grid: &MetricGrid) -> Result<()> {
    if f.space() != g.space() || f.space() != grid.space {
        return Err(Error::InvalidParameter(format!(
            "`{}`, `{}` and the grid live on different spaces",
            f.label(),
            g.label()
        )));
    }
    for m in [f, g] {
        if !m.is_invertible() {
            return Err(Error::NotInvertible { label: m.label() });
        }
    }
    Ok(())
}

/// Largest inverse discrepancy at one point. Points outside the image of a
/// map that is not onto (the cube contractions) are skipped.
fn inverse_gap(f: &dyn SmoothMap, g: &dyn SmoothMap, x: &crate::space::SpacePoint) -> Result<f64> {
    match (f.invert(x), g.invert(x)) {
        (Ok(a), Ok(b)) => Ok(f.space().dist(&a, &b)),
        (Err(Error::OutsideImage { .. }), _) | (_, Err(Error::OutsideImage { .. })) => Ok(0.0),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// `ρ₀(f, g) = max_x max(r(f x, g x), r(f⁻¹ x, g⁻¹ x))` over the grid.
pub fn rho0(f: &dyn SmoothMap, g: &dyn SmoothMap, grid: &MetricGrid) -> Result<f64> {
    check_pair(f, g, grid)?;
    let space = grid.space;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let forward = space.dist(&f.eval(&x), &g.eval(&x));
            Ok(forward.max(inverse_gap(f, g, &x)?))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `ρ₁(f, g) = ρ₀(f, g) + max_x ‖Df(x) − Dg(x)‖` with the spectral norm.
pub fn rho1(f: &dyn SmoothMap, g: &dyn SmoothMap, grid: &MetricGrid) -> Result<f64> {
    for m in [f, g] {
        if !m.has_jacobian() {
            return Err(Error::MissingJacobian { label: m.label() });
        }
    }
    let zero_order = rho0(f, g, grid)?;
    let first_order = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let jf = f.jacobian(&x).ok_or_else(|| Error::MissingJacobian { label: f.label() })?;
            let jg = g.jacobian(&x).ok_or_else(|| Error::MissingJacobian { label: g.label() })?;
            Ok::<f64, Error>(spectral_norm(&(jf - jg)))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(zero_order + first_order)
}

fn pairs(f: &Ifs, g: &Ifs, mode: PairingMode) -> Result<Vec<(usize, usize)>> {
    match mode {
        PairingMode::AllPairs => Ok((0..f.len()).flat_map(|i| (0..g.len()).map(move |j| (i, j))).collect()),
        PairingMode::Matched => {
            if f.len() != g.len() {
                return Err(Error::InvalidParameter(format!(
                    "matched pairing needs equal index sets, got {} and {}",
                    f.len(),
                    g.len()
                )));
            }
            Ok((0..f.len()).map(|i| (i, i)).collect())
        }
    }
}

/// Largest map distance over the given index pairs `(i in f, j in g)`.
pub fn family_distance<D>(f: &Ifs, g: &Ifs, pairs: &[(usize, usize)], grid: &MetricGrid, metric: D) -> Result<f64>
where
    D: Fn(&dyn SmoothMap, &dyn SmoothMap, &MetricGrid) -> Result<f64>,
{
    pairs.iter().try_fold(0.0f64, |acc, &(i, j)| Ok(acc.max(metric(f.map(i).as_ref(), g.map(j).as_ref(), grid)?)))
}

/// `D₀(F, G)`: zero for identical families, otherwise the largest `ρ₀` over
/// the pairs selected by `mode`.
pub fn dist_d0(f: &Ifs, g: &Ifs, grid: &MetricGrid, mode: PairingMode) -> Result<f64> {
    let p = pairs(f, g, mode)?;
    if f.same_as(g) {
        return Ok(0.0);
    }
    family_distance(f, g, &p, grid, rho0)
}

/// `D₁(F, G)`, as [`dist_d0`] with `ρ₁`.
pub fn dist_d1(f: &Ifs, g: &Ifs, grid: &MetricGrid, mode: PairingMode) -> Result<f64> {
    let p = pairs(f, g, mode)?;
    if f.same_as(g) {
        return Ok(0.0);
    }
    family_distance(f, g, &p, grid, rho1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{AffineMap, BumpDiffeo, MapRef};
    use crate::space::{Space, SpacePoint};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn rot(a: f64) -> MapRef {
        Arc::new(AffineMap::rotation(vec![a]).unwrap())
    }

    fn circle(n: usize) -> MetricGrid {
        MetricGrid::new(Space::Torus(1), n).unwrap()
    }

    #[test]
    fn rotation_gaps() {
        let g = circle(1000);
        assert_eq!(rho0(rot(0.1).as_ref(), rot(0.1).as_ref(), &g).unwrap(), 0.0);
        assert_abs_diff_eq!(rho0(rot(0.1).as_ref(), rot(0.12).as_ref(), &g).unwrap(), 0.02, epsilon = 1e-12);
        assert_abs_diff_eq!(rho1(rot(0.1).as_ref(), rot(0.12).as_ref(), &g).unwrap(), 0.02, epsilon = 1e-12);
    }

    #[test]
    fn family_distances() {
        let g = circle(1000);
        let f = Ifs::new(vec![rot(0.1), rot(0.3)]).unwrap();
        let h = Ifs::new(vec![rot(0.11), rot(0.31)]).unwrap();
        assert_eq!(dist_d0(&f, &f, &g, PairingMode::AllPairs).unwrap(), 0.0);
        assert_eq!(dist_d1(&f, &f, &g, PairingMode::Matched).unwrap(), 0.0);
        assert_abs_diff_eq!(dist_d0(&f, &h, &g, PairingMode::Matched).unwrap(), 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_d0(&f, &h, &g, PairingMode::AllPairs).unwrap(), 0.21, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_d1(&f, &h, &g, PairingMode::Matched).unwrap(), 0.01, epsilon = 1e-12);
        let single_f = Ifs::new(vec![rot(0.1)]).unwrap();
        let single_h = Ifs::new(vec![rot(0.13)]).unwrap();
        let a = dist_d0(&single_f, &single_h, &g, PairingMode::AllPairs).unwrap();
        let b = dist_d0(&single_f, &single_h, &g, PairingMode::Matched).unwrap();
        assert_eq!(a, b);
        assert!(dist_d0(&f, &single_h, &g, PairingMode::Matched).is_err());
    }

    #[test]
    fn bump_distance_from_identity() {
        let space = Space::Torus(2);
        let p = SpacePoint::new(vec![0.3, 0.3]);
        let q = SpacePoint::new(vec![0.31, 0.3]);
        let bump = BumpDiffeo::move_points(space, &[(p, q)], 0.02).unwrap();
        let id = AffineMap::identity(space);
        let grid = MetricGrid::new(space, 128).unwrap();
        let r = rho0(&bump, &id, &grid).unwrap();
        assert!(r > 0.0099 && r < 0.02, "{r}");
    }

    #[test]
    fn symmetric_and_refinement_monotone() {
        let space = Space::Torus(2);
        let cat = AffineMap::cat();
        let shifted = crate::maps::Composite::new(
            Arc::new(AffineMap::rotation(vec![0.01, 0.003]).unwrap()),
            Arc::new(AffineMap::cat()),
        )
        .unwrap();
        let mut last = 0.0;
        for n in [8, 16, 32, 64] {
            let grid = MetricGrid::new(space, n).unwrap();
            let ab = rho0(&cat, &shifted, &grid).unwrap();
            assert_eq!(ab, rho0(&shifted, &cat, &grid).unwrap());
            assert!(ab >= last);
            last = ab;
        }
    }

    #[test]
    fn missing_inverse_or_jacobian() {
        let m = crate::maps::PolyMap::new(Space::Torus(1), vec![vec![]], false).unwrap();
        assert!(matches!(rho0(&m, rot(0.1).as_ref(), &circle(10)), Err(Error::NotInvertible { .. })));
    }
}
