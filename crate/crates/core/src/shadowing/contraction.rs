use rayon::prelude::*;

use super::{ShadowResult, Solver};
use crate::chain::{validate_chain, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::maps::{spectral_norm, SmoothMap};
use crate::space::MetricGrid;

/// Points per axis of the grid used to measure Lipschitz constants.
pub const LIPSCHITZ_GRID: usize = 32;

/// Largest stretch of `map` over neighbouring grid points, together with the
/// Jacobian norm at each grid point when the map has one.
pub fn lipschitz_estimate(map: &dyn SmoothMap, grid: &MetricGrid) -> f64 {
    let space = grid.space;
    let h = 1.0 / grid.resolution as f64;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let fx = map.eval(&x);
            let mut best = map.jacobian(&x).map_or(0.0, |j| spectral_norm(&j));
            for axis in 0..space.dim() {
                let mut c = x.coords().to_vec();
                c[axis] += h;
                if !space.is_torus() && c[axis] > 1.0 + 1e-12 {
                    continue;
                }
                let y = space.point(c);
                let step = space.dist(&x, &y);
                if step > 0.0 {
                    best = best.max(space.dist(&fx, &map.eval(&y)) / step);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// `q = max_λ Lip(f_λ)` measured on a [`LIPSCHITZ_GRID`] grid; fails on the
/// first map with `q >= 1`.
pub fn contraction_factor(ifs: &Ifs) -> Result<f64> {
    let grid = MetricGrid::new(ifs.space(), LIPSCHITZ_GRID)?;
    let mut q = 0.0f64;
    for m in ifs.maps() {
        let lip = lipschitz_estimate(m.as_ref(), &grid);
        if lip >= 1.0 {
            return Err(Error::NotContracting { label: m.label(), lipschitz: lip });
        }
        q = q.max(lip);
    }
    Ok(q)
}

/// Exact chain `y_0 = x_0`, `y_{k+1} = f_{σ(k)}(y_k)`, within `δ/(1−q)` of `xi`.
pub fn shadow_contraction(ifs: &Ifs, xi: &ChainRecord) -> Result<ShadowResult> {
    let q = contraction_factor(ifs)?;
    let delta = validate_chain(ifs, xi, 0.0)?.is_delta_chain_for;
    let mut y = xi.points[0].clone();
    let mut points = Vec::with_capacity(xi.len());
    points.push(y.clone());
    for i in 1..xi.len() {
        let k = xi.start + i as i64 - 1;
        y = ifs.map(xi.sigma.lookup(k)).eval(&y);
        points.push(y.clone());
    }
    ShadowResult::assemble(ifs, xi, points, Solver::Contraction, xi.len() - 1, Some(delta / (1.0 - q)))
}
