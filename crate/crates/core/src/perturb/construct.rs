use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{link_residuals, sample_ball, seeded_rng, ChainKind, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::{Ifs, SymbolSequence};
use crate::maps::{fd_jacobian, spectral_norm, BumpDiffeo, Composite, MapRef, SmoothMap};
use crate::metrics::rho0;
use crate::space::{MetricGrid, Space, SpacePoint};

/// Bump diffeomorphism sending each `p_i` to `q_i`, with `dist(p_i, q_i) < delta`.
pub fn move_points_diffeo(space: Space, pairs: &[(SpacePoint, SpacePoint)], delta: f64) -> Result<BumpDiffeo> {
    BumpDiffeo::move_points(space, pairs, delta)
}

/// Measured properties of a point-moving diffeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpAudit {
    /// `max_i dist(f(p_i), q_i)`.
    pub interpolation_error: f64,
    /// `ρ₀(f, id)` on the grid.
    pub rho0_to_identity: f64,
    /// Largest `dist(f⁻¹(f(x)), x)` over the grid.
    pub round_trip: f64,
}

pub fn audit_bump(bump: &BumpDiffeo, pairs: &[(SpacePoint, SpacePoint)], grid: &MetricGrid) -> Result<BumpAudit> {
    let space = bump.space();
    let interpolation_error = pairs.iter().map(|(p, q)| space.dist(&bump.eval(p), q)).fold(0.0, f64::max);
    let id = crate::maps::AffineMap::identity(space);
    let rho0_to_identity = rho0(bump, &id, grid)?;
    let round_trip = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            Ok::<f64, Error>(space.dist(&bump.invert(&bump.eval(&x))?, &x))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(BumpAudit { interpolation_error, rho0_to_identity, round_trip })
}

fn local_lipschitz(map: &dyn SmoothMap, p: &SpacePoint) -> f64 {
    let j = map.jacobian(p).unwrap_or_else(|| fd_jacobian(map, p, 1e-6));
    spectral_norm(&j)
}

/// `count` random pairs: centers at least `min_sep` apart, each moved by a
/// uniform vector from the ball of radius `max_move`.
pub fn random_pairs(
    space: Space,
    count: usize,
    min_sep: f64,
    max_move: f64,
    seed: u64,
) -> Result<Vec<(SpacePoint, SpacePoint)>> {
    let mut rng = seeded_rng(seed);
    let d = space.dim();
    let mut centers: Vec<SpacePoint> = Vec::with_capacity(count);
    let mut attempts = 0;
    while centers.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidParameter(format!("cannot place {count} centers {min_sep} apart")));
        }
        let p = space.point((0..d).map(|_| rng.random::<f64>()).collect());
        if centers.iter().all(|c| space.dist(c, &p) >= min_sep) {
            centers.push(p);
        }
    }
    Ok(centers
        .into_iter()
        .map(|p| {
            let v = sample_ball(&mut rng, d, max_move);
            let q = space.translate(&p, &v);
            (p, q)
        })
        .collect())
}

/// Points `y_0, …, y_m` near a δ-chain, pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedPoints {
    pub points: Vec<SpacePoint>,
    /// Slack `δ` of the input window.
    pub delta: f64,
    /// `max_k dist(x_k, y_k)`.
    pub max_dist: f64,
    /// `max_k dist(y_{k+1}, f_{σ(k)}(y_k))`.
    pub max_link: f64,
    /// Smallest `dist(y_i, y_j)`, `i != j`.
    pub min_separation: f64,
}

impl AdjustedPoints {
    /// The three measured conditions: `dist(x_k, y_k) < η`, links below `3δ`
    /// (or exact to 1e-12 when `δ = 0`), and distinct points.
    pub fn holds(&self, eta: f64) -> bool {
        let link_ok = if self.delta > 0.0 { self.max_link < 3.0 * self.delta } else { self.max_link <= 1e-12 };
        self.max_dist < eta && link_ok && self.min_separation > 0.0
    }
}

/// Picks `y_k = x_k`, moving a point only when it coincides with an earlier
/// one. A moved point travels less than `min(η, δ, δ / Lip)/2`, which keeps
/// both adjacent links below `3δ`.
pub fn adjusted_points(ifs: &Ifs, xi: &ChainRecord, m: usize, eta: f64) -> Result<AdjustedPoints> {
    if m >= xi.len() {
        return Err(Error::InvalidParameter(format!("m = {m} outside a window of {} points", xi.len())));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be positive")));
    }
    let space = ifs.space();
    let window = ChainRecord { points: xi.points[..=m].to_vec(), ..xi.clone() };
    let delta = link_residuals(ifs, &window)?.into_iter().fold(0.0, f64::max);
    let d = space.dim();
    let mut ys: Vec<SpacePoint> = Vec::with_capacity(m + 1);
    for (i, x) in window.points.iter().enumerate() {
        let clash = |p: &SpacePoint, ys: &[SpacePoint]| ys.iter().any(|y| space.dist(y, p) == 0.0);
        if !clash(x, &ys) {
            ys.push(x.clone());
            continue;
        }
        let lip = if i < m { local_lipschitz(ifs.map(xi.sigma.lookup(xi.start + i as i64)).as_ref(), x) } else { 0.0 };
        let mut step = eta.min(delta).min(if lip > 0.0 { delta / (2.0 * lip) } else { f64::INFINITY }) / 2.0;
        let mut chosen = None;
        'search: while step > 1e-15 {
            for axis in 0..d {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; d];
                    v[axis] = sign * step;
                    let y = space.translate(x, &v);
                    if !clash(&y, &ys) && space.dist(&y, x) > 0.0 {
                        chosen = Some(y);
                        break 'search;
                    }
                }
            }
            step /= 2.0;
        }
        ys.push(chosen.ok_or(Error::Collapse(eta))?);
    }
    let adjusted = ChainRecord { points: ys.clone(), ..window.clone() };
    let max_link = link_residuals(ifs, &adjusted)?.into_iter().fold(0.0, f64::max);
    let max_dist = window.points.iter().zip(&ys).map(|(a, b)| space.dist(a, b)).fold(0.0, f64::max);
    let mut min_separation = f64::INFINITY;
    for (i, a) in ys.iter().enumerate() {
        for b in &ys[i + 1..] {
            min_separation = min_separation.min(space.dist(a, b));
        }
    }
    let out = AdjustedPoints { points: ys, delta, max_dist, max_link, min_separation };
    if !out.holds(eta) {
        return Err(Error::Collapse(eta));
    }
    Ok(out)
}

/// `max_λ sup_x ‖Df_λ(x)⁻¹‖` over the grid, a Lipschitz constant of the inverses.
pub fn inverse_lipschitz(ifs: &Ifs, grid: &MetricGrid) -> Result<f64> {
    let mut best = 0.0f64;
    for m in ifs.maps() {
        if !m.has_jacobian() {
            return Err(Error::MissingJacobian { label: m.label() });
        }
        let l = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let j = m.jacobian(&grid.point(i)).expect("checked above");
                j.try_inverse().map_or(f64::INFINITY, |inv| spectral_norm(&inv))
            })
            .reduce(|| 0.0, f64::max);
        best = best.max(l);
    }
    Ok(best)
}

/// Largest chain slack `δ(Δ) = min(Δ/2, Δ/L)/6` accepted by [`perturbed_ifs`],
/// with `L` from [`inverse_lipschitz`].
pub fn admissible_delta(ifs: &Ifs, big_delta: f64, grid: &MetricGrid) -> Result<f64> {
    let l = inverse_lipschitz(ifs, grid)?;
    Ok((big_delta / 2.0).min(big_delta / l) / 6.0)
}

/// A perturbation `G = {H ∘ f_λ}` of an IFS carrying an exact chain through
/// adjusted points of a δ-chain.
#[derive(Debug, Clone)]
pub struct PerturbedIfs {
    pub ifs: Ifs,
    /// The diffeomorphism `H` composed after every map.
    pub bump: Arc<BumpDiffeo>,
    pub adjusted: AdjustedPoints,
    /// Exact chain of `ifs` through `adjusted.points` at indices `0..=m`.
    pub chain: ChainRecord,
    pub admissible_delta: f64,
    /// Matched `D₀(F, G)` on the grid.
    pub d0_matched: f64,
    /// `max_{k <= m} dist(x_k, y_k)`.
    pub max_dist: f64,
}

/// Builds `G` with `D₀(F, G) < Δ` (matched) and an exact chain of `G`
/// through points within `Δ` of `xi` at indices `0..=m`.
///
/// One bump diffeomorphism `H` moves every `f_{σ(k)}(y_k)` to `y_{k+1}`, so
/// `G` keeps the index set and the symbol sequence of `F`. The chain is then
/// continued `forward` steps past `m` by `G` and `backward` steps before 0 by
/// the inverses of `G`.
#[allow(clippy::too_many_arguments)]
pub fn perturbed_ifs(
    ifs: &Ifs,
    xi: &ChainRecord,
    sigma: &SymbolSequence,
    m: usize,
    big_delta: f64,
    grid: &MetricGrid,
    forward: usize,
    backward: usize,
) -> Result<PerturbedIfs> {
    let space = ifs.space();
    if space.dim() < 2 {
        return Err(Error::InvalidParameter("perturbed IFSs need dim >= 2".into()));
    }
    if !(big_delta > 0.0) {
        return Err(Error::InvalidParameter(format!("Delta = {big_delta} must be positive")));
    }
    if xi.start != 0 {
        return Err(Error::InvalidChain("the chain window must start at index 0".into()));
    }
    let xi = ChainRecord { sigma: sigma.clone(), ..xi.clone() };
    let allowed = admissible_delta(ifs, big_delta, grid)?;
    let window = ChainRecord { points: xi.points[..=m.min(xi.len() - 1)].to_vec(), ..xi.clone() };
    let measured = link_residuals(ifs, &window)?.into_iter().fold(0.0, f64::max);
    if measured > allowed {
        return Err(Error::ChainTooCoarse { measured, admissible: allowed });
    }
    let adjusted = adjusted_points(ifs, &xi, m, big_delta / 2.0)?;
    let ys = &adjusted.points;
    let pairs: Vec<(SpacePoint, SpacePoint)> = (0..m)
        .map(|k| (ifs.map(sigma.lookup(k as i64)).eval(&ys[k]), ys[k + 1].clone()))
        .collect();
    let bump = Arc::new(if pairs.is_empty() {
        BumpDiffeo::identity(space)
    } else {
        BumpDiffeo::move_points(space, &pairs, 3.0 * allowed)
            .map_err(|e| Error::InfeasibleBump(format!("moving the chain links: {e}")))?
    });
    let h: MapRef = bump.clone();
    let maps: Vec<MapRef> =
        ifs.maps().iter().map(|f| Ok(Arc::new(Composite::new(h.clone(), f.clone())?) as MapRef)).collect::<Result<_>>()?;
    let g = Ifs::new(maps)?;
    let mut d0 = 0.0f64;
    for (i, (f, gi)) in ifs.maps().iter().zip(g.maps()).enumerate() {
        let r = rho0(f.as_ref(), gi.as_ref(), grid)?;
        if r >= big_delta {
            return Err(Error::PerturbationTooLarge { index: i, distance: r, bound: big_delta });
        }
        d0 = d0.max(r);
    }
    let mut points = ys.clone();
    for k in m..m + forward {
        let next = g.map(sigma.lookup(k as i64)).eval(&points[k]);
        points.push(next);
    }
    let mut before = Vec::with_capacity(backward);
    let mut y = ys[0].clone();
    for k in 1..=backward as i64 {
        y = crate::maps::invert_map(g.map(sigma.lookup(-k)).as_ref(), &y)?;
        before.push(y.clone());
    }
    before.reverse();
    before.extend(points);
    let chain = ChainRecord::new(-(backward as i64), before, sigma.clone(), 0.0, ChainKind::ExactChain)?;
    let max_dist = adjusted.max_dist;
    Ok(PerturbedIfs { ifs: g, bump, adjusted, chain, admissible_delta: allowed, d0_matched: d0, max_dist })
}
