use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{sample_ball, seeded_rng};
use crate::error::{Error, Result};
use crate::maps::{eval_map, invert_map, SmoothMap};
use crate::space::{Space, SpacePoint};

/// Violations kept per center in a [`CoverReport`].
pub const MAX_VIOLATIONS_PER_CENTER: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverViolation {
    pub x: SpacePoint,
    pub z: SpacePoint,
    /// `dist(F⁻¹(z), x)`, which is at least `ε`.
    pub preimage_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterVerdict {
    pub x: SpacePoint,
    pub violations: usize,
    /// Largest `dist(F⁻¹(z), x)` over the probes.
    pub max_preimage_dist: f64,
}

/// Outcome of testing `B(F(X), ε+δ) ⊆ F(B(X, ε))` at sampled centers `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub n_probes: usize,
    pub pass: bool,
    pub violating_centers: usize,
    pub centers: Vec<CenterVerdict>,
    pub violations: Vec<CoverViolation>,
}

/// Uniform centers in the space, reproducible from `seed`.
pub fn cover_centers(space: Space, n: usize, seed: u64) -> Vec<SpacePoint> {
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| space.point((0..space.dim()).map(|_| rng.random::<f64>()).collect())).collect()
}

fn probe_center(
    map: &dyn SmoothMap,
    x: &SpacePoint,
    offsets: impl Iterator<Item = Vec<f64>>,
    epsilon: f64,
) -> Result<(CenterVerdict, Vec<CoverViolation>)> {
    let space = map.space();
    let fx = eval_map(map, x)?;
    let mut verdict = CenterVerdict { x: x.clone(), violations: 0, max_preimage_dist: 0.0 };
    let mut kept = Vec::new();
    for v in offsets {
        let z = space.translate(&fx, &v);
        let d = match invert_map(map, &z) {
            Ok(w) => space.dist(&w, x),
            Err(Error::OutsideImage { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        verdict.max_preimage_dist = verdict.max_preimage_dist.max(d);
        if d >= epsilon {
            verdict.violations += 1;
            if kept.len() < MAX_VIOLATIONS_PER_CENTER {
                kept.push(CoverViolation { x: x.clone(), z, preimage_dist: d });
            }
        }
    }
    Ok((verdict, kept))
}

fn assemble(
    epsilon: f64,
    delta: f64,
    seed: u64,
    n_probes: usize,
    results: Vec<(CenterVerdict, Vec<CoverViolation>)>,
) -> CoverReport {
    let violating_centers = results.iter().filter(|(c, _)| c.violations > 0).count();
    let (centers, violations): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    CoverReport {
        epsilon,
        delta,
        seed,
        n_probes,
        pass: violating_centers == 0,
        violating_centers,
        centers,
        violations: violations.into_iter().flatten().collect(),
    }
}

/// Samples `n_centers` points `X` and `n_probes` points `Z` uniform in
/// `B(F(X), ε+δ)` per center, and flags every `Z` with `dist(F⁻¹(Z), X) >= ε`.
pub fn check_ball_cover(
    map: &dyn SmoothMap,
    epsilon: f64,
    delta: f64,
    n_centers: usize,
    n_probes: usize,
    seed: u64,
) -> Result<CoverReport> {
    if !(epsilon > 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("need ε > 0 and δ >= 0, got ε={epsilon}, δ={delta}")));
    }
    if !map.is_invertible() {
        return Err(Error::NotInvertible { label: map.label() });
    }
    let space = map.space();
    let d = space.dim();
    let radius = epsilon + delta;
    let centers = cover_centers(space, n_centers, seed);
    let results = centers
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = seeded_rng(seed);
            rng.set_stream(i as u64 + 1);
            let offsets = (0..n_probes).map(move |_| sample_ball(&mut rng, d, radius));
            probe_center(map, x, offsets, epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(epsilon, delta, seed, n_probes, results))
}

/// Deterministic counterpart of [`check_ball_cover`]: probes every point of
/// a regular grid with `per_axis` nodes per axis over `[-(ε+δ), ε+δ]^d`
/// that lies in the open ball.
pub fn dense_cover_oracle(
    map: &dyn SmoothMap,
    epsilon: f64,
    delta: f64,
    centers: &[SpacePoint],
    per_axis: usize,
) -> Result<CoverReport> {
    if per_axis < 2 {
        return Err(Error::InvalidParameter("the dense grid needs at least 2 nodes per axis".into()));
    }
    let d = map.space().dim();
    let radius = epsilon + delta;
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let total = per_axis.pow(d as u32);
    let offsets: Vec<Vec<f64>> = (0..total)
        .map(|mut i| {
            (0..d)
                .map(|_| {
                    let c = i % per_axis;
                    i /= per_axis;
                    -radius + step * c as f64
                })
                .collect::<Vec<f64>>()
        })
        .filter(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt() < radius)
        .collect();
    let n_probes = offsets.len();
    let results = centers
        .par_iter()
        .map(|x| probe_center(map, x, offsets.iter().cloned(), epsilon))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(epsilon, delta, 0, n_probes, results))
}
