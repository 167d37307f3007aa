//! Expansiveness constants and separation times relative to a symbol sequence.
//!
//! Everything here is sampled: a verdict of [`DeltaVerdict::ExpansiveAtDelta`]
//! only means no violating pair was found among the sampled pairs.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::seeded_rng;
use crate::error::Result;
use crate::ifs::{Ifs, SymbolSequence};
use crate::space::{MetricGrid, SpacePoint};

/// Default stand-in for `x != y`.
pub const PAIR_TOLERANCE: f64 = 1e-3;
/// Directions tried at every base point.
pub const DIRECTIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "n")]
pub enum Separation {
    /// First index, in the order `0, 1, −1, 2, −2, …`, at which the orbits are
    /// more than `η` apart.
    Separated(i64),
    Saturated,
}

impl Separation {
    pub fn steps(&self) -> Option<usize> {
        match self {
            Separation::Separated(n) => Some(n.unsigned_abs() as usize),
            Separation::Saturated => None,
        }
    }
}

/// Walks the two-sided orbits of a pair and reports the distance at each
/// index `0, 1, −1, 2, −2, …` up to `n_cap`, stopping when `visit` says so.
fn walk_pair<V>(ifs: &Ifs, sigma: &SymbolSequence, x: &SpacePoint, y: &SpacePoint, n_cap: usize, mut visit: V) -> Result<()>
where
    V: FnMut(i64, f64) -> bool,
{
    let space = ifs.space();
    if visit(0, space.dist(x, y)) {
        return Ok(());
    }
    let (mut fx, mut fy) = (x.clone(), y.clone());
    let (mut bx, mut by) = (x.clone(), y.clone());
    for n in 1..=n_cap as i64 {
        let f = ifs.map(sigma.lookup(n - 1));
        fx = f.eval(&fx);
        fy = f.eval(&fy);
        if visit(n, space.dist(&fx, &fy)) {
            return Ok(());
        }
        let b = ifs.map(sigma.lookup(-n));
        bx = b.invert(&bx)?;
        by = b.invert(&by)?;
        if visit(-n, space.dist(&bx, &by)) {
            return Ok(());
        }
    }
    Ok(())
}

/// Smallest `|n| <= n_cap` with `dist(O(n)x, O(n)y) > η`.
pub fn separation_time(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    x: &SpacePoint,
    y: &SpacePoint,
    eta: f64,
    n_cap: usize,
) -> Result<Separation> {
    sigma.check(ifs.len())?;
    let mut found = Separation::Saturated;
    walk_pair(ifs, sigma, x, y, n_cap, |n, d| {
        if d > eta {
            found = Separation::Separated(n);
        }
        d > eta
    })?;
    Ok(found)
}

/// `max_{|n| <= n_cap} dist(O(n)x, O(n)y)`.
pub fn max_separation(ifs: &Ifs, sigma: &SymbolSequence, x: &SpacePoint, y: &SpacePoint, n_cap: usize) -> Result<f64> {
    let mut best = 0.0f64;
    walk_pair(ifs, sigma, x, y, n_cap, |_, d| {
        best = best.max(d);
        false
    })?;
    Ok(best)
}

/// Unit directions used to offset base points: evenly spaced angles in the
/// plane, `±1` on the line, seeded Gaussian directions otherwise.
pub fn directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = seeded_rng(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    v.into_iter().map(|c| c / n).collect()
                })
                .collect()
        }
    }
}

/// Pairs `(x, x + r u)` over grid points `x`, [`directions`] `u` and `radii`.
pub fn sample_pairs(grid: &MetricGrid, radii: &[f64], seed: u64) -> Vec<(SpacePoint, SpacePoint)> {
    let space = grid.space;
    let dirs = directions(space.dim(), DIRECTIONS, seed);
    let mut pairs = Vec::with_capacity(grid.len() * dirs.len() * radii.len());
    for x in grid.points() {
        for u in &dirs {
            for r in radii {
                let v: Vec<f64> = u.iter().map(|c| c * r).collect();
                pairs.push((x.clone(), space.translate(&x, &v)));
            }
        }
    }
    pairs
}

/// `start, 2 start, 4 start, …` up to and including `end`.
fn doubling(start: f64, end: f64) -> Vec<f64> {
    let mut out = vec![start];
    while out.last().unwrap() * 2.0 <= end {
        out.push(out.last().unwrap() * 2.0);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaVerdict {
    /// No sampled pair stayed within `Δ`.
    ExpansiveAtDelta,
    Violated,
    /// No pair was sampled.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub delta: f64,
    pub x: SpacePoint,
    pub y: SpacePoint,
    pub max_sep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansivenessReport {
    pub sigma: String,
    #[serde(rename = "Delta_grid")]
    pub delta_grid: Vec<f64>,
    pub verdicts: Vec<DeltaVerdict>,
    /// Up to [`MAX_REPORTED`] pairs per violated `Δ`, tightest first.
    pub violations: Vec<Violation>,
    /// Largest `Δ` of the grid without a sampled violation.
    pub candidate_delta: Option<f64>,
    pub n_cap: usize,
    pub pair_tolerance: f64,
    pub resolution: usize,
    pub pairs_sampled: usize,
}

pub const MAX_REPORTED: usize = 8;

/// Searches the sampled pairs for ones that never separate beyond each `Δ`.
///
/// Pairs sit at distances `t, 2t, 4t, …` up to the largest `Δ`, with `t`
/// just above `pair_tolerance`; pairs that are already farther apart than `Δ`
/// cannot violate it.
pub fn estimate_expansive_const(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    grid: &MetricGrid,
    pair_tolerance: f64,
    n_cap: usize,
    delta_grid: &[f64],
) -> Result<ExpansivenessReport> {
    sigma.check(ifs.len())?;
    let space = ifs.space();
    let top = delta_grid.iter().copied().fold(0.0, f64::max);
    let radii = doubling(pair_tolerance * (1.0 + 1e-6), top.max(pair_tolerance));
    let pairs: Vec<_> = sample_pairs(grid, &radii, 0)
        .into_iter()
        .filter(|(x, y)| space.dist(x, y) > pair_tolerance)
        .collect();
    let seps: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| max_separation(ifs, sigma, x, y, n_cap))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|a, b| seps[*a].total_cmp(&seps[*b]).then(a.cmp(b)));
    let mut verdicts = Vec::with_capacity(delta_grid.len());
    let mut violations = Vec::new();
    for &delta in delta_grid {
        if pairs.is_empty() {
            verdicts.push(DeltaVerdict::Inconclusive);
            continue;
        }
        let bad: Vec<usize> = order.iter().copied().take_while(|i| seps[*i] <= delta).take(MAX_REPORTED).collect();
        if bad.is_empty() {
            verdicts.push(DeltaVerdict::ExpansiveAtDelta);
        } else {
            verdicts.push(DeltaVerdict::Violated);
            violations.extend(bad.into_iter().map(|i| Violation {
                delta,
                x: pairs[i].0.clone(),
                y: pairs[i].1.clone(),
                max_sep: seps[i],
            }));
        }
    }
    let candidate_delta = delta_grid
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| **v == DeltaVerdict::ExpansiveAtDelta)
        .map(|(d, _)| *d)
        .reduce(f64::max);
    Ok(ExpansivenessReport {
        sigma: sigma.to_string(),
        delta_grid: delta_grid.to_vec(),
        verdicts,
        violations,
        candidate_delta,
        n_cap,
        pair_tolerance,
        resolution: grid.resolution,
        pairs_sampled: pairs.len(),
    })
}

/// Smallest `N <= n_cap` such that every sampled pair at distance `>= μ`
/// separates beyond `η` at some `|n| < N`.
///
/// Pairs sit at distances `μ, 2μ, 4μ, …` below the diameter, so doubling `μ`
/// samples a subset of the pairs. With no such pair the answer is `N = 1`.
#[allow(non_snake_case)]
pub fn estimate_N_of_mu(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    eta: f64,
    mu: f64,
    grid: &MetricGrid,
    n_cap: usize,
) -> Result<Separation> {
    sigma.check(ifs.len())?;
    let space = ifs.space();
    if mu > space.diameter() {
        return Ok(Separation::Separated(1));
    }
    let radii = doubling(mu, space.diameter());
    let pairs: Vec<_> = sample_pairs(grid, &radii, 0).into_iter().filter(|(x, y)| space.dist(x, y) >= mu).collect();
    let times: Vec<Separation> = pairs
        .par_iter()
        .map(|(x, y)| separation_time(ifs, sigma, x, y, eta, n_cap))
        .collect::<Result<_>>()?;
    let mut worst = 0usize;
    for t in &times {
        match t.steps() {
            Some(s) => worst = worst.max(s),
            None => return Ok(Separation::Saturated),
        }
    }
    if pairs.is_empty() {
        return Ok(Separation::Separated(1));
    }
    if worst + 1 > n_cap {
        return Ok(Separation::Saturated);
    }
    Ok(Separation::Separated(worst as i64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::AffineMap;
    use crate::shadowing::HyperbolicSplitting;
    use crate::space::Space;

    fn cat() -> Ifs {
        Ifs::single(AffineMap::cat())
    }

    fn unstable_pair(r: f64) -> (SpacePoint, SpacePoint) {
        let split = HyperbolicSplitting::new(AffineMap::cat().matrix()).unwrap();
        let i = split.eigenvalues().iter().position(|l| l.abs() > 1.0).unwrap();
        let u = split.basis().column(i);
        let x = SpacePoint::new(vec![0.3, 0.6]);
        let y = Space::Torus(2).translate(&x, &[u[0] * r, u[1] * r]);
        (x, y)
    }

    #[test]
    fn unstable_pair_separates_at_five() {
        // 2.618^4 · 1e-3 ≈ 0.047 and 2.618^5 · 1e-3 ≈ 0.123
        let (x, y) = unstable_pair(1e-3);
        let s = SymbolSequence::constant(0);
        assert_eq!(separation_time(&cat(), &s, &x, &y, 0.1, 30).unwrap(), Separation::Separated(5));
        assert_eq!(separation_time(&cat(), &s, &y, &x, 0.1, 30).unwrap(), Separation::Separated(5));
        assert_eq!(separation_time(&cat(), &s, &x, &x, 0.1, 30).unwrap(), Separation::Saturated);
    }

    #[test]
    fn isometries_never_separate() {
        let s = SymbolSequence::constant(0);
        let id = Ifs::single(AffineMap::identity(Space::Torus(2)));
        let x = SpacePoint::new(vec![0.1, 0.1]);
        let y = SpacePoint::new(vec![0.12, 0.1]);
        assert_eq!(separation_time(&id, &s, &x, &y, 0.05, 30).unwrap(), Separation::Saturated);
        let grid = MetricGrid::new(Space::Torus(2), 8).unwrap();
        let deltas = [0.2, 0.1, 0.01, 1e-3];
        for ifs in [id, Ifs::single(AffineMap::rotation(vec![0.1, 0.3]).unwrap())] {
            let r = estimate_expansive_const(&ifs, &s, &grid, 5e-4, 20, &deltas).unwrap();
            assert!(r.verdicts.iter().all(|v| *v == DeltaVerdict::Violated), "{:?}", r.verdicts);
            assert!(r.candidate_delta.is_none());
            for v in &r.violations {
                assert!(Space::Torus(2).dist(&v.x, &v.y) > 5e-4 && v.max_sep <= v.delta);
            }
        }
    }

    #[test]
    fn cat_map_has_a_candidate_constant() {
        let s = SymbolSequence::constant(0);
        let grid = MetricGrid::new(Space::Torus(2), 8).unwrap();
        let deltas = [0.4, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01];
        let r = estimate_expansive_const(&cat(), &s, &grid, 1e-2, 30, &deltas).unwrap();
        assert!(r.candidate_delta.is_some_and(|d| d > 0.0));
        // the verdicts do not depend on the order of the grid
        let mut rev = deltas;
        rev.reverse();
        let r2 = estimate_expansive_const(&cat(), &s, &grid, 1e-2, 30, &rev).unwrap();
        let mut v2 = r2.verdicts.clone();
        v2.reverse();
        assert_eq!(r.verdicts, v2);
        // monotone in Δ
        let first_ok = r.verdicts.iter().position(|v| *v == DeltaVerdict::Violated).unwrap_or(deltas.len());
        assert!(r.verdicts[first_ok..].iter().all(|v| *v == DeltaVerdict::Violated));
    }

    #[test]
    fn n_of_mu_for_the_cat_map() {
        let s = SymbolSequence::constant(0);
        let grid = MetricGrid::new(Space::Torus(2), 8).unwrap();
        let n = estimate_N_of_mu(&cat(), &s, 0.1, 1e-3, &grid, 30).unwrap().steps().unwrap();
        let predicted = ((0.1 * 2f64.sqrt() / 1e-3).ln() / ((3.0 + 5f64.sqrt()) / 2.0).ln()).ceil() as usize + 1;
        assert!(n.abs_diff(6) <= 1 && n <= predicted, "{n}");
        let n2 = estimate_N_of_mu(&cat(), &s, 0.1, 2e-3, &grid, 30).unwrap().steps().unwrap();
        assert!(n2 <= n);
        let n3 = estimate_N_of_mu(&cat(), &s, 0.2, 1e-3, &grid, 30).unwrap().steps().unwrap();
        assert!(n3 >= n);
        assert_eq!(estimate_N_of_mu(&cat(), &s, 0.1, 2.0, &grid, 30).unwrap(), Separation::Separated(1));
        let id = Ifs::single(AffineMap::identity(Space::Torus(2)));
        assert_eq!(estimate_N_of_mu(&id, &s, 0.1, 1e-3, &grid, 30).unwrap(), Separation::Saturated);
    }
}
