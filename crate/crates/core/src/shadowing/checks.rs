use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{refine, shadow, sup_dist, NewtonOptions, Solver};
use crate::chain::{sample_ball, seeded_rng, validate_chain, ChainRecord, EXACT_CHAIN_TOL};
use crate::error::{Error, Result};
use crate::ifs::{Ifs, SymbolSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowVerdict {
    /// `y` is exact and stays within `ε` of `xi`.
    pub holds: bool,
    pub is_exact: bool,
    pub link_residual: f64,
    /// `max_k dist(x_k, y_k)` over the common window.
    pub sup_dist: f64,
    /// Index attaining `sup_dist`.
    pub worst_k: i64,
}

/// Checks that `y` is an exact chain (links within `tol`) that stays within
/// `epsilon` of `xi` on their common window.
pub fn verify_shadowing(
    ifs: &Ifs,
    xi: &ChainRecord,
    y: &ChainRecord,
    epsilon: f64,
    tol: f64,
) -> Result<ShadowVerdict> {
    let lo = xi.start.max(y.start);
    let hi = xi.end().min(y.end());
    if lo > hi {
        return Err(Error::InvalidChain(format!(
            "windows {}..={} and {}..={} do not overlap",
            xi.start,
            xi.end(),
            y.start,
            y.end()
        )));
    }
    let exact = validate_chain(ifs, y, tol)?;
    let space = ifs.space();
    let (worst_k, sup) = (lo..=hi)
        .map(|k| (k, space.dist(xi.point(k).expect("in window"), y.point(k).expect("in window"))))
        .fold((lo, 0.0f64), |acc, (k, d)| if d > acc.1 { (k, d) } else { acc });
    Ok(ShadowVerdict {
        holds: exact.is_exact_chain && sup <= epsilon,
        is_exact: exact.is_exact_chain,
        link_residual: exact.is_delta_chain_for,
        sup_dist: sup,
        worst_k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub start: i64,
    /// Index of the last point relative to `start`.
    pub m: usize,
    /// Measured slack of the window.
    pub delta: f64,
    pub sup_dist: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub epsilon: f64,
    pub windows: Vec<WindowReport>,
    pub all_pass: bool,
}

/// Shadows every window independently and checks each shadow is within `epsilon`.
pub fn finite_shadow_probe(
    ifs: &Ifs,
    windows: &[ChainRecord],
    epsilon: f64,
    solver: Solver,
    opts: &NewtonOptions,
) -> ProbeReport {
    let windows: Vec<WindowReport> = windows
        .par_iter()
        .map(|w| {
            let delta = validate_chain(ifs, w, 0.0).map_or(f64::NAN, |v| v.is_delta_chain_for);
            let mut report = WindowReport { start: w.start, m: w.len() - 1, delta, sup_dist: None, pass: false, error: None };
            match shadow(ifs, w, solver, opts) {
                Ok(r) => {
                    report.pass = r.residual <= EXACT_CHAIN_TOL && r.sup_dist <= epsilon;
                    report.sup_dist = Some(r.sup_dist);
                }
                Err(e) => report.error = Some(e.to_string()),
            }
            report
        })
        .collect();
    let all_pass = windows.iter().all(|w| w.pass);
    ProbeReport { epsilon, windows, all_pass }
}

/// Largest pointwise gap tolerated between two candidates deemed equal.
pub const UNIQUENESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniquenessVerdict {
    Unique,
    NotUnique,
    /// No candidate shadowed the chain.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub trials: usize,
    /// Candidates that are exact and within `ε` of the chain.
    pub candidates: usize,
    /// Largest gap between candidates on the compared window.
    pub max_disagreement: f64,
    /// Indices `lo..=hi` on which candidates are compared.
    pub compared: (i64, i64),
}

/// Multi-start test of shadowing uniqueness.
///
/// Trial 0 refines `xi` itself; every other trial starts from `xi` with each
/// point moved by a random vector of length at most `ε/10`. Candidates that
/// are exact and `ε`-shadow `xi` are compared on the window with a quarter of
/// its length cut from each end, since finite-window shadows are only pinned
/// down away from the ends.
pub fn check_uniqueness(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    xi: &ChainRecord,
    epsilon: f64,
    trials: usize,
    seed: u64,
    opts: &NewtonOptions,
) -> Result<UniquenessReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let xi = ChainRecord { sigma: sigma.clone(), ..xi.clone() };
    let space = ifs.space();
    let d = space.dim();
    let outcomes: Vec<_> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let init = if t == 0 {
                xi.points.clone()
            } else {
                let mut rng = seeded_rng(seed);
                rng.set_stream(t);
                xi.points.iter().map(|p| space.translate(p, &sample_ball(&mut rng, d, epsilon / 10.0))).collect()
            };
            refine(ifs, sigma, xi.start, init, opts)
        })
        .collect::<Result<_>>()?;
    let shadows: Vec<_> = outcomes
        .into_iter()
        .filter(|o| o.converged && o.residual <= EXACT_CHAIN_TOL && sup_dist(space, &xi.points, &o.points) <= epsilon)
        .map(|o| o.points)
        .collect();
    let n = xi.len();
    let margin = n / 4;
    let compared = (xi.start + margin as i64, xi.start + (n - margin) as i64 - 1);
    let Some(reference) = shadows.first() else {
        return Ok(UniquenessReport {
            verdict: UniquenessVerdict::Inconclusive,
            trials,
            candidates: 0,
            max_disagreement: 0.0,
            compared,
        });
    };
    let gap = shadows
        .iter()
        .map(|c| sup_dist(space, &c[margin..n - margin], &reference[margin..n - margin]))
        .fold(0.0, f64::max);
    Ok(UniquenessReport {
        verdict: if gap <= UNIQUENESS_TOL { UniquenessVerdict::Unique } else { UniquenessVerdict::NotUnique },
        trials,
        candidates: shadows.len(),
        max_disagreement: gap,
        compared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{gen_pseudo_orbit, ChainKind, NoiseModel};
    use crate::maps::{AffineMap, MapRef};
    use crate::shadowing::shadow_contraction;
    use crate::space::{Space, SpacePoint};
    use std::sync::Arc;

    fn cat_chain(delta: f64, len: usize, seed: u64) -> (Ifs, ChainRecord) {
        let f = Ifs::single(AffineMap::cat());
        let xi = gen_pseudo_orbit(
            &f,
            &SymbolSequence::constant(0),
            &SpacePoint::new(vec![0.1, 0.2]),
            delta,
            len,
            NoiseModel::UniformBall,
            seed,
        )
        .unwrap();
        (f, xi)
    }

    #[test]
    fn exact_chain_shadows_itself() {
        let (f, xi) = cat_chain(0.0, 20, 0);
        let v = verify_shadowing(&f, &xi, &xi, 1e-6, 1e-9).unwrap();
        assert!(v.holds && v.sup_dist == 0.0);
    }

    #[test]
    fn displaced_point_fails() {
        let (f, xi) = cat_chain(0.0, 20, 0);
        let mut y = xi.clone();
        y.points[7] = f.space().translate(&y.points[7], &[0.02, 0.0]);
        let v = verify_shadowing(&f, &xi, &y, 0.01, 1e-9).unwrap();
        assert!(!v.holds);
        assert_eq!(v.worst_k, 7);
        assert!((v.sup_dist - 0.02).abs() < 1e-12);
    }

    #[test]
    fn contraction_shadow_verifies() {
        let f = Ifs::new(vec![
            Arc::new(AffineMap::contraction(0.5, vec![0.0]).unwrap()) as MapRef,
            Arc::new(AffineMap::contraction(0.5, vec![0.5]).unwrap()),
        ])
        .unwrap();
        let s = SymbolSequence::periodic(vec![0, 1, 1, 0, 1]).unwrap();
        let xi = gen_pseudo_orbit(&f, &s, &Space::Cube(1).point(vec![0.2]), 0.01, 300, NoiseModel::UniformBall, 4)
            .unwrap();
        let r = shadow_contraction(&f, &xi).unwrap();
        assert!(verify_shadowing(&f, &xi, &r.shadow, 0.02, 1e-9).unwrap().holds);
    }

    #[test]
    fn probe_base_case_and_length_independence() {
        let (f, xi) = cat_chain(1e-3, 400, 9);
        let single = ChainRecord::new(0, vec![xi.points[0].clone()], xi.sigma.clone(), 0.0, ChainKind::ExactChain)
            .unwrap();
        let base = finite_shadow_probe(&f, &[single], 1e-9, Solver::Auto, &NewtonOptions::default());
        assert!(base.all_pass && base.windows[0].sup_dist == Some(0.0));
        let windows: Vec<ChainRecord> = [25, 50, 100, 200, 400]
            .iter()
            .map(|&m| ChainRecord { points: xi.points[..m].to_vec(), ..xi.clone() })
            .collect();
        let report = finite_shadow_probe(&f, &windows, 2.3e-3, Solver::Hyperbolic, &NewtonOptions::default());
        assert!(report.all_pass);
    }

    #[test]
    fn cat_map_shadows_are_unique() {
        let (f, xi) = cat_chain(1e-4, 100, 2);
        let r = check_uniqueness(&f, &xi.sigma, &xi, 0.1, 20, 11, &NewtonOptions::default()).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::Unique, "{r:?}");
        assert_eq!(r.candidates, 20);
    }

    #[test]
    fn identity_shadows_are_not_unique() {
        let f = Ifs::single(AffineMap::identity(Space::Torus(2)));
        let s = SymbolSequence::constant(0);
        let xi = gen_pseudo_orbit(&f, &s, &SpacePoint::new(vec![0.4, 0.6]), 0.0, 50, NoiseModel::UniformBall, 0)
            .unwrap();
        let r = check_uniqueness(&f, &s, &xi, 0.1, 20, 3, &NewtonOptions::default()).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::NotUnique);
    }

    #[test]
    fn no_candidate_is_inconclusive() {
        let (f, xi) = cat_chain(1e-2, 60, 2);
        let r = check_uniqueness(&f, &xi.sigma, &xi, 1e-6, 3, 1, &NewtonOptions::default()).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::Inconclusive);
    }
}
