use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainKind, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::{orbit_map, orbit_window, Extension, Ifs, SymbolSequence};
use crate::maps::{BumpDiffeo, Composite, MapRef};
use crate::metrics::{dist_d0, PairingMode};
use crate::shadowing::{shadow, NewtonOptions, Solver};
use crate::space::{MetricGrid, Space, SpacePoint};

/// One tabulated value `h(x)` of the semi-conjugacy at shift `shift` of `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSample {
    pub x: SpacePoint,
    pub shift: i64,
    pub hx: Option<SpacePoint>,
    /// `dist(x, h(x))`.
    pub dist: f64,
    /// `max_{|k| <= K} dist(G-orbit_k(x), F-orbit_k(h(x)))`.
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// A sampled semi-conjugacy `h` from `G` to `F`.
///
/// `h(x)` is the point at index 0 of the `F`-chain shadowing the `G`-orbit of
/// `x` over `|k| <= K`. Values elsewhere come from the nearest sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiConjugacy {
    pub space: Space,
    pub epsilon: f64,
    pub horizon: usize,
    /// Whether `σ` is constant, in which case `h` does not depend on the shift.
    pub shift_invariant: bool,
    pub samples: Vec<HSample>,
    /// Samples that are the user's points rather than orbit anchors.
    pub primary: usize,
    pub solver: Solver,
    /// How `D₀(F, G)` is meant to be measured: always the matched pairing.
    pub pairing: String,
}

impl SemiConjugacy {
    pub fn primary_samples(&self) -> &[HSample] {
        &self.samples[..self.primary]
    }

    /// Conclusions `dist(x, h(x)) < ε` and residual `< ε` at every primary sample.
    pub fn holds(&self) -> bool {
        self.primary_samples().iter().all(|s| s.hx.is_some() && s.dist < self.epsilon && s.max_residual < self.epsilon)
    }

    /// Nearest tabulated `h` value for `p` at the given shift of `σ`.
    pub fn lookup(&self, p: &SpacePoint, shift: i64) -> Result<&SpacePoint> {
        let shift = if self.shift_invariant { 0 } else { shift };
        let (best, d) = self
            .samples
            .iter()
            .filter(|s| s.shift == shift && s.hx.is_some())
            .map(|s| (s, self.space.dist(&s.x, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::SparseSamples { distance: f64::INFINITY, epsilon: self.epsilon })?;
        if d > self.epsilon {
            return Err(Error::SparseSamples { distance: d, epsilon: self.epsilon });
        }
        Ok(best.hx.as_ref().expect("filtered"))
    }

    /// Largest distance from a grid point to the nearest image `h(x)`; a
    /// value below `2ε` is the sampled form of surjectivity.
    pub fn image_gap(&self, grid: &MetricGrid) -> f64 {
        let images: Vec<&SpacePoint> = self.samples.iter().filter_map(|s| s.hx.as_ref()).collect();
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let p = grid.point(i);
                images.iter().map(|q| self.space.dist(&p, q)).fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max)
    }
}

#[allow(clippy::too_many_arguments)]
fn h_sample(
    f: &Ifs,
    g: &Ifs,
    sigma: &SymbolSequence,
    x: &SpacePoint,
    shift: i64,
    horizon: usize,
    solver: Solver,
    opts: &NewtonOptions,
) -> HSample {
    let k = horizon as i64;
    let run = || -> Result<(SpacePoint, f64, f64)> {
        // G-orbit of x around index `shift`
        let back = orbit_window(g, &shifted(sigma, shift), x, -k, k)?;
        let xi = ChainRecord::new(shift - k, back.clone(), sigma.clone(), 0.0, ChainKind::DeltaChain)?;
        let r = shadow(f, &xi, solver, opts)?;
        let hx = r.shadow.point(shift).expect("index in window").clone();
        let f_orbit = orbit_window(f, &shifted(sigma, shift), &hx, -k, k)?;
        let space = f.space();
        let residual = back.iter().zip(&f_orbit).map(|(a, b)| space.dist(a, b)).fold(0.0, f64::max);
        Ok((hx.clone(), space.dist(x, &hx), residual))
    };
    match run() {
        Ok((hx, dist, max_residual)) => HSample { x: x.clone(), shift, hx: Some(hx), dist, max_residual, error: None },
        Err(e) => HSample {
            x: x.clone(),
            shift,
            hx: None,
            dist: f64::NAN,
            max_residual: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// `σ` read from index `shift` on, so that `shifted(σ, s).lookup(k) = σ.lookup(s + k)`.
fn shifted(sigma: &SymbolSequence, shift: i64) -> SymbolSequence {
    if shift == 0 || sigma.is_constant() {
        return sigma.clone();
    }
    // materialized far enough out for any horizon in use
    let reach = 4096i64;
    let window: Vec<usize> = (-reach..=reach).map(|k| sigma.lookup(k + shift)).collect();
    SymbolSequence::new(-reach, window, Extension::Constant(sigma.lookup(reach + shift + 1)))
        .expect("nonempty window")
}

/// `{H ∘ f_λ}` for a single bump `H` centred at `center` that pushes along
/// `direction`, scaled so the matched `D₀` to `f` measured on `grid` is
/// `target`. Returns the family and the measured distance.
pub fn bump_perturbation(
    f: &Ifs,
    center: &SpacePoint,
    direction: &[f64],
    radius: f64,
    target: f64,
    grid: &MetricGrid,
) -> Result<(Ifs, f64)> {
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) || !(target > 0.0) {
        return Err(Error::InvalidParameter("need a nonzero direction and a positive target".into()));
    }
    let build = |scale: f64| -> Result<(Ifs, f64)> {
        let v: Vec<f64> = direction.iter().map(|c| c / norm * scale).collect();
        let h: MapRef = Arc::new(BumpDiffeo::with_radius(f.space(), vec![center.clone()], vec![v], radius)?);
        let g = Ifs::new(
            f.maps().iter().map(|m| Ok(Arc::new(Composite::new(h.clone(), m.clone())?) as MapRef)).collect::<Result<_>>()?,
        )?;
        let d0 = dist_d0(f, &g, grid, PairingMode::Matched)?;
        Ok((g, d0))
    };
    let (_, first) = build(target)?;
    if !(first > 0.0) {
        return Err(Error::InvalidParameter("the bump does not move any grid point".into()));
    }
    build(target * target / first)
}

/// Tabulates `h` on `samples` and, when `anchors` is set, on every point
/// `G-orbit_k(x)`, `0 < |k| <= K`, so that [`semiconj_residual`] finds each
/// orbit point in the table.
#[allow(clippy::too_many_arguments)]
pub fn build_semiconj(
    f: &Ifs,
    g: &Ifs,
    sigma: &SymbolSequence,
    epsilon: f64,
    samples: &[SpacePoint],
    horizon: usize,
    anchors: bool,
    opts: &NewtonOptions,
) -> Result<SemiConjugacy> {
    if f.space() != g.space() {
        return Err(Error::InvalidIfs("F and G live on different spaces".into()));
    }
    sigma.check(f.len())?;
    sigma.check(g.len())?;
    let solver = Solver::Auto.resolve(f);
    let shift_invariant = sigma.is_constant();
    let mut jobs: Vec<(SpacePoint, i64)> = samples.iter().map(|x| (x.clone(), 0)).collect();
    if anchors {
        let k = horizon as i64;
        for x in samples {
            for j in (-k..=k).filter(|j| *j != 0) {
                if let Ok(p) = orbit_map(g, sigma, j, x) {
                    jobs.push((p, if shift_invariant { 0 } else { j }));
                }
            }
        }
    }
    let table: Vec<HSample> =
        jobs.par_iter().map(|(x, s)| h_sample(f, g, sigma, x, *s, horizon, solver, opts)).collect();
    Ok(SemiConjugacy {
        space: f.space(),
        epsilon,
        horizon,
        shift_invariant,
        samples: table,
        primary: samples.len(),
        solver,
        pairing: "matched".into(),
    })
}

/// `max_{x, |k| <= K} dist(F-orbit_k(h(x)), h(G-orbit_k(x)))` over the primary samples.
pub fn semiconj_residual(f: &Ifs, g: &Ifs, sigma: &SymbolSequence, h: &SemiConjugacy, horizon: usize) -> Result<f64> {
    let k = horizon as i64;
    h.primary_samples()
        .par_iter()
        .filter(|s| s.hx.is_some())
        .map(|s| {
            let hx = s.hx.as_ref().expect("filtered");
            let mut worst = 0.0f64;
            for j in -k..=k {
                let lhs = orbit_map(f, sigma, j, hx)?;
                let gx = orbit_map(g, sigma, j, &s.x)?;
                let rhs = h.lookup(&gx, j)?;
                worst = worst.max(h.space.dist(&lhs, rhs));
            }
            Ok(worst)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
