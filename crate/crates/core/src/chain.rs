//! Chains, δ-chains and their validation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{Ifs, SymbolSequence};
use crate::space::{Space, SpacePoint};

/// Name of the generator behind every seeded stream in the crate.
pub const RNG_NAME: &str = "chacha8/rand_chacha-0.9";

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tolerance on the link residual of an exact chain.
pub const EXACT_CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    ExactChain,
    DeltaChain,
    ShadowCandidate,
}

/// A finite window `x_start, …, x_{start+len-1}` of a sequence in the space.
///
/// The link from `x_k` to `x_{k+1}` is driven by `sigma.lookup(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub start: i64,
    pub points: Vec<SpacePoint>,
    pub sigma: SymbolSequence,
    pub delta: f64,
    pub kind: ChainKind,
}

impl ChainRecord {
    pub fn new(start: i64, points: Vec<SpacePoint>, sigma: SymbolSequence, delta: f64, kind: ChainKind) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidChain("a chain needs at least one point".into()))?;
        if let Some(p) = points.iter().find(|p| p.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), got: p.dim() });
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidChain(format!("negative chain slack {delta}")));
        }
        Ok(Self { start, points, sigma, delta, kind })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the last point.
    pub fn end(&self) -> i64 {
        self.start + self.points.len() as i64 - 1
    }

    pub fn point(&self, k: i64) -> Option<&SpacePoint> {
        let i = k - self.start;
        (i >= 0).then(|| self.points.get(i as usize)).flatten()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainVerdict {
    pub is_exact_chain: bool,
    /// Smallest δ for which the record is a δ-chain: the largest link residual.
    pub is_delta_chain_for: f64,
    /// Index `k` of the worst link `x_k -> x_{k+1}`, if there is a link.
    pub worst_k: Option<i64>,
}

/// `dist(x_{k+1}, f_{σ(k)}(x_k))` for every link in the window.
pub fn link_residuals(ifs: &Ifs, chain: &ChainRecord) -> Result<Vec<f64>> {
    chain.sigma.check(ifs.len())?;
    let space = ifs.space();
    chain.points.iter().try_for_each(|p| space.check(p))?;
    Ok(chain
        .points
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let k = chain.start + i as i64;
            space.dist(&w[1], &ifs.map(chain.sigma.lookup(k)).eval(&w[0]))
        })
        .collect())
}

pub fn validate_chain(ifs: &Ifs, chain: &ChainRecord, tol: f64) -> Result<ChainVerdict> {
    let res = link_residuals(ifs, chain)?;
    let (worst, max) = res
        .iter()
        .enumerate()
        .fold((None, 0.0f64), |(wi, wm), (i, r)| if wi.is_none() || *r > wm { (Some(i), *r) } else { (wi, wm) });
    Ok(ChainVerdict {
        is_exact_chain: max <= tol,
        is_delta_chain_for: max,
        worst_k: worst.map(|i| chain.start + i as i64),
    })
}

/// How link errors are produced when generating a pseudo-orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Uniform on the closed δ-ball.
    UniformBall,
    /// Every coordinate rounded to a fixed number of decimals.
    Rounding { decimals: u32 },
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-ball" => Ok(NoiseModel::UniformBall),
            _ => {
                let digits = s.strip_prefix("round:").or_else(|| s.strip_prefix("rounding:"));
                match digits.map(str::parse::<u32>) {
                    Some(Ok(decimals)) => Ok(NoiseModel::Rounding { decimals }),
                    _ => Err(Error::UnknownNoise(s.to_string())),
                }
            }
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::UniformBall => write!(f, "uniform"),
            NoiseModel::Rounding { decimals } => write!(f, "round:{decimals}"),
        }
    }
}

/// Uniform sample from the ball of the given radius in `R^d`.
pub fn sample_ball<R: Rng>(rng: &mut R, d: usize, radius: f64) -> Vec<f64> {
    let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir.iter().map(|c: &f64| c * c).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / d as f64);
    if norm == 0.0 {
        return vec![0.0; d];
    }
    dir.into_iter().map(|c| c / norm * r).collect()
}

fn round_point(space: Space, p: &SpacePoint, decimals: u32) -> SpacePoint {
    let scale = 10f64.powi(decimals as i32);
    space.point(p.coords().iter().map(|c| (c * scale).round() / scale).collect())
}

/// Generates `len` points `x_{k+1} = f_{σ(k)}(x_k) + e_k`, deterministic in `seed`.
pub fn gen_pseudo_orbit(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    x0: &SpacePoint,
    delta: f64,
    len: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<ChainRecord> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be nonnegative")));
    }
    if len == 0 {
        return Err(Error::InvalidParameter("a pseudo-orbit needs at least one point".into()));
    }
    let space = ifs.space();
    space.check(x0)?;
    sigma.check(ifs.len())?;
    let mut rng = seeded_rng(seed);
    let d = space.dim();
    let (mut x, slack) = match noise {
        NoiseModel::UniformBall => (x0.clone(), delta),
        NoiseModel::Rounding { decimals } => {
            (round_point(space, x0, decimals), 0.5 * 10f64.powi(-(decimals as i32)) * (d as f64).sqrt())
        }
    };
    let mut points = Vec::with_capacity(len);
    points.push(x.clone());
    for k in 0..len as i64 - 1 {
        let image = ifs.map(sigma.lookup(k)).eval(&x);
        x = match noise {
            NoiseModel::UniformBall if delta == 0.0 => image,
            NoiseModel::UniformBall => space.translate(&image, &sample_ball(&mut rng, d, delta)),
            NoiseModel::Rounding { decimals } => round_point(space, &image, decimals),
        };
        points.push(x.clone());
    }
    let kind = if slack == 0.0 { ChainKind::ExactChain } else { ChainKind::DeltaChain };
    ChainRecord::new(0, points, sigma.clone(), slack, kind)
}
