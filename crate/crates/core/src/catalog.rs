//! Built-in example systems and the names they go by on the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::seeded_rng;
use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::maps::{fd_jacobian, spectral_norm, AffineMap, Coupling, MapRef, SmoothMap, TorusSkewMap};
use crate::space::{Space, SpacePoint};

/// The skew product over the cat map with `c(u, v) = cos²(π(u + v))`.
pub fn torus_f1() -> TorusSkewMap {
    TorusSkewMap::new(Coupling::Sum)
}

/// The skew product over the cat map with `c(u, v) = cos²(π(u - v))`.
pub fn torus_f2() -> TorusSkewMap {
    TorusSkewMap::new(Coupling::Difference)
}

/// `{F₁, F₂}` on `T⁴`.
pub fn build_torus_example() -> Ifs {
    Ifs::new(vec![Arc::new(torus_f1()) as MapRef, Arc::new(torus_f2())]).expect("both maps live on T^4")
}

pub fn build_cat_ifs() -> Ifs {
    Ifs::single(AffineMap::cat())
}

/// One map `x -> q x + b` on the unit cube per offset `b`.
pub fn build_contraction_ifs(q: f64, offsets: &[Vec<f64>]) -> Result<Ifs> {
    if offsets.is_empty() {
        return Err(Error::InvalidIfs("a contraction IFS needs at least one offset".into()));
    }
    let maps = offsets
        .iter()
        .map(|b| Ok(Arc::new(AffineMap::contraction(q, b.clone())?) as MapRef))
        .collect::<Result<Vec<_>>>()?;
    Ifs::new(maps)
}

/// The corner contractions of `[0,1]^d`: offsets `{0, 1-q}^d`. For `d = 1`
/// and `q = 1/2` this is `{x/2, x/2 + 1/2}`.
pub fn corner_contractions(q: f64, d: usize) -> Result<Ifs> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let offsets: Vec<Vec<f64>> = (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { 1.0 - q } else { 0.0 }).collect())
        .collect();
    build_contraction_ifs(q, &offsets)
}

/// One rigid translation of the torus per shift vector.
pub fn build_rotation_ifs(shifts: &[Vec<f64>]) -> Result<Ifs> {
    if shifts.is_empty() {
        return Err(Error::InvalidIfs("a rotation IFS needs at least one shift".into()));
    }
    let maps = shifts
        .iter()
        .map(|s| Ok(Arc::new(AffineMap::rotation(s.clone())?) as MapRef))
        .collect::<Result<Vec<_>>>()?;
    Ifs::new(maps)
}

/// A system named on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SystemSpec {
    Cat,
    Torus,
    TorusF1,
    TorusF2,
    Contraction { q: f64, dim: usize },
    Rotation(Vec<f64>),
    Identity(usize),
    File(PathBuf),
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub doc: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "cat", doc: "the cat map (u, v) -> (2u + v, u + v) on T^2" },
    CatalogEntry { name: "torus", doc: "{F1, F2} on T^4: skew products over the cat map" },
    CatalogEntry { name: "torus_F1", doc: "{F1} with c(u, v) = cos^2(pi (u + v))" },
    CatalogEntry { name: "torus_F2", doc: "{F2} with c(u, v) = cos^2(pi (u - v))" },
    CatalogEntry { name: "contraction:q[:d]", doc: "corner contractions x -> q x + b, b in {0, 1-q}^d, on [0,1]^d" },
    CatalogEntry { name: "rotation:a,b,...", doc: "translation of the torus by (a, b, ...)" },
    CatalogEntry { name: "identity:d", doc: "the identity of T^d" },
    CatalogEntry { name: "<path>.json", doc: "an IFS definition file" },
];

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("'{t}' is not a number"))))
        .collect()
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').map_or((s, None), |(h, r)| (h, Some(r)));
        match (head, rest) {
            ("cat", None) => Ok(SystemSpec::Cat),
            ("torus", None) => Ok(SystemSpec::Torus),
            ("torus_F1", None) => Ok(SystemSpec::TorusF1),
            ("torus_F2", None) => Ok(SystemSpec::TorusF2),
            ("contraction", Some(r)) => {
                let (q, dim) = r.split_once(':').map_or((r, "1"), |(q, d)| (q, d));
                let q = q.parse().map_err(|_| Error::Parse(format!("bad contraction factor '{q}'")))?;
                let dim = dim.parse().map_err(|_| Error::Parse(format!("bad dimension '{dim}'")))?;
                Ok(SystemSpec::Contraction { q, dim })
            }
            ("rotation", Some(r)) => Ok(SystemSpec::Rotation(parse_floats(r)?)),
            ("identity", Some(r)) => {
                Ok(SystemSpec::Identity(r.parse().map_err(|_| Error::Parse(format!("bad dimension '{r}'")))?))
            }
            _ if s.ends_with(".json") => Ok(SystemSpec::File(PathBuf::from(s))),
            _ => Err(Error::InvalidIfs(format!("unknown system '{s}'"))),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Cat => write!(f, "cat"),
            SystemSpec::Torus => write!(f, "torus"),
            SystemSpec::TorusF1 => write!(f, "torus_F1"),
            SystemSpec::TorusF2 => write!(f, "torus_F2"),
            SystemSpec::Contraction { q, dim: 1 } => write!(f, "contraction:{q}"),
            SystemSpec::Contraction { q, dim } => write!(f, "contraction:{q}:{dim}"),
            SystemSpec::Rotation(s) => {
                let parts: Vec<String> = s.iter().map(|c| c.to_string()).collect();
                write!(f, "rotation:{}", parts.join(","))
            }
            SystemSpec::Identity(d) => write!(f, "identity:{d}"),
            SystemSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl From<SystemSpec> for String {
    fn from(s: SystemSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SystemSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl SystemSpec {
    /// Builds the IFS without auditing it.
    pub fn build_unchecked(&self) -> Result<Ifs> {
        match self {
            SystemSpec::Cat => Ok(build_cat_ifs()),
            SystemSpec::Torus => Ok(build_torus_example()),
            SystemSpec::TorusF1 => Ok(Ifs::single(torus_f1())),
            SystemSpec::TorusF2 => Ok(Ifs::single(torus_f2())),
            SystemSpec::Contraction { q, dim } => corner_contractions(*q, *dim),
            SystemSpec::Rotation(s) => build_rotation_ifs(std::slice::from_ref(s)),
            SystemSpec::Identity(d) => {
                if *d == 0 {
                    return Err(Error::InvalidParameter("dimension must be positive".into()));
                }
                Ok(Ifs::single(AffineMap::identity(Space::Torus(*d))))
            }
            SystemSpec::File(p) => crate::config::load_ifs(p),
        }
    }

    /// Builds the IFS and checks every map with [`audit_map`].
    pub fn build(&self) -> Result<Ifs> {
        let ifs = self.build_unchecked()?;
        for m in ifs.maps() {
            audit_map(m.as_ref(), AUDIT_SAMPLES, 0)?.ensure(&m.label())?;
        }
        Ok(ifs)
    }
}

/// Points sampled per map by [`SystemSpec::build`].
pub const AUDIT_SAMPLES: usize = 256;
/// Accepted gap between an analytic Jacobian and its finite-difference estimate.
pub const JACOBIAN_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapAudit {
    /// Largest `dist(f(f⁻¹(p)), p)` and `dist(f⁻¹(f(p)), p)`, if invertible.
    pub round_trip: Option<f64>,
    /// Largest spectral-norm gap between the Jacobian and finite differences.
    pub jacobian_error: Option<f64>,
}

impl MapAudit {
    pub fn ensure(&self, label: &str) -> Result<()> {
        if let Some(r) = self.round_trip.filter(|r| !(*r <= crate::maps::INVERSE_TOL)) {
            return Err(Error::NewtonFailed { label: label.to_string(), residual: r });
        }
        if let Some(j) = self.jacobian_error.filter(|j| !(*j <= JACOBIAN_TOL)) {
            return Err(Error::InvalidIfs(format!("{label}: Jacobian disagrees with finite differences by {j:e}")));
        }
        Ok(())
    }
}

/// Round-trip and Jacobian consistency of `map` on `samples` seeded points.
/// Cube samples stay a little inside the boundary so finite differences
/// never straddle the clamp.
pub fn audit_map(map: &dyn SmoothMap, samples: usize, seed: u64) -> Result<MapAudit> {
    let space = map.space();
    let mut rng = seeded_rng(seed);
    let margin = if space.is_torus() { 0.0 } else { 1e-3 };
    let points: Vec<SpacePoint> = (0..samples)
        .map(|_| space.point((0..space.dim()).map(|_| rng.random_range(margin..1.0 - margin)).collect()))
        .collect();
    let round_trip = if map.is_invertible() {
        let mut worst = 0.0f64;
        for p in &points {
            let fp = map.eval(p);
            worst = worst.max(space.dist(&map.invert(&fp)?, p));
            if let Ok(q) = map.invert(p) {
                worst = worst.max(space.dist(&map.eval(&q), p));
            }
        }
        Some(worst)
    } else {
        None
    };
    let jacobian_error = if map.has_jacobian() {
        let worst = points
            .iter()
            .filter_map(|p| map.jacobian(p).map(|j| spectral_norm(&(j - fd_jacobian(map, p, 1e-6)))))
            .fold(0.0, f64::max);
        Some(worst)
    } else {
        None
    };
    Ok(MapAudit { round_trip, jacobian_error })
}
