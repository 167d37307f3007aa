//! JSON definitions of systems and symbol sequences.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::catalog::{torus_f1, torus_f2};
use crate::chain::seeded_rng;
use crate::error::{Error, Result};
use crate::ifs::{Extension, Ifs, SymbolSequence};
use crate::maps::{AffineMap, MapRef, Monomial, PolyMap};
use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    #[default]
    Torus,
    Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDef {
    pub dim: usize,
    #[serde(default)]
    pub kind: SpaceKind,
}

impl SpaceDef {
    pub fn space(&self) -> Space {
        match self.kind {
            SpaceKind::Torus => Space::Torus(self.dim),
            SpaceKind::Cube => Space::Cube(self.dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    /// Row-major.
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyParams {
    /// One list of monomials per output coordinate.
    pub components: Vec<Vec<Monomial>>,
    #[serde(default)]
    pub invertible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum MapDef {
    Affine(AffineParams),
    Cat,
    #[serde(rename = "torus_F1")]
    TorusF1,
    #[serde(rename = "torus_F2")]
    TorusF2,
    Rotation { shift: Vec<f64> },
    Contraction { q: f64, offset: Vec<f64> },
    CustomPoly(PolyParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsDef {
    pub space: SpaceDef,
    pub maps: Vec<MapDef>,
}

fn build_map(space: Space, def: &MapDef) -> Result<MapRef> {
    let map: MapRef = match def {
        MapDef::Affine(p) => {
            let d = space.dim();
            if p.matrix.len() != d || p.matrix.iter().any(|r| r.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, got: p.matrix.len() });
            }
            let flat: Vec<f64> = p.matrix.iter().flatten().copied().collect();
            let offset = p.offset.clone().unwrap_or_else(|| vec![0.0; d]);
            Arc::new(AffineMap::new(space, DMatrix::from_row_slice(d, d, &flat), offset, "affine")?)
        }
        MapDef::Cat => Arc::new(AffineMap::cat()),
        MapDef::TorusF1 => Arc::new(torus_f1()),
        MapDef::TorusF2 => Arc::new(torus_f2()),
        MapDef::Rotation { shift } => Arc::new(AffineMap::rotation(shift.clone())?),
        MapDef::Contraction { q, offset } => Arc::new(AffineMap::contraction(*q, offset.clone())?),
        MapDef::CustomPoly(p) => Arc::new(PolyMap::new(space, p.components.clone(), p.invertible)?),
    };
    if map.space() != space {
        return Err(Error::InvalidIfs(format!("map {} does not live on {space:?}", map.label())));
    }
    Ok(map)
}

impl IfsDef {
    pub fn build(&self) -> Result<Ifs> {
        let space = self.space.space();
        Ifs::new(self.maps.iter().map(|m| build_map(space, m)).collect::<Result<_>>()?)
    }
}

pub fn load_ifs(path: &Path) -> Result<Ifs> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str::<IfsDef>(&text)?.build()
}

/// `{"window": [...], "extension": "constant:0" | "periodic", "start": 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaDef {
    pub window: Vec<usize>,
    pub extension: String,
    #[serde(default)]
    pub start: i64,
}

impl SigmaDef {
    pub fn build(&self) -> Result<SymbolSequence> {
        let ext = match self.extension.as_str() {
            "periodic" => Extension::Periodic,
            e => match e.strip_prefix("constant:").map(str::parse::<usize>) {
                Some(Ok(c)) => Extension::Constant(c),
                _ => return Err(Error::InvalidSequence(format!("unknown extension '{e}'"))),
            },
        };
        SymbolSequence::new(self.start, self.window.clone(), ext)
    }
}

fn parse_symbols(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("'{t}' is not a symbol"))))
        .collect()
}

/// Reads a symbol sequence from `constant:c`, `periodic:a,b,...`,
/// `random:len` (drawn from `seed` over `n_symbols`) or a JSON file.
pub fn parse_sigma(s: &str, n_symbols: usize, seed: u64) -> Result<SymbolSequence> {
    let (head, rest) = s.split_once(':').map_or((s, ""), |(h, r)| (h, r));
    match head {
        "constant" => Ok(SymbolSequence::constant(
            rest.parse().map_err(|_| Error::Parse(format!("bad symbol '{rest}'")))?,
        )),
        "periodic" => SymbolSequence::periodic(parse_symbols(rest)?),
        "random" => {
            let len = rest.parse().map_err(|_| Error::Parse(format!("bad length '{rest}'")))?;
            SymbolSequence::random(n_symbols, len, &mut seeded_rng(seed))
        }
        _ if s.ends_with(".json") => {
            let text = std::fs::read_to_string(s).map_err(|e| Error::Io(format!("{s}: {e}")))?;
            serde_json::from_str::<SigmaDef>(&text)?.build()
        }
        _ => Err(Error::InvalidSequence(format!("cannot read a symbol sequence from '{s}'"))),
    }
}
