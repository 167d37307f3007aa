//! CSV and JSON emission with atomic writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::chain::{ChainKind, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::{Extension, SymbolSequence};
use crate::perturb::{CoverReport, SemiConjugacy};
use crate::space::{Space, SpacePoint};

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json(value)?)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn axis_names(prefix: &str, d: usize) -> impl Iterator<Item = String> + '_ {
    (0..d).map(move |i| format!("{prefix}{i}"))
}

/// `k,lambda,x0,x1,...`, with `lambda = -1` on the last point, which has no outgoing link.
pub fn chain_csv(chain: &ChainRecord) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["k".to_string(), "lambda".to_string()];
    header.extend(axis_names("x", chain.dim()));
    w.write_record(&header).map_err(csv_error)?;
    for (i, p) in chain.points.iter().enumerate() {
        let k = chain.start + i as i64;
        let lambda = if k == chain.end() { -1 } else { chain.sigma.lookup(k) as i64 };
        let mut row = vec![k.to_string(), lambda.to_string()];
        row.extend(p.coords().iter().map(|c| c.to_string()));
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Reads a chain written by [`chain_csv`]. The symbols beyond the file
/// repeat the last recorded one.
pub fn read_chain_csv(path: &Path, space: Space) -> Result<ChainRecord> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.get(0) != Some("k") || headers.get(1) != Some("lambda") || headers.len() != space.dim() + 2 {
        return Err(Error::Parse(format!(
            "{}: expected columns k,lambda and {} coordinates",
            path.display(),
            space.dim()
        )));
    }
    let mut start = None;
    let mut symbols = Vec::new();
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let num = |j: usize| -> Result<f64> {
            rec[j].trim().parse().map_err(|_| Error::Parse(format!("row {}: bad value '{}'", i + 1, &rec[j])))
        };
        let k = num(0)? as i64;
        match start {
            None => start = Some(k),
            Some(s) if s + i as i64 != k => {
                return Err(Error::Parse(format!("row {}: index {k} is not consecutive", i + 1)));
            }
            _ => {}
        }
        let lambda = num(1)?;
        if lambda >= 0.0 {
            symbols.push(lambda as usize);
        }
        let coords = (2..rec.len()).map(num).collect::<Result<Vec<_>>>()?;
        let p = space.point(coords);
        space.check(&p)?;
        points.push(p);
    }
    let start = start.ok_or_else(|| Error::Parse(format!("{}: no rows", path.display())))?;
    let fill = symbols.last().copied().unwrap_or(0);
    let sigma = SymbolSequence::new(start, symbols, Extension::Constant(fill))?;
    ChainRecord::new(start, points, sigma, 0.0, ChainKind::DeltaChain)
}

/// One point per row, with columns `x0,x1,...`.
pub fn points_csv(points: &[SpacePoint]) -> Result<Vec<u8>> {
    let d = points.first().map_or(0, SpacePoint::dim);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(axis_names("x", d)).map_err(csv_error)?;
    for p in points {
        w.write_record(p.coords().iter().map(|c| c.to_string())).map_err(csv_error)?;
    }
    finish(w)
}

/// `X...,Z...,preimage_dist,epsilon,seed`; empty apart from the header when the cover holds.
pub fn cover_csv(report: &CoverReport, dim: usize) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = axis_names("X", dim).chain(axis_names("Z", dim)).collect();
    header.extend(["preimage_dist", "epsilon", "seed"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for v in &report.violations {
        let mut row: Vec<String> = v.x.coords().iter().chain(v.z.coords()).map(|c| c.to_string()).collect();
        row.extend([v.preimage_dist.to_string(), report.epsilon.to_string(), report.seed.to_string()]);
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// `x...,h...,dist,max_residual` for every tabulated sample; failed samples have empty `h`.
pub fn semiconj_csv(h: &SemiConjugacy) -> Result<Vec<u8>> {
    let d = h.space.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = axis_names("x", d).chain(axis_names("h", d)).collect();
    header.extend(["dist", "max_residual"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for s in &h.samples {
        let mut row: Vec<String> = s.x.coords().iter().map(|c| c.to_string()).collect();
        match &s.hx {
            Some(hx) => row.extend(hx.coords().iter().map(|c| c.to_string())),
            None => row.extend(std::iter::repeat_n(String::new(), d)),
        }
        row.extend([s.dist.to_string(), s.max_residual.to_string()]);
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}
