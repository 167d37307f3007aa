//! Iterated function systems, symbol sequences and composed orbit maps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::{MapRef, SmoothMap};
use crate::space::{Space, SpacePoint};

/// A finite family of maps on one space, indexed `0..len`.
#[derive(Debug, Clone)]
pub struct Ifs {
    space: Space,
    maps: Vec<MapRef>,
}

impl Ifs {
    pub fn new(maps: Vec<MapRef>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::InvalidIfs("the index set is empty".into()))?;
        let space = first.space();
        if let Some(m) = maps.iter().find(|m| m.space() != space) {
            return Err(Error::InvalidIfs(format!(
                "map `{}` lives on {:?}, expected {:?}",
                m.label(),
                m.space(),
                space
            )));
        }
        Ok(Self { space, maps })
    }

    pub fn single<M: SmoothMap + 'static>(map: M) -> Self {
        Self::new(vec![Arc::new(map)]).expect("one map is a valid IFS")
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn map(&self, symbol: usize) -> &MapRef {
        &self.maps[symbol]
    }

    pub fn maps(&self) -> &[MapRef] {
        &self.maps
    }

    pub fn is_invertible(&self) -> bool {
        self.maps.iter().all(|m| m.is_invertible())
    }

    pub fn has_jacobians(&self) -> bool {
        self.maps.iter().all(|m| m.has_jacobian())
    }

    /// Whether both families consist of the same maps in the same order.
    pub fn same_as(&self, other: &Ifs) -> bool {
        self.len() == other.len()
            && self
                .maps
                .iter()
                .zip(&other.maps)
                .all(|(a, b)| Arc::ptr_eq(a, b) || a.label() == b.label())
    }
}

/// How a symbol sequence continues outside its explicit window.
#[derive(Debug, Clone, PartialEq)]
pub enum Extension {
    Constant(usize),
    /// Repeats the window with period `window.len()`.
    Periodic,
    /// Defers to another sequence.
    Fallback(Box<SymbolSequence>),
}

/// A two-sided symbol sequence stored as a finite window plus an extension rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    start: i64,
    window: Vec<usize>,
    extension: Extension,
}

impl SymbolSequence {
    pub fn new(start: i64, window: Vec<usize>, extension: Extension) -> Result<Self> {
        if window.is_empty() && extension == Extension::Periodic {
            return Err(Error::InvalidSequence("a periodic sequence needs a nonempty window".into()));
        }
        Ok(Self { start, window, extension })
    }

    pub fn constant(symbol: usize) -> Self {
        Self { start: 0, window: vec![symbol], extension: Extension::Constant(symbol) }
    }

    pub fn periodic(window: Vec<usize>) -> Result<Self> {
        Self::new(0, window, Extension::Periodic)
    }

    /// Random window of length `len` over `0..n_symbols`, repeated periodically.
    pub fn random<R: rand::Rng>(n_symbols: usize, len: usize, rng: &mut R) -> Result<Self> {
        if n_symbols == 0 {
            return Err(Error::InvalidSequence("no symbols to draw from".into()));
        }
        Self::periodic((0..len.max(1)).map(|_| rng.random_range(0..n_symbols)).collect())
    }

    /// This sequence with the symbols at `start..start + symbols.len()` replaced.
    pub fn overlay(&self, start: i64, symbols: Vec<usize>) -> Self {
        Self { start, window: symbols, extension: Extension::Fallback(Box::new(self.clone())) }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn extension(&self) -> &Extension {
        &self.extension
    }

    pub fn lookup(&self, k: i64) -> usize {
        let offset = k - self.start;
        if offset >= 0 && (offset as usize) < self.window.len() {
            return self.window[offset as usize];
        }
        match &self.extension {
            Extension::Constant(s) => *s,
            Extension::Periodic => self.window[offset.rem_euclid(self.window.len() as i64) as usize],
            Extension::Fallback(inner) => inner.lookup(k),
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.extension {
            Extension::Constant(s) => self.window.iter().all(|w| w == s),
            Extension::Periodic => self.window.iter().all(|w| *w == self.window[0]),
            Extension::Fallback(inner) => {
                inner.is_constant() && self.window.iter().all(|w| *w == inner.lookup(self.start))
            }
        }
    }

    pub fn max_symbol(&self) -> usize {
        let ext = match &self.extension {
            Extension::Constant(s) => *s,
            Extension::Periodic => 0,
            Extension::Fallback(inner) => inner.max_symbol(),
        };
        self.window.iter().copied().fold(ext, usize::max)
    }

    /// Checks every symbol indexes into an IFS with `n_maps` maps.
    pub fn check(&self, n_maps: usize) -> Result<()> {
        let m = self.max_symbol();
        if m >= n_maps {
            return Err(Error::InvalidSequence(format!("symbol {m} out of range for {n_maps} maps")));
        }
        Ok(())
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.extension {
            Extension::Constant(c) if self.window.iter().all(|w| w == c) => write!(f, "constant:{c}"),
            Extension::Constant(c) => write!(f, "window@{}{:?},constant:{c}", self.start, self.window),
            Extension::Periodic => write!(f, "periodic@{}{:?}", self.start, self.window),
            Extension::Fallback(inner) => write!(f, "window@{}{:?},then:{inner}", self.start, self.window),
        }
    }
}

/// `O(k)(x)`: `O(0) = id`, `O(k) = f_{s(k-1)} ∘ … ∘ f_{s(0)}` for `k > 0`, and
/// `O(-k) = f_{s(-k)}^{-1} ∘ … ∘ f_{s(-1)}^{-1}` for `k > 0`.
pub fn orbit_map(ifs: &Ifs, sigma: &SymbolSequence, k: i64, x: &SpacePoint) -> Result<SpacePoint> {
    ifs.space().check(x)?;
    sigma.check(ifs.len())?;
    let mut y = x.clone();
    if k >= 0 {
        for j in 0..k {
            y = ifs.map(sigma.lookup(j)).eval(&y);
        }
    } else {
        for j in (k..0).rev() {
            let m = ifs.map(sigma.lookup(j));
            if !m.is_invertible() {
                return Err(Error::NotInvertible { label: m.label() });
            }
            y = m.invert(&y)?;
        }
    }
    Ok(y)
}

/// `O(k)(x)` for every `k` in `lo..=hi` (with `lo <= 0 <= hi`), index 0 first at `-lo`.
pub fn orbit_window(ifs: &Ifs, sigma: &SymbolSequence, x: &SpacePoint, lo: i64, hi: i64) -> Result<Vec<SpacePoint>> {
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidParameter(format!("window {lo}..={hi} must contain 0")));
    }
    ifs.space().check(x)?;
    sigma.check(ifs.len())?;
    let mut back = Vec::with_capacity((-lo) as usize);
    let mut y = x.clone();
    for j in (lo..0).rev() {
        let m = ifs.map(sigma.lookup(j));
        if !m.is_invertible() {
            return Err(Error::NotInvertible { label: m.label() });
        }
        y = m.invert(&y)?;
        back.push(y.clone());
    }
    back.reverse();
    let mut out = back;
    let mut y = x.clone();
    out.push(y.clone());
    for j in 0..hi {
        y = ifs.map(sigma.lookup(j)).eval(&y);
        out.push(y.clone());
    }
    Ok(out)
}
