//! The `ifsshadow` command line.
//!
//! Every command prints (or writes with `--out`) one JSON document holding the
//! effective configuration and the result. Point streams go to `--csv`.
//! Exit status is 0 on success, 1 when a mathematical check or construction
//! fails, and 2 on bad input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::SystemSpec;
use crate::chain::{gen_pseudo_orbit, seeded_rng, validate_chain, ChainRecord, NoiseModel, EXACT_CHAIN_TOL};
use crate::config::parse_sigma;
use crate::error::{Error, Result};
use crate::expansive::{estimate_N_of_mu, estimate_expansive_const, separation_time};
use crate::ifs::{Ifs, SymbolSequence};
use crate::io::{chain_csv, cover_csv, read_chain_csv, semiconj_csv, to_json, write_atomic};
use crate::metrics::{dist_d0, dist_d1, rho0, rho1, PairingMode};
use crate::perturb::{
    audit_bump, build_semiconj, bump_perturbation, check_ball_cover, dense_cover_oracle, move_points_diffeo,
    perturbed_ifs, random_pairs, semiconj_residual,
};
use crate::shadowing::{check_uniqueness, shadow, verify_shadowing, NewtonOptions, Solver};
use crate::space::{MetricGrid, SpacePoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ifsshadow", version, about = "Shadowing and stability experiments for iterated function systems")]
pub struct Cli {
    /// Worker threads; falls back to IFSSHADOW_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result JSON here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Generate a seeded pseudo-orbit.
    Generate(GenerateArgs),
    /// Shadow a pseudo-orbit by a true chain.
    Shadow(ShadowArgs),
    /// Check that one chain shadows another, optionally testing uniqueness.
    Verify(VerifyArgs),
    /// Estimate an expansiveness constant.
    Expansive(ExpansiveArgs),
    /// Separation time of a pair, or the uniform separation time N(mu).
    Septime(SeptimeArgs),
    /// Perturb an IFS so that it carries an exact chain near a pseudo-orbit.
    Perturb(PerturbArgs),
    /// Build a diffeomorphism moving prescribed points.
    Movepoints(MovepointsArgs),
    /// Sample the semi-conjugacy from a perturbed system to the original.
    Semiconj(SemiconjArgs),
    /// Test the ball inclusion B(F(X), eps+delta) within F(B(X, eps)).
    Cover(CoverArgs),
    /// Distances between maps and between systems.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct ChainArgs {
    /// Built-in system name or IFS JSON file.
    #[arg(long)]
    pub system: String,
    /// constant:c, periodic:a,b,..., random:len or a JSON file.
    #[arg(long, default_value = "constant:0")]
    pub sigma: String,
    /// Starting point as comma-separated coordinates; drawn from the seed if absent.
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub len: usize,
    /// uniform or round:<decimals>.
    #[arg(long, default_value = "uniform")]
    pub noise: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Chain CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ShadowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Read the pseudo-orbit from this CSV instead of generating it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// auto, contraction, hyperbolic or newton.
    #[arg(long, default_value = "auto")]
    pub solver: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Shadow CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub system: String,
    /// The pseudo-orbit.
    #[arg(long)]
    pub chain: PathBuf,
    /// The candidate shadow.
    #[arg(long)]
    pub shadow: PathBuf,
    #[arg(long)]
    pub eps: f64,
    /// Largest link residual of an exact chain.
    #[arg(long, default_value_t = EXACT_CHAIN_TOL)]
    pub tol: f64,
    /// Multi-start trials for the uniqueness test; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpansiveArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, default_value = "constant:0")]
    pub sigma: String,
    /// Comma-separated values of Delta to test.
    #[arg(long, default_value = "0.2,0.1,0.05,0.02,0.01")]
    pub deltas: String,
    /// Grid points per axis; the default depends on the dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub pair_tol: f64,
    #[arg(long, default_value_t = 60)]
    pub n_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SeptimeArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, default_value = "constant:0")]
    pub sigma: String,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Compute N(mu) over a grid instead of a single pair.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 60)]
    pub n_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PerturbArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Last index of the window carried by the exact chain.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// Bound on the distance between the systems.
    #[arg(long = "big-delta", default_value_t = 0.05)]
    pub big_delta: f64,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub forward: usize,
    #[arg(long, default_value_t = 0)]
    pub backward: usize,
    /// Exact chain CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MovepointsArgs {
    /// Space dimension for random pairs.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Explicit pairs `p;q` joined by `|`, e.g. `0.3,0.3;0.31,0.3|0.7,0.1;0.7,0.11`.
    #[arg(long)]
    pub pairs: Option<String>,
    /// Number of random pairs when `--pairs` is absent.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Minimum separation of random centers.
    #[arg(long, default_value_t = 0.2)]
    pub min_sep: f64,
    #[arg(long, default_value_t = 0.02)]
    pub delta: f64,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SemiconjArgs {
    /// The original system.
    #[arg(long)]
    pub f: String,
    /// The perturbed system; if absent, a bump perturbation of F at `--d0`.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub d0: f64,
    #[arg(long, default_value = "constant:0")]
    pub sigma: String,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Orbit half-length.
    #[arg(long = "horizon", short = 'K', default_value_t = 20)]
    pub horizon: usize,
    /// Grid for the distance between the systems.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Grid for the image gap; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub gap_grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Table of (x, h(x), residual).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub system: String,
    /// Which map of the system.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub centers: usize,
    #[arg(long, default_value_t = 1000)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run the dense oracle on this many of the first centers.
    #[arg(long, default_value_t = 0)]
    pub oracle_centers: usize,
    #[arg(long, default_value_t = 26)]
    pub oracle_per_axis: usize,
    /// Counterexample CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MetricsArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    /// rho0, rho1, D0 or D1.
    #[arg(long, default_value = "D0")]
    pub metric: String,
    #[arg(long)]
    pub grid: Option<usize>,
    /// matched or all-pairs, for D0 and D1.
    #[arg(long, default_value = "matched")]
    pub pairing: String,
    /// Map indices compared by rho0 and rho1.
    #[arg(long, default_value = "0,0")]
    pub index: String,
}

fn system(s: &str) -> Result<Ifs> {
    s.parse::<SystemSpec>()?.build()
}

fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("'{t}' is not a number"))))
        .collect()
}

fn point(ifs: &Ifs, s: &str) -> Result<SpacePoint> {
    let p = ifs.space().point(floats(s)?);
    if p.dim() != ifs.dim() {
        return Err(Error::DimensionMismatch { expected: ifs.dim(), got: p.dim() });
    }
    Ok(p)
}

fn grid_for(ifs: &Ifs, resolution: Option<usize>) -> Result<MetricGrid> {
    match resolution {
        Some(r) => MetricGrid::new(ifs.space(), r),
        None => Ok(MetricGrid::default_for(ifs.space())),
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be nonnegative")))
    }
}

/// The pseudo-orbit described by `args`, with its system and symbols.
pub fn make_chain(args: &ChainArgs) -> Result<(Ifs, SymbolSequence, ChainRecord)> {
    nonnegative("delta", args.delta)?;
    let ifs = system(&args.system)?;
    let sigma = parse_sigma(&args.sigma, ifs.len(), args.seed)?;
    let x0 = match &args.x0 {
        Some(s) => point(&ifs, s)?,
        None => {
            let mut rng = seeded_rng(args.seed);
            rng.set_stream(u64::MAX);
            ifs.space().point((0..ifs.dim()).map(|_| rng.random::<f64>()).collect())
        }
    };
    let noise: NoiseModel = args.noise.parse()?;
    let xi = gen_pseudo_orbit(&ifs, &sigma, &x0, args.delta, args.len, noise, args.seed)?;
    Ok((ifs, sigma, xi))
}

fn write_csv(path: &Option<PathBuf>, bytes: Result<Vec<u8>>) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, &bytes?),
        None => Ok(()),
    }
}

/// A finished command: its result document and whether its checks passed.
struct Outcome {
    result: Value,
    ok: bool,
}

fn generate(a: &GenerateArgs) -> Result<Outcome> {
    let (ifs, _, xi) = make_chain(&a.chain)?;
    let v = validate_chain(&ifs, &xi, a.chain.delta)?;
    write_csv(&a.csv, chain_csv(&xi))?;
    Ok(Outcome {
        result: json!({
            "len": xi.len(),
            "x0": xi.points[0],
            "measured_delta": v.is_delta_chain_for,
            "worst_k": v.worst_k,
        }),
        ok: true,
    })
}

fn shadow_cmd(a: &ShadowArgs) -> Result<Outcome> {
    let (ifs, xi) = match &a.input {
        Some(path) => {
            let ifs = system(&a.chain.system)?;
            let xi = read_chain_csv(path, ifs.space())?;
            (ifs, xi)
        }
        None => {
            let (ifs, _, xi) = make_chain(&a.chain)?;
            (ifs, xi)
        }
    };
    let solver: Solver = a.solver.parse()?;
    let opts = NewtonOptions { tol: a.tol, max_iter: a.max_iter };
    let measured = validate_chain(&ifs, &xi, 0.0)?.is_delta_chain_for;
    let r = shadow(&ifs, &xi, solver, &opts)?;
    write_csv(&a.csv, chain_csv(&r.shadow))?;
    let ok = r.residual <= EXACT_CHAIN_TOL;
    let mut result = serde_json::to_value(r.summary())?;
    result["measured_delta"] = json!(measured);
    result["exact"] = json!(ok);
    Ok(Outcome { result, ok })
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    nonnegative("eps", a.eps)?;
    let ifs = system(&a.system)?;
    let xi = read_chain_csv(&a.chain, ifs.space())?;
    let y = read_chain_csv(&a.shadow, ifs.space())?;
    let verdict = verify_shadowing(&ifs, &xi, &y, a.eps, a.tol)?;
    let mut result = json!({ "verdict": verdict });
    let mut ok = verdict.holds;
    if a.trials > 0 {
        let u = check_uniqueness(&ifs, &xi.sigma, &xi, a.eps, a.trials, a.seed, &NewtonOptions::default())?;
        result["uniqueness"] = serde_json::to_value(&u)?;
        ok &= u.verdict != crate::shadowing::UniquenessVerdict::Inconclusive;
    }
    Ok(Outcome { result, ok })
}

fn expansive(a: &ExpansiveArgs) -> Result<Outcome> {
    let ifs = system(&a.system)?;
    let sigma = parse_sigma(&a.sigma, ifs.len(), a.seed)?;
    let deltas = floats(&a.deltas)?;
    for d in &deltas {
        nonnegative("Delta", *d)?;
    }
    let report = estimate_expansive_const(&ifs, &sigma, &grid_for(&ifs, a.grid)?, a.pair_tol, a.n_cap, &deltas)?;
    Ok(Outcome { result: serde_json::to_value(&report)?, ok: true })
}

fn septime(a: &SeptimeArgs) -> Result<Outcome> {
    nonnegative("eta", a.eta)?;
    let ifs = system(&a.system)?;
    let sigma = parse_sigma(&a.sigma, ifs.len(), a.seed)?;
    let result = match (a.mu, &a.x, &a.y) {
        (Some(mu), _, _) => {
            nonnegative("mu", mu)?;
            let n = estimate_N_of_mu(&ifs, &sigma, a.eta, mu, &grid_for(&ifs, a.grid)?, a.n_cap)?;
            json!({ "N": n })
        }
        (None, Some(x), Some(y)) => {
            let t = separation_time(&ifs, &sigma, &point(&ifs, x)?, &point(&ifs, y)?, a.eta, a.n_cap)?;
            json!({ "separation": t, "steps": t.steps() })
        }
        _ => return Err(Error::InvalidParameter("give --mu, or both --x and --y".into())),
    };
    Ok(Outcome { result, ok: true })
}

fn perturb(a: &PerturbArgs) -> Result<Outcome> {
    nonnegative("Delta", a.big_delta)?;
    let (ifs, sigma, xi) = make_chain(&a.chain)?;
    if a.m >= xi.len() {
        return Err(Error::InvalidParameter(format!("m = {} must be below the chain length {}", a.m, xi.len())));
    }
    let grid = grid_for(&ifs, a.grid)?;
    let p = perturbed_ifs(&ifs, &xi, &sigma, a.m, a.big_delta, &grid, a.forward, a.backward)?;
    let exact = validate_chain(&p.ifs, &p.chain, EXACT_CHAIN_TOL)?;
    write_csv(&a.csv, chain_csv(&p.chain))?;
    let ok = exact.is_exact_chain && p.d0_matched < a.big_delta && p.max_dist < a.big_delta;
    Ok(Outcome {
        result: json!({
            "admissible_delta": p.admissible_delta,
            "d0_matched": p.d0_matched,
            "max_dist": p.max_dist,
            "chain_residual": exact.is_delta_chain_for,
            "exact": exact.is_exact_chain,
            "adjusted": p.adjusted,
            "support_radius": p.bump.support_radius(),
            "holds": ok,
        }),
        ok,
    })
}

fn parse_pairs(s: &str) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    s.split('|')
        .map(|pair| {
            let (p, q) = pair
                .split_once(';')
                .ok_or_else(|| Error::Parse(format!("pair '{pair}' must look like p;q")))?;
            Ok((floats(p)?, floats(q)?))
        })
        .collect()
}

fn movepoints(a: &MovepointsArgs) -> Result<Outcome> {
    nonnegative("delta", a.delta)?;
    let space = crate::space::Space::Torus(a.dim);
    let pairs = match &a.pairs {
        Some(s) => parse_pairs(s)?
            .into_iter()
            .map(|(p, q)| {
                if p.len() != a.dim || q.len() != a.dim {
                    return Err(Error::DimensionMismatch { expected: a.dim, got: p.len().max(q.len()) });
                }
                Ok((space.point(p), space.point(q)))
            })
            .collect::<Result<Vec<_>>>()?,
        None => random_pairs(space, a.count, a.min_sep, a.delta / 2.0, a.seed)?,
    };
    let bump = move_points_diffeo(space, &pairs, a.delta)?;
    let grid = match a.grid {
        Some(r) => MetricGrid::new(space, r)?,
        None => MetricGrid::default_for(space),
    };
    let audit = audit_bump(&bump, &pairs, &grid)?;
    let ok = audit.interpolation_error <= 1e-12 && audit.rho0_to_identity < 2.0 * a.delta && audit.round_trip <= 1e-10;
    Ok(Outcome {
        result: json!({
            "pairs": pairs,
            "support_radius": bump.support_radius(),
            "audit": audit,
            "holds": ok,
        }),
        ok,
    })
}

fn semiconj(a: &SemiconjArgs) -> Result<Outcome> {
    nonnegative("eps", a.eps)?;
    let f = system(&a.f)?;
    let grid = grid_for(&f, a.grid)?;
    let (g, d0) = match &a.g {
        Some(s) => {
            let g = system(s)?;
            let d0 = dist_d0(&f, &g, &grid, PairingMode::Matched)?;
            (g, d0)
        }
        None => {
            let mut rng = seeded_rng(a.seed);
            rng.set_stream(u64::MAX - 1);
            let center = f.space().point((0..f.dim()).map(|_| rng.random::<f64>()).collect());
            let mut dir = vec![0.0; f.dim()];
            dir[0] = 1.0;
            bump_perturbation(&f, &center, &dir, 0.2, a.d0, &grid)?
        }
    };
    let sigma = parse_sigma(&a.sigma, f.len(), a.seed)?;
    let mut rng = seeded_rng(a.seed);
    let samples: Vec<SpacePoint> =
        (0..a.samples).map(|_| f.space().point((0..f.dim()).map(|_| rng.random::<f64>()).collect())).collect();
    let h = build_semiconj(&f, &g, &sigma, a.eps, &samples, a.horizon, true, &NewtonOptions::default())?;
    let residual = semiconj_residual(&f, &g, &sigma, &h, a.horizon)?;
    let prim = h.primary_samples();
    let failed = prim.iter().filter(|s| s.hx.is_none()).count();
    let max_dist = prim.iter().map(|s| s.dist).fold(0.0, f64::max);
    let max_residual = prim.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    let mut result = json!({
        "d0_matched": d0,
        "pairing": h.pairing,
        "solver": h.solver,
        "samples": prim.len(),
        "failed_samples": failed,
        "max_dist": max_dist,
        "max_residual": max_residual,
        "conjugacy_residual": residual,
        "holds": h.holds(),
    });
    if a.gap_grid > 0 {
        result["image_gap"] = json!(h.image_gap(&MetricGrid::new(f.space(), a.gap_grid)?));
    }
    write_csv(&a.csv, semiconj_csv(&h))?;
    let ok = h.holds() && residual < 2.0 * a.eps;
    Ok(Outcome { result, ok })
}

fn cover(a: &CoverArgs) -> Result<Outcome> {
    nonnegative("delta", a.delta)?;
    let ifs = system(&a.system)?;
    if a.index >= ifs.len() {
        return Err(Error::InvalidParameter(format!("map index {} out of range", a.index)));
    }
    let map = ifs.map(a.index).as_ref();
    let report = check_ball_cover(map, a.eps, a.delta, a.centers, a.probes, a.seed)?;
    write_csv(&a.csv, cover_csv(&report, ifs.dim()))?;
    let mut result = json!({
        "pass": report.pass,
        "violating_centers": report.violating_centers,
        "centers": report.centers.len(),
        "probes": report.n_probes,
        "reported_violations": report.violations.len(),
        "seed": report.seed,
    });
    if a.oracle_centers > 0 {
        let n = a.oracle_centers.min(report.centers.len());
        let xs: Vec<SpacePoint> = report.centers[..n].iter().map(|c| c.x.clone()).collect();
        let dense = dense_cover_oracle(map, a.eps, a.delta, &xs, a.oracle_per_axis)?;
        let agree = report.centers[..n]
            .iter()
            .zip(&dense.centers)
            .filter(|(s, d)| (s.violations > 0) == (d.violations > 0))
            .count();
        result["oracle"] = json!({
            "centers": n,
            "probes_per_center": dense.n_probes,
            "violating_centers": dense.violating_centers,
            "agreeing_centers": agree,
        });
    }
    Ok(Outcome { result, ok: true })
}

fn metrics(a: &MetricsArgs) -> Result<Outcome> {
    let f = system(&a.f)?;
    let g = system(&a.g)?;
    let grid = grid_for(&f, a.grid)?;
    let mode: PairingMode = a.pairing.parse()?;
    let value = match a.metric.as_str() {
        "rho0" | "rho1" => {
            let idx = floats(&a.index)?;
            let (i, j) = match idx.as_slice() {
                [i, j] => (*i as usize, *j as usize),
                _ => return Err(Error::Parse(format!("--index wants i,j, got '{}'", a.index))),
            };
            if i >= f.len() || j >= g.len() {
                return Err(Error::InvalidParameter("map index out of range".into()));
            }
            let (fm, gm) = (f.map(i).as_ref(), g.map(j).as_ref());
            if a.metric == "rho0" {
                rho0(fm, gm, &grid)?
            } else {
                rho1(fm, gm, &grid)?
            }
        }
        "D0" => dist_d0(&f, &g, &grid, mode)?,
        "D1" => dist_d1(&f, &g, &grid, mode)?,
        m => return Err(Error::InvalidParameter(format!("unknown metric '{m}'"))),
    };
    Ok(Outcome { result: json!({ "metric": a.metric, "value": value, "resolution": grid.resolution }), ok: true })
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Shadow(a) => shadow_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Expansive(a) => expansive(a),
        Command::Septime(a) => septime(a),
        Command::Perturb(a) => perturb(a),
        Command::Movepoints(a) => movepoints(a),
        Command::Semiconj(a) => semiconj(a),
        Command::Cover(a) => cover(a),
        Command::Metrics(a) => metrics(a),
    }
}

/// Runs a parsed command and returns its JSON document and exit status.
pub fn execute(cmd: &Command) -> (Value, i32) {
    let config = serde_json::to_value(cmd).unwrap_or(Value::Null);
    match dispatch(cmd) {
        Ok(o) => {
            let status = if o.ok { EXIT_OK } else { EXIT_VIOLATION };
            (json!({ "config": config, "ok": o.ok, "result": o.result }), status)
        }
        Err(e) => {
            let status = if e.is_contract_violation() { EXIT_VIOLATION } else { EXIT_CONFIG };
            (json!({ "config": config, "ok": false, "error": e.to_string() }), status)
        }
    }
}

fn threads(requested: Option<usize>) -> Option<usize> {
    requested.or_else(|| std::env::var("IFSSHADOW_THREADS").ok().and_then(|s| s.parse().ok())).filter(|n| *n > 0)
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<()> {
    let bytes = to_json(doc)?;
    match out {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let run = || {
        let (doc, status) = execute(&cli.command);
        if let Some(msg) = doc.get("error").and_then(Value::as_str) {
            eprintln!("error: {msg}");
        }
        match emit(&doc, cli.out.as_deref()) {
            Ok(()) => status,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        }
    };
    match threads(cli.threads) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        None => run(),
    }
}
