// Writes a cat-map delta-chain to CSV, reads it back and shadows it.
// Pass a path to keep the file.

use std::path::PathBuf;

use ifs_shadow::catalog::build_cat_ifs;
use ifs_shadow::chain::{gen_pseudo_orbit, NoiseModel};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::io::{chain_csv, read_chain_csv, write_atomic};
use ifs_shadow::shadowing::{shadow, NewtonOptions, Solver};
use ifs_shadow::space::SpacePoint;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    run(None)
}

fn run(keep: Option<PathBuf>) -> ifs_shadow::error::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = keep.unwrap_or_else(|| dir.path().join("chain.csv"));

    let cat = build_cat_ifs();
    let xi = gen_pseudo_orbit(&cat, &SymbolSequence::constant(0), &SpacePoint::new(vec![0.2, 0.3]), 1e-3, 100, NoiseModel::Rounding { decimals: 3 }, 4)?;
    write_atomic(&path, &chain_csv(&xi)?)?;

    let back = read_chain_csv(&path, cat.space())?;
    let r = shadow(&cat, &back, Solver::Auto, &NewtonOptions::default())?;
    println!("{}: {} points, shadowed by {} within {:.2e}", path.display(), back.len(), r.solver, r.sup_dist);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run(std::env::args().nth(1).map(PathBuf::from)).unwrap();
}
