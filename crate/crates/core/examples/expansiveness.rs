// Separation times and expansiveness estimates: the cat map against an
// isometry, which never separates nearby points.

use ifs_shadow::catalog::{build_cat_ifs, build_rotation_ifs};
use ifs_shadow::expansive::{estimate_N_of_mu, estimate_expansive_const, separation_time};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::space::{MetricGrid, Space, SpacePoint};

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let sigma = SymbolSequence::constant(0);
    let grid = MetricGrid::new(Space::Torus(2), 8)?;
    let deltas = [0.2, 0.1, 0.05, 0.01];

    let cat = build_cat_ifs();
    let x = SpacePoint::new(vec![0.3, 0.6]);
    let y = SpacePoint::new(vec![0.301, 0.6]);
    println!("cat: separation time at eta = 0.1: {:?}", separation_time(&cat, &sigma, &x, &y, 0.1, 30)?);
    println!("cat: N(mu = 1e-3) = {:?}", estimate_N_of_mu(&cat, &sigma, 0.1, 1e-3, &grid, 30)?);

    let r = estimate_expansive_const(&cat, &sigma, &grid, 1e-2, 30, &deltas)?;
    println!("cat: verdicts {:?}, candidate {:?}", r.verdicts, r.candidate_delta);

    let rot = build_rotation_ifs(&[vec![0.1, 0.3]])?;
    let r = estimate_expansive_const(&rot, &sigma, &grid, 5e-4, 30, &deltas)?;
    println!("rotation: verdicts {:?}, candidate {:?}", r.verdicts, r.candidate_delta);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
