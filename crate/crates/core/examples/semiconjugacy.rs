// Tabulates a semi-conjugacy between the cat map and a small bump perturbation of it.

use ifs_shadow::catalog::build_cat_ifs;
use ifs_shadow::chain::seeded_rng;
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::perturb::{build_semiconj, bump_perturbation, semiconj_residual};
use ifs_shadow::shadowing::NewtonOptions;
use ifs_shadow::space::{MetricGrid, SpacePoint};
use rand::Rng;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let f = build_cat_ifs();
    let grid = MetricGrid::default_for(f.space());
    let (g, d0) = bump_perturbation(&f, &SpacePoint::new(vec![0.5, 0.5]), &[0.0, 1.0], 0.2, 1e-3, &grid)?;
    println!("perturbation size D0 = {d0:.2e}");

    let mut rng = seeded_rng(3);
    let samples: Vec<SpacePoint> = (0..50).map(|_| SpacePoint::new(vec![rng.random(), rng.random()])).collect();
    let sigma = SymbolSequence::constant(0);
    let h = build_semiconj(&f, &g, &sigma, 0.05, &samples, 20, true, &NewtonOptions::default())?;

    let worst = h.primary_samples().iter().map(|s| s.dist).fold(0.0, f64::max);
    println!("max dist(x, h(x)) = {worst:.2e}, holds: {}", h.holds());
    println!("conjugacy residual = {:.2e}", semiconj_residual(&f, &g, &sigma, &h, 20)?);
    println!("image gap on a 32-grid = {:.3}", h.image_gap(&MetricGrid::new(f.space(), 32)?));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
