// Turns a cat-map pseudo-orbit into an exact orbit of a nearby system.

use ifs_shadow::catalog::build_cat_ifs;
use ifs_shadow::chain::{gen_pseudo_orbit, validate_chain, NoiseModel};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::perturb::{adjusted_points, perturbed_ifs};
use ifs_shadow::space::{MetricGrid, SpacePoint};

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let f = build_cat_ifs();
    let sigma = SymbolSequence::constant(0);
    let grid = MetricGrid::default_for(f.space());
    let (m, big_delta) = (10, 0.05);

    let xi = gen_pseudo_orbit(&f, &sigma, &SpacePoint::new(vec![0.4, 0.2]), 1e-3, m + 1, NoiseModel::UniformBall, 8)?;
    let adj = adjusted_points(&f, &xi, m, big_delta)?;
    println!("adjusted points: max move {:.1e}, max link {:.2e}, min separation {:.3}", adj.max_dist, adj.max_link, adj.min_separation);

    let p = perturbed_ifs(&f, &xi, &sigma, m, big_delta, &grid, 5, 5)?;
    let v = validate_chain(&p.ifs, &p.chain, 1e-9)?;
    println!("admissible delta {:.2e}", p.admissible_delta);
    println!("matched D0(F, G) = {:.2e} < {big_delta}", p.d0_matched);
    println!("chain of {} points exact for G: {}", p.chain.len(), v.is_exact_chain);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
