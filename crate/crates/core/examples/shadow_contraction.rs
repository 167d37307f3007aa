// Shadows a noisy chain of the binary contraction {x/2, x/2 + 1/2} on [0, 1].
//
// ```text
// cargo run --example shadow_contraction
// ```

use ifs_shadow::catalog::corner_contractions;
use ifs_shadow::chain::{gen_pseudo_orbit, seeded_rng, NoiseModel};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::shadowing::{contraction_factor, shadow_contraction};
use ifs_shadow::space::SpacePoint;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let ifs = corner_contractions(0.5, 1)?;
    let q = contraction_factor(&ifs)?;
    let delta = 0.01;

    let sigma = SymbolSequence::random(2, 1000, &mut seeded_rng(1))?;
    let xi = gen_pseudo_orbit(&ifs, &sigma, &SpacePoint::new(vec![0.3]), delta, 1000, NoiseModel::UniformBall, 42)?;
    let r = shadow_contraction(&ifs, &xi)?;

    println!("contraction factor q = {q}");
    println!("sup dist = {:.5}, bound delta/(1-q) = {:.5}", r.sup_dist, delta / (1.0 - q));
    println!("shadow link residual = {:.1e}", r.residual);
    assert!(r.sup_dist <= delta / (1.0 - q) + 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
