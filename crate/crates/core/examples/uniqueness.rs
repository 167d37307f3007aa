// Multi-start shadowing. Inside the expansive radius every start converges
// to the same true orbit; for the identity any fixed point will do.

use ifs_shadow::catalog::build_cat_ifs;
use ifs_shadow::chain::{gen_pseudo_orbit, NoiseModel};
use ifs_shadow::ifs::{Ifs, SymbolSequence};
use ifs_shadow::maps::AffineMap;
use ifs_shadow::shadowing::{check_uniqueness, NewtonOptions};
use ifs_shadow::space::{Space, SpacePoint};

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let sigma = SymbolSequence::constant(0);
    let opts = NewtonOptions::default();
    let x0 = SpacePoint::new(vec![0.25, 0.4]);

    let cat = build_cat_ifs();
    let xi = gen_pseudo_orbit(&cat, &sigma, &x0, 1e-4, 100, NoiseModel::UniformBall, 5)?;
    let u = check_uniqueness(&cat, &sigma, &xi, 0.1, 20, 5, &opts)?;
    println!("cat: {:?} ({} candidates, spread {:.1e})", u.verdict, u.candidates, u.max_disagreement);

    let id = Ifs::single(AffineMap::identity(Space::Torus(2)));
    let xi = gen_pseudo_orbit(&id, &sigma, &x0, 0.0, 50, NoiseModel::UniformBall, 0)?;
    let u = check_uniqueness(&id, &sigma, &xi, 0.1, 20, 5, &opts)?;
    println!("identity: {:?} (spread {:.1e})", u.verdict, u.max_disagreement);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
