// Newton shadowing for the nonlinear skew products F1 and F2 on the 4-torus,
// driven by an alternating symbol sequence.

use ifs_shadow::catalog::build_torus_example;
use ifs_shadow::chain::{gen_pseudo_orbit, NoiseModel};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::shadowing::{shadow, verify_shadowing, NewtonOptions, Solver};
use ifs_shadow::space::SpacePoint;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let ifs = build_torus_example();
    let sigma = SymbolSequence::periodic(vec![0, 1])?;
    let x0 = SpacePoint::new(vec![0.11, 0.52, 0.33, 0.74]);
    let xi = gen_pseudo_orbit(&ifs, &sigma, &x0, 1e-4, 200, NoiseModel::UniformBall, 9)?;

    let solver = Solver::Auto.resolve(&ifs);
    let r = shadow(&ifs, &xi, solver, &NewtonOptions::default())?;
    let v = verify_shadowing(&ifs, &xi, &r.shadow, 1e-2, 1e-9)?;

    println!("solver {solver}, {} iterations", r.iterations);
    println!("sup dist {:.3e} at k = {}, exact: {}", v.sup_dist, v.worst_k, v.is_exact);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
