// Hyperbolic shadowing of a cat-map pseudo-orbit, cross-checked against Gauss-Newton.

use ifs_shadow::catalog::build_cat_ifs;
use ifs_shadow::chain::{gen_pseudo_orbit, NoiseModel};
use ifs_shadow::ifs::SymbolSequence;
use ifs_shadow::shadowing::{shadow_linear_hyperbolic, shadow_newton, HyperbolicSplitting};
use ifs_shadow::space::SpacePoint;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let cat = build_cat_ifs();
    let split = HyperbolicSplitting::new(cat.map(0).as_affine().unwrap().matrix())?;
    println!("eigenvalues {:?}, bound factor {:.4}", split.eigenvalues(), split.bound_factor());

    let sigma = SymbolSequence::constant(0);
    let xi = gen_pseudo_orbit(&cat, &sigma, &SpacePoint::new(vec![0.1, 0.7]), 1e-3, 500, NoiseModel::UniformBall, 3)?;

    let series = shadow_linear_hyperbolic(&cat, &xi)?;
    let newton = shadow_newton(&cat, &xi, 1e-12, 50)?;
    let gap = series
        .shadow
        .points
        .iter()
        .zip(&newton.shadow.points)
        .map(|(a, b)| cat.space().dist(a, b))
        .fold(0.0, f64::max);

    println!("series: sup dist {:.3e} (bound {:.3e})", series.sup_dist, series.bound.unwrap_or(f64::NAN));
    println!("newton: sup dist {:.3e} after {} iterations", newton.sup_dist, newton.iterations);
    println!("largest pointwise gap between solvers {gap:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
