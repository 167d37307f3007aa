// Probes whether F(B(x, eps)) contains B(F(x), eps + delta) for a rotation
// and for the skew product F1, and checks a few centres densely.

use ifs_shadow::catalog::torus_f1;
use ifs_shadow::maps::AffineMap;
use ifs_shadow::perturb::{check_ball_cover, dense_cover_oracle};
use ifs_shadow::space::SpacePoint;

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let rot = AffineMap::rotation(vec![0.2, 0.7])?;
    let r = check_ball_cover(&rot, 0.05, 0.0, 100, 200, 1)?;
    println!("rotation, delta = 0: pass {}", r.pass);
    let r = check_ball_cover(&rot, 0.05, 0.05, 100, 200, 1)?;
    println!("rotation, delta = eps: pass {}, {} violating centres", r.pass, r.violating_centers);

    let f1 = torus_f1();
    let r = check_ball_cover(&f1, 0.05, 0.05, 100, 200, 7)?;
    println!("F1: pass {}, {} of 100 centres violate", r.pass, r.violating_centers);
    if let Some(v) = r.violations.first() {
        println!("  e.g. z = {:?} pulls back to distance {:.4} (seed {})", v.z.coords(), v.preimage_dist, r.seed);
    }

    let xs: Vec<SpacePoint> = r.centers[..3].iter().map(|c| c.x.clone()).collect();
    let dense = dense_cover_oracle(&f1, 0.05, 0.05, &xs, 16)?;
    for (s, d) in r.centers.iter().zip(&dense.centers) {
        println!("  centre {:?}: sampled {} / dense {} violations", s.x.coords(), s.violations, d.violations);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
