// Builds a diffeomorphism of the 2-torus that moves five points to nearby
// targets and is the identity away from them.

use ifs_shadow::maps::SmoothMap;
use ifs_shadow::perturb::{audit_bump, move_points_diffeo, random_pairs};
use ifs_shadow::space::{MetricGrid, Space};

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let space = Space::Torus(2);
    let delta = 0.02;
    let pairs = random_pairs(space, 5, 0.2, delta, 11)?;
    let f = move_points_diffeo(space, &pairs, delta)?;

    for (p, q) in &pairs {
        let fp = f.eval(p);
        println!("{:?} -> {:?} (target {:?})", p.coords(), fp.coords(), q.coords());
    }
    let audit = audit_bump(&f, &pairs, &MetricGrid::new(space, 128)?)?;
    println!(
        "interpolation {:.1e}, rho0 to identity {:.4} (< {}), round trip {:.1e}",
        audit.interpolation_error,
        audit.rho0_to_identity,
        2.0 * delta,
        audit.round_trip
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
