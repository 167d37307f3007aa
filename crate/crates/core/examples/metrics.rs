// C0 and C1 distances between maps and between families.

use ifs_shadow::catalog::{build_rotation_ifs, torus_f1, torus_f2};
use ifs_shadow::metrics::{dist_d0, dist_d1, rho0, rho1, PairingMode};
use ifs_shadow::space::{MetricGrid, Space};

pub fn run_example() -> ifs_shadow::error::Result<()> {
    let grid = MetricGrid::new(Space::Torus(4), 12)?;
    let (f1, f2) = (torus_f1(), torus_f2());
    println!("rho0(F1, F2) = {:.4}", rho0(&f1, &f2, &grid)?);
    println!("rho1(F1, F2) = {:.4}", rho1(&f1, &f2, &grid)?);

    let g2 = MetricGrid::new(Space::Torus(2), 64)?;
    let a = build_rotation_ifs(&[vec![0.1, 0.0], vec![0.4, 0.0]])?;
    let b = build_rotation_ifs(&[vec![0.12, 0.0], vec![0.1, 0.0]])?;
    for mode in [PairingMode::Matched, PairingMode::AllPairs] {
        println!("{mode:?}: D0 = {:.3}, D1 = {:.3}", dist_d0(&a, &b, &g2, mode)?, dist_d1(&a, &b, &g2, mode)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
