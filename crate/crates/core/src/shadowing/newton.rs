use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ShadowResult, Solver};
use crate::chain::ChainRecord;
use crate::error::{Error, Result};
use crate::ifs::{Ifs, SymbolSequence};
use crate::space::SpacePoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Stop once the largest link residual is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    /// Best iterate found.
    pub points: Vec<SpacePoint>,
    pub iterations: usize,
    /// Largest link residual of `points`.
    pub residual: f64,
    pub converged: bool,
}

struct Links {
    residuals: Vec<DVector<f64>>,
    max: f64,
}

fn links(ifs: &Ifs, sigma: &SymbolSequence, start: i64, y: &[SpacePoint]) -> Links {
    let space = ifs.space();
    let residuals: Vec<DVector<f64>> = y
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let image = ifs.map(sigma.lookup(start + i as i64)).eval(&w[0]);
            DVector::from_vec(space.displacement(&image, &w[1]))
        })
        .collect();
    let max = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Links { residuals, max }
}

fn spd_solve(m: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    match m.clone().cholesky() {
        Some(ch) => Some(ch.solve(b)),
        None => m.clone().lu().solve(b),
    }
}

/// Solves `(J Jᵀ) w = r` for the chain Jacobian `J` with blocks `[−D_k, I]`.
///
/// `J Jᵀ` is block tridiagonal with diagonal `D_k D_kᵀ + I` and off-diagonal
/// `−D_{k+1}ᵀ` above, so the block Thomas algorithm solves it in one sweep.
fn solve_normal(d_blocks: &[DMatrix<f64>], r: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
    let m = r.len();
    let d = r[0].len();
    let eye = DMatrix::<f64>::identity(d, d);
    let upper = |k: usize| -d_blocks[k + 1].transpose();
    let mut diag: Vec<DMatrix<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<DMatrix<f64>> = Vec::with_capacity(m);
    for k in 0..m {
        let a = &d_blocks[k] * d_blocks[k].transpose() + &eye;
        let rk = DMatrix::from_column_slice(d, 1, r[k].as_slice());
        if k == 0 {
            diag.push(a);
            rhs.push(rk);
        } else {
            let b = upper(k - 1);
            let x = spd_solve(&diag[k - 1], &b)?;
            let y = spd_solve(&diag[k - 1], &rhs[k - 1])?;
            diag.push(a - b.transpose() * x);
            rhs.push(rk - b.transpose() * y);
        }
    }
    let mut w = vec![DVector::zeros(d); m];
    for k in (0..m).rev() {
        let mut rk = rhs[k].clone();
        if k + 1 < m {
            rk -= upper(k) * &w[k + 1];
        }
        w[k] = spd_solve(&diag[k], &rk)?.column(0).into_owned();
    }
    Some(w)
}

/// Gauss–Newton with minimum-norm steps on the lifted link residuals
/// `y_{k+1} − f_{σ(k)}(y_k)`, starting from `init` at index `start`.
pub fn refine(
    ifs: &Ifs,
    sigma: &SymbolSequence,
    start: i64,
    init: Vec<SpacePoint>,
    opts: &NewtonOptions,
) -> Result<NewtonOutcome> {
    if !ifs.has_jacobians() {
        let m = ifs.maps().iter().find(|m| !m.has_jacobian()).expect("some map lacks a Jacobian");
        return Err(Error::MissingJacobian { label: m.label() });
    }
    sigma.check(ifs.len())?;
    let space = ifs.space();
    init.iter().try_for_each(|p| space.check(p))?;
    let mut y = init;
    let mut current = links(ifs, sigma, start, &y);
    for it in 0..=opts.max_iter {
        if current.max <= opts.tol || y.len() < 2 {
            return Ok(NewtonOutcome { points: y, iterations: it, residual: current.max, converged: true });
        }
        if it == opts.max_iter {
            break;
        }
        let jac: Vec<DMatrix<f64>> = y[..y.len() - 1]
            .iter()
            .enumerate()
            .map(|(i, p)| ifs.map(sigma.lookup(start + i as i64)).jacobian(p).expect("checked above"))
            .collect();
        let Some(w) = solve_normal(&jac, &current.residuals) else {
            break;
        };
        let m = w.len();
        let step: Vec<DVector<f64>> = (0..=m)
            .map(|j| {
                let mut s = DVector::zeros(space.dim());
                if j > 0 {
                    s -= &w[j - 1];
                }
                if j < m {
                    s += jac[j].transpose() * &w[j];
                }
                s
            })
            .collect();
        // halve the step while it makes things worse
        let mut t = 1.0;
        loop {
            let trial: Vec<SpacePoint> =
                y.iter().zip(&step).map(|(p, s)| space.translate(p, (s * t).as_slice())).collect();
            let next = links(ifs, sigma, start, &trial);
            if next.max < current.max || t < 1.0 / 64.0 {
                y = trial;
                current = next;
                break;
            }
            t *= 0.5;
        }
    }
    Ok(NewtonOutcome { points: y, iterations: opts.max_iter, residual: current.max, converged: false })
}

/// Shadows `xi` by Gauss–Newton started at `xi` itself.
pub fn shadow_newton(ifs: &Ifs, xi: &ChainRecord, tol: f64, max_iter: usize) -> Result<ShadowResult> {
    let out = refine(ifs, &xi.sigma, xi.start, xi.points.clone(), &NewtonOptions { tol, max_iter })?;
    if !out.converged {
        return Err(Error::NoConvergence { iterations: out.iterations, residual: out.residual });
    }
    ShadowResult::assemble(ifs, xi, out.points, Solver::Newton, out.iterations, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{gen_pseudo_orbit, NoiseModel};
    use crate::maps::{AffineMap, Coupling, MapRef, TorusSkewMap};
    use crate::shadowing::shadow_linear_hyperbolic;
    use std::sync::Arc;

    #[test]
    fn block_solver_matches_dense() {
        let d_blocks: Vec<DMatrix<f64>> = (0..4)
            .map(|k| DMatrix::from_fn(2, 2, |i, j| ((k * 7 + i * 3 + j) % 5) as f64 * 0.3 - 0.4))
            .collect();
        let r: Vec<DVector<f64>> = (0..4).map(|k| DVector::from_vec(vec![k as f64 * 0.1, 1.0 - k as f64])).collect();
        // dense J with rows [−D_k, I]
        let mut j = DMatrix::zeros(8, 10);
        for k in 0..4 {
            j.view_mut((2 * k, 2 * k), (2, 2)).copy_from(&(-&d_blocks[k]));
            j.view_mut((2 * k, 2 * k + 2), (2, 2)).copy_from(&DMatrix::identity(2, 2));
        }
        let rr = DVector::from_iterator(8, r.iter().flat_map(|v| v.iter().copied()));
        let dense = (&j * j.transpose()).lu().solve(&rr).unwrap();
        let w = solve_normal(&d_blocks, &r).unwrap();
        for k in 0..4 {
            for i in 0..2 {
                assert!((w[k][i] - dense[2 * k + i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_chain_needs_no_iteration() {
        let f = Ifs::single(AffineMap::cat());
        let s = SymbolSequence::constant(0);
        let xi = gen_pseudo_orbit(&f, &s, &SpacePoint::new(vec![0.1, 0.2]), 0.0, 30, NoiseModel::UniformBall, 0)
            .unwrap();
        let r = shadow_newton(&f, &xi, 1e-12, 20).unwrap();
        assert!(r.iterations <= 1);
        assert!(r.sup_dist <= 1e-12);
    }

    #[test]
    fn agrees_with_the_linear_solver() {
        let f = Ifs::single(AffineMap::cat());
        let s = SymbolSequence::constant(0);
        let xi = gen_pseudo_orbit(&f, &s, &SpacePoint::new(vec![0.1, 0.2]), 1e-3, 500, NoiseModel::UniformBall, 5)
            .unwrap();
        let a = shadow_newton(&f, &xi, 1e-13, 20).unwrap();
        let b = shadow_linear_hyperbolic(&f, &xi).unwrap();
        let gap = a.shadow.points.iter().zip(&b.shadow.points).map(|(p, q)| f.space().dist(p, q)).fold(0.0, f64::max);
        assert!(gap < 1e-8, "{gap}");
    }

    #[test]
    fn torus_example_converges() {
        let f = Ifs::new(vec![
            Arc::new(TorusSkewMap::new(Coupling::Sum)) as MapRef,
            Arc::new(TorusSkewMap::new(Coupling::Difference)),
        ])
        .unwrap();
        let s = SymbolSequence::periodic(vec![0, 1]).unwrap();
        let x0 = SpacePoint::new(vec![0.11, 0.23, 0.37, 0.41]);
        let xi = gen_pseudo_orbit(&f, &s, &x0, 1e-4, 200, NoiseModel::UniformBall, 42).unwrap();
        let r = shadow_newton(&f, &xi, 1e-12, 50).unwrap();
        assert!(r.residual <= 1e-10);
        assert!(r.sup_dist < 1e-3, "{}", r.sup_dist);
    }

    #[test]
    fn reports_non_convergence() {
        let f = Ifs::single(AffineMap::cat());
        let s = SymbolSequence::constant(0);
        let xi = gen_pseudo_orbit(&f, &s, &SpacePoint::new(vec![0.1, 0.2]), 1e-3, 50, NoiseModel::UniformBall, 1)
            .unwrap();
        assert!(matches!(shadow_newton(&f, &xi, 1e-12, 0), Err(Error::NoConvergence { .. })));
    }
}
