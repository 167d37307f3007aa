use nalgebra::{DMatrix, DVector};

use super::{ShadowResult, Solver};
use crate::chain::{validate_chain, ChainRecord};
use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::space::Space;

/// Eigen-decomposition of a hyperbolic matrix with real eigenvalues.
#[derive(Debug, Clone)]
pub struct HyperbolicSplitting {
    eigenvalues: Vec<f64>,
    /// Unit eigenvectors as columns.
    basis: DMatrix<f64>,
    coords: DMatrix<f64>,
}

impl HyperbolicSplitting {
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        let symmetric = (matrix - matrix.transpose()).amax() == 0.0;
        let (eigenvalues, basis) = if symmetric {
            let eig = matrix.clone().symmetric_eigen();
            (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
        } else {
            let values = matrix
                .eigenvalues()
                .ok_or_else(|| Error::Unsupported("complex eigenvalues".into()))?
                .iter()
                .copied()
                .collect::<Vec<_>>();
            let mut basis = DMatrix::zeros(d, d);
            for (i, l) in values.iter().enumerate() {
                let shifted = matrix - DMatrix::identity(d, d) * *l;
                let svd = shifted.svd(false, true);
                let v_t = svd.v_t.expect("requested V^T");
                let j = svd.singular_values.imin();
                basis.set_column(i, &v_t.row(j).transpose().normalize());
            }
            (values, basis)
        };
        if let Some(l) = eigenvalues.iter().find(|l| (l.abs() - 1.0).abs() < 1e-9) {
            return Err(Error::NotHyperbolic { modulus: l.abs() });
        }
        let coords = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Unsupported("eigenvectors do not span the space".into()))?;
        Ok(Self { eigenvalues, basis, coords })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    fn is_stable(&self, i: usize) -> bool {
        self.eigenvalues[i].abs() < 1.0
    }

    /// Largest stable modulus, `λ_s`.
    pub fn lambda_s(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|l| l.abs()).filter(|l| *l < 1.0).reduce(f64::max)
    }

    /// Smallest unstable modulus, `λ_u`.
    pub fn lambda_u(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|l| l.abs()).filter(|l| *l > 1.0).reduce(f64::min)
    }

    /// `1/(1−λ_s) + 1/(λ_u−1)`; a missing direction contributes nothing.
    pub fn bound_factor(&self) -> f64 {
        self.lambda_s().map_or(0.0, |s| 1.0 / (1.0 - s)) + self.lambda_u().map_or(0.0, |u| 1.0 / (u - 1.0))
    }

    /// `e = e_s + e_u` along the stable and unstable eigenspaces.
    pub fn split(&self, e: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c = &self.coords * DVector::from_column_slice(e);
        let d = e.len();
        let (mut s, mut u) = (DVector::zeros(d), DVector::zeros(d));
        for i in 0..d {
            let part = self.basis.column(i) * c[i];
            if self.is_stable(i) {
                s += part;
            } else {
                u += part;
            }
        }
        (s.iter().copied().collect(), u.iter().copied().collect())
    }
}

/// Corrections `c_0, …, c_m` with `c_{k+1} = A c_k − e_k` for link errors
/// `e_0, …, e_{m−1}`.
///
/// Stable coordinates are summed forward from `c_0 = 0` and unstable ones
/// backward from `c_m = 0`. With `min_norm` the free orbit `A^k z` that
/// minimizes `Σ_k |c_k|²` is added, which gives the least-squares solution
/// of the link equations.
pub fn hyperbolic_series(split: &HyperbolicSplitting, errors: &[Vec<f64>], min_norm: bool) -> Vec<Vec<f64>> {
    let d = split.eigenvalues.len();
    let m = errors.len();
    let e: Vec<DVector<f64>> = errors.iter().map(|v| &split.coords * DVector::from_column_slice(v)).collect();
    let mut c = vec![DVector::<f64>::zeros(d); m + 1];
    for i in 0..d {
        let l = split.eigenvalues[i];
        if split.is_stable(i) {
            for k in 0..m {
                c[k + 1][i] = l * c[k][i] - e[k][i];
            }
        } else {
            for k in (0..m).rev() {
                c[k][i] = (c[k + 1][i] + e[k][i]) / l;
            }
        }
    }
    if min_norm && m > 0 {
        let scale = |i: usize, k: usize| {
            let l = split.eigenvalues[i];
            if split.is_stable(i) { l.powi(k as i32) } else { l.powi(k as i32 - m as i32) }
        };
        let gram_v = split.basis.transpose() * &split.basis;
        let mut gram = DMatrix::<f64>::zeros(d, d);
        let mut rhs = DVector::<f64>::zeros(d);
        for (k, ck) in c.iter().enumerate() {
            let s: Vec<f64> = (0..d).map(|i| scale(i, k)).collect();
            let proj = &gram_v * ck;
            for i in 0..d {
                rhs[i] -= s[i] * proj[i];
                for j in 0..d {
                    gram[(i, j)] += s[i] * s[j] * gram_v[(i, j)];
                }
            }
        }
        if let Some(z) = gram.cholesky().map(|ch| ch.solve(&rhs)) {
            for (k, ck) in c.iter_mut().enumerate() {
                for i in 0..d {
                    ck[i] += z[i] * scale(i, k);
                }
            }
        }
    }
    c.into_iter().map(|v| (&split.basis * v).iter().copied().collect()).collect()
}

/// Shadows a δ-chain of torus maps `x -> A x + b_λ` sharing one hyperbolic `A`.
///
/// The returned chain is the least-squares correction of `xi`; the series
/// bound `δ (1/(1−λ_s) + 1/(λ_u−1))` is reported in `bound`.
pub fn shadow_linear_hyperbolic(ifs: &Ifs, xi: &ChainRecord) -> Result<ShadowResult> {
    let space = ifs.space();
    if !matches!(space, Space::Torus(_)) {
        return Err(Error::Unsupported("the hyperbolic solver works on the torus".into()));
    }
    xi.sigma.check(ifs.len())?;
    let linear_part = |k: i64| {
        let m = ifs.map(xi.sigma.lookup(k));
        m.as_affine()
            .map(|a| a.matrix().clone())
            .ok_or_else(|| Error::Unsupported(format!("`{}` is not affine", m.label())))
    };
    let a = linear_part(xi.start)?;
    for k in xi.start..xi.end() {
        if linear_part(k)? != a {
            return Err(Error::Unsupported("maps along the chain have different linear parts".into()));
        }
    }
    let split = HyperbolicSplitting::new(&a)?;
    let delta = validate_chain(ifs, xi, 0.0)?.is_delta_chain_for;
    let errors: Vec<Vec<f64>> = xi
        .points
        .windows(2)
        .enumerate()
        .map(|(i, w)| space.displacement(&ifs.map(xi.sigma.lookup(xi.start + i as i64)).eval(&w[0]), &w[1]))
        .collect();
    let corrections = hyperbolic_series(&split, &errors, true);
    let points = xi.points.iter().zip(&corrections).map(|(x, c)| space.translate(x, c)).collect();
    ShadowResult::assemble(ifs, xi, points, Solver::Hyperbolic, 1, Some(delta * split.bound_factor()))
}
