use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::{Cholesky, CsrMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Number of eigenpairs wanted.
    pub count: usize,
    /// Extra subspace vectors beyond `count`.
    pub guard: usize,
    /// Relative change of the wanted Ritz values that ends the iteration.
    pub tol: f64,
    pub max_iter: usize,
    /// Vectors the eigenvectors must be `M`-orthogonal to.
    pub deflate: Vec<Vec<f64>>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { count: 1, guard: 7, tol: 1e-11, max_iter: 400, deflate: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (p, q) in y.iter_mut().zip(x) {
        *p += a * q;
    }
}

/// Smallest eigenpairs of the symmetric pencil `K x = λ M x` (`K` positive
/// semidefinite, `M` positive definite) by shift-invert subspace iteration
/// with Rayleigh–Ritz, restricted to the `M`-orthogonal complement of
/// `opts.deflate`.
pub fn lowest_eigenpairs(k: &CsrMatrix, m: &CsrMatrix, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = k.n;
    if m.n != n {
        return Err(Error::Eigen("stiffness and mass sizes differ".into()));
    }
    let free = n.saturating_sub(opts.deflate.len());
    if opts.count == 0 || opts.count > free {
        return Err(Error::Eigen(format!("cannot extract {} pairs from dimension {free}", opts.count)));
    }
    let block = (opts.count + opts.guard).min(free);

    let dk = k.diagonal();
    let dm = m.diagonal();
    let scale = dk.iter().sum::<f64>() / dm.iter().sum::<f64>();
    let shift = 1e-4 * scale.max(f64::MIN_POSITIVE);
    let factor = Cholesky::new(&k.add_scaled(shift, m))
        .map_err(|e| Error::Eigen(format!("shifted factorization: {e}")))?;

    let deflate: Vec<(Vec<f64>, f64)> = opts
        .deflate
        .iter()
        .map(|d| {
            let md = m.matvec(d);
            let norm = dot(d, &md);
            (md, norm)
        })
        .collect();
    let project = |y: &mut Vec<f64>| {
        for (d, (md, norm)) in opts.deflate.iter().zip(&deflate) {
            let c = dot(md, y) / norm;
            axpy(y, -c, d);
        }
    };

    // deterministic, well-spread start vectors
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let s = (i as f64 + 1.0) * (0.618_033_988_749_895 * (j as f64 + 1.0) + 0.1);
                    (s * 12.9898).sin() + 0.5 * ((j + 1) as f64 * 0.01 * i as f64).cos()
                })
                .collect()
        })
        .collect();

    let mut values = vec![f64::INFINITY; block];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let rhs: Vec<Vec<f64>> = x.iter().map(|v| m.matvec(v)).collect();
        let mut y = factor.solve_columns(&rhs);
        for v in &mut y {
            project(v);
        }
        let y = m_orthonormalize(y, m)?;
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.matvec(v)).collect();
        let b = y.len();
        let kq = DMatrix::from_fn(b, b, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = SymmetricEigen::new(kq);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
        let new_values: Vec<f64> = order.iter().map(|&p| eig.eigenvalues[p]).collect();
        x = order
            .iter()
            .map(|&p| {
                let mut v = vec![0.0; n];
                for (r, yr) in y.iter().enumerate() {
                    axpy(&mut v, eig.eigenvectors[(r, p)], yr);
                }
                v
            })
            .collect();
        let done = (0..opts.count).all(|i| {
            let reference = new_values[i].abs().max(shift);
            (new_values[i] - values.get(i).copied().unwrap_or(f64::INFINITY)).abs() <= opts.tol * reference
        });
        values = new_values;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("subspace iteration stopped after {iterations} iterations without converging");
    }
    values.truncate(opts.count);
    x.truncate(opts.count);
    Ok(EigenPairs { values, vectors: x, iterations, converged })
}

fn m_orthonormalize(mut y: Vec<Vec<f64>>, m: &CsrMatrix) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(y.len());
    let mut m_out: Vec<Vec<f64>> = Vec::with_capacity(y.len());
    for v in y.iter_mut() {
        let original = dot(v, &m.matvec(v)).sqrt();
        for _pass in 0..2 {
            for (q, mq) in out.iter().zip(&m_out) {
                let c = dot(mq, v);
                axpy(v, -c, q);
            }
        }
        let mv = m.matvec(v);
        let norm = dot(v, &mv).sqrt();
        if !(norm > 1e-10 * original) {
            continue;
        }
        let inv = 1.0 / norm;
        out.push(v.iter().map(|a| a * inv).collect());
        m_out.push(mv.iter().map(|a| a * inv).collect());
    }
    if out.is_empty() {
        return Err(Error::Eigen("subspace collapsed".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense oracle: all eigenvalues of `L⁻¹ K L⁻ᵀ` with `M = L Lᵀ`.
    fn dense_eigenvalues(k: &CsrMatrix, m: &CsrMatrix) -> Vec<f64> {
        let l = m.to_dense().cholesky().unwrap().l();
        let linv = l.clone().try_inverse().unwrap();
        let a = &linv * k.to_dense() * linv.transpose();
        let a = (&a + a.transpose()) * 0.5;
        let mut v: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn neumann_1d(n: usize) -> (CsrMatrix, CsrMatrix) {
        // P1 on [0, 1] with n elements
        let h = 1.0 / n as f64;
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for e in 0..n {
            for (a, b, kv, mv) in [(e, e, 1.0, 2.0), (e + 1, e + 1, 1.0, 2.0), (e, e + 1, -1.0, 1.0), (e + 1, e, -1.0, 1.0)] {
                kt.push((a, b, kv / h));
                mt.push((a, b, mv * h / 6.0));
            }
        }
        (CsrMatrix::from_triplets(n + 1, &kt), CsrMatrix::from_triplets(n + 1, &mt))
    }

    #[test]
    fn matches_dense_oracle_with_deflated_constants() {
        let (k, m) = neumann_1d(60);
        let dense = dense_eigenvalues(&k, &m);
        assert!(dense[0].abs() < 1e-8);
        let opts = EigenOptions { count: 3, deflate: vec![vec![1.0; 61]], ..Default::default() };
        let pairs = lowest_eigenpairs(&k, &m, &opts).unwrap();
        assert!(pairs.converged);
        for i in 0..3 {
            assert!((pairs.values[i] - dense[i + 1]).abs() < 1e-8 * dense[i + 1], "{i}");
        }
        // continuous value π² for the first Neumann mode
        assert!((pairs.values[0] / std::f64::consts::PI.powi(2) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn null_space_is_found_without_deflation() {
        let (k, m) = neumann_1d(40);
        let pairs = lowest_eigenpairs(&k, &m, &EigenOptions::default()).unwrap();
        assert!(pairs.values[0].abs() < 1e-10);
    }
}
