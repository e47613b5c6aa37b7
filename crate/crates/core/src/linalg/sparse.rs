use std::sync::Once;

use faer::sparse::{SparseColMat, Triplet as FaerTriplet};
use faer::{Mat, Side};

use crate::{Error, Result};

/// `(row, col, value)` contribution; duplicates are summed.
pub type Triplet = (usize, usize, f64);

/// Compressed sparse row matrix with sorted, unique column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from triplets. Duplicates are summed in input order, so
    /// the result depends only on the triplet sequence.
    pub fn from_triplets(n: usize, triplets: &[Triplet]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1, k));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 4);
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len() / 4);
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - Aᵀ|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Principal submatrix on `keep` (indices in the new order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    triplets.push((new_i, map[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), &triplets)
    }

    /// `self + s·other` on the union pattern.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            triplets.extend(self.row(i).map(|(j, v)| (i, j, v)));
            triplets.extend(other.row(i).map(|(j, v)| (i, j, s * v)));
        }
        Self::from_triplets(self.n, &triplets)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    fn to_faer_lower(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.nnz() / 2 + self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    t.push(FaerTriplet::new(i, j, v));
                }
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &t)
            .map_err(|e| Error::Solver { reason: format!("sparse conversion: {e:?}"), residual: f64::NAN })
    }
}

static SEQUENTIAL: Once = Once::new();

/// Sparse `LLᵀ` factorization of a symmetric positive definite matrix.
pub struct Cholesky {
    n: usize,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl Cholesky {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        // sequential kernels keep factorizations bitwise reproducible
        SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
        let llt = a.to_faer_lower()?.sp_cholesky(Side::Lower).map_err(|e| Error::Solver {
            reason: format!("Cholesky factorization failed: {e:?}"),
            residual: f64::NAN,
        })?;
        Ok(Self { n: a.n, llt })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = faer::prelude::Solve::solve(&self.llt, &rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Solves for every column of `b` (column-major, `n` rows).
    pub fn solve_columns(&self, b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let rhs = Mat::from_fn(self.n, b.len(), |i, j| b[j][i]);
        let x = faer::prelude::Solve::solve(&self.llt, &rhs);
        (0..b.len()).map(|j| (0..self.n).map(|i| x[(i, j)]).collect()).collect()
    }
}
