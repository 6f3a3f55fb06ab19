//! Compressed sparse rows with a fixed pattern, and a sparse LU solver that
//! reuses its symbolic analysis across numeric refactorizations.

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::prelude::*;
use thiserror::Error;

/// Relative residual `‖A x − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞)` a linear solve must
/// reach. This is the normwise backward error, so it stays attainable in
/// floating point when `A` has large entries.
pub const LINEAR_SOLVE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("singular linearization: {0}")]
    Singular(String),
    #[error("linear solve residual {0:.3e} above tolerance")]
    Inaccurate(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Square sparse matrix in CSR layout. Column indices are sorted per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given per-row column pattern.
    pub fn from_pattern(rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for cols in rows {
            let mut cols = cols.clone();
            cols.sort_unstable();
            cols.dedup();
            col_idx.extend(cols);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Position of entry `(i, j)` in the value array, if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        let end = self.row_ptr[i + 1];
        self.col_idx[start..end]
            .binary_search(&j)
            .ok()
            .map(|k| start + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Whether the pattern is structurally symmetric.
    pub fn pattern_is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
                .iter()
                .all(|&j| self.position(j, i).is_some())
        })
    }
}

/// Sparse LU with the symbolic factorization cached for a fixed pattern.
pub struct SparseLuSolver {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    symbolic_csc: SymbolicSparseColMat<usize>,
    /// `csc_values[k] = csr_values[csr_of_csc[k]]`
    csr_of_csc: Vec<usize>,
    symbolic_lu: SymbolicLu<usize>,
}

impl SparseLuSolver {
    /// Analyses the pattern of `matrix` once.
    pub fn new(matrix: &CsrMatrix) -> Result<Self, LinalgError> {
        let n = matrix.n;
        // transpose the pattern: CSC of A is the CSR of Aᵀ
        let mut counts = vec![0usize; n + 1];
        for &j in &matrix.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0usize; matrix.nnz()];
        let mut csr_of_csc = vec![0usize; matrix.nnz()];
        for i in 0..n {
            for p in matrix.row_ptr[i]..matrix.row_ptr[i + 1] {
                let j = matrix.col_idx[p];
                let dest = next[j];
                row_idx[dest] = i;
                csr_of_csc[dest] = p;
                next[j] += 1;
            }
        }
        let symbolic_csc = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let symbolic_lu = SymbolicLu::try_new(symbolic_csc.as_ref())
            .map_err(|e| LinalgError::Singular(format!("symbolic analysis failed: {e:?}")))?;
        Ok(Self {
            n,
            row_ptr: matrix.row_ptr.clone(),
            col_idx: matrix.col_idx.clone(),
            symbolic_csc,
            csr_of_csc,
            symbolic_lu,
        })
    }

    /// Solves `A x = b` for a matrix with the analysed pattern, with a few
    /// steps of iterative refinement until the backward error reaches
    /// [`LINEAR_SOLVE_TOL`].
    pub fn solve(&self, matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if matrix.n != self.n
            || rhs.len() != self.n
            || matrix.row_ptr != self.row_ptr
            || matrix.col_idx != self.col_idx
        {
            return Err(LinalgError::Dimension(
                "matrix pattern differs from the analysed one".into(),
            ));
        }
        let b_norm = max_abs(rhs);
        if b_norm == 0.0 {
            return Ok(vec![0.0; self.n]);
        }
        faer::set_global_parallelism(faer::Par::Seq);
        let values: Vec<f64> = self
            .csr_of_csc
            .iter()
            .map(|&p| matrix.values[p])
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::Singular("non-finite matrix entry".into()));
        }
        let a = SparseColMat::new(self.symbolic_csc.clone(), values);
        let lu = Lu::try_new_with_symbolic(self.symbolic_lu.clone(), a.as_ref())
            .map_err(|e| LinalgError::Singular(format!("{e:?}")))?;

        let a_norm = matrix.norm_inf();
        let mut x = vec![0.0; self.n];
        let mut residual = rhs.to_vec();
        let mut rel = f64::INFINITY;
        for _ in 0..4 {
            let mut col = Mat::<f64>::from_fn(self.n, 1, |i, _| residual[i]);
            lu.solve_in_place(col.as_mut());
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += col[(i, 0)];
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LinalgError::Singular("non-finite solution".into()));
            }
            let ax = matrix.matvec(&x);
            for i in 0..self.n {
                residual[i] = rhs[i] - ax[i];
            }
            rel = max_abs(&residual) / (a_norm * max_abs(&x) + b_norm);
            if rel <= LINEAR_SOLVE_TOL {
                return Ok(x);
            }
        }
        Err(LinalgError::Inaccurate(rel))
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
