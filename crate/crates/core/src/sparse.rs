//! Compressed sparse row matrices and the linear solvers used by the
//! time stepper.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::MatMut;

use crate::error::{Error, Result};

/// Real CSR matrix with sorted, duplicate-free column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    /// Explicit zeros are kept so the sparsity pattern is stable.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for r in 0..nrows {
            counts[r + 1] += counts[r];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut next = counts.clone();
        for &(r, c, v) in triplets {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for r in 0..nrows {
            let (a, b) = (counts[r], counts[r + 1]);
            order.clear();
            order.extend(a..b);
            // stable sort keeps the summation order deterministic
            order.sort_by_key(|&p| cols[p]);
            let mut last = usize::MAX;
            for &p in &order {
                if cols[p] == last {
                    *values.last_mut().unwrap() += vals[p];
                } else {
                    col_idx.push(cols[p]);
                    values.push(vals[p]);
                    last = cols[p];
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), d.len(), &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
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

    /// Iterates `(col, value)` over row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.col_idx[a..b].binary_search(&c) {
            Ok(p) => self.values[a + p],
            Err(_) => 0.0,
        }
    }

    /// Position of entry `(r, c)` in the value array, if stored.
    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].binary_search(&c).ok().map(|p| a + p)
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `y = Aᵀ x`
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            for (c, v) in self.row(r) {
                y[c] += v * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push((c, r, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    /// Returns a copy whose pattern contains every diagonal entry.
    pub fn with_full_diagonal(&self) -> Self {
        let n = self.nrows.min(self.ncols);
        let mut t = Vec::with_capacity(self.nnz() + n);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push((r, c, v));
            }
        }
        t.extend((0..n).map(|i| (i, i, 0.0)));
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// `self * other`
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut acc = vec![0.0; other.ncols];
        let mut seen = vec![usize::MAX; other.ncols];
        let mut cols: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..self.nrows {
            cols.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if seen[c] != r {
                        seen[c] = r;
                        acc[c] = 0.0;
                        cols.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                col_idx.push(c);
                values.push(acc[c]);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// `diag(d) * self`
    pub fn scale_rows(&self, d: &[f64]) -> CsrMatrix {
        assert_eq!(d.len(), self.nrows);
        let mut out = self.clone();
        for r in 0..self.nrows {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.values[p] *= d[r];
            }
        }
        out
    }

    /// `a * self + b * other` on the union pattern.
    pub fn add(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            t.extend(self.row(r).map(|(c, v)| (r, c, a * v)));
            t.extend(other.row(r).map(|(c, v)| (r, c, b * v)));
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let t = self.transpose();
        self.add(1.0, &t, -1.0)
            .values
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut s = vec![0.0; self.ncols];
        for (&c, &v) in self.col_idx.iter().zip(&self.values) {
            s[c] += v.abs();
        }
        s.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    /// Column-compressed pattern of the same matrix and, for every CSC slot,
    /// the corresponding index into [`Self::values`].
    fn csc_layout(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let mut col_ptr = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            col_ptr[c + 1] += 1;
        }
        for c in 0..self.ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0usize; self.nnz()];
        let mut perm = vec![0usize; self.nnz()];
        for r in 0..self.nrows {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[p];
                row_idx[next[c]] = r;
                perm[next[c]] = p;
                next[c] += 1;
            }
        }
        (col_ptr, row_idx, perm)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sparse LU factorization of a fixed sparsity pattern.
///
/// The symbolic analysis is done once; [`Self::refactor`] only redoes the
/// numeric phase for new values on the same pattern.
pub struct SparseLu {
    n: usize,
    symbolic_csc: SymbolicSparseColMat<usize>,
    perm: Vec<usize>,
    symbolic: SymbolicLu<usize>,
    lu: Option<Lu<usize, f64>>,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu")
            .field("n", &self.n)
            .field("factored", &self.lu.is_some())
            .finish()
    }
}

impl SparseLu {
    /// Symbolic analysis of `pattern` (must be square).
    pub fn analyze(pattern: &CsrMatrix) -> Result<Self> {
        if pattern.nrows != pattern.ncols {
            return Err(Error::InvalidArgument("LU needs a square matrix".into()));
        }
        let (col_ptr, row_idx, perm) = pattern.csc_layout();
        let symbolic_csc =
            SymbolicSparseColMat::new_checked(pattern.nrows, pattern.ncols, col_ptr, None, row_idx);
        let symbolic = SymbolicLu::try_new(symbolic_csc.as_ref())
            .map_err(|e| Error::NumericFailure(format!("symbolic LU failed: {e:?}")))?;
        Ok(Self {
            n: pattern.nrows,
            symbolic_csc,
            perm,
            symbolic,
            lu: None,
        })
    }

    /// Numeric factorization of `mat`, which must share the analyzed pattern.
    pub fn refactor(&mut self, mat: &CsrMatrix) -> Result<()> {
        assert_eq!(mat.nnz(), self.perm.len(), "pattern mismatch");
        let vals: Vec<f64> = self.perm.iter().map(|&p| mat.values[p]).collect();
        let csc = SparseColMat::new(self.symbolic_csc.clone(), vals);
        let lu = Lu::try_new_with_symbolic(self.symbolic.clone(), csc.as_ref())
            .map_err(|e| Error::NumericFailure(format!("LU factorization failed: {e:?}")))?;
        self.lu = Some(lu);
        Ok(())
    }

    fn factors(&self) -> &Lu<usize, f64> {
        self.lu
            .as_ref()
            .expect("refactor must be called before solving")
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        self.factors()
            .solve_in_place(MatMut::from_column_major_slice_mut(b, n, 1));
    }

    /// Solves `Aᵀ x = b` in place.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        self.factors()
            .solve_transpose_in_place(MatMut::from_column_major_slice_mut(b, n, 1));
    }
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    /// `‖b − A x‖ / ‖b‖` (or the absolute residual when `b = 0`).
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Restarted GMRES with Jacobi preconditioning (right preconditioned).
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    restart: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = a.nrows();
    let dinv: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.get(i, i);
            if d != 0.0 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();
    let bnorm = norm2(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let m = restart.max(1);
    let mut total = 0;
    loop {
        let ax = a.matvec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        if beta / scale <= tol {
            return Ok(SolveStats {
                relative_residual: beta / scale,
                iterations: total,
            });
        }
        if total >= max_iter {
            return Err(Error::NumericFailure(format!(
                "GMRES did not converge: relative residual {:.3e} after {total} iterations",
                beta / scale
            )));
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            let z: Vec<f64> = v[j].iter().zip(&dinv).map(|(a, b)| a * b).collect();
            let mut w = a.matvec(&z);
            // modified Gram-Schmidt
            for (i, vi) in v.iter().enumerate() {
                h[i][j] = dot(&w, vi);
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= h[i][j] * vk;
                }
            }
            h[j + 1][j] = norm2(&w);
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 {
                used = j;
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            let hn = h[j + 1][j];
            h[j + 1][j] = 0.0;
            used = j + 1;
            total += 1;
            if g[j + 1].abs() / scale <= tol * 0.1 || total >= max_iter || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wk| wk / hn).collect());
        }
        // back substitution
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            for ((xi, vi), di) in x.iter_mut().zip(&v[k]).zip(&dinv) {
                *xi += yk * vi * di;
            }
        }
        if used == 0 {
            return Err(Error::NumericFailure("GMRES breakdown".into()));
        }
    }
}

/// Which algorithm [`ShiftedSystem`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Gmres,
}

/// Repeated solves with `F(a) = K + a·diag(d)` for varying scalar `a`.
#[derive(Debug)]
pub struct ShiftedSystem {
    matrix: CsrMatrix,
    base: Vec<f64>,
    diag_pos: Vec<usize>,
    diag: Vec<f64>,
    kind: SolverKind,
    lu: Option<SparseLu>,
    shift: Option<f64>,
    tol: f64,
}

impl ShiftedSystem {
    /// Uses a direct solver when the system has at most `direct_limit` unknowns.
    pub fn new(k: &CsrMatrix, diag: Vec<f64>, direct_limit: usize) -> Result<Self> {
        let matrix = k.with_full_diagonal();
        let n = matrix.nrows();
        if diag.len() != n {
            return Err(Error::InvalidArgument("diagonal length mismatch".into()));
        }
        let diag_pos = (0..n).map(|i| matrix.position(i, i).unwrap()).collect();
        let kind = if n <= direct_limit {
            SolverKind::Direct
        } else {
            SolverKind::Gmres
        };
        let lu = match kind {
            SolverKind::Direct => Some(SparseLu::analyze(&matrix)?),
            SolverKind::Gmres => None,
        };
        let base = matrix.values().to_vec();
        Ok(Self {
            matrix,
            base,
            diag_pos,
            diag,
            kind,
            lu,
            shift: None,
            tol: 1e-12,
        })
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    /// Current system matrix (valid after [`Self::set_shift`]).
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Sets `a` and refactors if it changed.
    pub fn set_shift(&mut self, a: f64) -> Result<()> {
        if self.shift == Some(a) {
            return Ok(());
        }
        let vals = self.matrix.values_mut();
        vals.copy_from_slice(&self.base);
        for (&p, &d) in self.diag_pos.iter().zip(&self.diag) {
            vals[p] += a * d;
        }
        if let Some(lu) = &mut self.lu {
            lu.refactor(&self.matrix)?;
        }
        self.shift = Some(a);
        Ok(())
    }

    /// Solves `F x = b`, checking the relative residual against 1e-12.
    pub fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
        assert!(
            self.shift.is_some(),
            "set_shift must be called before solving"
        );
        let bnorm = norm2(b);
        let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
        match &self.lu {
            Some(lu) => {
                let mut x = b.to_vec();
                lu.solve_in_place(&mut x);
                let mut rel = 0.0;
                for it in 0..4 {
                    let ax = self.matrix.matvec(&x);
                    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
                    rel = norm2(&r) / scale;
                    if rel <= self.tol || !rel.is_finite() {
                        return self.checked(x, rel, it);
                    }
                    lu.solve_in_place(&mut r);
                    for (xi, ri) in x.iter_mut().zip(&r) {
                        *xi += ri;
                    }
                }
                self.checked(x, rel, 4)
            }
            None => {
                let mut x = vec![0.0; b.len()];
                let stats = gmres(&self.matrix, b, &mut x, 50, self.tol, 20_000)?;
                Ok((x, stats))
            }
        }
    }

    fn checked(&self, x: Vec<f64>, rel: f64, iterations: usize) -> Result<(Vec<f64>, SolveStats)> {
        if rel <= self.tol && x.iter().all(|v| v.is_finite()) {
            Ok((
                x,
                SolveStats {
                    relative_residual: rel,
                    iterations,
                },
            ))
        } else {
            Err(Error::NumericFailure(format!(
                "linear solve residual {rel:.3e} exceeds tolerance {:.0e}",
                self.tol
            )))
        }
    }
}
