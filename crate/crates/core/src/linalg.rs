//! Small dense helpers shared by the numeric modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Applies `f` to the spectrum of a symmetric matrix.
pub fn sym_fn(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    symmetrize(&(&eig.eigenvectors * d * eig.eigenvectors.transpose()))
}

pub fn require_pd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidShape(format!("{what} is {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    let scale = max_abs(m).max(1.0);
    if asymmetry(m) > 1e-10 * scale {
        return Err(Error::InvalidInput(format!("{what} is not symmetric")));
    }
    if min_eigenvalue(m) <= 0.0 {
        return Err(Error::InvalidInput(format!("{what} is not positive definite")));
    }
    Ok(())
}

pub fn sqrtm_pd(m: &DMatrix<f64>) -> DMatrix<f64> {
    sym_fn(m, f64::sqrt)
}

pub fn inv_sqrtm_pd(m: &DMatrix<f64>) -> DMatrix<f64> {
    sym_fn(m, |x| 1.0 / x.sqrt())
}

/// log2 det of a positive-definite matrix via Cholesky pivots; `None` if not PD.
pub fn log2_det_pd(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let chol = m.clone().cholesky()?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        acc += l[(i, i)].log2();
    }
    Some(2.0 * acc)
}

/// Natural log det of a positive-definite matrix; `None` if not PD.
pub fn ln_det_pd(m: &DMatrix<f64>) -> Option<f64> {
    log2_det_pd(m).map(|v| v * std::f64::consts::LN_2)
}

pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn principal(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    submatrix(m, idx, idx)
}

/// Writes `block` into `m` at the given index set.
pub fn set_principal(m: &mut DMatrix<f64>, idx: &[usize], block: &DMatrix<f64>) {
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            m[(r, c)] = block[(i, j)];
        }
    }
}

/// Block-diagonal embedding of `blocks` placed at the given index sets of an n×n identity.
pub fn embed(n: usize, parts: &[(&[usize], &DMatrix<f64>)]) -> DMatrix<f64> {
    let mut out = DMatrix::identity(n, n);
    for (idx, block) in parts {
        set_principal(&mut out, idx, block);
    }
    out
}

/// Trace norm of a symmetric matrix.
pub fn trace_norm_sym(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn condition_sym(m: &DMatrix<f64>) -> f64 {
    let ev = sym_eigenvalues(m);
    let lo = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let hi = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
