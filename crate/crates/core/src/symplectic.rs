//! Symplectic form, ordering conventions, symplectic eigenvalues and Williamson decomposition.
//!
//! Everything internal works in the xp-block ordering `(x_1..x_m, p_1..p_m)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inv_sqrtm_pd, max_abs, require_pd, sqrtm_pd, symmetrize};

/// Default tolerance for purity tests.
pub const PURE_TOL: f64 = 1e-8;

/// Relative gap under which symplectic eigenvalues are treated as degenerate.
const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `(x_1, .., x_m, p_1, .., p_m)`
    XpBlock,
    /// `(x_1, p_1, .., x_m, p_m)`
    ModeWise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub modes: usize,
    pub ordering: Ordering,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, descending.
    pub nu: Vec<f64>,
}

impl WilliamsonDecomposition {
    /// `diag(nu, nu)` in xp-block ordering.
    pub fn lambda(&self) -> DMatrix<f64> {
        let m = self.nu.len();
        DMatrix::from_fn(2 * m, 2 * m, |i, j| if i == j { self.nu[i % m] } else { 0.0 })
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.s * self.lambda() * self.s.transpose()
    }
}

/// Ω in xp-block ordering.
pub fn omega_xp(m: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        o[(j, m + j)] = 1.0;
        o[(m + j, j)] = -1.0;
    }
    o
}

pub fn omega(m: usize, ordering: Ordering) -> Result<SymplecticForm> {
    if m == 0 {
        return Err(Error::InvalidInput("mode count must be positive".into()));
    }
    let xp = omega_xp(m);
    let matrix = match ordering {
        Ordering::XpBlock => xp,
        Ordering::ModeWise => reorder(&xp, Ordering::XpBlock, Ordering::ModeWise)?,
    };
    Ok(SymplecticForm { modes: m, ordering, matrix })
}

/// Permutation P with `r_xp = P r_mw`.
pub fn modewise_to_xp(m: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        p[(j, 2 * j)] = 1.0;
        p[(m + j, 2 * j + 1)] = 1.0;
    }
    p
}

fn modes_of(dim: usize) -> Result<usize> {
    if dim % 2 != 0 {
        return Err(Error::InvalidShape(format!("dimension {dim} is odd")));
    }
    Ok(dim / 2)
}

/// Congruence of a quadratic form by the ordering permutation.
pub fn reorder(v: &DMatrix<f64>, from: Ordering, to: Ordering) -> Result<DMatrix<f64>> {
    if !v.is_square() {
        return Err(Error::InvalidShape(format!("{}x{} is not square", v.nrows(), v.ncols())));
    }
    let m = modes_of(v.nrows())?;
    Ok(match (from, to) {
        (a, b) if a == b => v.clone(),
        (Ordering::ModeWise, Ordering::XpBlock) => {
            let p = modewise_to_xp(m);
            &p * v * p.transpose()
        }
        _ => {
            let p = modewise_to_xp(m);
            p.transpose() * v * &p
        }
    })
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if !s.is_square() {
        return Err(Error::InvalidShape(format!("{}x{} is not square", s.nrows(), s.ncols())));
    }
    let m = modes_of(s.nrows())?;
    let o = omega_xp(m);
    Ok(max_abs(&(s * &o * s.transpose() - &o)) <= tol)
}

/// Spectrum of `-A²` for `A = V^{1/2} Ω V^{1/2}`, which holds each ν² twice.
fn squared_spectrum(v: &DMatrix<f64>) -> (DMatrix<f64>, SymmetricEigen<f64, nalgebra::Dyn>) {
    let m = v.nrows() / 2;
    let root = sqrtm_pd(v);
    let a = &root * omega_xp(m) * &root;
    let b = symmetrize(&(-(&a * &a)));
    (a, SymmetricEigen::new(b))
}

pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    modes_of(v.nrows())?;
    require_pd(v, "covariance matrix")?;
    let (_, eig) = squared_spectrum(v);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev.chunks(2).map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt()).collect())
}

/// True when the x-p cross block vanishes to `tol` relative to the matrix scale.
pub fn is_xp_form(v: &DMatrix<f64>, tol: f64) -> bool {
    let m = v.nrows() / 2;
    let cross = v.view((0, m), (m, m)).abs().max();
    cross <= tol * max_abs(v).max(1.0)
}

pub fn williamson(v: &DMatrix<f64>) -> Result<WilliamsonDecomposition> {
    modes_of(v.nrows())?;
    require_pd(v, "covariance matrix")?;
    if is_xp_form(v, 0.0) {
        Ok(williamson_xp(v))
    } else {
        Ok(williamson_general(v))
    }
}

/// Constructive route for xp-form inputs: the result is block diagonal `diag(M, M^{-T})`.
fn williamson_xp(v: &DMatrix<f64>) -> WilliamsonDecomposition {
    let m = v.nrows() / 2;
    let q = v.view((0, 0), (m, m)).into_owned();
    let p = v.view((m, m), (m, m)).into_owned();
    let q_half = sqrtm_pd(&q);
    let eig = SymmetricEigen::new(symmetrize(&(&q_half * &p * &q_half)));
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let nu: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let o = DMatrix::from_fn(m, m, |i, j| eig.eigenvectors[(i, order[j])]);
    let d_inv_half = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 / nu[i].sqrt() } else { 0.0 });
    let mm = &q_half * o * d_inv_half;
    let mm_inv_t = mm.clone().try_inverse().expect("M is invertible").transpose();
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    s.view_mut((0, 0), (m, m)).copy_from(&mm);
    s.view_mut((m, m), (m, m)).copy_from(&mm_inv_t);
    WilliamsonDecomposition { s, nu }
}

/// Antisymmetric normal form of `V^{1/2} Ω V^{1/2}`, then `S = V^{1/2} O Λ^{-1/2}`.
fn williamson_general(v: &DMatrix<f64>) -> WilliamsonDecomposition {
    let n = v.nrows();
    let m = n / 2;
    let (a, eig) = squared_spectrum(v);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));

    // Clusters of numerically equal ν², each holding an even number of vectors.
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        let val = eig.eigenvalues[k];
        match clusters.last_mut() {
            Some(c) if {
                let head = eig.eigenvalues[c[0]];
                (head - val).abs() <= CLUSTER_TOL * head.abs().max(1.0) || c.len() % 2 == 1
            } =>
            {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    let mut us: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(m);
    let mut ws: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(m);
    let mut nus: Vec<f64> = Vec::with_capacity(m);
    let at = a.transpose();
    for cluster in clusters {
        for _ in 0..cluster.len() / 2 {
            let mut best: Option<nalgebra::DVector<f64>> = None;
            let mut best_norm = -1.0;
            for &k in &cluster {
                let mut r = eig.eigenvectors.column(k).into_owned();
                for q in us.iter().chain(ws.iter()) {
                    let c = q.dot(&r);
                    r -= q * c;
                }
                let nr = r.norm();
                if nr > best_norm {
                    best_norm = nr;
                    best = Some(r);
                }
            }
            let u = best.expect("cluster is non-empty").normalize();
            let mut w = &at * &u;
            let nu = w.norm();
            for q in us.iter().chain(ws.iter()) {
                let c = q.dot(&w);
                w -= q * c;
            }
            let w = w.normalize();
            us.push(u);
            ws.push(w);
            nus.push(nu);
        }
    }

    let mut o = DMatrix::zeros(n, n);
    for j in 0..m {
        o.set_column(j, &us[j]);
        o.set_column(m + j, &ws[j]);
    }
    let mut l_inv_half = DMatrix::zeros(n, n);
    for j in 0..m {
        l_inv_half[(j, j)] = 1.0 / nus[j].sqrt();
        l_inv_half[(m + j, m + j)] = 1.0 / nus[j].sqrt();
    }
    let s = sqrtm_pd(v) * o * l_inv_half;
    WilliamsonDecomposition { s, nu: nus }
}

/// Purity: every symplectic eigenvalue within `tol` of one.
pub fn is_pure_qcm(v: &DMatrix<f64>, tol: f64) -> bool {
    match symplectic_eigenvalues(v) {
        Ok(nu) => nu.iter().all(|x| (x - 1.0).abs() <= tol),
        Err(_) => false,
    }
}

/// Inverse of a symplectic matrix, `-Ω Sᵀ Ω`.
pub fn symplectic_inverse(s: &DMatrix<f64>) -> DMatrix<f64> {
    let o = omega_xp(s.nrows() / 2);
    -(&o * s.transpose() * &o)
}

/// Single-mode Williamson frame: `V = ν S Sᵀ` with `S = (V / √det V)^{1/2}`.
pub fn single_mode_frame(v: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let nu = v.determinant().max(0.0).sqrt();
    (nu, sqrtm_pd(&(v / nu)))
}

/// `V^{-1/2}`; re-exported for callers that build frames by hand.
pub fn inverse_sqrt(v: &DMatrix<f64>) -> DMatrix<f64> {
    inv_sqrtm_pd(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_qcm, random_symplectic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn omega_single_mode() {
        let o = omega(1, Ordering::XpBlock).unwrap().matrix;
        assert_eq!(o, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(&o * &o, -DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn omega_two_modes_block_form() {
        let o = omega(2, Ordering::XpBlock).unwrap().matrix;
        assert_eq!(o.view((0, 2), (2, 2)).into_owned(), DMatrix::identity(2, 2));
        assert_eq!(o.view((2, 0), (2, 2)).into_owned(), -DMatrix::<f64>::identity(2, 2));
        assert!(omega(0, Ordering::XpBlock).is_err());
    }

    #[test]
    fn modewise_omega_maps_to_xp_omega() {
        let mw = omega(2, Ordering::ModeWise).unwrap().matrix;
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 1)] = 1.0;
        expected[(1, 0)] = -1.0;
        expected[(2, 3)] = 1.0;
        expected[(3, 2)] = -1.0;
        assert_eq!(mw, expected);
        assert_eq!(reorder(&mw, Ordering::ModeWise, Ordering::XpBlock).unwrap(), omega_xp(2));
    }

    #[test]
    fn symplectic_checks() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert!(is_symplectic(&id, 1e-12).unwrap());
        assert!(is_symplectic(&DMatrix::from_diagonal(&nalgebra::dvector![2.0, 0.5]), 1e-12).unwrap());
        assert!(!is_symplectic(&DMatrix::from_diagonal(&nalgebra::dvector![2.0, 2.0]), 1e-12).unwrap());
        assert!(matches!(is_symplectic(&DMatrix::identity(3, 3), 1e-12), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn reorder_round_trip_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_qcm(&mut rng, 2, 1.0);
        let same = reorder(&v, Ordering::XpBlock, Ordering::XpBlock).unwrap();
        assert_eq!(same, v);
        let back = reorder(
            &reorder(&v, Ordering::XpBlock, Ordering::ModeWise).unwrap(),
            Ordering::ModeWise,
            Ordering::XpBlock,
        )
        .unwrap();
        assert!(max_abs(&(back - &v)) == 0.0);
        assert!(reorder(&DMatrix::identity(3, 3), Ordering::XpBlock, Ordering::ModeWise).is_err());
    }

    #[test]
    fn vacuum_williamson_is_trivial() {
        let w = williamson(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(w.nu, vec![1.0, 1.0]);
        assert!(max_abs(&(&w.s - DMatrix::<f64>::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn xp_form_single_mode_by_hand() {
        let v = DMatrix::from_diagonal(&nalgebra::dvector![4.0, 1.0]);
        let w = williamson(&v).unwrap();
        assert!((w.nu[0] - 2.0).abs() < 1e-14);
        let expected = DMatrix::from_diagonal(&nalgebra::dvector![2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        assert!(max_abs(&(&w.s - expected)) < 1e-14);
        assert!(is_symplectic(&w.s, 1e-14).unwrap());
        assert!(max_abs(&(w.reconstruct() - v)) < 1e-14);
    }

    #[test]
    fn xp_form_result_is_block_diagonal() {
        let q = DMatrix::from_row_slice(2, 2, &[3.0, 0.5, 0.5, 2.0]);
        let p = DMatrix::from_row_slice(2, 2, &[2.0, -0.3, -0.3, 4.0]);
        let mut v = DMatrix::zeros(4, 4);
        v.view_mut((0, 0), (2, 2)).copy_from(&q);
        v.view_mut((2, 2), (2, 2)).copy_from(&p);
        let w = williamson(&v).unwrap();
        assert_eq!(w.s.view((0, 2), (2, 2)).abs().max(), 0.0);
        assert_eq!(w.s.view((2, 0), (2, 2)).abs().max(), 0.0);
        assert!(is_symplectic(&w.s, 1e-12).unwrap());
        assert!(max_abs(&(w.reconstruct() - v)) < 1e-12);
    }

    #[test]
    fn purity_examples() {
        assert!(is_pure_qcm(&DMatrix::identity(4, 4), PURE_TOL));
        assert!(!is_pure_qcm(&(DMatrix::identity(2, 2) * 2.0), PURE_TOL));
    }

    #[test]
    fn degenerate_spectrum_still_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_symplectic(&mut rng, 3, 0.7);
        let v = &s * DMatrix::<f64>::identity(6, 6) * 2.5 * s.transpose();
        let w = williamson(&v).unwrap();
        for nu in &w.nu {
            assert!((nu - 2.5).abs() < 1e-9);
        }
        assert!(is_symplectic(&w.s, 1e-9).unwrap());
        assert!(max_abs(&(w.reconstruct() - &v)) < 1e-8 * max_abs(&v));
    }

    #[test]
    fn symplectic_inverse_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_symplectic(&mut rng, 2, 0.5);
        let prod = &s * symplectic_inverse(&s);
        assert!(max_abs(&(prod - DMatrix::<f64>::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn non_pd_input_is_rejected() {
        let v = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]);
        assert!(matches!(symplectic_eigenvalues(&v), Err(Error::InvalidInput(_))));
        assert!(matches!(williamson(&v), Err(Error::InvalidInput(_))));
    }
}
