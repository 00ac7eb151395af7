//! Seeded generators of random symplectics, covariance matrices and channels.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::symmetrize;
use crate::symplectic::omega_xp;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    symmetrize(&gaussian_matrix(rng, n, n))
}

/// Positive definite with eigenvalues bounded away from zero.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1
}

pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, rank);
    &g * g.transpose() / n as f64
}

/// Orthogonal symplectic `exp(ΩK)` with `K = [[A, B], [-B, A]]`, A symmetric, B antisymmetric.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, m: usize) -> DMatrix<f64> {
    let a = random_symmetric(rng, m);
    let g = gaussian_matrix(rng, m, m);
    let b = (&g - g.transpose()) * 0.5;
    let mut k = DMatrix::zeros(2 * m, 2 * m);
    k.view_mut((0, 0), (m, m)).copy_from(&a);
    k.view_mut((m, m), (m, m)).copy_from(&a);
    k.view_mut((0, m), (m, m)).copy_from(&b);
    k.view_mut((m, 0), (m, m)).copy_from(&(-&b));
    (omega_xp(m) * k).exp()
}

/// GL-embedded symplectic `diag(M, M^{-T})` with `M = exp(scale·G)`.
pub fn random_gl_symplectic<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> DMatrix<f64> {
    let mm = (gaussian_matrix(rng, m, m) * scale).exp();
    let inv_t = mm.clone().try_inverse().expect("matrix exponential is invertible").transpose();
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    s.view_mut((0, 0), (m, m)).copy_from(&mm);
    s.view_mut((m, m), (m, m)).copy_from(&inv_t);
    s
}

/// Product rotation · GL-embedded · rotation.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> DMatrix<f64> {
    let r1 = random_rotation(rng, m);
    let g = random_gl_symplectic(rng, m, scale);
    let r2 = random_rotation(rng, m);
    r1 * g * r2
}

pub fn random_symplectic_eigenvalues<R: Rng + ?Sized>(rng: &mut R, m: usize, spread: f64) -> Vec<f64> {
    (0..m).map(|_| 1.0 + spread * rng.random::<f64>()).collect()
}

/// `S diag(ν, ν) Sᵀ` with random S and ν.
pub fn random_qcm<R: Rng + ?Sized>(rng: &mut R, m: usize, spread: f64) -> DMatrix<f64> {
    let nu = random_symplectic_eigenvalues(rng, m, spread);
    let s = random_symplectic(rng, m, 0.4);
    let l = DMatrix::from_fn(2 * m, 2 * m, |i, j| if i == j { nu[i % m] } else { 0.0 });
    symmetrize(&(&s * l * s.transpose()))
}

pub fn random_pure_qcm<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> DMatrix<f64> {
    let s = random_symplectic(rng, m, scale);
    symmetrize(&(&s * s.transpose()))
}

/// `exp(ΩK)` on one mode with K symmetric of the given scale.
pub fn random_single_mode_symplectic<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> DMatrix<f64> {
    (omega_xp(1) * random_symmetric(rng, 2) * scale).exp()
}

/// Squeezed, attenuated and thermalized two-mode state under a random local congruence.
/// Squeezing is drawn from [1, 12] dB, transmissivity from [0.1, 1], added noise from [0, 1].
pub fn random_two_mode_qcm<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<f64> {
    let s_db = 1.0 + 11.0 * rng.random::<f64>();
    let lambda = 0.1 + 0.9 * rng.random::<f64>();
    let noise_a = rng.random::<f64>();
    let noise_b = rng.random::<f64>();
    let mut v = crate::model::pure_loss_state(lambda, s_db).expect("parameters in range").into_matrix();
    for (i, n) in [(0usize, noise_a), (2, noise_a), (1, noise_b), (3, noise_b)] {
        v[(i, i)] += n;
    }
    let sa = random_single_mode_symplectic(rng, 0.5);
    let sb = random_single_mode_symplectic(rng, 0.5);
    let local = crate::linalg::embed(4, &[(&[0, 2], &sa), (&[1, 3], &sb)]);
    symmetrize(&(&local * v * local.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bona_fide_margin;
    use crate::symplectic::{is_pure_qcm, is_symplectic};
    use rand::SeedableRng;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for m in 1..=3 {
            assert!(is_symplectic(&random_symplectic(&mut rng, m, 0.5), 1e-10).unwrap());
            assert!(bona_fide_margin(&random_qcm(&mut rng, m, 2.0)) > -1e-9);
            assert!(is_pure_qcm(&random_pure_qcm(&mut rng, m, 0.5), 1e-8));
        }
        for _ in 0..10 {
            assert!(bona_fide_margin(&random_two_mode_qcm(&mut rng)) > -1e-9);
        }
    }
}
