use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::linalg::symmetrize;
use crate::normality::symmetric_from;
use crate::symplectic::omega_xp;

/// Pure QCM `γ = S Sᵀ` with `S = exp(ΩK)`, K symmetric and read from `theta`
/// (upper triangle row by row, `m(2m+1)` entries).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureQcmParam {
    pub modes: usize,
    pub theta: Vec<f64>,
}

impl PureQcmParam {
    pub fn dim(modes: usize) -> usize {
        modes * (2 * modes + 1)
    }

    pub fn zeros(modes: usize) -> Self {
        PureQcmParam { modes, theta: vec![0.0; Self::dim(modes)] }
    }

    pub fn new(modes: usize, theta: Vec<f64>) -> Self {
        assert_eq!(theta.len(), Self::dim(modes), "parameter count");
        PureQcmParam { modes, theta }
    }

    pub fn symplectic(&self) -> DMatrix<f64> {
        symplectic_of(self.modes, &self.theta)
    }

    pub fn gamma(&self) -> DMatrix<f64> {
        gamma_of(self.modes, &self.theta)
    }
}

pub(crate) fn symplectic_of(modes: usize, theta: &[f64]) -> DMatrix<f64> {
    (omega_xp(modes) * symmetric_from(theta, 2 * modes)).exp()
}

pub(crate) fn gamma_of(modes: usize, theta: &[f64]) -> DMatrix<f64> {
    if modes == 0 {
        return DMatrix::zeros(0, 0);
    }
    let s = symplectic_of(modes, theta);
    symmetrize(&(&s * s.transpose()))
}

/// Largest Frobenius norm of K for environment seeds. The infimum over environment seeds
/// sits at infinite squeezing; the cap keeps the blocks well conditioned at a cost of
/// order `e^{-2·cap}` bits.
pub const ENV_SQUEEZE_CAP: f64 = 8.0;

/// Rescales θ so that `‖K‖_F = cap·tanh(‖K‖_F / cap)`, a smooth map onto the ball of radius cap.
pub(crate) fn capped_theta(modes: usize, theta: &[f64], cap: f64) -> Vec<f64> {
    let norm = symmetric_from(theta, 2 * modes).norm();
    if norm == 0.0 {
        return theta.to_vec();
    }
    let factor = cap * (norm / cap).tanh() / norm;
    theta.iter().map(|t| t * factor).collect()
}

/// Settings shared by the pure-state optimizers.
#[derive(Debug, Clone)]
pub struct OptOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Simplex evaluations per stage.
    pub max_evals: usize,
    pub barrier_schedule: Vec<f64>,
    /// Scale of the random start perturbations.
    pub perturbation: f64,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            seed: 0,
            restarts: 8,
            max_evals: 3000,
            barrier_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4],
            perturbation: 0.3,
        }
    }
}

impl OptOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Deterministic start points: the origin, then Gaussian perturbations.
    pub(crate) fn starts(&self, dim: usize, scale: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = vec![vec![0.0; dim]];
        for _ in 1..self.restarts.max(1) {
            out.push((0..dim).map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                scale * z
            }).collect());
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerResult {
    /// Objective value in bits; an upper bound on the infimum being estimated.
    pub value: f64,
    pub argument: PureQcmParam,
    /// The optimal pure QCM on AB.
    pub gamma: DMatrix<f64>,
    /// Largest eigenvalue of `γ - V` (clamped at zero).
    pub feasibility_residual: f64,
    pub restarts: usize,
    pub converged: bool,
    pub evaluations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{is_pure_qcm, is_symplectic};

    #[test]
    fn every_parameter_gives_a_pure_qcm() {
        let opts = OptOptions { restarts: 6, ..Default::default() };
        for theta in opts.starts(PureQcmParam::dim(2), 0.8) {
            let p = PureQcmParam::new(2, theta);
            assert!(is_symplectic(&p.symplectic(), 1e-10).unwrap());
            let g = p.gamma();
            assert!((g.determinant() - 1.0).abs() < 1e-8);
            assert!(is_pure_qcm(&g, 1e-8));
        }
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(PureQcmParam::dim(1), 3);
        assert_eq!(PureQcmParam::dim(2), 10);
        assert_eq!(PureQcmParam::zeros(3).gamma(), DMatrix::<f64>::identity(6, 6));
    }
}
