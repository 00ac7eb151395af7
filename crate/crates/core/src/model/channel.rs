use nalgebra::DMatrix;

use super::qcm::Qcm;
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs, min_eigenvalue, symmetrize};
use crate::symplectic::omega_xp;

/// Tolerance for the complete-positivity check.
pub const CP_TOL: f64 = 1e-9;

/// Gaussian channel `V ↦ X V Xᵀ + Y`, matrices in xp ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

impl GaussianChannel {
    /// Validates shapes and complete positivity.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() % 2 != 0 || x.ncols() % 2 != 0 || !y.is_square() || y.nrows() != x.nrows() {
            return Err(Error::InvalidShape(format!(
                "X is {}x{}, Y is {}x{}",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            )));
        }
        if asymmetry(&y) > 1e-12 * max_abs(&y).max(1.0) {
            return Err(Error::InvalidChannel("Y is not symmetric".into()));
        }
        let ch = GaussianChannel { x, y: symmetrize(&y) };
        let margin = ch.cp_min_eigenvalue();
        if margin < -CP_TOL {
            return Err(Error::InvalidChannel(format!("complete positivity fails (min eigenvalue {margin:.3e})")));
        }
        Ok(ch)
    }

    pub fn identity(modes: usize) -> Self {
        let n = 2 * modes;
        GaussianChannel { x: DMatrix::identity(n, n), y: DMatrix::zeros(n, n) }
    }

    pub fn input_modes(&self) -> usize {
        self.x.ncols() / 2
    }

    pub fn output_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    /// Smallest eigenvalue of the Hermitian `Y + iΩ' - i X Ω Xᵀ`.
    pub fn cp_min_eigenvalue(&self) -> f64 {
        let n = self.y.nrows();
        let delta = omega_xp(self.output_modes()) - &self.x * omega_xp(self.input_modes()) * self.x.transpose();
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&self.y);
        big.view_mut((n, n), (n, n)).copy_from(&self.y);
        big.view_mut((0, n), (n, n)).copy_from(&(-&delta));
        big.view_mut((n, 0), (n, n)).copy_from(&delta);
        min_eigenvalue(&big)
    }

    /// Single-mode form of the CP condition, `√det Y - |1 - det X|`.
    pub fn single_mode_cp_margin(&self) -> Result<f64> {
        if self.x.nrows() != 2 || self.x.ncols() != 2 {
            return Err(Error::InvalidShape("single-mode margin needs 2x2 matrices".into()));
        }
        Ok(self.y.determinant().max(0.0).sqrt() - (1.0 - self.x.determinant()).abs())
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &GaussianChannel) -> Result<GaussianChannel> {
        if self.x.ncols() != inner.x.nrows() {
            return Err(Error::InvalidShape("channel dimensions do not chain".into()));
        }
        Ok(GaussianChannel {
            x: &self.x * &inner.x,
            y: symmetrize(&(&self.x * &inner.y * self.x.transpose() + &self.y)),
        })
    }

    /// Applies the channel to the named subsystems, identity elsewhere.
    pub fn apply(&self, v: &Qcm, on: &[&str]) -> Result<Qcm> {
        let margin = self.cp_min_eigenvalue();
        if margin < -CP_TOL {
            return Err(Error::InvalidChannel(format!("complete positivity fails (min eigenvalue {margin:.3e})")));
        }
        let idx = v.partition.indices(on)?;
        if self.x.nrows() != idx.len() || self.x.ncols() != idx.len() {
            return Err(Error::InvalidShape(format!(
                "channel acts on {} modes, target has {}",
                self.input_modes(),
                idx.len() / 2
            )));
        }
        let n = v.dim();
        let mut xf = DMatrix::identity(n, n);
        let mut yf = DMatrix::zeros(n, n);
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                xf[(r, c)] = self.x[(i, j)];
                yf[(r, c)] = self.y[(i, j)];
            }
        }
        let out = symmetrize(&(&xf * v.matrix() * xf.transpose() + yf));
        Ok(Qcm::new_unchecked(out, v.partition.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pure_loss_channel, tmsv};

    #[test]
    fn identity_channel_is_noop() {
        let v = tmsv(5.0).unwrap();
        let out = GaussianChannel::identity(1).apply(&v, &["A"]).unwrap();
        assert!(max_abs(&(out.matrix() - v.matrix())) < 1e-15);
    }

    #[test]
    fn amplification_without_noise_is_not_cp() {
        let x = DMatrix::<f64>::identity(2, 2) * 2.0;
        let y = DMatrix::zeros(2, 2);
        assert!(matches!(GaussianChannel::new(x, y), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn pure_loss_margin_is_zero() {
        let ch = pure_loss_channel(0.3).unwrap();
        assert!(ch.single_mode_cp_margin().unwrap().abs() < 1e-15);
        assert!(ch.cp_min_eigenvalue().abs() < 1e-12);
    }
}
