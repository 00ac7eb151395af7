use nalgebra::DMatrix;

use super::partition::{Partition, Subsystem};
use super::qcm::Qcm;
use crate::error::{Error, Result};
use crate::linalg::symmetrize;
use crate::symplectic::{williamson, WilliamsonDecomposition};

/// Purification of a QCM on `m` modes by an environment in a two-mode-squeezed
/// pairing with each Williamson mode.
#[derive(Debug, Clone)]
pub struct Purification {
    /// Pure QCM in xp ordering over the original modes followed by the environment modes.
    pub gamma: DMatrix<f64>,
    pub williamson: WilliamsonDecomposition,
    /// Williamson mode purified by each environment mode.
    pub env_of: Vec<usize>,
}

impl Purification {
    pub fn system_modes(&self) -> usize {
        self.williamson.nu.len()
    }

    pub fn env_modes(&self) -> usize {
        self.env_of.len()
    }
}

/// Builds `(S ⊕ 𝟙_E) γ⁽⁰⁾ (S ⊕ 𝟙_E)ᵀ`. With `drop_pure = Some(tol)` the environment
/// only pairs with Williamson modes whose ν exceeds `1 + tol`; the dropped modes
/// would be decoupled vacua.
pub fn purify_matrix(v: &DMatrix<f64>, drop_pure: Option<f64>) -> Result<Purification> {
    let w = williamson(v)?;
    let m = w.nu.len();
    let env_of: Vec<usize> = (0..m).filter(|&j| drop_pure.is_none_or(|tol| w.nu[j] > 1.0 + tol)).collect();
    let e = env_of.len();
    let n = m + e;
    let mut g0 = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..m {
        g0[(j, j)] = w.nu[j];
        g0[(n + j, n + j)] = w.nu[j];
    }
    for (k, &j) in env_of.iter().enumerate() {
        let nu = w.nu[j];
        let c = (nu * nu - 1.0).max(0.0).sqrt();
        let (xe, pe) = (m + k, n + m + k);
        g0[(xe, xe)] = nu;
        g0[(pe, pe)] = nu;
        g0[(j, xe)] = c;
        g0[(xe, j)] = c;
        g0[(n + j, pe)] = -c;
        g0[(pe, n + j)] = -c;
    }
    let mut big_s = DMatrix::identity(2 * n, 2 * n);
    let sys: Vec<usize> = (0..m).chain(n..n + m).collect();
    for (i, &r) in sys.iter().enumerate() {
        for (j, &c) in sys.iter().enumerate() {
            big_s[(r, c)] = w.s[(i, j)];
        }
    }
    let gamma = symmetrize(&(&big_s * g0 * big_s.transpose()));
    Ok(Purification { gamma, williamson: w, env_of })
}

/// Pure QCM on the input subsystems plus an `m`-mode environment named `E`.
pub fn purify(v: &Qcm) -> Result<Qcm> {
    if v.partition.subsystem("E").is_some() {
        return Err(Error::InvalidPartition("state already has a subsystem named E".into()));
    }
    let p = purify_matrix(v.matrix(), None)?;
    let partition = v.partition.concat(&Partition::new(vec![Subsystem { name: "E".into(), modes: v.modes() }])?)?;
    Ok(Qcm::new_unchecked(p.gamma, partition))
}
