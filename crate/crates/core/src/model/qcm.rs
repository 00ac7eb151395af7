use nalgebra::DMatrix;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs, min_eigenvalue, principal, symmetrize};
use crate::symplectic::{omega_xp, reorder, Ordering};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const BONA_FIDE_TOL: f64 = 1e-9;

/// Smallest eigenvalue of the Hermitian matrix `V + iΩ`, via its real embedding
/// `[[V, -Ω], [Ω, V]]`.
pub fn bona_fide_margin(v: &DMatrix<f64>) -> f64 {
    let n = v.nrows();
    let o = omega_xp(n / 2);
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(v);
    big.view_mut((n, n), (n, n)).copy_from(v);
    big.view_mut((0, n), (n, n)).copy_from(&(-&o));
    big.view_mut((n, 0), (n, n)).copy_from(&o);
    min_eigenvalue(&big)
}

/// Quantum covariance matrix in xp-block ordering with a named mode partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Qcm {
    matrix: DMatrix<f64>,
    pub partition: Partition,
}

impl Qcm {
    /// Validates shape, symmetry and the bona fide condition.
    pub fn new(matrix: DMatrix<f64>, partition: Partition) -> Result<Self> {
        let m = partition.total_modes();
        if m == 0 {
            return Err(Error::InvalidPartition("partition has no modes".into()));
        }
        if matrix.nrows() != 2 * m || matrix.ncols() != 2 * m {
            return Err(Error::InvalidShape(format!(
                "matrix is {}x{}, partition needs {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                2 * m,
                2 * m
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let asym = asymmetry(&matrix);
        if asym > SYMMETRY_TOL * max_abs(&matrix).max(1.0) {
            return Err(Error::InvalidInput(format!("symmetry check failed (max |V - Vᵀ| = {asym:.3e})")));
        }
        let matrix = symmetrize(&matrix);
        let margin = bona_fide_margin(&matrix);
        if margin < -BONA_FIDE_TOL {
            return Err(Error::NotBonaFide(format!("min eigenvalue of V + iΩ is {margin:.3e}")));
        }
        Ok(Qcm { matrix, partition })
    }

    /// Trusted constructor for matrices produced by this crate's own constructions.
    pub fn new_unchecked(matrix: DMatrix<f64>, partition: Partition) -> Self {
        debug_assert_eq!(matrix.nrows(), 2 * partition.total_modes());
        Qcm { matrix, partition }
    }

    pub fn from_modewise(matrix: DMatrix<f64>, partition: Partition) -> Result<Self> {
        if matrix.nrows() != 2 * partition.total_modes() || !matrix.is_square() {
            return Err(Error::InvalidShape(format!(
                "matrix is {}x{}, partition has {} modes",
                matrix.nrows(),
                matrix.ncols(),
                partition.total_modes()
            )));
        }
        let xp = reorder(&matrix, Ordering::ModeWise, Ordering::XpBlock)?;
        Self::new(xp, partition)
    }

    pub fn vacuum(partition: Partition) -> Self {
        let n = 2 * partition.total_modes();
        Qcm { matrix: DMatrix::identity(n, n), partition }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn modes(&self) -> usize {
        self.partition.total_modes()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn modewise(&self) -> DMatrix<f64> {
        reorder(&self.matrix, Ordering::XpBlock, Ordering::ModeWise).expect("even dimension")
    }

    /// Principal block of the named subsystems, in xp ordering of the sub-partition.
    pub fn block(&self, names: &[&str]) -> Result<DMatrix<f64>> {
        Ok(principal(&self.matrix, &self.partition.indices(names)?))
    }

    pub fn marginal(&self, names: &[&str]) -> Result<Qcm> {
        Ok(Qcm { matrix: self.block(names)?, partition: self.partition.select(names)? })
    }

    /// This matrix expressed in the subsystem order of `target`, which must hold the same subsystems.
    pub fn reordered_as(&self, target: &Partition) -> Result<DMatrix<f64>> {
        let mut same = target.subsystems.len() == self.partition.subsystems.len();
        for s in &target.subsystems {
            same &= self.partition.subsystem(&s.name).map(|t| t.modes) == Some(s.modes);
        }
        if !same {
            return Err(Error::InvalidPartition("partitions hold different subsystems".into()));
        }
        // Global index of each target position, read in target order.
        let m = self.modes();
        let mut idx = Vec::with_capacity(2 * m);
        for quad in 0..2 {
            for s in &target.subsystems {
                let r = self.partition.mode_range(&s.name).expect("checked");
                idx.extend(r.map(|k| k + quad * m));
            }
        }
        Ok(principal(&self.matrix, &idx))
    }

    pub fn bona_fide_margin(&self) -> f64 {
        bona_fide_margin(&self.matrix)
    }

    pub fn is_bona_fide(&self, tol: f64) -> bool {
        self.bona_fide_margin() >= -tol
    }

    pub fn with_partition(&self, partition: Partition) -> Result<Qcm> {
        if partition.total_modes() != self.modes() {
            return Err(Error::InvalidPartition("mode count mismatch".into()));
        }
        Ok(Qcm { matrix: self.matrix.clone(), partition })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Partition {
        Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap()
    }

    #[test]
    fn rejects_asymmetric_and_unphysical() {
        let mut v = DMatrix::<f64>::identity(4, 4);
        v[(0, 1)] = 0.1;
        assert!(matches!(Qcm::new(v, ab()), Err(Error::InvalidInput(_))));
        let v = DMatrix::<f64>::identity(4, 4) * 0.5;
        assert!(matches!(Qcm::new(v, ab()), Err(Error::NotBonaFide(_))));
        assert!(matches!(Qcm::new(DMatrix::identity(2, 2), ab()), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn vacuum_margin_is_zero() {
        assert!(Qcm::vacuum(ab()).bona_fide_margin().abs() < 1e-14);
    }

    #[test]
    fn reordered_as_swaps_subsystems() {
        let mut v = DMatrix::<f64>::identity(4, 4);
        v[(0, 0)] = 2.0;
        v[(2, 2)] = 3.0;
        let q = Qcm::new(v, ab()).unwrap();
        let ba = Partition::from_pairs(&[("B", 1), ("A", 1)]).unwrap();
        let r = q.reordered_as(&ba).unwrap();
        assert_eq!(r[(1, 1)], 2.0);
        assert_eq!(r[(3, 3)], 3.0);
    }
}
