//! Schur complements and Gaussian measurement updates.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{condition_sym, principal, submatrix, symmetrize};
use crate::model::Qcm;

/// Blocks with a larger condition estimate are refused.
pub const CONDITION_GUARD: f64 = 1e12;

/// Named index sets covering a matrix dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub blocks: Vec<(String, Vec<usize>)>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<(String, Vec<usize>)>, dim: usize) -> Result<Self> {
        let mut seen = vec![false; dim];
        for (name, idx) in &blocks {
            for &i in idx {
                if i >= dim || seen[i] {
                    return Err(Error::InvalidPartition(format!("block {name} overlaps or is out of range")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition("blocks do not cover the dimension".into()));
        }
        Ok(BlockPartition { blocks })
    }

    pub fn indices(&self, name: &str) -> Option<&[usize]> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, i)| i.as_slice())
    }
}

/// Indices of `0..dim` not in `block`, ascending.
pub fn complement_indices(dim: usize, block: &[usize]) -> Vec<usize> {
    (0..dim).filter(|i| !block.contains(i)).collect()
}

/// `R/X = Y - Zᵀ X⁻¹ Z` where X is the principal block at `block`.
pub fn schur_complement(r: &DMatrix<f64>, block: &[usize]) -> Result<DMatrix<f64>> {
    if !r.is_square() {
        return Err(Error::InvalidShape(format!("{}x{} is not square", r.nrows(), r.ncols())));
    }
    let n = r.nrows();
    if block.iter().any(|&i| i >= n) {
        return Err(Error::InvalidPartition("block index out of range".into()));
    }
    let rest = complement_indices(n, block);
    let x = principal(r, block);
    let y = principal(r, &rest);
    if block.is_empty() {
        return Ok(symmetrize(&y));
    }
    let cond = condition_sym(&x);
    if !(cond <= CONDITION_GUARD) {
        return Err(Error::SingularBlock { cond });
    }
    let z = submatrix(r, block, &rest);
    let sol = x.lu().solve(&z).ok_or(Error::SingularBlock { cond })?;
    Ok(symmetrize(&(y - z.transpose() * sol)))
}

/// Matrix-level measurement update `(V + Γ_A)/(V_A + Γ_A)` with Γ_A placed on `a_idx`.
pub fn measurement_update_matrix(v: &DMatrix<f64>, a_idx: &[usize], gamma_a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if gamma_a.nrows() != a_idx.len() || !gamma_a.is_square() {
        return Err(Error::InvalidPartition("seed does not match the measured block".into()));
    }
    let mut w = v.clone();
    for (i, &r) in a_idx.iter().enumerate() {
        for (j, &c) in a_idx.iter().enumerate() {
            w[(r, c)] += gamma_a[(i, j)];
        }
    }
    schur_complement(&w, a_idx)
}

/// Post-measurement QCM of the unmeasured subsystems after measuring those of `gamma` with seed `gamma`.
pub fn measurement_update(v: &Qcm, gamma: &Qcm) -> Result<Qcm> {
    for sub in &gamma.partition.subsystems {
        match v.partition.subsystem(&sub.name) {
            Some(s) if s.modes == sub.modes => {}
            _ => {
                return Err(Error::InvalidPartition(format!(
                    "seed subsystem {} ({} modes) not present in state",
                    sub.name, sub.modes
                )))
            }
        }
    }
    let measured: Vec<&str> = gamma.partition.names();
    let a_idx = v.partition.indices(&measured)?;
    let gamma_local = v.partition.select(&measured)?;
    // Seed ordering follows the state's partition order of the measured names.
    let seed = gamma.reordered_as(&gamma_local)?;
    let rest_names: Vec<&str> = v.partition.names().into_iter().filter(|n| !measured.contains(n)).collect();
    let rest_partition = v.partition.select(&rest_names)?;
    let rest_idx = v.partition.indices(&rest_names)?;
    let out = measurement_update_matrix(v.matrix(), &a_idx, &seed)?;
    // Complement indices come out ascending; map them to the xp order of the remaining subsystems.
    let ascending = complement_indices(v.dim(), &a_idx);
    let perm: Vec<usize> = rest_idx
        .iter()
        .map(|i| ascending.iter().position(|j| j == i).expect("index present"))
        .collect();
    Ok(Qcm::new_unchecked(principal(&out, &perm), rest_partition))
}
