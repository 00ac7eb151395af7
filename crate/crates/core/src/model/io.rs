//! JSON file format for covariance matrices.
//!
//! `{"ordering":"xp"|"modewise","subsystems":[{"name":"A","modes":1},..],"matrix":[[..],..]}`

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::partition::{Partition, Subsystem};
use super::qcm::{bona_fide_margin, Qcm, BONA_FIDE_TOL, SYMMETRY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs, symmetrize};
use crate::symplectic::{reorder, Ordering};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QcmFile {
    pub ordering: String,
    pub subsystems: Vec<Subsystem>,
    pub matrix: Vec<Vec<f64>>,
}

impl QcmFile {
    pub fn from_qcm(v: &Qcm, ordering: Ordering) -> Self {
        let m = match ordering {
            Ordering::XpBlock => v.matrix().clone(),
            Ordering::ModeWise => v.modewise(),
        };
        QcmFile {
            ordering: match ordering {
                Ordering::XpBlock => "xp".into(),
                Ordering::ModeWise => "modewise".into(),
            },
            subsystems: v.partition.subsystems.clone(),
            matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        }
    }

    /// Validates shape, symmetry and the bona fide condition, naming the failed check.
    pub fn to_qcm(&self) -> Result<Qcm> {
        let ordering = match self.ordering.as_str() {
            "xp" => Ordering::XpBlock,
            "modewise" => Ordering::ModeWise,
            other => return Err(Error::Parse(format!("unknown ordering {other:?}"))),
        };
        let partition = Partition::new(self.subsystems.clone())?;
        let n = 2 * partition.total_modes();
        if n == 0 {
            return Err(Error::InvalidPartition("no modes declared".into()));
        }
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidShape(format!("shape check failed: expected a {n}x{n} matrix")));
        }
        let raw = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("finiteness check failed".into()));
        }
        let asym = asymmetry(&raw);
        if asym > SYMMETRY_TOL * max_abs(&raw).max(1.0) {
            return Err(Error::InvalidInput(format!("symmetry check failed (max |V - Vᵀ| = {asym:.3e})")));
        }
        let xp = symmetrize(&reorder(&raw, ordering, Ordering::XpBlock)?);
        let margin = bona_fide_margin(&xp);
        if margin < -BONA_FIDE_TOL {
            return Err(Error::NotBonaFide(format!(
                "bona fide check failed (min eigenvalue of V + iΩ is {margin:.3e})"
            )));
        }
        Ok(Qcm::new_unchecked(xp, partition))
    }
}

pub fn parse_qcm(text: &str) -> Result<Qcm> {
    let file: QcmFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_qcm()
}

pub fn read_qcm(path: &Path) -> Result<Qcm> {
    parse_qcm(&std::fs::read_to_string(path)?)
}

/// Serializes in xp ordering. Floats are written in shortest round-trip form, so
/// reloading reproduces every entry exactly.
pub fn qcm_to_json(v: &Qcm) -> String {
    serde_json::to_string_pretty(&QcmFile::from_qcm(v, Ordering::XpBlock)).expect("plain data serializes")
}

pub fn write_qcm(v: &Qcm, path: &Path) -> Result<()> {
    std::fs::write(path, qcm_to_json(v) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pure_loss_state;

    #[test]
    fn round_trip_is_exact() {
        let v = pure_loss_state(0.37, 11.0).unwrap();
        let back = parse_qcm(&qcm_to_json(&v)).unwrap();
        assert_eq!(back.matrix(), v.matrix());
        assert_eq!(back.partition, v.partition);
    }

    #[test]
    fn modewise_input_is_converted() {
        let v = pure_loss_state(0.5, 5.0).unwrap();
        let text = serde_json::to_string(&QcmFile::from_qcm(&v, Ordering::ModeWise)).unwrap();
        let back = parse_qcm(&text).unwrap();
        assert!(max_abs(&(back.matrix() - v.matrix())) < 1e-15);
    }

    #[test]
    fn failures_name_the_check() {
        let asym = r#"{"ordering":"xp","subsystems":[{"name":"A","modes":1}],"matrix":[[1,0.5],[0,1]]}"#;
        assert!(parse_qcm(asym).unwrap_err().to_string().contains("symmetry"));
        let unphys = r#"{"ordering":"xp","subsystems":[{"name":"A","modes":1}],"matrix":[[0.5,0],[0,0.5]]}"#;
        assert!(parse_qcm(unphys).unwrap_err().to_string().contains("bona fide"));
        let shape = r#"{"ordering":"xp","subsystems":[{"name":"A","modes":2}],"matrix":[[1,0],[0,1]]}"#;
        assert!(parse_qcm(shape).unwrap_err().to_string().contains("shape"));
        assert!(matches!(parse_qcm("{"), Err(Error::Parse(_))));
    }
}
