//! Grid of the loss-family curves: entanglement of formation against one-way
//! distillable entanglement, optionally with intrinsic-entanglement estimates.

use serde::Serialize;

use crate::entanglement::{gie_numeric, one_way_distillable, reof_closed_form, GieBudget};
use crate::error::{Error, Result};
use crate::model::{pure_loss_state, Split};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub s_db: f64,
    pub reof: f64,
    pub d_one_way: f64,
    pub gie_lower: Option<f64>,
    pub gie_upper: Option<f64>,
}

/// `steps` equally spaced λ in [0, 1] for each squeezing value, squeezing-major.
pub fn loss_sweep(squeezing: &[f64], steps: usize, gie: Option<&GieBudget>) -> Result<Vec<SweepRow>> {
    if squeezing.is_empty() {
        return Err(Error::InvalidInput("squeezing list is empty".into()));
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 lambda steps, got {steps}")));
    }
    let mut rows = Vec::with_capacity(squeezing.len() * steps);
    for &s_db in squeezing {
        for i in 0..steps {
            let lambda = i as f64 / (steps - 1) as f64;
            let (gie_lower, gie_upper) = match gie {
                Some(budget) => {
                    let r = gie_numeric(&pure_loss_state(lambda, s_db)?, &Split::ab(), budget)?;
                    (Some(r.lower), Some(r.upper))
                }
                None => (None, None),
            };
            rows.push(SweepRow {
                lambda,
                s_db,
                reof: reof_closed_form(lambda, s_db)?,
                d_one_way: one_way_distillable(lambda, s_db)?,
                gie_lower,
                gie_upper,
            });
        }
    }
    Ok(rows)
}

/// λ values in (0, 1] where `reof - d_one_way` changes sign between consecutive rows of one
/// squeezing value, located by linear interpolation.
pub fn sign_changes(rows: &[SweepRow], s_db: f64) -> Vec<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.s_db == s_db && r.lambda > 0.0).map(|r| (r.lambda, r.reof - r.d_one_way)).collect();
    pts.windows(2)
        .filter(|w| w[0].1 != 0.0 && w[0].1.signum() != w[1].1.signum())
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1 / (w[0].1 - w[1].1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_endpoints() {
        let rows = loss_sweep(&[2.0, 10.0], 11, None).unwrap();
        assert_eq!(rows.len(), 22);
        assert_eq!(rows[0].lambda, 0.0);
        assert_eq!(rows[10].lambda, 1.0);
        assert!(rows.iter().all(|r| r.reof >= 0.0 && r.d_one_way >= 0.0 && r.gie_lower.is_none()));
        assert!(loss_sweep(&[], 10, None).is_err());
        assert!(loss_sweep(&[2.0], 1, None).is_err());
    }

    #[test]
    fn crossing_located_from_grid() {
        let rows = loss_sweep(&[2.0, 10.0], 1000, None).unwrap();
        assert!(sign_changes(&rows, 2.0).is_empty());
        let c = sign_changes(&rows, 10.0);
        assert_eq!(c.len(), 1);
        assert!((c[0] - 0.912).abs() < 2e-3, "{c:?}");
    }
}
