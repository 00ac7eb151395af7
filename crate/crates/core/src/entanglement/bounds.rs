//! Secret-key bound assembly and the additivity check.

use serde::Serialize;

use super::closed_form::{detect_pure_loss, reof_closed_form};
use super::gie::{gie_numeric, GieBudget};
use super::param::OptOptions;
use super::reof::reof_numeric;
use crate::error::{Error, Result};
use crate::model::{direct_sum_n, Qcm, Split};

/// Upper bounds on Gaussian secret-key rates, all in bits.
#[derive(Debug, Clone, Serialize)]
pub struct KeyBounds {
    pub reof: f64,
    /// Bound on the one-way Gaussian key.
    pub one_way_bound: f64,
    /// Bound on the two-way Gaussian key (twice the entanglement; whether the factor is
    /// needed is open).
    pub two_way_bound: f64,
    /// Bound on the key distilled by Gaussian local operations and public communication.
    pub glmpc_bound: f64,
    pub gie_lower: f64,
    /// True when `reof` came from the loss-family closed form.
    pub closed_form: bool,
    /// False when the optimizer or the intrinsic-entanglement search hit its budget.
    pub converged: bool,
}

/// Entanglement value used as the reference: the closed form inside the loss family,
/// otherwise the optimizer. Returns `(value, closed_form, converged)`.
pub fn reof_value(v: &Qcm, split: &Split, opts: &OptOptions) -> Result<(f64, bool, bool)> {
    if let Some((lambda, s_db)) = detect_pure_loss(v, split) {
        return Ok((reof_closed_form(lambda, s_db)?, true, true));
    }
    let r = reof_numeric(v, split, opts)?;
    Ok((r.value, false, r.converged))
}

pub fn key_bounds(v: &Qcm, split: &Split, opts: &OptOptions, budget: &GieBudget) -> Result<KeyBounds> {
    let (reof, closed_form, converged) = reof_value(v, split, opts)?;
    let gie = gie_numeric(v, split, budget)?;
    Ok(KeyBounds {
        reof,
        one_way_bound: reof,
        two_way_bound: 2.0 * reof,
        glmpc_bound: reof,
        gie_lower: gie.lower,
        closed_form,
        converged: converged && !gie.partial,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub copies: usize,
    /// Optimizer value on `V^{⊕n}`, an upper bound.
    pub numeric: f64,
    /// `n` times the single-copy value.
    pub reference: f64,
    pub deviation: f64,
    /// `max(0, numeric - reference)`: the direction that should vanish up to optimizer slack.
    pub excess: f64,
}

/// Compares the optimizer on `V^{⊕n}` (split `A1..An | B1..Bn`) with `n` times the single-copy value.
pub fn additivity_check(v: &Qcm, split: &Split, n: usize, opts: &OptOptions) -> Result<AdditivityReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidInput(format!("additivity check supports 2 or 3 copies, got {n}")));
    }
    split.validate(&v.partition)?;
    let sub = v.marginal(&split.all_names())?;
    let copies = direct_sum_n(&sub, n)?;
    let rename = |names: Vec<&str>| -> Vec<String> {
        (1..=n).flat_map(|k| names.iter().map(move |s| format!("{s}{k}"))).collect()
    };
    let a = rename(split.a_names());
    let b = rename(split.b_names());
    let a_ref: Vec<&str> = a.iter().map(String::as_str).collect();
    let b_ref: Vec<&str> = b.iter().map(String::as_str).collect();
    let big_split = Split::new(&a_ref, &b_ref);
    let numeric = reof_numeric(&copies, &big_split, opts)?.value;
    let reference = n as f64 * reof_value(v, split, opts)?.0;
    Ok(AdditivityReport {
        copies: n,
        numeric,
        reference,
        deviation: (numeric - reference).abs(),
        excess: (numeric - reference).max(0.0),
    })
}
