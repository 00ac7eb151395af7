//! Log-determinant entropies and mutual informations, von Neumann entropy, and homodyne limits.
//!
//! All values are in bits.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{condition_sym, log2_det_pd, principal, require_pd};
use crate::model::{Qcm, Split};
use crate::schur::{schur_complement, CONDITION_GUARD};
use crate::symplectic::symplectic_eigenvalues;

/// Agreement required between the two conditional mutual information routes.
pub const ROUTE_TOL: f64 = 1e-8;

/// Default homodyne schedule.
pub const DEFAULT_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl MeasureValue {
    pub fn new(value: f64) -> Self {
        MeasureValue { value, diagnostics: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.diagnostics.insert(key.into(), v);
        self
    }
}

fn log2det(m: &DMatrix<f64>, what: &str) -> Result<f64> {
    log2_det_pd(m).ok_or_else(|| Error::InvalidInput(format!("{what} is not positive definite")))
}

/// `M(V) = ½ log₂ det V`.
pub fn logdet_entropy(v: &DMatrix<f64>) -> Result<f64> {
    if !v.is_square() {
        return Err(Error::InvalidShape(format!("{}x{} is not square", v.nrows(), v.ncols())));
    }
    Ok(0.5 * log2det(v, "covariance matrix")?)
}

/// `g(x) = (x+1) log₂(x+1) - x log₂ x`, with `g(0) = 0`.
pub fn bosonic_g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// `Σ_j g((ν_j - 1)/2)`.
pub fn von_neumann_entropy(v: &DMatrix<f64>) -> Result<f64> {
    Ok(symplectic_eigenvalues(v)?.iter().map(|nu| bosonic_g(((nu - 1.0) / 2.0).max(0.0))).sum())
}

/// `½ log₂ (det V_a det V_b / det V_ab)` for index sets of `v`.
pub fn im_indices(v: &DMatrix<f64>, ia: &[usize], ib: &[usize]) -> Result<f64> {
    let iab: Vec<usize> = ia.iter().chain(ib).copied().collect();
    let la = log2det(&principal(v, ia), "A block")?;
    let lb = log2det(&principal(v, ib), "B block")?;
    let lab = log2det(&principal(v, &iab), "AB block")?;
    Ok(0.5 * (la + lb - lab))
}

/// Conditional version via determinants, `½ log₂ (det V_ae det V_be / det V_e det V_abe)`.
pub fn im_conditional_indices(v: &DMatrix<f64>, ia: &[usize], ib: &[usize], ie: &[usize]) -> Result<f64> {
    let cat = |xs: &[&[usize]]| -> Vec<usize> { xs.iter().flat_map(|x| x.iter().copied()).collect() };
    let lae = log2det(&principal(v, &cat(&[ia, ie])), "AE block")?;
    let lbe = log2det(&principal(v, &cat(&[ib, ie])), "BE block")?;
    let le = log2det(&principal(v, ie), "E block")?;
    let labe = log2det(&principal(v, &cat(&[ia, ib, ie])), "ABE block")?;
    Ok(0.5 * (lae + lbe - le - labe))
}

/// Local index sets of the two sides inside the AB block taken in partition order.
pub fn split_layout(v: &Qcm, split: &Split) -> Result<(DMatrix<f64>, Vec<usize>, Vec<usize>)> {
    split.validate(&v.partition)?;
    let names = split.all_names();
    let sub = v.partition.select(&names)?;
    let ia = sub.indices(&split.a_names())?;
    let ib = sub.indices(&split.b_names())?;
    Ok((v.block(&names)?, ia, ib))
}

pub fn im_mutual(v: &Qcm, split: &Split) -> Result<f64> {
    let (vab, ia, ib) = split_layout(v, split)?;
    im_indices(&vab, &ia, &ib)
}

/// `I_M(A:B|E)`, computed by determinants and as `I_M(A:B)` of `V/V_E`; the routes must agree.
pub fn im_conditional(v: &Qcm, a: &[&str], b: &[&str], e: &[&str]) -> Result<MeasureValue> {
    let all: Vec<&str> = a.iter().chain(b).chain(e).copied().collect();
    let sub = v.partition.select(&all)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidPartition("both A and B must be non-empty".into()));
    }
    let mat = v.block(&all)?;
    let ia = sub.indices(a)?;
    let ib = sub.indices(b)?;
    if e.is_empty() {
        return Ok(MeasureValue::new(im_indices(&mat, &ia, &ib)?));
    }
    let ie = sub.indices(e)?;
    let ve = principal(&mat, &ie);
    let cond = condition_sym(&ve);
    if !(cond <= CONDITION_GUARD) {
        return Err(Error::SingularBlock { cond });
    }
    let direct = im_conditional_indices(&mat, &ia, &ib, &ie)?;
    let iab: Vec<usize> = ia.iter().chain(&ib).copied().collect();
    let comp = schur_complement(&principal(&mat, &iab.iter().chain(&ie).copied().collect::<Vec<_>>()), &(iab.len()..iab.len() + ie.len()).collect::<Vec<_>>())?;
    let na = ia.len();
    let via_schur = im_indices(&comp, &(0..na).collect::<Vec<_>>(), &(na..iab.len()).collect::<Vec<_>>())?;
    let gap = (direct - via_schur).abs();
    if gap > ROUTE_TOL * direct.abs().max(1.0) {
        return Err(Error::NumericInconsistency(format!(
            "conditional mutual information routes disagree: {direct} vs {via_schur}"
        )));
    }
    Ok(MeasureValue::new(direct).with("schur_route", via_schur).with("route_gap", gap).with("cond_e", cond))
}

/// `(I_M(A_x:B_x)_{V^x}, I_M(A_p:B_p)_{V/V^x})`.
pub fn im_xp_decompose(v: &Qcm, split: &Split) -> Result<(f64, f64)> {
    let (vab, ia, ib) = split_layout(v, split)?;
    let m = vab.nrows() / 2;
    let xs = |idx: &[usize]| -> Vec<usize> { idx.iter().copied().filter(|&i| i < m).collect() };
    let (xa, xb) = (xs(&ia), xs(&ib));
    let ix = im_indices(&vab, &xa, &xb)?;
    // After removing the x block the remaining indices are the p indices in order.
    let pcomp = schur_complement(&vab, &(0..m).collect::<Vec<_>>())?;
    let pa: Vec<usize> = ia.iter().filter(|&&i| i >= m).map(|i| i - m).collect();
    let pb: Vec<usize> = ib.iter().filter(|&&i| i >= m).map(|i| i - m).collect();
    let ip = im_indices(&pcomp, &pa, &pb)?;
    Ok((ix, ip))
}

/// Richardson limit of `I_M(A:B)_{V + Γ_A(t) ⊕ Γ_B(t)}` as t → 0⁺.
///
/// The schedule must be strictly decreasing and positive with at least two points.
/// Returns the extrapolated value with `error_estimate` and `last_value` diagnostics.
pub fn homodyne_limit_im(v: &Qcm, split: &Split, schedule: &[f64]) -> Result<MeasureValue> {
    if schedule.len() < 2 || schedule.iter().any(|t| !(*t > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("schedule must be positive and strictly decreasing with >= 2 points".into()));
    }
    let (vab, ia, ib) = split_layout(v, split)?;
    require_pd(&vab, "AB block")?;
    let m = vab.nrows() / 2;
    let mut values = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let mut w = vab.clone();
        for i in 0..m {
            w[(i, i)] += t;
            w[(m + i, m + i)] += 1.0 / t;
        }
        values.push(im_indices(&w, &ia, &ib)?);
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for d in diffs.windows(2) {
        if d[1] > d[0] + 1e-12 {
            return Err(Error::ConvergenceFailure(format!("homodyne sequence is not contracting: {values:?}")));
        }
    }
    let n = values.len();
    let (t1, t2) = (schedule[n - 2], schedule[n - 1]);
    let (f1, f2) = (values[n - 2], values[n - 1]);
    let limit = (t1 * f2 - t2 * f1) / (t1 - t2);
    Ok(MeasureValue::new(limit).with("error_estimate", (limit - f2).abs()).with("last_value", f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::{direct_sum, purify, squeezing_parameter, thermal, tmsv, Partition};

    fn cosh2r(s: f64) -> f64 {
        (2.0 * squeezing_parameter(s)).cosh()
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet_entropy(&DMatrix::identity(4, 4)).unwrap(), 0.0);
        let v = tmsv(8.0).unwrap();
        assert!(logdet_entropy(v.matrix()).unwrap().abs() < 1e-9);
        let va = v.block(&["A"]).unwrap();
        assert!((logdet_entropy(&va).unwrap() - cosh2r(8.0).log2()).abs() < 1e-12);
        assert!(logdet_entropy(&(-DMatrix::<f64>::identity(2, 2))).is_err());
    }

    #[test]
    fn bosonic_g_values() {
        assert_eq!(bosonic_g(0.0), 0.0);
        assert!((bosonic_g(1.0) - 2.0).abs() < 1e-15);
        assert!(von_neumann_entropy(tmsv(9.0).unwrap().matrix()).unwrap().abs() < 1e-7);
    }

    #[test]
    fn mutual_information_examples() {
        let prod = direct_sum(&thermal(2.0, "A").unwrap(), &thermal(3.0, "B").unwrap()).unwrap();
        let split = Split::new(&["A1"], &["B2"]);
        assert!(im_mutual(&prod, &split).unwrap().abs() < 1e-14);
        let g = tmsv(7.0).unwrap();
        let i = im_mutual(&g, &Split::ab()).unwrap();
        let ma = logdet_entropy(&g.block(&["A"]).unwrap()).unwrap();
        assert!((i - 2.0 * ma).abs() < 1e-9);
        let inv = Qcm::new_unchecked(g.matrix().clone().try_inverse().unwrap(), g.partition.clone());
        assert!((im_mutual(&inv, &Split::ab()).unwrap() - i).abs() < 1e-9);
        assert!(im_mutual(&g, &Split::new(&["A"], &["C"])).is_err());
    }

    #[test]
    fn conditional_on_product_environment_vanishes() {
        let v = direct_sum(&thermal(2.0, "A").unwrap(), &thermal(3.0, "B").unwrap()).unwrap();
        let v = v.with_partition(Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap()).unwrap();
        let g = purify(&v).unwrap();
        let c = im_conditional(&g, &["A"], &["B"], &["E"]).unwrap();
        assert!(c.value.abs() < 1e-9);
        let plain = im_conditional(&v, &["A"], &["B"], &[]).unwrap();
        assert!(plain.value.abs() < 1e-12);
    }

    #[test]
    fn xp_decomposition_of_tmsv() {
        let s = 6.0;
        let (ix, ip) = im_xp_decompose(&tmsv(s).unwrap(), &Split::ab()).unwrap();
        assert!((ix - cosh2r(s).log2()).abs() < 1e-10);
        assert!((ip - cosh2r(s).log2()).abs() < 1e-10);
        let prod = Qcm::vacuum(Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap());
        assert_eq!(im_xp_decompose(&prod, &Split::ab()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn homodyne_limit_of_tmsv() {
        for s in [2.0, 10.0] {
            let h = homodyne_limit_im(&tmsv(s).unwrap(), &Split::ab(), &[1e-2, 1e-3, 1e-4]).unwrap();
            let (ix, _) = im_xp_decompose(&tmsv(s).unwrap(), &Split::ab()).unwrap();
            assert!((h.value - ix).abs() < 1e-4, "{} vs {}", h.value, ix);
        }
        let prod = Qcm::vacuum(Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap());
        assert!(homodyne_limit_im(&prod, &Split::ab(), &DEFAULT_SCHEDULE).unwrap().value.abs() < 1e-12);
        assert!(homodyne_limit_im(&prod, &Split::ab(), &[1e-2, 1e-1]).is_err());
    }

    #[test]
    fn conditional_routes_agree_on_random_measured_state() {
        use crate::random::random_pure_qcm;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g = random_pure_qcm(&mut rng, 3, 0.5);
        let seeds = random_pure_qcm(&mut rng, 1, 0.5);
        let mut w = g.clone();
        // Add a seed on each mode.
        for k in 0..3 {
            let idx = [k, 3 + k];
            for (i, &r) in idx.iter().enumerate() {
                for (j, &c) in idx.iter().enumerate() {
                    w[(r, c)] += seeds[(i, j)];
                }
            }
        }
        let q = Qcm::new_unchecked(w, Partition::from_pairs(&[("A", 1), ("B", 1), ("E", 1)]).unwrap());
        let c = im_conditional(&q, &["A"], &["B"], &["E"]).unwrap();
        assert!(c.diagnostics["route_gap"] < 1e-10);
        assert!(max_abs(&q.matrix().clone()) > 0.0);
    }
}
