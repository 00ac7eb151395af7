//! Numerical Rényi-2 Gaussian entanglement of formation: a barrier search over pure
//! QCMs below V, and the squashed route through a purification.

use nalgebra::DMatrix;

use super::param::{capped_theta, gamma_of, OptOptions, OptimizerResult, PureQcmParam, ENV_SQUEEZE_CAP};
use crate::error::{Error, Result};
use crate::infomeasures::{im_conditional_indices, im_indices, split_layout, ROUTE_TOL};
use crate::linalg::{condition_sym, ln_det_pd, log2_det_pd, max_eigenvalue, principal, symmetrize};
use crate::model::{purify_matrix, Qcm, Split};
use crate::optimize::NelderMead;
use crate::schur::schur_complement;
use crate::symplectic::{williamson, PURE_TOL};

/// `½ log₂ det` of a principal block, `+∞` if it is not positive definite.
fn half_log2det(v: &DMatrix<f64>, idx: &[usize]) -> f64 {
    log2_det_pd(&principal(v, idx)).map_or(f64::INFINITY, |l| 0.5 * l)
}

fn excess(gamma: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    max_eigenvalue(&symmetrize(&(gamma - v))).max(0.0)
}

/// Result for an input that is already pure: the only feasible γ is V itself.
fn pure_result(vab: &DMatrix<f64>, ia: &[usize]) -> OptimizerResult {
    OptimizerResult {
        value: half_log2det(vab, ia),
        argument: PureQcmParam::zeros(0),
        gamma: vab.clone(),
        feasibility_residual: 0.0,
        restarts: 0,
        converged: true,
        evaluations: 0,
    }
}

/// Pure γ below V written as `S (𝟙 ⊕ γ'') Sᵀ` with S from the Williamson form of V and
/// γ'' a pure QCM on the mixed Williamson modes. The vacuum on the pure modes is forced
/// because `iΩ ≤ γ' ≤ 𝟙` on a mode leaves only `γ' = 𝟙`.
struct Reduced<'a> {
    ia: &'a [usize],
    s: DMatrix<f64>,
    /// Williamson x and p indices of the mixed modes.
    mixed_idx: Vec<usize>,
    lambda_j: DMatrix<f64>,
    k: usize,
}

impl<'a> Reduced<'a> {
    fn new(vab: &DMatrix<f64>, ia: &'a [usize]) -> Result<Option<Self>> {
        let w = williamson(vab)?;
        let m = w.nu.len();
        let mixed: Vec<usize> = (0..m).filter(|&j| w.nu[j] - 1.0 > PURE_TOL).collect();
        if mixed.is_empty() {
            return Ok(None);
        }
        let k = mixed.len();
        let mixed_idx: Vec<usize> = mixed.iter().copied().chain(mixed.iter().map(|j| m + j)).collect();
        let lambda_j = DMatrix::from_fn(2 * k, 2 * k, |i, j| if i == j { w.nu[mixed[i % k]] } else { 0.0 });
        Ok(Some(Reduced { ia, s: w.s, mixed_idx, lambda_j, k }))
    }

    fn slack_ln_det(&self, inner: &DMatrix<f64>) -> Option<f64> {
        ln_det_pd(&symmetrize(&(&self.lambda_j - inner)))
    }

    fn gamma_from_inner(&self, inner: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.s.nrows();
        let mut g = DMatrix::identity(n, n);
        crate::linalg::set_principal(&mut g, &self.mixed_idx, inner);
        symmetrize(&(&self.s * g * self.s.transpose()))
    }

    fn gamma(&self, theta: &[f64]) -> DMatrix<f64> {
        self.gamma_from_inner(&gamma_of(self.k, theta))
    }

    fn objective(&self, theta: &[f64], mu: f64) -> f64 {
        let inner = gamma_of(self.k, theta);
        let Some(slack) = self.slack_ln_det(&inner) else {
            return f64::INFINITY;
        };
        let value = half_log2det(&self.gamma_from_inner(&inner), self.ia);
        if mu > 0.0 {
            value - mu * slack
        } else {
            value
        }
    }

    fn feasible(&self, theta: &[f64]) -> bool {
        self.slack_ln_det(&gamma_of(self.k, theta)).is_some()
    }
}

fn stage_optimizer(opts: &OptOptions, first: bool) -> NelderMead {
    NelderMead {
        max_evals: opts.max_evals,
        f_tol: 1e-12,
        x_tol: 1e-9,
        initial_step: if first { 0.1 } else { 0.02 },
    }
}

/// Start points shrunk towards the origin until they are strictly feasible.
fn feasible_starts(opts: &OptOptions, dim: usize, feasible: impl Fn(&[f64]) -> bool) -> Vec<Vec<f64>> {
    opts.starts(dim, opts.perturbation)
        .into_iter()
        .map(|mut x| {
            for _ in 0..40 {
                if feasible(&x) {
                    break;
                }
                x.iter_mut().for_each(|v| *v *= 0.5);
            }
            x
        })
        .collect()
}

/// Minimizes `½ log₂ det γ_A` over pure `γ ≤ V_AB` by a log-barrier continuation followed
/// by a barrier-free polish that rejects infeasible points. The value is an upper bound.
pub fn reof_numeric(v: &Qcm, split: &Split, opts: &OptOptions) -> Result<OptimizerResult> {
    let (vab, ia, _) = split_layout(v, split)?;
    let Some(red) = Reduced::new(&vab, &ia)? else {
        return Ok(pure_result(&vab, &ia));
    };
    let dim = PureQcmParam::dim(red.k);
    let starts = feasible_starts(opts, dim, |x| red.feasible(x));
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut evaluations = 0;
    for start in &starts {
        let mut x = start.clone();
        let mut converged = false;
        let stages: Vec<f64> = opts.barrier_schedule.iter().copied().chain([0.0]).collect();
        for (i, &mu) in stages.iter().enumerate() {
            let nm = stage_optimizer(opts, i == 0);
            let mut f = |t: &[f64]| red.objective(t, mu);
            let r = nm.minimize_restarting(&mut f, &x, 3);
            evaluations += r.evals;
            if r.value.is_finite() {
                x = r.x;
                converged = r.converged;
            }
        }
        let value = red.objective(&x, 0.0);
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((x, value, converged));
        }
    }
    let (theta, value, converged) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::ConvergenceFailure("no feasible point found".into()));
    }
    let gamma = red.gamma(&theta);
    let feasibility_residual = excess(&gamma, &vab);
    Ok(OptimizerResult {
        value,
        argument: PureQcmParam::new(red.k, theta),
        gamma,
        feasibility_residual,
        restarts: starts.len(),
        converged: converged && feasibility_residual <= 1e-7,
        evaluations,
    })
}

/// Index layout of a minimal purification of `V_AB`.
pub(crate) struct PurifiedLayout {
    pub gamma: DMatrix<f64>,
    pub ia: Vec<usize>,
    pub ib: Vec<usize>,
    pub ie: Vec<usize>,
    pub env_modes: usize,
}

impl PurifiedLayout {
    /// Environment only for the mixed Williamson modes; returns `None` for pure inputs.
    pub fn new(vab: &DMatrix<f64>, ia: &[usize], ib: &[usize]) -> Result<Option<Self>> {
        let p = purify_matrix(vab, Some(PURE_TOL))?;
        let e = p.env_modes();
        if e == 0 {
            return Ok(None);
        }
        let m = vab.nrows() / 2;
        let n = m + e;
        let map = |i: &usize| if *i < m { *i } else { i - m + n };
        Ok(Some(PurifiedLayout {
            gamma: p.gamma,
            ia: ia.iter().map(map).collect(),
            ib: ib.iter().map(map).collect(),
            ie: (m..m + e).chain(n + m..n + m + e).collect(),
            env_modes: e,
        }))
    }

    pub fn with_seed(&self, idx: &[usize], seed: &DMatrix<f64>) -> DMatrix<f64> {
        let mut g = self.gamma.clone();
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                g[(r, c)] += seed[(i, j)];
            }
        }
        g
    }
}

/// `½ inf I_M(A:B|E)` over pure environment seeds on a purification of `V_AB`.
/// The conditional state at the optimum is the pure `γ_AB` that the value certifies.
pub fn reof_squashed(v: &Qcm, split: &Split, opts: &OptOptions) -> Result<OptimizerResult> {
    let (vab, ia, ib) = split_layout(v, split)?;
    let Some(lay) = PurifiedLayout::new(&vab, &ia, &ib)? else {
        return Ok(pure_result(&vab, &ia));
    };
    let e = lay.env_modes;
    let objective = |theta: &[f64]| -> f64 {
        let g = lay.with_seed(&lay.ie, &gamma_of(e, &capped_theta(e, theta, ENV_SQUEEZE_CAP)));
        im_conditional_indices(&g, &lay.ia, &lay.ib, &lay.ie).map_or(f64::INFINITY, |x| 0.5 * x)
    };
    let dim = PureQcmParam::dim(e);
    let starts = opts.starts(dim, opts.perturbation);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut evaluations = 0;
    for start in &starts {
        let mut x = start.clone();
        let mut converged = false;
        for first in [true, false] {
            let mut f = |t: &[f64]| objective(t);
            let r = stage_optimizer(opts, first).minimize_restarting(&mut f, &x, 3);
            evaluations += r.evals;
            x = r.x;
            converged = r.converged;
        }
        let value = objective(&x);
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((x, value, converged));
        }
    }
    let (raw, value, converged) = best.expect("at least one start");
    let theta = capped_theta(e, &raw, ENV_SQUEEZE_CAP);
    let g = lay.with_seed(&lay.ie, &gamma_of(e, &theta));
    let direct = im_conditional_indices(&g, &lay.ia, &lay.ib, &lay.ie)?;
    let w = schur_complement(&g, &lay.ie)?;
    let via_schur = im_indices(&w, &ia, &ib)?;
    // Both routes lose accuracy in proportion to the conditioning of the environment block.
    let cond = condition_sym(&principal(&g, &lay.ie));
    let tol = ROUTE_TOL.max(10.0 * f64::EPSILON * cond);
    if (direct - via_schur).abs() > tol * direct.abs().max(1.0) {
        return Err(Error::NumericInconsistency(format!(
            "conditional mutual information routes disagree: {direct} vs {via_schur}"
        )));
    }
    let feasibility_residual = excess(&w, &vab);
    Ok(OptimizerResult {
        value,
        argument: PureQcmParam::new(e, theta),
        gamma: w,
        feasibility_residual,
        restarts: starts.len(),
        converged: converged && feasibility_residual <= 1e-7,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::closed_form::reof_closed_form;
    use crate::linalg::max_abs;
    use crate::model::{direct_sum, pure_loss_state, squeezing_parameter, thermal, tmsv, Partition};
    use crate::symplectic::is_pure_qcm;

    fn bona_fide(g: &DMatrix<f64>) -> f64 {
        crate::model::bona_fide_margin(g)
    }

    #[test]
    fn pure_input_returns_marginal_entropy() {
        let v = tmsv(7.0).unwrap();
        let r = reof_numeric(&v, &Split::ab(), &OptOptions::default()).unwrap();
        let c = (2.0 * squeezing_parameter(7.0)).cosh();
        assert!((r.value - c.log2()).abs() < 1e-9);
        assert_eq!(r.gamma, *v.matrix());
        let q = reof_squashed(&v, &Split::ab(), &OptOptions::default()).unwrap();
        assert!((q.value - c.log2()).abs() < 1e-9);
    }

    #[test]
    fn product_state_has_no_entanglement() {
        let v = direct_sum(&thermal(2.0, "A").unwrap(), &thermal(3.5, "B").unwrap()).unwrap();
        let v = v.with_partition(Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap()).unwrap();
        let r = reof_numeric(&v, &Split::ab(), &OptOptions { restarts: 2, ..Default::default() }).unwrap();
        assert!(r.value.abs() < 1e-8, "{}", r.value);
        let q = reof_squashed(&v, &Split::ab(), &OptOptions { restarts: 2, ..Default::default() }).unwrap();
        assert!(q.value.abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn loss_family_matches_closed_form() {
        let opts = OptOptions { restarts: 3, ..Default::default() };
        for (l, s) in [(0.5, 10.0), (0.2, 5.0), (0.9, 2.0)] {
            let v = pure_loss_state(l, s).unwrap();
            let exact = reof_closed_form(l, s).unwrap();
            let r = reof_numeric(&v, &Split::ab(), &opts).unwrap();
            assert!((r.value - exact).abs() < 1e-4, "({l},{s}): {} vs {exact}", r.value);
            assert!(r.value >= exact - 1e-6);
            assert!(r.feasibility_residual <= 1e-7 && r.converged);
            assert!(is_pure_qcm(&r.gamma, 1e-7));
            assert!(bona_fide(&r.gamma) > -1e-8);
            // The optimum is the two-mode squeezed vacuum with tanh r' = √λ tanh r.
            let rp = (l.sqrt() * squeezing_parameter(s).tanh()).atanh();
            let target = tmsv(20.0 * rp / std::f64::consts::LN_10).unwrap();
            assert!(max_abs(&(&r.gamma - target.matrix())) < 2e-2, "{}", r.gamma);
            let q = reof_squashed(&v, &Split::ab(), &opts).unwrap();
            assert!((q.value - exact).abs() < 1e-3, "({l},{s}): squashed {} vs {exact}", q.value);
        }
    }

    #[test]
    fn squashed_conditional_state_is_pure_and_feasible() {
        let v = pure_loss_state(0.6, 8.0).unwrap();
        let q = reof_squashed(&v, &Split::ab(), &OptOptions { restarts: 2, ..Default::default() }).unwrap();
        assert!(is_pure_qcm(&q.gamma, 1e-6));
        assert!(q.feasibility_residual < 1e-7);
        assert!(bona_fide(&q.gamma) > -1e-8);
    }
}
