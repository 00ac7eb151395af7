//! Normal QCMs: two-mode standard form, numerical normality search, and the
//! commutator certificate for the non-normal three-mode family.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infomeasures::split_layout;
use crate::linalg::{max_abs, principal, sqrtm_pd, submatrix};
use crate::model::{Partition, Qcm, Split};
use crate::random::gaussian_matrix;
use crate::symplectic::{is_pure_qcm, omega_xp, reorder, symplectic_inverse, williamson, Ordering};

/// Residual below which a numerical search certifies normality.
pub const NORMAL_TOL: f64 = 1e-7;
/// Commutator norm above which the family certificate fires.
pub const COMMUTATOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    NormalByConstruction,
    NumericallyNormal,
    ObstructionFound,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    /// Frobenius norm of the best xp cross block found.
    pub residual: f64,
    pub certificate: Certificate,
    /// `(‖[FFᵀ, GGᵀ]‖_F, |b₁ - b₂|)` for the three-mode family.
    pub obstruction: Option<(f64, f64)>,
    /// Local symplectic `S_A ⊕ S_B` (xp layout of the AB block) achieving the residual.
    #[serde(skip)]
    pub local: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct NormalityBudget {
    pub seed: u64,
    pub restarts: usize,
    /// Levenberg–Marquardt patience: residual evaluations allowed per parameter.
    pub patience: usize,
}

impl Default for NormalityBudget {
    fn default() -> Self {
        NormalityBudget { seed: 0, restarts: 6, patience: 30 }
    }
}

#[derive(Debug, Clone)]
pub struct StandardForm {
    /// Single-mode symplectics in `(x, p)` ordering.
    pub s_a: DMatrix<f64>,
    pub s_b: DMatrix<f64>,
    /// `(S_A ⊕ S_B) V (S_A ⊕ S_B)ᵀ` in xp ordering.
    pub v_std: DMatrix<f64>,
    /// `S_A ⊕ S_B` in xp ordering.
    pub local: DMatrix<f64>,
}

/// Frobenius norm of the x–p cross block.
pub fn cross_block_norm(v: &DMatrix<f64>) -> f64 {
    let m = v.nrows() / 2;
    v.view((0, m), (m, m)).norm()
}

fn is_scalar_2x2(a: &DMatrix<f64>) -> bool {
    let scale = max_abs(a).max(1.0);
    a[(0, 1)].abs() <= 1e-15 * scale && (a[(0, 0)] - a[(1, 1)]).abs() <= 1e-15 * scale
}

fn local_williamson_2x2(a: &DMatrix<f64>) -> DMatrix<f64> {
    if is_scalar_2x2(a) {
        return DMatrix::identity(2, 2);
    }
    let nu = a.determinant().sqrt();
    sqrtm_pd(&(a / nu)).try_inverse().expect("positive definite")
}

/// Embeds single-mode `(x, p)` matrices for modes 0 and 1 into the two-mode xp layout.
fn two_mode_local(s_a: &DMatrix<f64>, s_b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(4, 4);
    for (s, idx) in [(s_a, [0usize, 2]), (s_b, [1, 3])] {
        for i in 0..2 {
            for j in 0..2 {
                l[(idx[i], idx[j])] = s[(i, j)];
            }
        }
    }
    l
}

/// Local Williamson on each side, then local rotations from a signed SVD of the coupling.
pub fn two_mode_standard_form(v: &Qcm, split: &Split) -> Result<StandardForm> {
    let (vab, ia, ib) = split_layout(v, split)?;
    if ia.len() != 2 || ib.len() != 2 {
        return Err(Error::InvalidPartition("standard form needs one mode on each side".into()));
    }
    let a = principal(&vab, &ia);
    let b = principal(&vab, &ib);
    let c = submatrix(&vab, &ia, &ib);
    let t_a = local_williamson_2x2(&a);
    let t_b = local_williamson_2x2(&b);
    let c1 = &t_a * &c * t_b.transpose();
    let scale = max_abs(&c1).max(1.0);
    let (r_a, r_b) = if c1[(0, 1)].abs() <= 1e-14 * scale && c1[(1, 0)].abs() <= 1e-14 * scale {
        (DMatrix::identity(2, 2), DMatrix::identity(2, 2))
    } else {
        let svd = c1.clone().svd(true, true);
        let mut u = svd.u.expect("requested");
        let mut w = svd.v_t.expect("requested").transpose();
        if u.determinant() < 0.0 {
            u.column_mut(1).neg_mut();
        }
        if w.determinant() < 0.0 {
            w.column_mut(1).neg_mut();
        }
        (u.transpose(), w.transpose())
    };
    let s_a = r_a * t_a;
    let s_b = r_b * t_b;
    // The AB block came out in partition order; flip if B precedes A.
    let (first, second) = if ia[0] == 0 { (&s_a, &s_b) } else { (&s_b, &s_a) };
    let local = two_mode_local(first, second);
    let v_std = crate::linalg::symmetrize(&(&local * &vab * local.transpose()));
    Ok(StandardForm { s_a, s_b, v_std, local })
}

/// Symmetric K from a parameter slice, upper triangle row by row.
pub(crate) fn symmetric_from(theta: &[f64], n: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(n, n);
    let mut it = theta.iter();
    for i in 0..n {
        for j in i..n {
            let v = *it.next().expect("parameter count");
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Block-diagonal local symplectic `exp(ΩK_A) ⊕ exp(ΩK_B)` in the AB xp layout.
fn local_from_params(theta: &[f64], ia: &[usize], ib: &[usize]) -> DMatrix<f64> {
    let ka = ia.len() / 2;
    let kb = ib.len() / 2;
    let na = ka * (2 * ka + 1);
    let sa = (omega_xp(ka) * symmetric_from(&theta[..na], 2 * ka)).exp();
    let sb = (omega_xp(kb) * symmetric_from(&theta[na..], 2 * kb)).exp();
    crate::linalg::embed(ia.len() + ib.len(), &[(ia, &sa), (ib, &sb)])
}

struct CrossBlockProblem<'a> {
    v: &'a DMatrix<f64>,
    seed_frame: &'a DMatrix<f64>,
    ia: &'a [usize],
    ib: &'a [usize],
    params: DVector<f64>,
    rows: usize,
}

impl CrossBlockProblem<'_> {
    fn frame(&self, p: &DVector<f64>) -> DMatrix<f64> {
        local_from_params(p.as_slice(), self.ia, self.ib) * self.seed_frame
    }

    fn residual_at(&self, p: &DVector<f64>) -> DVector<f64> {
        let l = self.frame(p);
        let w = &l * self.v * l.transpose();
        let m = w.nrows() / 2;
        let mut r = DVector::zeros(self.rows);
        for i in 0..m {
            for j in 0..m {
                r[i * m + j] = w[(i, m + j)];
            }
        }
        r
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for CrossBlockProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.params.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.params.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let r = self.residual_at(&self.params);
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let n = self.params.len();
        let mut jac = DMatrix::zeros(self.rows, n);
        for k in 0..n {
            let h = 1e-7 * (1.0 + self.params[k].abs());
            let mut plus = self.params.clone();
            plus[k] += h;
            let mut minus = self.params.clone();
            minus[k] -= h;
            let col = (self.residual_at(&plus) - self.residual_at(&minus)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        jac.iter().all(|v| v.is_finite()).then_some(jac)
    }
}

/// Block-diagonal frame from each side's Williamson decomposition, `W_A⁻¹ ⊕ W_B⁻¹`.
fn williamson_seed_frame(vab: &DMatrix<f64>, ia: &[usize], ib: &[usize]) -> Result<DMatrix<f64>> {
    let wa = symplectic_inverse(&williamson(&principal(vab, ia))?.s);
    let wb = symplectic_inverse(&williamson(&principal(vab, ib))?.s);
    Ok(crate::linalg::embed(vab.nrows(), &[(ia, &wa), (ib, &wb)]))
}

/// Searches local symplectics minimizing the xp cross block. Only normality can be
/// certified numerically; failure to reach the tolerance yields `Inconclusive`.
pub fn is_normal(v: &Qcm, split: &Split, budget: &NormalityBudget) -> Result<NormalityReport> {
    let (vab, ia, ib) = split_layout(v, split)?;
    let two_mode = ia.len() == 2 && ib.len() == 2;
    let pure = is_pure_qcm(&vab, 1e-8);
    let by_construction = two_mode || pure;
    let finish = |residual: f64, local: DMatrix<f64>| NormalityReport {
        residual,
        certificate: if by_construction {
            Certificate::NormalByConstruction
        } else if residual < NORMAL_TOL {
            Certificate::NumericallyNormal
        } else {
            Certificate::Inconclusive
        },
        obstruction: None,
        local,
    };

    let id = DMatrix::identity(vab.nrows(), vab.nrows());
    let mut best = (cross_block_norm(&vab), id.clone());
    if best.0 < 1e-14 {
        return Ok(finish(best.0, id));
    }
    let mut frames = Vec::new();
    if two_mode {
        let sf = two_mode_standard_form(v, split)?;
        let r = cross_block_norm(&sf.v_std);
        if r < best.0 {
            best = (r, sf.local.clone());
        }
        frames.push(sf.local);
    }
    frames.push(williamson_seed_frame(&vab, &ia, &ib)?);
    frames.push(id);
    if best.0 < 1e-10 {
        return Ok(finish(best.0, best.1));
    }

    let ka = ia.len() / 2;
    let kb = ib.len() / 2;
    let np = ka * (2 * ka + 1) + kb * (2 * kb + 1);
    let m = vab.nrows() / 2;
    let rows = (m * m).max(np);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let lm = LevenbergMarquardt::new().with_patience(budget.patience.max(1));
    let attempts = frames.len().max(budget.restarts);
    for k in 0..attempts {
        let frame = &frames[k % frames.len()];
        let start = if k < frames.len() {
            DVector::zeros(np)
        } else {
            DVector::from_iterator(np, gaussian_matrix(&mut rng, np, 1).iter().map(|x| 0.3 * x))
        };
        let problem = CrossBlockProblem { v: &vab, seed_frame: frame, ia: &ia, ib: &ib, params: start, rows };
        let (solved, _report) = lm.minimize(problem);
        let r = solved.residual_at(&solved.params).norm();
        if r.is_finite() && r < best.0 {
            best = (r, solved.frame(&solved.params));
        }
        if best.0 < 1e-10 {
            break;
        }
    }
    Ok(finish(best.0, best.1))
}

/// Induced ∞-norm (maximum absolute row sum).
fn norm_inf(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// The three-mode family `[[a𝟙, F, G], [Fᵀ, b₁𝟙, 0], [Gᵀ, 0, b₂𝟙]]` (mode-wise, A | B₁B₂)
/// with its commutator certificate.
pub fn non_normal_family(
    a: f64,
    b1: f64,
    b2: f64,
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    budget: &NormalityBudget,
) -> Result<(Qcm, NormalityReport)> {
    if f.shape() != (2, 2) || g.shape() != (2, 2) {
        return Err(Error::InvalidShape("F and G must be 2x2".into()));
    }
    if norm_inf(f) > 1.0 || norm_inf(g) > 1.0 || a < 3.0 || b1 < 2.0 || b2 < 2.0 {
        return Err(Error::InvalidInput("need ‖F‖∞, ‖G‖∞ ≤ 1, a ≥ 3 and b₁, b₂ ≥ 2".into()));
    }
    let mut mw = DMatrix::zeros(6, 6);
    for i in 0..2 {
        mw[(i, i)] = a;
        mw[(2 + i, 2 + i)] = b1;
        mw[(4 + i, 4 + i)] = b2;
        for j in 0..2 {
            mw[(i, 2 + j)] = f[(i, j)];
            mw[(2 + j, i)] = f[(i, j)];
            mw[(i, 4 + j)] = g[(i, j)];
            mw[(4 + j, i)] = g[(i, j)];
        }
    }
    let partition = Partition::from_pairs(&[("A", 1), ("B", 2)])?;
    let v = Qcm::new(reorder(&mw, Ordering::ModeWise, Ordering::XpBlock)?, partition)?;
    let ff = f * f.transpose();
    let gg = g * g.transpose();
    let comm = (&ff * &gg - &gg * &ff).norm();
    let gap = (b1 - b2).abs();
    let mut report = is_normal(&v, &Split::ab(), budget)?;
    report.obstruction = Some((comm, gap));
    if gap > 0.0 && comm > COMMUTATOR_TOL {
        report.certificate = Certificate::ObstructionFound;
    }
    Ok((v, report))
}
