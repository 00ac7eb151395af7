//! Randomized law suites: each law is checked on freshly generated instances, and any
//! violation is recorded with the instance that produced it so it can be replayed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::entanglement::{gie_numeric, reof_numeric, GieBudget, OptOptions};
use crate::error::{Error, Result};
use crate::infomeasures::{
    homodyne_limit_im, im_conditional, im_indices, im_mutual, im_xp_decompose, logdet_entropy, DEFAULT_SCHEDULE,
};
use crate::linalg::{embed, max_abs, min_eigenvalue, principal, submatrix, sym_eigenvalues, symmetrize, trace_norm_sym};
use crate::model::{Partition, Qcm, Split};
use crate::normality::{is_normal, NormalityBudget, NORMAL_TOL};
use crate::random::{
    gaussian_matrix, random_gl_symplectic, random_pd, random_psd, random_pure_qcm, random_qcm, random_symmetric,
    random_symplectic, random_two_mode_qcm,
};
use crate::schur::{complement_indices, measurement_update_matrix, schur_complement};
use crate::symplectic::{
    is_pure_qcm, omega, omega_xp, reorder, symplectic_eigenvalues, williamson, Ordering, PURE_TOL,
};

/// A violated law, with the data needed to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub detail: String,
    pub instance: Value,
}

pub type LawOutcome = std::result::Result<(), Violation>;

pub trait Law {
    fn name(&self) -> &'static str;
    fn trial(&self, rng: &mut ChaCha8Rng) -> LawOutcome;
}

pub struct LawSuite {
    pub name: &'static str,
    pub laws: Vec<Box<dyn Law>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub trial: usize,
    /// Seed of the trial generator; `trial_rng` rebuilds it.
    pub trial_seed: u64,
    pub detail: String,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub law: String,
    pub passed: usize,
    pub failed: usize,
    /// The first few failures.
    pub failures: Vec<FailureRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub laws: Vec<LawReport>,
    pub total_failed: usize,
    pub all_passed: bool,
}

const KEPT_FAILURES: usize = 3;

fn mat(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn fail(detail: impl Into<String>, instance: Value) -> LawOutcome {
    Err(Violation { detail: detail.into(), instance })
}

fn check(ok: bool, detail: impl FnOnce() -> String, instance: impl FnOnce() -> Value) -> LawOutcome {
    if ok {
        Ok(())
    } else {
        fail(detail(), instance())
    }
}

/// Library errors inside a trial count as violations.
fn guard<T>(r: Result<T>, instance: impl FnOnce() -> Value) -> std::result::Result<T, Violation> {
    r.map_err(|e| Violation { detail: e.to_string(), instance: instance() })
}

/// SplitMix64 finalizer mixing the run seed with law and trial indices.
fn mix(seed: u64, law: u64, trial: u64) -> u64 {
    let mut z = seed ^ law.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator of one trial; reproduces a recorded failure from its `trial_seed`.
pub fn trial_rng(trial_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut out = idx[..k].to_vec();
    out.sort_unstable();
    out
}

fn scale(m: &DMatrix<f64>) -> f64 {
    max_abs(m).max(1.0)
}

/// Random dimension and proper nonempty block.
fn dims(rng: &mut ChaCha8Rng) -> (usize, Vec<usize>) {
    let n = rng.random_range(2..=6);
    let k = rng.random_range(1..n);
    (n, random_subset(rng, n, k))
}

fn inertia(m: &DMatrix<f64>, tol: f64) -> (usize, usize, usize) {
    let ev = sym_eigenvalues(m);
    let pos = ev.iter().filter(|&&x| x > tol).count();
    let neg = ev.iter().filter(|&&x| x < -tol).count();
    (pos, neg, ev.len() - pos - neg)
}

/// A random bipartite QCM on 2..=3 modes with a random split.
fn random_bipartite(rng: &mut ChaCha8Rng, pure: bool) -> Qcm {
    let m = rng.random_range(2..=3);
    let ka = rng.random_range(1..m);
    let v = if pure { random_pure_qcm(rng, m, 0.5) } else { random_qcm(rng, m, 2.0) };
    Qcm::new_unchecked(v, Partition::from_pairs(&[("A", ka), ("B", m - ka)]).expect("static names"))
}

fn qcm_json(v: &Qcm) -> Value {
    json!({ "subsystems": v.partition.subsystems, "matrix": mat(v.matrix()) })
}

macro_rules! law {
    ($ty:ident, $name:literal, |$rng:ident| $body:block) => {
        pub struct $ty;
        impl Law for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn trial(&self, $rng: &mut ChaCha8Rng) -> LawOutcome {
                $body
            }
        }
    };
}

law!(DeterminantFactorization, "determinant_factorization", |rng| {
    let (n, block) = dims(rng);
    let r = random_pd(rng, n) * (0.2 + 5.0 * rng.random::<f64>());
    let inst = || json!({ "r": mat(&r), "block": block });
    let c = guard(schur_complement(&r, &block), inst)?;
    let lhs = r.determinant();
    let rhs = principal(&r, &block).determinant() * c.determinant();
    check((lhs - rhs).abs() <= 1e-8 * lhs.abs(), || format!("det R = {lhs}, det X det(R/X) = {rhs}"), inst)
});

law!(InertiaAdditivity, "inertia_additivity", |rng| {
    let n = rng.random_range(2..=6);
    let rank = rng.random_range(1..=n);
    let q = gaussian_matrix(rng, n, n).qr().q();
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i != j || i >= rank {
            0.0
        } else {
            let mag = 0.5 + 1.5 * ((i * 7 + n) % 5) as f64 / 4.0;
            if (i + rank) % 3 == 0 { -mag } else { mag }
        }
    });
    let r = symmetrize(&(&q * d * q.transpose()));
    let k = rng.random_range(1..=rank.min(n - 1).max(1));
    let block = random_subset(rng, n, k);
    let inst = || json!({ "r": mat(&r), "block": block });
    let x = principal(&r, &block);
    if crate::linalg::condition_sym(&x) > 1e8 {
        // A generic block of this rank is invertible; a near-singular draw says nothing about the law.
        return Ok(());
    }
    let c = guard(schur_complement(&r, &block), inst)?;
    let tol = 1e-8 * scale(&r);
    let (ir, ix, ic) = (inertia(&r, tol), inertia(&x, tol), inertia(&c, tol));
    let sum = (ix.0 + ic.0, ix.1 + ic.1, ix.2 + ic.2);
    check(ir == sum, || format!("In(R) = {ir:?}, In(X) + In(R/X) = {sum:?}"), inst)
});

law!(BlockPositivity, "block_positivity", |rng| {
    let (n, block) = dims(rng);
    let base = random_pd(rng, n);
    let shift = 1.2 * rng.random::<f64>() * min_eigenvalue(&base).max(0.1) * 3.0;
    let r = &base - DMatrix::identity(n, n) * shift;
    let inst = || json!({ "r": mat(&r), "block": block });
    let x = principal(&r, &block);
    let r_pd = min_eigenvalue(&r) > 0.0;
    let x_pd = min_eigenvalue(&x) > 0.0;
    let rhs = x_pd && min_eigenvalue(&guard(schur_complement(&r, &block), inst)?) > 0.0;
    check(r_pd == rhs, || format!("R > 0 is {r_pd}, X > 0 and R/X > 0 is {rhs}"), inst)
});

law!(CongruenceCovariance, "congruence_covariance", |rng| {
    let n = rng.random_range(2..=6);
    let k = rng.random_range(1..n);
    let block: Vec<usize> = (0..k).collect();
    let r = random_pd(rng, n);
    let mm = gaussian_matrix(rng, k, k) + DMatrix::identity(k, k) * 2.0;
    let nn = gaussian_matrix(rng, n - k, n - k) + DMatrix::identity(n - k, n - k) * 2.0;
    let mut l = DMatrix::zeros(n, n);
    l.view_mut((0, 0), (k, k)).copy_from(&mm);
    l.view_mut((k, k), (n - k, n - k)).copy_from(&nn);
    let inst = || json!({ "r": mat(&r), "m": mat(&mm), "n": mat(&nn) });
    let lhs = guard(schur_complement(&symmetrize(&(&l * &r * l.transpose())), &block), inst)?;
    let rhs = &nn * guard(schur_complement(&r, &block), inst)? * nn.transpose();
    let err = max_abs(&(&lhs - &rhs));
    check(err <= 1e-8 * scale(&rhs), || format!("max deviation {err:.3e}"), inst)
});

law!(Monotonicity, "monotonicity", |rng| {
    let (n, block) = dims(rng);
    let r0 = random_pd(rng, n);
    let rank = rng.random_range(1..=n);
    let r1 = &r0 + random_psd(rng, n, rank);
    let inst = || json!({ "r": mat(&r1), "r_prime": mat(&r0), "block": block });
    let d = guard(schur_complement(&r1, &block), inst)? - guard(schur_complement(&r0, &block), inst)?;
    let lo = min_eigenvalue(&symmetrize(&d));
    check(lo > -1e-9 * scale(&r1), || format!("min eigenvalue of R/X - R'/X' is {lo:.3e}"), inst)
});

law!(Variational, "variational_representation", |rng| {
    let (n, block) = dims(rng);
    let r = random_pd(rng, n);
    let rest = complement_indices(n, &block);
    let inst = || json!({ "r": mat(&r), "block": block });
    let t0 = guard(schur_complement(&r, &block), inst)?;
    let zero_plus = |t: &DMatrix<f64>| {
        let mut z = DMatrix::zeros(n, n);
        crate::linalg::set_principal(&mut z, &rest, t);
        z
    };
    let slack = min_eigenvalue(&symmetrize(&(&r - zero_plus(&t0))));
    if slack < -1e-9 * scale(&r) {
        return fail(format!("R - (0 ⊕ R/X) has eigenvalue {slack:.3e}"), inst());
    }
    // Any T exceeding R/X along u fails, witnessed by v = (-X⁻¹Zu, u).
    let u = gaussian_matrix(rng, rest.len(), 1);
    let eps = 1e-2 * scale(&t0);
    let t = &t0 + &u * u.transpose() * eps;
    let x = principal(&r, &block);
    let z = submatrix(&r, &block, &rest);
    let xu = x.lu().solve(&(&z * &u)).expect("positive definite block");
    let mut v = DMatrix::zeros(n, 1);
    for (i, &b) in block.iter().enumerate() {
        v[(b, 0)] = -xu[(i, 0)];
    }
    for (i, &c) in rest.iter().enumerate() {
        v[(c, 0)] = u[(i, 0)];
    }
    let q = (v.transpose() * (&r - zero_plus(&t)) * &v)[(0, 0)];
    let expected = -eps * u.norm_squared().powi(2);
    check(q < 0.5 * expected, || format!("witness value {q:.3e}, expected about {expected:.3e}"), inst)
});

law!(MeasurementPurity, "measurement_update_purity", |rng| {
    let m = rng.random_range(2..=3);
    let k = rng.random_range(1..m);
    let g = random_pure_qcm(rng, m, 0.5);
    let seed = random_pure_qcm(rng, k, 0.5);
    let a_idx: Vec<usize> = (0..k).chain(m..m + k).collect();
    let inst = || json!({ "gamma": mat(&g), "seed": mat(&seed), "measured_modes": k });
    let out = guard(measurement_update_matrix(&g, &a_idx, &seed), inst)?;
    let margin = crate::model::bona_fide_margin(&out);
    check(
        margin > -1e-9 && is_pure_qcm(&out, 1e-7),
        || format!("output bona fide margin {margin:.3e}, pure {}", is_pure_qcm(&out, 1e-7)),
        inst,
    )
});

fn random_pd_or_qcm(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = rng.random_range(1..=4);
    if rng.random::<bool>() {
        random_qcm(rng, m, 3.0)
    } else {
        random_pd(rng, 2 * m) * (0.5 + 3.0 * rng.random::<f64>())
    }
}

law!(WilliamsonReconstruction, "williamson_reconstruction", |rng| {
    let v = random_pd_or_qcm(rng);
    let inst = || json!({ "v": mat(&v) });
    let w = guard(williamson(&v), inst)?;
    let m = w.nu.len();
    let om = omega_xp(m);
    let symp = max_abs(&(&w.s * &om * w.s.transpose() - &om));
    let recon = max_abs(&(w.reconstruct() - &v));
    let s_norm = max_abs(&w.s).max(1.0);
    check(
        symp <= 1e-10 * s_norm * s_norm && recon <= 1e-8 * scale(&v),
        || format!("symplecticity error {symp:.3e}, reconstruction error {recon:.3e}"),
        inst,
    )
});

law!(DeterminantProduct, "symplectic_determinant_product", |rng| {
    let v = random_pd_or_qcm(rng);
    let inst = || json!({ "v": mat(&v) });
    let nu = guard(symplectic_eigenvalues(&v), inst)?;
    let prod: f64 = nu.iter().map(|x| x * x).product();
    let det = v.determinant();
    check((prod - det).abs() <= 1e-8 * det.abs(), || format!("prod nu^2 = {prod}, det V = {det}"), inst)
});

law!(SpectrumInvariance, "symplectic_spectrum_invariance", |rng| {
    let m = rng.random_range(1..=4);
    let v = random_qcm(rng, m, 3.0);
    let s = random_symplectic(rng, m, 0.4);
    let w = symmetrize(&(&s * &v * s.transpose()));
    let inst = || json!({ "v": mat(&v), "s": mat(&s) });
    let a = guard(symplectic_eigenvalues(&v), inst)?;
    let b = guard(symplectic_eigenvalues(&w), inst)?;
    let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max);
    check(err <= 1e-8, || format!("relative spectrum change {err:.3e}"), inst)
});

law!(PurityDeterminant, "purity_iff_unit_determinant", |rng| {
    let m = rng.random_range(1..=4);
    let v = if rng.random::<bool>() { random_pure_qcm(rng, m, 0.5) } else { random_qcm(rng, m, 2.0) };
    let inst = || json!({ "v": mat(&v) });
    let pure = is_pure_qcm(&v, PURE_TOL);
    let unit = (v.determinant() - 1.0).abs() < 1e-6;
    check(pure == unit, || format!("is_pure_qcm = {pure}, |det V - 1| small = {unit}"), inst)
});

law!(OrderingRoundTrip, "ordering_round_trip", |rng| {
    let m = rng.random_range(1..=4);
    let v = random_symmetric(rng, 2 * m);
    let inst = || json!({ "v": mat(&v) });
    let mw = guard(reorder(&v, Ordering::XpBlock, Ordering::ModeWise), inst)?;
    let back = guard(reorder(&mw, Ordering::ModeWise, Ordering::XpBlock), inst)?;
    let om = guard(omega(m, Ordering::ModeWise), inst)?;
    let om_xp = guard(reorder(&om.matrix, Ordering::ModeWise, Ordering::XpBlock), inst)?;
    check(back == v && om_xp == omega_xp(m), || "round trip or symplectic form mismatch".into(), inst)
});

law!(LocalInvariance, "im_local_symplectic_invariance", |rng| {
    let v = random_bipartite(rng, false);
    let ka = v.partition.subsystems[0].modes;
    let kb = v.partition.subsystems[1].modes;
    let sa = random_symplectic(rng, ka, 0.4);
    let sb = random_symplectic(rng, kb, 0.4);
    let ia = v.partition.indices(&["A"]).expect("named");
    let ib = v.partition.indices(&["B"]).expect("named");
    let l = embed(v.dim(), &[(&ia, &sa), (&ib, &sb)]);
    let w = Qcm::new_unchecked(symmetrize(&(&l * v.matrix() * l.transpose())), v.partition.clone());
    let inst = || json!({ "v": qcm_json(&v), "s_a": mat(&sa), "s_b": mat(&sb) });
    let a = guard(im_mutual(&v, &Split::ab()), inst)?;
    let b = guard(im_mutual(&w, &Split::ab()), inst)?;
    check((a - b).abs() <= 1e-8 * a.abs().max(1.0), || format!("I_M changed from {a} to {b}"), inst)
});

law!(Rescaling, "im_rescaling", |rng| {
    let v = random_bipartite(rng, false);
    let t = 0.1 + 10.0 * rng.random::<f64>();
    let ia = v.partition.indices(&["A"]).expect("named");
    let ib = v.partition.indices(&["B"]).expect("named");
    let inst = || json!({ "v": qcm_json(&v), "t": t });
    let a = guard(im_indices(v.matrix(), &ia, &ib), inst)?;
    let b = guard(im_indices(&(v.matrix() * t), &ia, &ib), inst)?;
    check((a - b).abs() <= 1e-8 * a.abs().max(1.0), || format!("I_M(V) = {a}, I_M(tV) = {b}"), inst)
});

law!(DataProcessing, "im_data_processing", |rng| {
    let v = random_bipartite(rng, false);
    let ia = v.partition.indices(&["A"]).expect("named");
    let ib = v.partition.indices(&["B"]).expect("named");
    let rank = rng.random_range(1..=ia.len());
    let k = random_psd(rng, ia.len(), rank) * (5.0 * rng.random::<f64>());
    let mut w = v.matrix().clone();
    crate::linalg::set_principal(&mut w, &ia, &(principal(v.matrix(), &ia) + &k));
    let inst = || json!({ "v": qcm_json(&v), "k_a": mat(&k) });
    let a = guard(im_indices(v.matrix(), &ia, &ib), inst)?;
    let b = guard(im_indices(&w, &ia, &ib), inst)?;
    check(b <= a + 1e-9, || format!("I_M rose from {a} to {b}"), inst)
});

law!(Inversion, "im_inversion", |rng| {
    let v = random_bipartite(rng, false);
    let ia = v.partition.indices(&["A"]).expect("named");
    let ib = v.partition.indices(&["B"]).expect("named");
    let inv = symmetrize(&v.matrix().clone().try_inverse().expect("positive definite"));
    let inst = || json!({ "v": qcm_json(&v) });
    let a = guard(im_indices(v.matrix(), &ia, &ib), inst)?;
    let b = guard(im_indices(&inv, &ia, &ib), inst)?;
    check((a - b).abs() <= 1e-8 * a.abs().max(1.0), || format!("I_M(V) = {a}, I_M(V^-1) = {b}"), inst)
});

law!(XpDecomposition, "im_xp_decomposition_sum", |rng| {
    // The identity holds for xp-form states, which GL-embedded symplectics preserve.
    let m = rng.random_range(2..=3);
    let ka = rng.random_range(1..m);
    let pure = rng.random::<bool>();
    let nu: Vec<f64> = (0..m).map(|_| if pure { 1.0 } else { 1.0 + 2.0 * rng.random::<f64>() }).collect();
    let s = random_gl_symplectic(rng, m, 0.5);
    let l = DMatrix::from_fn(2 * m, 2 * m, |i, j| if i == j { nu[i % m] } else { 0.0 });
    let g = symmetrize(&(&s * l * s.transpose()));
    let v = Qcm::new_unchecked(g, Partition::from_pairs(&[("A", ka), ("B", m - ka)]).expect("static names"));
    let inst = || json!({ "v": qcm_json(&v) });
    let (ix, ip) = guard(im_xp_decompose(&v, &Split::ab()), inst)?;
    let total = guard(im_mutual(&v, &Split::ab()), inst)?;
    check(
        (ix + ip - total).abs() <= 1e-8 * total.abs().max(1.0),
        || format!("{ix} + {ip} != {total}"),
        inst,
    )
});

law!(UniformContinuity, "im_uniform_continuity", |rng| {
    let v = random_bipartite(rng, false);
    let n = v.dim();
    let delta = random_symmetric(rng, n) * (1e-3 + 0.2 * rng.random::<f64>());
    let w = v.matrix() + &delta;
    let lo = min_eigenvalue(v.matrix()).min(min_eigenvalue(&w));
    if lo <= 0.0 {
        return Ok(());
    }
    let kappa = 1.0 / lo;
    let ia = v.partition.indices(&["A"]).expect("named");
    let ib = v.partition.indices(&["B"]).expect("named");
    let inst = || json!({ "v": qcm_json(&v), "w": mat(&w) });
    let a = guard(im_indices(v.matrix(), &ia, &ib), inst)?;
    let b = guard(im_indices(&w, &ia, &ib), inst)?;
    let bound = kappa * std::f64::consts::LOG2_E * trace_norm_sym(&delta) + 1e-9;
    check((a - b).abs() <= bound, || format!("|ΔI_M| = {:.3e} exceeds {bound:.3e}", (a - b).abs()), inst)
});

law!(PureStateIdentity, "im_pure_state_identity", |rng| {
    let v = random_bipartite(rng, true);
    let inst = || json!({ "gamma": qcm_json(&v) });
    let i = guard(im_mutual(&v, &Split::ab()), inst)?;
    let ma = guard(logdet_entropy(&v.block(&["A"]).expect("named")), inst)?;
    check((i - 2.0 * ma).abs() <= 1e-8 * i.abs().max(1.0), || format!("I_M = {i}, 2M(γ_A) = {}", 2.0 * ma), inst)
});

law!(PureHomodyneLimit, "im_pure_homodyne_limit", |rng| {
    let m = rng.random_range(2..=3);
    let ka = rng.random_range(1..m);
    // Pure QCMs in xp-form are diag(X, X⁻¹).
    let s = random_gl_symplectic(rng, m, 0.4);
    let g = symmetrize(&(&s * s.transpose()));
    let v = Qcm::new_unchecked(g, Partition::from_pairs(&[("A", ka), ("B", m - ka)]).expect("static names"));
    let inst = || json!({ "gamma": qcm_json(&v) });
    let h = guard(homodyne_limit_im(&v, &Split::ab(), &DEFAULT_SCHEDULE), inst)?;
    let ma = guard(logdet_entropy(&v.block(&["A"]).expect("named")), inst)?;
    check((h.value - ma).abs() <= 1e-4, || format!("homodyne limit {} vs M(γ_A) = {ma}", h.value), inst)
});

law!(ConditionalRoutes, "im_conditional_routes", |rng| {
    let g = random_pure_qcm(rng, 3, 0.5);
    let seeds: Vec<DMatrix<f64>> = (0..3).map(|_| random_pure_qcm(rng, 1, 0.5)).collect();
    let mut w = g.clone();
    for (j, s) in seeds.iter().enumerate() {
        let idx = [j, 3 + j];
        let cur = principal(&w, &idx);
        crate::linalg::set_principal(&mut w, &idx, &(cur + s));
    }
    let v = Qcm::new_unchecked(w, Partition::from_pairs(&[("A", 1), ("B", 1), ("E", 1)]).expect("static names"));
    let inst = || json!({ "matrix": qcm_json(&v) });
    let r = guard(im_conditional(&v, &["A"], &["B"], &["E"]), inst)?;
    check(r.value > -1e-9, || format!("negative conditional mutual information {}", r.value), inst)
});

/// Equality check on random two-mode states: the intrinsic-entanglement estimates
/// bracket the entanglement of formation.
pub struct GieBracketsReof {
    pub tol: f64,
}

impl Law for GieBracketsReof {
    fn name(&self) -> &'static str {
        "gie_brackets_reof"
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> LawOutcome {
        let m = random_two_mode_qcm(rng);
        let seed = rng.random::<u64>();
        let v = Qcm::new_unchecked(m, Partition::from_pairs(&[("A", 1), ("B", 1)]).expect("static names"));
        let inst = || json!({ "v": qcm_json(&v), "seed": seed });
        let reof = guard(reof_numeric(&v, &Split::ab(), &OptOptions::default().with_seed(seed)), inst)?.value;
        let g = guard(gie_numeric(&v, &Split::ab(), &GieBudget::default().with_seed(seed)), inst)?;
        check(
            (g.lower - reof).abs() <= self.tol && (g.upper - reof).abs() <= self.tol && g.lower >= -1e-9,
            || format!("lower {}, upper {}, reof {reof}", g.lower, g.upper),
            inst,
        )
    }
}

law!(TwoModeNormal, "two_mode_normal", |rng| {
    let m = random_two_mode_qcm(rng);
    let v = Qcm::new_unchecked(m, Partition::from_pairs(&[("A", 1), ("B", 1)]).expect("static names"));
    let inst = || json!({ "v": qcm_json(&v) });
    let r = guard(is_normal(&v, &Split::ab(), &NormalityBudget::default()), inst)?;
    check(r.residual < NORMAL_TOL, || format!("residual {:.3e}", r.residual), inst)
});

/// Every suite, in run order for `all`.
pub fn suites() -> Vec<LawSuite> {
    vec![
        LawSuite {
            name: "schur",
            laws: vec![
                Box::new(DeterminantFactorization),
                Box::new(InertiaAdditivity),
                Box::new(BlockPositivity),
                Box::new(CongruenceCovariance),
                Box::new(Monotonicity),
                Box::new(Variational),
                Box::new(MeasurementPurity),
            ],
        },
        LawSuite {
            name: "symplectic",
            laws: vec![
                Box::new(WilliamsonReconstruction),
                Box::new(DeterminantProduct),
                Box::new(SpectrumInvariance),
                Box::new(PurityDeterminant),
                Box::new(OrderingRoundTrip),
            ],
        },
        LawSuite {
            name: "infomeasures",
            laws: vec![
                Box::new(LocalInvariance),
                Box::new(Rescaling),
                Box::new(DataProcessing),
                Box::new(Inversion),
                Box::new(XpDecomposition),
                Box::new(UniformContinuity),
                Box::new(PureStateIdentity),
                Box::new(PureHomodyneLimit),
                Box::new(ConditionalRoutes),
            ],
        },
        LawSuite {
            name: "conjecture",
            laws: vec![Box::new(GieBracketsReof { tol: 2e-2 }), Box::new(TwoModeNormal)],
        },
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = suites().iter().map(|s| s.name).collect();
    names.push("all");
    names
}

fn run_law(suite: &str, law_index: u64, law: &dyn Law, trials: usize, seed: u64) -> LawReport {
    let mut report =
        LawReport { suite: suite.into(), law: law.name().into(), passed: 0, failed: 0, failures: Vec::new() };
    for trial in 0..trials {
        let trial_seed = mix(seed, law_index, trial as u64);
        match law.trial(&mut trial_rng(trial_seed)) {
            Ok(()) => report.passed += 1,
            Err(v) => {
                report.failed += 1;
                if report.failures.len() < KEPT_FAILURES {
                    report.failures.push(FailureRecord { trial, trial_seed, detail: v.detail, instance: v.instance });
                }
            }
        }
    }
    report
}

/// Runs a named suite (or `all`) for `trials` trials per law.
pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let selected: Vec<LawSuite> = if name == "all" {
        suites()
    } else {
        let s = suites().into_iter().find(|s| s.name == name).ok_or_else(|| {
            Error::InvalidInput(format!("unknown suite {name:?}; known: {}", suite_names().join(",")))
        })?;
        vec![s]
    };
    let mut laws = Vec::new();
    let mut law_index = 0u64;
    for suite in &suites() {
        for law in &suite.laws {
            if selected.iter().any(|s| s.name == suite.name) {
                laws.push(run_law(suite.name, law_index, law.as_ref(), trials, seed));
            }
            law_index += 1;
        }
    }
    let total_failed = laws.iter().map(|l| l.failed).sum();
    Ok(VerifyReport { suite: name.into(), trials, seed, laws, total_failed, all_passed: total_failed == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_suites_pass_and_are_deterministic() {
        for name in ["schur", "symplectic", "infomeasures"] {
            let a = run_suite(name, 25, 7).unwrap();
            for l in &a.laws {
                assert_eq!(l.failed, 0, "{}: {:?}", l.law, l.failures);
            }
            let b = run_suite(name, 25, 7).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn bad_arguments_are_rejected() {
        assert!(run_suite("schur", 0, 0).is_err());
        assert!(run_suite("nope", 1, 0).is_err());
        assert!(suite_names().contains(&"all"));
    }

    struct AlwaysFails;
    impl Law for AlwaysFails {
        fn name(&self) -> &'static str {
            "always_fails"
        }
        fn trial(&self, rng: &mut ChaCha8Rng) -> LawOutcome {
            let x: f64 = rng.random();
            fail("by construction", json!({ "x": x }))
        }
    }

    #[test]
    fn failures_are_recorded_for_replay() {
        let r = run_law("test", 0, &AlwaysFails, 5, 1);
        assert_eq!((r.passed, r.failed, r.failures.len()), (0, 5, KEPT_FAILURES));
        let f = &r.failures[1];
        let replay = AlwaysFails.trial(&mut trial_rng(f.trial_seed)).unwrap_err();
        assert_eq!(replay.instance, f.instance);
    }
}
