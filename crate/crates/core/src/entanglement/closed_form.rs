//! Closed forms for the pure-loss family `V_{λ,s}` and the crossing of its two curves.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infomeasures::{bosonic_g, von_neumann_entropy};
use crate::linalg::max_abs;
use crate::model::{pure_loss_state, squeezing_parameter, GaussianChannel, Qcm, Split};
use crate::optimize::bisect;

/// Squeezing values of the standard comparison plot, in dB.
pub const DEFAULT_SQUEEZING: [f64; 4] = [2.0, 5.0, 10.0, 15.0];

/// Residual below which a two-mode state counts as a member of the pure-loss family.
pub const FAMILY_TOL: f64 = 1e-9;

fn check_family_args(lambda: f64, s_db: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("transmissivity must lie in [0, 1], got {lambda}")));
    }
    if !(s_db >= 0.0) || !s_db.is_finite() {
        return Err(Error::InvalidInput(format!("squeezing must be a finite non-negative dB value, got {s_db}")));
    }
    Ok(())
}

fn sinh2(s_db: f64) -> f64 {
    squeezing_parameter(s_db).sinh().powi(2)
}

/// `log₂[(1 + (1+λ) sinh² r) / (1 + (1-λ) sinh² r)]`.
pub fn reof_closed_form(lambda: f64, s_db: f64) -> Result<f64> {
    check_family_args(lambda, s_db)?;
    let sh = sinh2(s_db);
    Ok(((1.0 + (1.0 + lambda) * sh) / (1.0 + (1.0 - lambda) * sh)).log2())
}

/// `g(sinh² r) - g((1-λ) sinh² r)`, the coherent information of the degradable family.
pub fn one_way_distillable(lambda: f64, s_db: f64) -> Result<f64> {
    check_family_args(lambda, s_db)?;
    let sh = sinh2(s_db);
    Ok(bosonic_g(sh) - bosonic_g((1.0 - lambda) * sh))
}

/// `I(A⟩B) = S(V_B) - S(V_AB)` for any split.
pub fn coherent_information(v: &Qcm, split: &Split) -> Result<f64> {
    split.validate(&v.partition)?;
    let vb = v.block(&split.b_names())?;
    let vab = v.block(&split.all_names())?;
    Ok(von_neumann_entropy(&vb)? - von_neumann_entropy(&vab)?)
}

/// Fits `(λ, s)` to a 1+1-mode state and returns them when the state matches
/// `pure_loss_state(λ, s)` to within `FAMILY_TOL`.
pub fn detect_pure_loss(v: &Qcm, split: &Split) -> Option<(f64, f64)> {
    if split.validate(&v.partition).is_err() {
        return None;
    }
    let va = v.block(&split.a_names()).ok()?;
    let vb = v.block(&split.b_names()).ok()?;
    if va.nrows() != 2 || vb.nrows() != 2 {
        return None;
    }
    let c = vb[(0, 0)];
    if !(c >= 1.0) {
        return None;
    }
    let s_db = 20.0 * c.acosh() / (2.0 * std::f64::consts::LN_10);
    let lambda = if c - 1.0 < 1e-12 { 1.0 } else { ((va[(0, 0)] - 1.0) / (c - 1.0)).clamp(0.0, 1.0) };
    let reference = pure_loss_state(lambda, s_db).ok()?;
    let ours = v.block(&[split.a_names(), split.b_names()].concat()).ok()?;
    (max_abs(&(ours - reference.matrix())) < FAMILY_TOL).then_some((lambda, s_db))
}

/// Comparison of the loss-family entanglement with its one-way distillable entanglement.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingAnalysis {
    /// Root of `cosh²(r) ln coth(r) = 1`.
    pub r0: f64,
    /// `sinh²(r₀)`, reported alongside since it is the value often quoted for r₀.
    pub sinh2_r0: f64,
    /// `20 r₀ / ln 10`.
    pub s0_db: f64,
    /// `(s, λ₀(s))`; `None` where the curves do not cross on (0, 1].
    pub lambda0: Vec<(f64, Option<f64>)>,
}

/// `r₀` with `cosh²(r₀) ln coth(r₀) = 1`.
pub fn crossing_r0() -> Result<f64> {
    bisect(|r: f64| r.cosh().powi(2) * (1.0 / r.tanh()).ln() - 1.0, 0.05, 3.0, 1e-14)
}

/// `λ₀(s)` where `reof_closed_form = one_way_distillable`, or `None` if there is no sign change.
pub fn crossing_lambda(s_db: f64) -> Result<Option<f64>> {
    let diff = |l: f64| reof_closed_form(l, s_db).unwrap_or(f64::NAN) - one_way_distillable(l, s_db).unwrap_or(f64::NAN);
    let lo = 1e-4;
    let (dlo, dhi) = (diff(lo), diff(1.0));
    if !(dlo.is_finite() && dhi.is_finite()) {
        return Err(Error::ConvergenceFailure(format!("crossing bracket not finite at s = {s_db}")));
    }
    if dlo.signum() == dhi.signum() || dhi == 0.0 {
        return Ok(None);
    }
    bisect(diff, lo, 1.0, 1e-13).map(Some)
}

pub fn crossing_analysis_for(squeezing: &[f64]) -> Result<CrossingAnalysis> {
    let r0 = crossing_r0()?;
    let s0_db = 20.0 * r0 / std::f64::consts::LN_10;
    let mut lambda0 = Vec::with_capacity(squeezing.len());
    for &s in squeezing {
        check_family_args(1.0, s)?;
        let l0 = if s > s0_db { crossing_lambda(s)? } else { None };
        lambda0.push((s, l0));
    }
    Ok(CrossingAnalysis { r0, sinh2_r0: r0.sinh().powi(2), s0_db, lambda0 })
}

pub fn crossing_analysis() -> Result<CrossingAnalysis> {
    crossing_analysis_for(&DEFAULT_SQUEEZING)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegradabilityCertificate {
    /// `‖W_AE - γ_AE‖_∞` between the degraded output and the environment marginal.
    pub residual: f64,
    /// `√det Y - |1 - det X|`.
    pub cp_margin: f64,
    /// Smallest eigenvalue of `Y + iΩ - iXΩXᵀ`.
    pub cp_min_eigenvalue: f64,
}

/// Degrading channel for `V_{λ,s}`: `X = √(1-λ) tanh(r) σ_z`, `Y = ((2-λ)c + λ)/(c + 1) 𝟙` with `c = cosh 2r`.
pub fn degrading_channel(lambda: f64, s_db: f64) -> Result<GaussianChannel> {
    check_family_args(lambda, s_db)?;
    let r = squeezing_parameter(s_db);
    let c = (2.0 * r).cosh();
    let xs = (1.0 - lambda).sqrt() * r.tanh();
    let ys = ((2.0 - lambda) * c + lambda) / (c + 1.0);
    GaussianChannel::new(
        DMatrix::from_row_slice(2, 2, &[xs, 0.0, 0.0, -xs]),
        DMatrix::identity(2, 2) * ys,
    )
}

/// The environment marginal `γ_AE` of the beam-splitter dilation of `V_{λ,s}`, in xp ordering.
pub fn loss_environment_marginal(lambda: f64, s_db: f64) -> Result<DMatrix<f64>> {
    check_family_args(lambda, s_db)?;
    let c = (2.0 * squeezing_parameter(s_db)).cosh();
    let a = lambda * c + 1.0 - lambda;
    let e = (1.0 - lambda) * c + lambda;
    let k = (c - 1.0) * (lambda * (1.0 - lambda)).sqrt();
    Ok(DMatrix::from_row_slice(4, 4, &[a, k, 0.0, 0.0, k, e, 0.0, 0.0, 0.0, 0.0, a, k, 0.0, 0.0, k, e]))
}

/// Applies the degrading channel to B of `V_{λ,s}` and compares with `γ_AE`.
pub fn degradability_certificate(lambda: f64, s_db: f64) -> Result<DegradabilityCertificate> {
    let ch = degrading_channel(lambda, s_db)?;
    let v = pure_loss_state(lambda, s_db)?;
    let w = ch.apply(&v, &["B"])?;
    let reference = loss_environment_marginal(lambda, s_db)?;
    Ok(DegradabilityCertificate {
        residual: max_abs(&(w.matrix() - reference)),
        cp_margin: ch.single_mode_cp_margin()?,
        cp_min_eigenvalue: ch.cp_min_eigenvalue(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tmsv;

    fn sh2(s: f64) -> f64 {
        squeezing_parameter(s).sinh().powi(2)
    }

    #[test]
    fn reof_endpoints() {
        for s in [0.0, 3.0, 10.0] {
            assert_eq!(reof_closed_form(0.0, s).unwrap(), 0.0);
            let c = (2.0 * squeezing_parameter(s)).cosh();
            assert!((reof_closed_form(1.0, s).unwrap() - c.log2()).abs() < 1e-14);
        }
        assert!(reof_closed_form(1.5, 3.0).is_err());
        assert!(reof_closed_form(0.5, -1.0).is_err());
    }

    #[test]
    fn reof_frozen_value() {
        // Independent evaluation: e^r = √10 at 10 dB, so sinh² r = (10 - 2 + 1/10)/4.
        let sh: f64 = (10.0 - 2.0 + 0.1) / 4.0;
        let oracle = ((1.0 + 1.5 * sh) / (1.0 + 0.5 * sh)).log2();
        let v = reof_closed_form(0.5, 10.0).unwrap();
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - 1.004_473_476_579_308_2).abs() < 1e-13);
    }

    #[test]
    fn distillable_endpoints_and_entropy_route() {
        assert_eq!(one_way_distillable(0.0, 7.0).unwrap(), 0.0);
        assert!((one_way_distillable(1.0, 7.0).unwrap() - bosonic_g(sh2(7.0))).abs() < 1e-14);
        for (l, s) in [(0.3, 4.0), (0.9, 10.0), (0.5, 15.0)] {
            let v = pure_loss_state(l, s).unwrap();
            let route = coherent_information(&v, &Split::ab()).unwrap();
            assert!((route - one_way_distillable(l, s).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn crossing_values() {
        let c = crossing_analysis().unwrap();
        assert!((c.r0 - 0.48566).abs() < 1e-4, "{c:?}");
        assert!((c.sinh2_r0 - 0.2549).abs() < 1e-3);
        assert!((c.s0_db - 4.2184).abs() < 1e-3);
        let at = |s: f64| c.lambda0.iter().find(|(x, _)| *x == s).unwrap().1;
        assert_eq!(at(2.0), None);
        assert!((at(10.0).unwrap() - 0.91225).abs() < 1e-4);
        assert!(at(5.0).is_some() && at(15.0).is_some());
    }

    #[test]
    fn family_detection() {
        let v = pure_loss_state(0.37, 8.5).unwrap();
        let (l, s) = detect_pure_loss(&v, &Split::ab()).unwrap();
        assert!((l - 0.37).abs() < 1e-9 && (s - 8.5).abs() < 1e-9);
        let (l, _) = detect_pure_loss(&tmsv(4.0).unwrap(), &Split::ab()).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        let mut m = v.matrix().clone();
        m[(0, 2)] = 1e-6;
        m[(2, 0)] = 1e-6;
        let off = Qcm::new_unchecked(m, v.partition.clone());
        assert!(detect_pure_loss(&off, &Split::ab()).is_none());
    }

    #[test]
    fn degrading_channel_reproduces_environment() {
        for (l, s) in [(0.5, 10.0), (1.0, 6.0), (0.0, 3.0), (0.83, 14.0)] {
            let cert = degradability_certificate(l, s).unwrap();
            assert!(cert.residual < 1e-10, "{cert:?}");
            assert!(cert.cp_min_eigenvalue > -1e-9);
            // The determinant condition is tight: det X = -(1-λ) tanh² r.
            assert!(cert.cp_margin.abs() < 1e-12, "{cert:?}");
        }
    }
}
