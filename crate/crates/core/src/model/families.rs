use nalgebra::DMatrix;

use super::channel::GaussianChannel;
use super::partition::{Partition, Subsystem};
use super::qcm::Qcm;
use crate::error::{Error, Result};
use crate::linalg::set_principal;

/// `r_s = s ln 10 / 20` for a squeezing of `s` dB.
pub fn squeezing_parameter(s_db: f64) -> f64 {
    s_db * std::f64::consts::LN_10 / 20.0
}

fn check_squeezing(s_db: f64) -> Result<()> {
    if !(s_db >= 0.0) || !s_db.is_finite() {
        return Err(Error::InvalidInput(format!("squeezing must be a finite non-negative dB value, got {s_db}")));
    }
    Ok(())
}

fn check_transmissivity(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("transmissivity must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// Two-mode state with A-block `a·𝟙`, B-block `b·𝟙` and coupling `c·σ_z`, in xp ordering.
fn symmetric_two_mode(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(4, 4, &[a, c, 0.0, 0.0, c, b, 0.0, 0.0, 0.0, 0.0, a, -c, 0.0, 0.0, -c, b])
}

fn ab() -> Partition {
    Partition::from_pairs(&[("A", 1), ("B", 1)]).expect("static partition")
}

/// Two-mode squeezed vacuum τ_s.
pub fn tmsv(s_db: f64) -> Result<Qcm> {
    check_squeezing(s_db)?;
    let r = squeezing_parameter(s_db);
    let (c, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    Ok(Qcm::new_unchecked(symmetric_two_mode(c, c, sh), ab()))
}

/// τ_s after a pure-loss channel of transmissivity λ on mode A.
pub fn pure_loss_state(lambda: f64, s_db: f64) -> Result<Qcm> {
    check_transmissivity(lambda)?;
    check_squeezing(s_db)?;
    let r = squeezing_parameter(s_db);
    let (c, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    Ok(Qcm::new_unchecked(symmetric_two_mode(lambda * c + 1.0 - lambda, c, lambda.sqrt() * sh), ab()))
}

/// Single-mode thermal state `ν𝟙₂`.
pub fn thermal(nu: f64, name: &str) -> Result<Qcm> {
    if !(nu >= 1.0) {
        return Err(Error::InvalidInput(format!("thermal symplectic eigenvalue must be >= 1, got {nu}")));
    }
    Ok(Qcm::new_unchecked(DMatrix::identity(2, 2) * nu, Partition::single(name, 1)))
}

/// Pure-loss channel `X = √λ 𝟙`, `Y = (1-λ) 𝟙` on one mode.
pub fn pure_loss_channel(lambda: f64) -> Result<GaussianChannel> {
    check_transmissivity(lambda)?;
    Ok(GaussianChannel {
        x: DMatrix::identity(2, 2) * lambda.sqrt(),
        y: DMatrix::identity(2, 2) * (1.0 - lambda),
    })
}

/// Measurement seed `Γ(t) = diag(t𝟙, t⁻¹𝟙)` on a named subsystem; t → 0⁺ is x-homodyne.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneSeed {
    pub t: f64,
    pub subsystem: String,
    pub modes: usize,
}

impl HomodyneSeed {
    pub fn new(t: f64, subsystem: &str, modes: usize) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("homodyne parameter must be positive, got {t}")));
        }
        if modes == 0 {
            return Err(Error::InvalidInput("seed needs at least one mode".into()));
        }
        Ok(HomodyneSeed { t, subsystem: subsystem.into(), modes })
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let k = self.modes;
        DMatrix::from_fn(2 * k, 2 * k, |i, j| match (i == j, i < k) {
            (true, true) => self.t,
            (true, false) => 1.0 / self.t,
            _ => 0.0,
        })
    }

    pub fn qcm(&self) -> Qcm {
        Qcm::new_unchecked(self.matrix(), Partition::single(&self.subsystem, self.modes))
    }
}

pub fn homodyne_seed(t: f64, subsystem: &str, modes: usize) -> Result<Qcm> {
    Ok(HomodyneSeed::new(t, subsystem, modes)?.qcm())
}

/// Direct sum of several states; subsystem names get the 1-based index of their summand appended.
pub fn direct_sum_all(parts: &[&Qcm]) -> Result<Qcm> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("direct sum of nothing".into()));
    }
    let mut subs = Vec::new();
    for (k, q) in parts.iter().enumerate() {
        for s in &q.partition.subsystems {
            subs.push(Subsystem { name: format!("{}{}", s.name, k + 1), modes: s.modes });
        }
    }
    let partition = Partition::new(subs)?;
    let m = partition.total_modes();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    let mut offset = 0;
    for q in parts {
        let k = q.modes();
        let idx: Vec<usize> = (offset..offset + k).chain(m + offset..m + offset + k).collect();
        set_principal(&mut out, &idx, q.matrix());
        offset += k;
    }
    Ok(Qcm::new_unchecked(out, partition))
}

pub fn direct_sum(v1: &Qcm, v2: &Qcm) -> Result<Qcm> {
    direct_sum_all(&[v1, v2])
}

/// `V^{⊕n}` with subsystems renamed `A1, B1, A2, B2, ..`.
pub fn direct_sum_n(v: &Qcm, n: usize) -> Result<Qcm> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one copy".into()));
    }
    let copies: Vec<&Qcm> = std::iter::repeat_n(v, n).collect();
    direct_sum_all(&copies)
}
