//! Entanglement measures and Gaussian secret-key bounds for multimode Gaussian states
//! described by quantum covariance matrices (QCMs).
//!
//! Matrices are in xp-block ordering `(x_1..x_m, p_1..p_m)` throughout; mode-wise
//! ordering is accepted only at the I/O boundary. Information quantities are in bits.

pub mod entanglement;
pub mod error;
pub mod infomeasures;
pub mod linalg;
pub mod model;
pub mod normality;
pub mod optimize;
pub mod random;
pub mod registry;
pub mod schur;
pub mod sweep;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
