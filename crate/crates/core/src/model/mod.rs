//! Gaussian states and channels: partitions, covariance matrices, channels,
//! purification and the concrete state families.

mod channel;
mod families;
pub mod io;
mod partition;
mod purify;
mod qcm;

pub use channel::GaussianChannel;
pub use families::{
    direct_sum, direct_sum_n, homodyne_seed, pure_loss_channel, pure_loss_state, squeezing_parameter, thermal,
    tmsv, HomodyneSeed,
};
pub use partition::{Partition, Split, Subsystem};
pub use purify::{purify, purify_matrix, Purification};
pub use qcm::{bona_fide_margin, Qcm, BONA_FIDE_TOL, SYMMETRY_TOL};
