//! Generalized geometric measure (GGM) of genuine multiparty entanglement.
//!
//! Pure states are handled directly through their Schmidt spectra. Mixed
//! states that are invariant under a finite local-unitary group are handled by
//! minimizing over the phase orbit that twirls onto them and then taking the
//! lower convex envelope over the mixing weights.

pub mod error;
pub mod hilbert;
pub mod pure;
pub mod states;
pub mod roof;
pub mod twirl;

pub use error::{GgmError, Result};
pub use hilbert::{enumerate_bipartitions, matricize, Bipartition, DensityMatrix, PureState, SystemShape, C64};
pub use pure::{ggm_pure, max_schmidt_sq, GgmEvaluator, GgmReport};
