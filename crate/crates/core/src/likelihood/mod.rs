//! The posterior objective over hidden edges and pendant counts.
//!
//! For a candidate adjacency `A ≥ A_R` and pendant vector `u`, the
//! log-likelihood of the entry times is
//!
//! ```text
//! l = Σ_{i∉M} log b_i + Σ_i δ_i
//! b_i = Σ_{u<i} C_ui (Σ_{k≥i} A_uk + u_u) H_ui
//! δ_i = Σ_{u<i} C_ui (Σ_{k≥i} A_uk + u_u) S_ui
//! ```
//!
//! with `H_ui` the hazard and `S_ui` the log conditional survival of the
//! pair `(u, i)` over the interval since the previous event. The degree
//! prior subtracts `ψ(max(u + A·1 − d, 0))` with `ψ = ω‖·‖_p`.

use alloc::string::String;

use crate::timing::TimingError;

mod codec;
mod direct;
mod matrices;
mod objective;
mod prior;
mod theta;

pub use codec::{GammaCodec, Slot};
pub use direct::log_likelihood_direct;
pub use matrices::{build_matrices, log_likelihood_matrix, ObservedMatrices};
pub use objective::{Objective, ObjectiveCursor};
pub use prior::{log_prior, PenaltyConfig};
pub use theta::{theta_step, ThetaFit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LikelihoodError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("entry times out of order between subjects {u} and {i}")]
    InconsistentTimes { u: usize, i: usize },
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error("non-seed subject {subject} has zero recruitment intensity at the revealed graph")]
    InfeasibleBase { subject: usize },
    #[error("cannot encode: {0}")]
    Encode(String),
    #[error("ground-set index {index} out of range {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("insufficient data: no recruitment events to fit timing parameters")]
    InsufficientData,
    #[error("invalid penalty: {0}")]
    Penalty(String),
}
