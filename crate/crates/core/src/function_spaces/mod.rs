//! Discrete function spaces on the unit cube: the `C^{m+alpha}`, `L_q` and
//! `W^m_q` norms of grid-sampled fields.

mod derivative;
mod field;
mod grid;
mod holder;
pub mod io;
mod norms;

pub use derivative::{all_derivatives, derivative, MultiIndex};
pub use field::{ScalarField, VectorField};
pub use grid::Grid;
pub use holder::{holder_seminorm, PairSet, PairSpec, PairStrategy, DEFAULT_PAIR_BUDGET, DEFAULT_SEED};
pub use norms::{c_norm, lq_norm, sobolev_norm, sup_norm, FieldNorms, LebesgueNorms, NormReport};

pub(crate) use derivative::first as first_derivative;
