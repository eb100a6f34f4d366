//! Steady-state and transient thermodynamics of a collective-spin
//! absorption refrigerator described by a Pauli rate equation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod fcs;
pub mod liouvillian;
pub mod model;
pub mod quadrature;
pub mod reduced;
pub mod reservoir;
pub mod sampling;
pub mod spin;
pub mod thermo;

pub use error::{Error, Result};
pub use fcs::{solve, Fcs, FcsResult};
pub use liouvillian::{build_rate_matrix, counting_moment_matrices, CountingMatrices, RateBlock, RateMatrix};
pub use model::Model;
pub use reduced::{EffectiveRates, ReducedParams};
pub use reservoir::{ReservoirSpec, Role, SpectralDensity};
pub use spin::{CouplingOperator, HalfInt, SpinSector};
pub use thermo::{ThermoReport, Terminals};
