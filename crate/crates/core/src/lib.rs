//! Simulator for a dual-cavity quantum battery: two chains of two-level atoms,
//! each coupled to its own cavity mode, with an intra-chain flip-flop
//! interaction and a collective exchange between the chains.
//!
//! The crate builds the truncated collective basis, assembles the charging
//! Hamiltonian as a sparse Hermitian matrix, propagates the initial product
//! state with a Lanczos exponential (or a dense spectral oracle at small sizes),
//! and extracts stored energy and charging power.

pub mod config;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod propagate;

pub use error::{Error, Result};
pub use hilbert::{build_basis, BasisSet, BasisState, SparseHermitianOperator, SparseOperator, StateVector};
pub use model::{ChargingProtocol, ModelParams, Switch};
pub use observables::{ChargingSummary, ChargingTrace};
pub use propagate::{Method, PropagatorConfig, TimeGrid};

pub use num_complex::Complex64;

/// Version tag recorded in sweep metadata and run manifests.
pub const VERSION: &str = concat!("qbattery ", env!("CARGO_PKG_VERSION"));
