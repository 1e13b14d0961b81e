//! Two-level controller for an autonomous vehicle in a deterministic traffic
//! simulator.
//!
//! The high level solves a receding-horizon MIQP: a successively linearized
//! kinematic bicycle model with traffic rules (signal temporal logic formulas)
//! encoded as big-M mixed-integer linear constraints. The low level re-checks
//! the optimal plan against a detailed two-track tire model by runtime
//! monitoring, samples near-optimal controls from an r-ball when the plan
//! fails, and falls back to full braking.
//!
//! Module map:
//! - [`vehicle`] — kinematic bicycle and detailed two-track dynamics,
//!   discretization and linearization
//! - [`environment`] — reference path, desired trajectory, traffic
//!   participants, collision predicates
//! - [`stl`] — STL formulas, boolean semantics, trace monitor, rule library
//! - [`milc`] — STL-to-mixed-integer-linear-constraint encoding
//! - [`miqp`] — dual active-set QP core and branch-and-bound MIQP solver
//! - [`controller`] — the two-level loop itself
//! - [`sim`] — scenarios, world stepping, trace logging, run summaries

pub mod controller;
pub mod environment;
pub mod error;
pub mod milc;
pub mod miqp;
pub mod sim;
pub mod stl;
pub mod vehicle;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
