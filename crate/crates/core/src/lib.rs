//! Statevector simulation of peaked sampling ensembles and sector-resolved
//! correlator diagnostics for diagonal observables.
//!
//! Basis indices use a single convention throughout: bit `k` of the
//! integer index is the computational-basis outcome of qubit `k`.

pub mod cli;
pub mod diagnostics;
pub mod ensembles;
pub mod error;
pub mod observables;
pub mod rng;
pub mod state;

pub use diagnostics::{
    concentration_curve, cumulative_trace, exact_sector_estimates, shot_sector_estimates, SectorEstimates,
};
pub use ensembles::{EnsembleDraw, EnsembleSpec, ShallowSpec};
pub use error::{Error, Result};
pub use observables::{
    f_target, p_g_ideal, DiagonalObservable, Predicate, PredicateSpec, Sector, SectorRule, ZString,
};
pub use state::{CircuitSpec, Gate, QuantumState, BIT_ORDER};
