//! Limiting laws for the rescaled maximum of partial sums of exchangeable
//! random variables, and a deterministic Monte Carlo engine that checks them.
//!
//! An exchangeable sequence is modelled through its directing measure: a
//! finite mixture of component laws. Conditionally on the drawn component the
//! sequence is i.i.d., which is exactly how the engine simulates it (one
//! component draw per replication, then `n` conditional draws).
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! supplied by the caller through the [`Executor`] trait; [`Sequential`] is
//! the in-crate implementation.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod engine;
pub mod executor;
pub mod limit_laws;
pub mod measures;
pub mod normal;
pub mod quadrature;
pub mod stream;
pub mod verify;

pub use engine::{EmpiricalCdf, SimulationConfig};
pub use error::Error;
pub use executor::{Executor, Sequential};
pub use limit_laws::{ModelSummary, SigmaAtom, SigmaLaw};
pub use measures::{ComponentLaw, DirectingMeasure, WeightedLaw};
pub use stream::{RandomStream, StreamKey};

pub type Result<T, E = Error> = core::result::Result<T, E>;
