//! Numerical core for indirect control of a quantum system through a
//! periodically reset actuator.
//!
//! The crate is `no_std` (it needs `alloc`). Modules:
//!
//! * [`qcore`]: operators, states, partial traces, matrix exponentials and
//!   superoperators (column-stacking vectorization).
//! * [`quadrature`]: Gauss–Legendre rules with node doubling.
//! * [`generators`]: switching functions, the cycle Liouvillian and the
//!   effective generators derived from it.
//! * [`dynamics`]: evolve-and-reset propagation.
//! * [`analysis`]: convergence-order and error-law measurements.
//! * [`models`]: the oscillator–qubit family and its states.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod models;
pub mod qcore;
pub mod quadrature;

pub use error::{Error, Result};
