//! Cycle Liouvillian and the effective generators derived from it.

pub mod cycle;
pub mod switching;

pub use cycle::{
    averaged_interaction, effective_commutator, effective_hamiltonian, mean_coupling, phi1_super,
    phi2_super, CycleGenerator, SecondOrderWeights,
};
pub use switching::{SwitchingFunction, SwitchingShape};
