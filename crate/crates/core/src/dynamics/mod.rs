//! Evolve-and-reset propagation of the controlled system.

pub mod propagate;
pub mod schedule;

pub use propagate::{
    converged_cycle_propagator, cycle_map, cycle_map_with, cycle_propagator, cycle_unitary,
    evolve_sampled, evolve_with_resets, evolve_with_resets_opts, intra_cycle_trajectory,
    intra_cycle_trajectory_opts, Converged, PropagationOptions, PropagationPath, Trajectory,
    TrajectoryMeta, SUPEROPERATOR_DIM_LIMIT,
};
pub use schedule::{ResetSchedule, Segment};
