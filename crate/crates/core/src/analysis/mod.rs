//! Measurements of the limit theorems and error laws: product-formula
//! convergence, the dissipative `O(t/f)` law, mid-cycle deviation bounds,
//! controllability and gradual resets.

pub mod chernoff;
pub mod dissipative;
pub mod gradual;
pub mod lie;
pub mod scaling;
pub mod strobe;

pub use chernoff::{
    analysis_options, chernoff_deviation, chernoff_deviation_with, corrected_chernoff_deviation,
    corrected_chernoff_deviation_with, first_order_limit, induced_trace_norm, omega1_super, probe_set,
    repeated_cycle_map, OMEGA1_REL_TOL, PROBE_STATES,
};
pub use dissipative::{
    deviation_curve, dissipative_scaling, dissipative_scaling_with, effective_state, DissipativeReport,
    RateCurve, DEVIATION_FLOOR,
};
pub use gradual::{gradual_reset_deviation, gradual_reset_generator, gradual_reset_ladder, reset_jumps};
pub use lie::lie_algebra_dimension;
pub use scaling::{fit_order, fit_order_with_floor, linear_fit, LinearFit, ScalingReport};
pub use strobe::{
    braced_bound, braced_term, measured_stroboscopic_deviation, measured_stroboscopic_deviation_with,
    stroboscopic_bound_check, stroboscopic_deviation, BOUND_SLACK,
};
