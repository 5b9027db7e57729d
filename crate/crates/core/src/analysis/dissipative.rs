//! The `O(t/f)` deviation of reset-driven dynamics from the `H_eff` trajectory.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::scaling::{fit_order_with_floor, linear_fit, LinearFit, ScalingReport};
use crate::dynamics::{evolve_with_resets_opts, PropagationOptions, ResetSchedule};
use crate::error::{Error, Result};
use crate::generators::{effective_hamiltonian, CycleGenerator};
use crate::qcore::{mat_exp, trace_distance, CMatrix, CVector, DensityMatrix, Operator};

/// Deviations at or below this level count as exact agreement.
pub const DEVIATION_FLOOR: f64 = 1e-9;

/// `e^{−iH_eff t}|ψ₀⟩`.
pub fn effective_state(h_eff: &Operator, psi0: &CVector, t: f64) -> Result<CVector> {
    Ok(mat_exp(&(h_eff.matrix() * Complex64::new(0.0, -t)))? * psi0)
}

/// Deviation curve for one reset rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub rate: f64,
    /// Grid times snapped to whole cycles.
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeReport {
    pub curves: Vec<RateCurve>,
    /// Fitted slope of each curve against the rate `f`.
    pub scaling: ScalingReport,
}

/// Cycle counts `round(f·t)` for the positive grid times, deduplicated.
fn cycle_counts(rate: f64, t_grid: &[f64]) -> Vec<usize> {
    let mut ns: Vec<usize> = t_grid
        .iter()
        .map(|t| libm::round(t * rate) as usize)
        .filter(|&n| n > 0)
        .collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// Trace distance between `ρ_S(t)` and `e^{−iH_eff t}|ψ₀⟩` at whole-cycle
/// times `n/f`, for one reset rate `f`.
pub fn deviation_curve(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    psi0: &CVector,
    rate: f64,
    t_grid: &[f64],
    opts: &PropagationOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidArgument("reset rate must be positive".into()));
    }
    let ns = cycle_counts(rate, t_grid);
    let Some(&n_max) = ns.last() else {
        return Err(Error::InvalidArgument("time grid contains no whole cycle".into()));
    };
    let rho0 = DensityMatrix::pure(psi0, gen.space_s().clone())?;
    let h_eff = effective_hamiltonian(gen, rho_a)?;
    let schedule = ResetSchedule::uniform(n_max, n_max as f64 / rate)?;
    let traj = evolve_with_resets_opts(gen, &rho0, rho_a, &schedule, opts)?;
    let mut times = Vec::with_capacity(ns.len());
    let mut devs = Vec::with_capacity(ns.len());
    for n in ns {
        let t = n as f64 / rate;
        let ideal = effective_state(&h_eff, psi0, t)?;
        let ideal: CMatrix = &ideal * ideal.adjoint();
        times.push(t);
        devs.push(trace_distance(traj.states[n].matrix(), &ideal));
    }
    Ok((times, devs))
}

/// Per-rate linear fits of deviation against `t`, then the power law of the
/// slopes against `f` (expected order −1).
pub fn dissipative_scaling(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    psi0: &CVector,
    f_list: &[f64],
    t_grid: &[f64],
) -> Result<DissipativeReport> {
    dissipative_scaling_with(gen, rho_a, psi0, f_list, t_grid, &PropagationOptions::default())
}

pub fn dissipative_scaling_with(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    psi0: &CVector,
    f_list: &[f64],
    t_grid: &[f64],
    opts: &PropagationOptions,
) -> Result<DissipativeReport> {
    let mut curves = Vec::with_capacity(f_list.len());
    for &rate in f_list {
        let (times, deviations) = deviation_curve(gen, rho_a, psi0, rate, t_grid, opts)?;
        let fit = if deviations.iter().all(|&d| d <= DEVIATION_FLOOR) {
            LinearFit {
                slope: 0.0,
                intercept: 0.0,
                r_squared: 1.0,
            }
        } else {
            linear_fit(&times, &deviations)?
        };
        curves.push(RateCurve {
            rate,
            times,
            deviations,
            fit,
        });
    }
    let slopes: Vec<f64> = curves.iter().map(|c| c.fit.slope.abs()).collect();
    let scaling = fit_order_with_floor(f_list, &slopes, DEVIATION_FLOOR)?;
    Ok(DissipativeReport { curves, scaling })
}
