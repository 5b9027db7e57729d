//! Mid-cycle (non-stroboscopic) deviation from the effective evolution.

use alloc::format;

use num_complex::Complex64;

use crate::dynamics::{intra_cycle_trajectory_opts, PropagationOptions};
use crate::error::{Error, Result};
use crate::generators::{averaged_interaction, effective_hamiltonian, CycleGenerator, SwitchingFunction};
use crate::qcore::{commutator, DensityMatrix, Operator};

/// Slack allowed by [`stroboscopic_bound_check`].
pub const BOUND_SLACK: f64 = 1e-9;

fn check_offset(tau: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) || !(tau > 0.0 && tau <= dt) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < tau <= dt, got tau = {tau}, dt = {dt}"
        )));
    }
    Ok(())
}

/// `ḡ − (δt/τ)∫₀^{τ/δt} g(ζ) dζ`.
pub fn braced_term(g: &SwitchingFunction, tau: f64, dt: f64) -> Result<f64> {
    check_offset(tau, dt)?;
    let frac = tau / dt;
    Ok(g.mean() - g.integral(0.0, frac)? / frac)
}

/// `2 g_max (δt − τ)/τ`.
pub fn braced_bound(g: &SwitchingFunction, tau: f64, dt: f64) -> Result<f64> {
    check_offset(tau, dt)?;
    Ok(2.0 * g.g_max() * (dt - tau) / tau)
}

/// Whether `|braced_term| ≤ braced_bound + BOUND_SLACK`. False when
/// `(tau, dt)` violates `0 < tau ≤ dt`.
pub fn stroboscopic_bound_check(g: &SwitchingFunction, tau: f64, dt: f64) -> bool {
    match (braced_term(g, tau, dt), braced_bound(g, tau, dt)) {
        (Ok(b), Ok(bound)) => b.abs() <= bound + BOUND_SLACK,
        _ => false,
    }
}

fn require_closed(gen: &CycleGenerator) -> Result<()> {
    if !gen.is_closed() {
        return Err(Error::InvalidArgument(
            "the mid-cycle deviation law is stated for Hamiltonian generators".into(),
        ));
    }
    Ok(())
}

/// Predicted first-order deviation
/// `ρ_eff − ρ_full = −iτ·B·[tr_A(H_SA ρ_A), ρ_S]` with `B` the braced term.
pub fn stroboscopic_deviation(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    rho_s: &DensityMatrix,
    tau: f64,
    dt: f64,
) -> Result<Operator> {
    require_closed(gen)?;
    let b = braced_term(gen.switching(), tau, dt)?;
    let avg = averaged_interaction(gen, rho_a)?;
    let m = commutator(&avg, rho_s.matrix()) * Complex64::new(0.0, -tau * b);
    Operator::new(m, gen.space_s().clone())
}

/// Measured `ρ_eff(τ) − ρ_full(τ)` where `ρ_eff = ρ_S − iτ[H_eff, ρ_S]` is the
/// first-order effective evolution and `ρ_full` the exact reduced state a
/// time `τ` into a cycle.
pub fn measured_stroboscopic_deviation(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    rho_s: &DensityMatrix,
    tau: f64,
    dt: f64,
) -> Result<Operator> {
    measured_stroboscopic_deviation_with(gen, rho_a, rho_s, tau, dt, &PropagationOptions::default())
}

pub fn measured_stroboscopic_deviation_with(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    rho_s: &DensityMatrix,
    tau: f64,
    dt: f64,
    opts: &PropagationOptions,
) -> Result<Operator> {
    require_closed(gen)?;
    check_offset(tau, dt)?;
    let h_eff = effective_hamiltonian(gen, rho_a)?;
    let rho = rho_s.matrix();
    let eff = rho - commutator(h_eff.matrix(), rho) * Complex64::new(0.0, tau);
    let full = intra_cycle_trajectory_opts(gen, rho_s, rho_a, dt, &[tau], opts)?;
    Operator::new(eff - full.final_state().matrix(), gen.space_s().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bloch_state, OscillatorQubitModel};
    use core::f64::consts::PI;

    #[test]
    fn full_cycle_braced_term_vanishes() {
        let g = SwitchingFunction::sin_squared(2.0);
        assert!(braced_term(&g, 0.3, 0.3).unwrap().abs() < 1e-12);
        assert_eq!(braced_bound(&g, 0.3, 0.3).unwrap(), 0.0);
        assert!(stroboscopic_bound_check(&g, 0.3, 0.3));
    }

    #[test]
    fn quarter_cycle_sin_squared() {
        // ∫₀^{1/4} 2 sin²(πζ) dζ = 1/4 − 1/(2π)
        let g = SwitchingFunction::sin_squared(2.0);
        let b = braced_term(&g, 0.25, 1.0).unwrap();
        assert!((b - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn constant_switching_has_no_deviation() {
        let mut m = OscillatorQubitModel::qubit_pair();
        m.switching = SwitchingFunction::constant(1.0);
        let gen = m.build().unwrap();
        let rho_a = bloch_state([1.0, 0.0, 0.0]).unwrap();
        let rho_s = bloch_state([0.2, 0.5, -0.3]).unwrap();
        let d = stroboscopic_deviation(&gen, &rho_a, &rho_s, 0.1, 0.4).unwrap();
        assert!(d.matrix().norm() <= 1e-9);
    }

    #[test]
    fn outside_precondition() {
        let g = SwitchingFunction::sin_squared(2.0);
        assert!(!stroboscopic_bound_check(&g, 0.0, 1.0));
        assert!(!stroboscopic_bound_check(&g, 1.5, 1.0));
        assert!(braced_term(&g, -0.1, 1.0).is_err());
    }
}
