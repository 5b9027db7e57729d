//! Continuous actuator damping as an alternative to instantaneous resets.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::dissipative::effective_state;
use crate::dynamics::{evolve_sampled, PropagationOptions, ResetSchedule};
use crate::error::{Error, Result};
use crate::generators::{effective_hamiltonian, CycleGenerator, SwitchingFunction};
use crate::qcore::{trace_distance, CMatrix, CVector, DensityMatrix, Operator};

/// Jump operators `√(κ p_j)|e_j⟩⟨e_k|` for `ρ_A = Σ p_j|e_j⟩⟨e_j|`, whose
/// dissipator is `κ(tr(ρ)ρ_A − ρ)`.
pub fn reset_jumps(rho_a: &DensityMatrix, kappa: f64) -> Result<Vec<Operator>> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument("damping rate must be non-negative".into()));
    }
    let eig = rho_a.matrix().clone().symmetric_eigen();
    let d = rho_a.dim();
    let mut out = Vec::new();
    for j in 0..d {
        let p = eig.eigenvalues[j].max(0.0);
        if p * kappa == 0.0 {
            continue;
        }
        let ej = eig.eigenvectors.column(j);
        for k in 0..d {
            let ek = eig.eigenvectors.column(k);
            let m: CMatrix = (ej * ek.adjoint()) * Complex64::new(libm::sqrt(kappa * p), 0.0);
            out.push(Operator::new(m, rho_a.space().clone())?);
        }
    }
    Ok(out)
}

/// `gen` with the coupling held at `ḡ` and the actuator damped toward `ρ_A`
/// at rate `κ` in addition to its own dissipators.
pub fn gradual_reset_generator(gen: &CycleGenerator, rho_a: &DensityMatrix, kappa: f64) -> Result<CycleGenerator> {
    let mut jumps = gen.jumps_a().to_vec();
    jumps.extend(reset_jumps(rho_a, kappa)?);
    let mean = gen.switching().mean();
    gen.clone()
        .with_switching(SwitchingFunction::constant(mean))
        .with_jumps_a(jumps)
}

/// Largest trace distance between `ρ_S` and the `H_eff` trajectory of `ψ₀`
/// over `samples` equally spaced times in `(0, t]`, without resets.
pub fn gradual_reset_deviation(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    psi0: &CVector,
    kappa: f64,
    t: f64,
    samples: usize,
) -> Result<f64> {
    let damped = gradual_reset_generator(gen, rho_a, kappa)?;
    let rho0 = DensityMatrix::pure(psi0, gen.space_s().clone())?;
    let h_eff = effective_hamiltonian(gen, rho_a)?;
    let opts = PropagationOptions::default().with_path(crate::dynamics::PropagationPath::State);
    let traj = evolve_sampled(&damped, &rho0, rho_a, &ResetSchedule::without_resets(t)?, samples, &opts)?;
    let mut worst = 0.0f64;
    for (time, state) in traj.times.iter().zip(&traj.states) {
        let ideal = effective_state(&h_eff, psi0, *time)?;
        worst = worst.max(trace_distance(state.matrix(), &(&ideal * ideal.adjoint())));
    }
    Ok(worst)
}

/// [`gradual_reset_deviation`] along a ladder of damping rates.
pub fn gradual_reset_ladder(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    psi0: &CVector,
    kappas: &[f64],
    t: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    kappas
        .iter()
        .map(|&k| Ok((k, gradual_reset_deviation(gen, rho_a, psi0, k, t, samples)?)))
        .collect()
}
