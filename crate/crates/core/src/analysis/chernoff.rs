//! Convergence of `Φ(t/n)ⁿ` to `e^{Φ₁t}` and its first-order correction.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{cycle_map_with, PropagationOptions, SUPEROPERATOR_DIM_LIMIT};
use crate::error::{Error, Result};
use crate::generators::{phi1_super, phi2_super, CycleGenerator};
use crate::qcore::random::random_pure_state;
use crate::qcore::{hermitian_basis, mat_exp, trace_norm, CMatrix, DensityMatrix, SuperOperator};
use crate::quadrature::integrate_matrix_adaptive;

/// Random pure states added to the Hermitian basis when probing induced norms.
pub const PROBE_STATES: usize = 100;
const PROBE_SEED: u64 = 0x5eed_0001;

/// Propagation settings for ladder measurements: tighter than the trajectory
/// default so that propagation error stays far below the measured deviations.
pub fn analysis_options() -> PropagationOptions {
    PropagationOptions {
        tol: 1e-11,
        ..PropagationOptions::default()
    }
}

/// Fixed probe inputs of unit trace norm on a `d`-dimensional space.
pub fn probe_set(d: usize) -> Vec<CMatrix> {
    let mut probes = hermitian_basis(d);
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..PROBE_STATES {
        let psi = random_pure_state(&mut rng, d);
        probes.push(&psi * psi.adjoint());
    }
    probes
}

/// Lower bound on the induced trace norm `sup ‖S(X)‖₁/‖X‖₁` over [`probe_set`].
pub fn induced_trace_norm(s: &SuperOperator) -> f64 {
    probe_set(s.dim())
        .iter()
        .map(|x| trace_norm(&s.apply(x)) / trace_norm(x))
        .fold(0.0, f64::max)
}

fn check_small(gen: &CycleGenerator) -> Result<()> {
    if gen.total_dim() > SUPEROPERATOR_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: gen.total_dim(),
            limit: SUPEROPERATOR_DIM_LIMIT,
        });
    }
    Ok(())
}

fn check_cycles(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one cycle is required".into()));
    }
    Ok(())
}

/// `Φ(t/n)ⁿ` on the dense superoperator path.
pub fn repeated_cycle_map(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    t: f64,
    n: usize,
    opts: &PropagationOptions,
) -> Result<SuperOperator> {
    check_cycles(n)?;
    check_small(gen)?;
    let map = cycle_map_with(gen, rho_a, t / n as f64, opts)?.value;
    Ok(map.pow(n as u64))
}

/// `e^{Φ₁t}`.
pub fn first_order_limit(gen: &CycleGenerator, rho_a: &DensityMatrix, t: f64) -> Result<SuperOperator> {
    phi1_super(gen, rho_a)?.exp(t)
}

/// Induced trace-norm distance between `Φ(t/n)ⁿ` and `e^{Φ₁t}`.
pub fn chernoff_deviation(gen: &CycleGenerator, rho_a: &DensityMatrix, t: f64, n: usize) -> Result<f64> {
    chernoff_deviation_with(gen, rho_a, t, n, &analysis_options())
}

pub fn chernoff_deviation_with(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    t: f64,
    n: usize,
    opts: &PropagationOptions,
) -> Result<f64> {
    check_cycles(n)?;
    check_small(gen)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let product = repeated_cycle_map(gen, rho_a, t, n, opts)?;
    let limit = first_order_limit(gen, rho_a, t)?;
    Ok(induced_trace_norm(&product.sub(&limit)?))
}

/// Relative accuracy of the `τ` quadrature in [`omega1_super`].
pub const OMEGA1_REL_TOL: f64 = 1e-8;

/// `Ω₁(t) = t² ∫₀¹ e^{Φ₁τt}(Φ₂ − ½Φ₁²)e^{Φ₁(1−τ)t} dτ`, so that
/// `Φ(t/n)ⁿ = e^{Φ₁t} + Ω₁(t)/n + O(1/n²)`.
pub fn omega1_super(phi1: &SuperOperator, phi2: &SuperOperator, t: f64, nodes: usize) -> Result<SuperOperator> {
    if phi1.space() != phi2.space() {
        return Err(Error::DimensionMismatch {
            expected: phi1.dim(),
            found: phi2.dim(),
        });
    }
    if nodes < 2 {
        return Err(Error::InvalidArgument("the τ quadrature needs at least 2 nodes".into()));
    }
    if t == 0.0 {
        return Ok(SuperOperator::zeros(phi1.space().clone()));
    }
    let p1 = phi1.matrix();
    let kernel = phi2.matrix() - (p1 * p1).scale(0.5);
    let (integral, _) = integrate_matrix_adaptive(
        |tau| Ok(mat_exp(&p1.scale(tau * t))? * &kernel * mat_exp(&p1.scale((1.0 - tau) * t))?),
        0.0,
        1.0,
        nodes,
        OMEGA1_REL_TOL,
    )?;
    SuperOperator::new(integral.scale(t * t), phi1.space().clone())
}

/// Induced trace-norm distance between `Φ(t/n)ⁿ` and `e^{Φ₁t} + Ω₁(t)/n`.
pub fn corrected_chernoff_deviation(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    t: f64,
    n: usize,
) -> Result<f64> {
    corrected_chernoff_deviation_with(gen, rho_a, t, n, &analysis_options())
}

pub fn corrected_chernoff_deviation_with(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    t: f64,
    n: usize,
    opts: &PropagationOptions,
) -> Result<f64> {
    check_cycles(n)?;
    check_small(gen)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let phi1 = phi1_super(gen, rho_a)?;
    let phi2 = phi2_super(gen, rho_a)?;
    let omega = omega1_super(&phi1, &phi2, t, 8)?;
    let product = repeated_cycle_map(gen, rho_a, t, n, opts)?;
    let approx = phi1.exp(t)?.add(&omega.scale(1.0 / n as f64))?;
    Ok(induced_trace_norm(&product.sub(&approx)?))
}
