//! The oscillator–qubit family `H(τ) = ν a†a + (ω/2)σ_z + g(τ/δt) X ⊗ n·σ`
//! and the operators and states it is built from.

use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{CycleGenerator, SwitchingFunction};
use crate::qcore::{CMatrix, CVector, DensityMatrix, HilbertSpace, Operator};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `|0⟩⟨1|`.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

/// `n·σ`.
pub fn bloch_operator(n: [f64; 3]) -> CMatrix {
    sigma_x().scale(n[0]) + sigma_y().scale(n[1]) + sigma_z().scale(n[2])
}

/// Qubit state `(I + r·σ)/2`; requires `|r| ≤ 1`.
pub fn bloch_state(r: [f64; 3]) -> Result<DensityMatrix> {
    let len = libm::sqrt(r.iter().map(|x| x * x).sum::<f64>());
    if len > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!("Bloch vector length {len} exceeds 1")));
    }
    let m = (CMatrix::identity(2, 2) + bloch_operator(r)).scale(0.5);
    DensityMatrix::new(Operator::from_matrix(m)?)
}

/// Truncated annihilation operator, `a[j, j+1] = √(j+1)`.
pub fn annihilation(cutoff: usize) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff, cutoff);
    for j in 0..cutoff.saturating_sub(1) {
        a[(j, j + 1)] = c(libm::sqrt((j + 1) as f64), 0.0);
    }
    a
}

pub fn number(cutoff: usize) -> CMatrix {
    CMatrix::from_fn(cutoff, cutoff, |i, j| if i == j { c(i as f64, 0.0) } else { c(0.0, 0.0) })
}

/// `X = (a + a†)/2`.
pub fn quadrature_x(cutoff: usize) -> CMatrix {
    let a = annihilation(cutoff);
    (&a + a.adjoint()).scale(0.5)
}

/// `P = (a − a†)/2i`.
pub fn quadrature_p(cutoff: usize) -> CMatrix {
    let a = annihilation(cutoff);
    (&a - a.adjoint()) * c(0.0, -0.5)
}

/// Fock state `|k⟩` in a space truncated at `cutoff` levels.
pub fn fock_state(k: usize, cutoff: usize) -> Result<CVector> {
    if k >= cutoff {
        return Err(Error::InvalidArgument(format!(
            "Fock index {k} is outside a cutoff of {cutoff}"
        )));
    }
    let mut v = CVector::zeros(cutoff);
    v[k] = c(1.0, 0.0);
    Ok(v)
}

/// Largest truncated tail mass accepted by [`coherent_state`].
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

/// Poisson tail `1 − Σ_{n<cutoff} e^{−|α|²}|α|^{2n}/n!`, summed from the top
/// to avoid cancellation.
fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    let mut term = libm::exp(-mean);
    for n in 1..=cutoff {
        term *= mean / n as f64;
    }
    // term = P(cutoff); sum P(n) for n ≥ cutoff
    let mut tail = 0.0;
    let mut n = cutoff;
    while term > 1e-300 || n < cutoff + 10 {
        tail += term;
        n += 1;
        term *= mean / n as f64;
        if n > cutoff + 10_000 {
            break;
        }
    }
    tail
}

/// Coherent state `|α⟩` truncated to `cutoff` levels and renormalized.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<CVector> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, cutoff);
    if tail > COHERENT_TAIL_TOL {
        let mut required = cutoff;
        while poisson_tail(mean, required) > COHERENT_TAIL_TOL {
            required += 1;
        }
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail,
            required,
        });
    }
    let mut v = CVector::zeros(cutoff);
    let mut amp = c(1.0, 0.0);
    for n in 0..cutoff {
        if n > 0 {
            amp = amp * alpha / libm::sqrt(n as f64);
        }
        v[n] = amp;
    }
    let norm = v.norm();
    Ok(v.unscale(norm))
}

/// Parameters of the oscillator–qubit model.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorQubitModel {
    pub nu: f64,
    pub omega: f64,
    pub n_vec: [f64; 3],
    pub cutoff: usize,
    pub switching: SwitchingFunction,
}

impl OscillatorQubitModel {
    /// `ν = ω = 1`, `n = (1, 0, 0)`, `g(ζ) = 2ν sin²(πζ)`.
    pub fn with_cutoff(cutoff: usize) -> Self {
        let nu = 1.0;
        Self {
            nu,
            omega: nu,
            n_vec: [1.0, 0.0, 0.0],
            cutoff,
            switching: SwitchingFunction::sin_squared(2.0 * nu),
        }
    }

    /// Fock cutoff 30, the reference configuration.
    pub fn reference() -> Self {
        Self::with_cutoff(30)
    }

    /// Two-level truncation of the oscillator: a qubit–qubit instance of the
    /// same Hamiltonian, small enough for the superoperator path.
    pub fn qubit_pair() -> Self {
        Self::with_cutoff(2)
    }

    pub fn validate(&self) -> Result<()> {
        let len = libm::sqrt(self.n_vec.iter().map(|x| x * x).sum::<f64>());
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "coupling direction must be a unit vector, |n| = {len}"
            )));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidArgument(format!(
                "Fock cutoff must be at least 2, got {}",
                self.cutoff
            )));
        }
        if !self.nu.is_finite() || !self.omega.is_finite() {
            return Err(Error::InvalidArgument("frequencies must be finite".into()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<CycleGenerator> {
        build_oscillator_qubit(self)
    }
}

pub fn build_oscillator_qubit(m: &OscillatorQubitModel) -> Result<CycleGenerator> {
    m.validate()?;
    let h_s = Operator::new(number(m.cutoff).scale(m.nu), HilbertSpace::simple(m.cutoff))?;
    let h_a = Operator::new(sigma_z().scale(0.5 * m.omega), HilbertSpace::simple(2))?;
    let h_sa = quadrature_x(m.cutoff).kronecker(&bloch_operator(m.n_vec));
    let h_sa = Operator::new(h_sa, HilbertSpace::new(alloc::vec![m.cutoff, 2])?)?;
    CycleGenerator::closed(h_s, h_a, h_sa, m.switching.clone())
}
