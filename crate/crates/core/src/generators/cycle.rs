use alloc::string::String;
use alloc::vec::Vec;

use super::switching::SwitchingFunction;
use crate::error::{Error, Result};
use crate::qcore::operator::trace_second;
use crate::qcore::{
    hermitian_part, CMatrix, DensityMatrix, HilbertSpace, Lindbladian, Operator, SuperOperator,
    Tolerances,
};

/// Liouvillian of one evolve-and-reset cycle,
/// `L(ζ) = L_S + L_A + g(ζ) L_SA` on `S ⊗ A`.
///
/// The switching function multiplies the whole interaction part, including
/// any dissipators in `jumps_sa`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleGenerator {
    space_s: HilbertSpace,
    space_a: HilbertSpace,
    h_s: Operator,
    h_a: Operator,
    h_sa: Operator,
    jumps_s: Vec<Operator>,
    jumps_a: Vec<Operator>,
    jumps_sa: Vec<Operator>,
    switching: SwitchingFunction,
}

impl CycleGenerator {
    /// Closed-system generator `H(τ) = H_S + H_A + g(τ/δt) H_SA`.
    pub fn closed(h_s: Operator, h_a: Operator, h_sa: Operator, switching: SwitchingFunction) -> Result<Self> {
        Self::with_tolerance(h_s, h_a, h_sa, switching, Tolerances::default().herm)
    }

    pub fn with_tolerance(
        h_s: Operator,
        h_a: Operator,
        h_sa: Operator,
        switching: SwitchingFunction,
        tol_herm: f64,
    ) -> Result<Self> {
        h_s.ensure_hermitian(tol_herm)?;
        h_a.ensure_hermitian(tol_herm)?;
        h_sa.ensure_hermitian(tol_herm)?;
        let space_s = h_s.space().clone();
        let space_a = h_a.space().clone();
        let joint = space_s.total_dim() * space_a.total_dim();
        if h_sa.dim() != joint {
            return Err(Error::DimensionMismatch {
                expected: joint,
                found: h_sa.dim(),
            });
        }
        let h_sa = h_sa.with_space(space_s.tensor(&space_a))?;
        Ok(Self {
            space_s,
            space_a,
            h_s,
            h_a,
            h_sa,
            jumps_s: Vec::new(),
            jumps_a: Vec::new(),
            jumps_sa: Vec::new(),
            switching,
        })
    }

    pub fn with_jumps_s(mut self, jumps: Vec<Operator>) -> Result<Self> {
        check_dims(&jumps, self.space_s.total_dim())?;
        self.jumps_s = jumps;
        Ok(self)
    }

    pub fn with_jumps_a(mut self, jumps: Vec<Operator>) -> Result<Self> {
        check_dims(&jumps, self.space_a.total_dim())?;
        self.jumps_a = jumps;
        Ok(self)
    }

    pub fn with_jumps_sa(mut self, jumps: Vec<Operator>) -> Result<Self> {
        check_dims(&jumps, self.total_dim())?;
        self.jumps_sa = jumps;
        Ok(self)
    }

    pub fn with_h_a(mut self, h_a: Operator) -> Result<Self> {
        h_a.ensure_hermitian(Tolerances::default().herm)?;
        if h_a.dim() != self.space_a.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space_a.total_dim(),
                found: h_a.dim(),
            });
        }
        self.h_a = h_a;
        Ok(self)
    }

    pub fn with_switching(mut self, switching: SwitchingFunction) -> Self {
        self.switching = switching;
        self
    }

    pub fn space_s(&self) -> &HilbertSpace {
        &self.space_s
    }

    pub fn space_a(&self) -> &HilbertSpace {
        &self.space_a
    }

    pub fn joint_space(&self) -> HilbertSpace {
        self.space_s.tensor(&self.space_a)
    }

    pub fn dim_s(&self) -> usize {
        self.space_s.total_dim()
    }

    pub fn dim_a(&self) -> usize {
        self.space_a.total_dim()
    }

    pub fn total_dim(&self) -> usize {
        self.dim_s() * self.dim_a()
    }

    pub fn h_s(&self) -> &Operator {
        &self.h_s
    }

    pub fn h_a(&self) -> &Operator {
        &self.h_a
    }

    pub fn h_sa(&self) -> &Operator {
        &self.h_sa
    }

    pub fn jumps_s(&self) -> &[Operator] {
        &self.jumps_s
    }

    pub fn jumps_a(&self) -> &[Operator] {
        &self.jumps_a
    }

    pub fn jumps_sa(&self) -> &[Operator] {
        &self.jumps_sa
    }

    pub fn switching(&self) -> &SwitchingFunction {
        &self.switching
    }

    /// No dissipators anywhere: `S ⊗ A` evolves unitarily between resets.
    pub fn is_closed(&self) -> bool {
        self.jumps_s.is_empty() && self.jumps_a.is_empty() && self.jumps_sa.is_empty()
    }

    /// Free part `L_S + L_A` lifted to `S ⊗ A`.
    pub fn drift(&self) -> Lindbladian {
        let id_s = CMatrix::identity(self.dim_s(), self.dim_s());
        let id_a = CMatrix::identity(self.dim_a(), self.dim_a());
        let hamiltonian = self.h_s.matrix().kronecker(&id_a) + id_s.kronecker(self.h_a.matrix());
        let jumps = self
            .jumps_s
            .iter()
            .map(|l| l.matrix().kronecker(&id_a))
            .chain(self.jumps_a.iter().map(|l| id_s.kronecker(l.matrix())))
            .collect();
        Lindbladian::new(hamiltonian, jumps)
    }

    /// Interaction part `L_SA` (unmodulated).
    pub fn coupling(&self) -> Lindbladian {
        Lindbladian::new(
            self.h_sa.matrix().clone(),
            self.jumps_sa.iter().map(|l| l.matrix().clone()).collect(),
        )
    }

    /// Joint Hamiltonian `H_S + H_A + g H_SA` for a given coupling value.
    pub fn hamiltonian_at(&self, g: f64) -> CMatrix {
        let drift = self.drift();
        drift.hamiltonian + self.h_sa.matrix().scale(g)
    }

    /// Non-fatal issues with this generator.
    pub fn validity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.jumps_sa.is_empty() && self.switching.takes_negative_values() {
            out.push(String::from(
                "switching function takes negative values while the interaction has dissipators: \
                 the instantaneous generator is not completely positive",
            ));
        }
        out
    }

    fn check_state_a(&self, rho_a: &DensityMatrix) -> Result<()> {
        if rho_a.dim() != self.dim_a() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a(),
                found: rho_a.dim(),
            });
        }
        Ok(())
    }

    /// The reduced map `X ↦ tr_A[f(X ⊗ ρ_A)]` on `S` for a joint-space map `f`.
    pub fn reduce<F>(&self, rho_a: &DensityMatrix, f: F) -> Result<SuperOperator>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        self.check_state_a(rho_a)?;
        let dim_a = self.dim_a();
        let ra = rho_a.matrix();
        Ok(SuperOperator::from_action(self.space_s.clone(), |x| {
            trace_second(&f(&x.kronecker(ra)), dim_a)
        }))
    }
}

fn check_dims(ops: &[Operator], dim: usize) -> Result<()> {
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
    }
    Ok(())
}

/// `ḡ = ∫₀¹ g(ζ) dζ`.
pub fn mean_coupling(g: &SwitchingFunction) -> f64 {
    g.mean()
}

/// `tr_A(H_SA (I ⊗ ρ_A))`, the actuator-averaged interaction on `S`.
pub fn averaged_interaction(gen: &CycleGenerator, rho_a: &DensityMatrix) -> Result<CMatrix> {
    gen.check_state_a(rho_a)?;
    let id_s = CMatrix::identity(gen.dim_s(), gen.dim_s());
    let lifted = id_s.kronecker(rho_a.matrix());
    Ok(trace_second(&(gen.h_sa().matrix() * lifted), gen.dim_a()))
}

/// `H_eff = H_S + ḡ tr_A(H_SA ρ_A)`.
pub fn effective_hamiltonian(gen: &CycleGenerator, rho_a: &DensityMatrix) -> Result<Operator> {
    let avg = averaged_interaction(gen, rho_a)?;
    let h = gen.h_s().matrix() + avg.scale(gen.switching().mean());
    Operator::new(hermitian_part(&h), gen.space_s().clone())
}

/// First-order generator `Φ₁ = L_S + ḡ tr_A[L_SA(· ⊗ ρ_A)]`, built from the
/// joint-space action on `X ⊗ ρ_A` followed by the partial trace.
pub fn phi1_super(gen: &CycleGenerator, rho_a: &DensityMatrix) -> Result<SuperOperator> {
    let id_a = CMatrix::identity(gen.dim_a(), gen.dim_a());
    let system = Lindbladian::new(
        gen.h_s().matrix().kronecker(&id_a),
        gen.jumps_s().iter().map(|l| l.matrix().kronecker(&id_a)).collect(),
    );
    let coupling = gen.coupling();
    let gbar = gen.switching().mean();
    gen.reduce(rho_a, |x| system.apply(x) + coupling.apply(x).scale(gbar))
}

/// Scalar weights of the time-ordered double integral of
/// `L(ζ₁)L(ζ₂) = (L₀ + g(ζ₁)L₁)(L₀ + g(ζ₂)L₁)` over `0 ≤ ζ₂ ≤ ζ₁ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderWeights {
    /// Coefficient of `L₀L₀` (always ½).
    pub drift_drift: f64,
    /// Coefficient of `L₁L₀`: `∫ g(ζ) ζ dζ`.
    pub coupling_drift: f64,
    /// Coefficient of `L₀L₁`: `∫ g(ζ)(1 − ζ) dζ`.
    pub drift_coupling: f64,
    /// Coefficient of `L₁L₁`: `∫dζ₁ g(ζ₁) ∫₀^{ζ₁} g(ζ₂) dζ₂ = ḡ²/2`.
    pub coupling_coupling: f64,
}

impl SecondOrderWeights {
    pub fn new(g: &SwitchingFunction) -> Result<Self> {
        let coupling_drift = g.weighted_integral(0.0, 1.0, |z| z)?;
        let drift_coupling = g.weighted_integral(0.0, 1.0, |z| 1.0 - z)?;
        let mean = g.mean();
        Ok(Self {
            drift_drift: 0.5,
            coupling_drift,
            drift_coupling,
            // the integrand g(ζ₁)g(ζ₂) is symmetric, so the triangle is half the square
            coupling_coupling: 0.5 * mean * mean,
        })
    }
}

/// Second-order coefficient
/// `Φ₂ = tr_A ∫₀¹dζ₁ ∫₀^{ζ₁}dζ₂ L(ζ₁)L(ζ₂)(· ⊗ ρ_A)`.
pub fn phi2_super(gen: &CycleGenerator, rho_a: &DensityMatrix) -> Result<SuperOperator> {
    let w = SecondOrderWeights::new(gen.switching())?;
    let drift = gen.drift();
    let coupling = gen.coupling();
    gen.reduce(rho_a, |x| {
        let d = drift.apply(x);
        let c = coupling.apply(x);
        drift.apply(&d).scale(w.drift_drift)
            + coupling.apply(&d).scale(w.coupling_drift)
            + drift.apply(&c).scale(w.drift_coupling)
            + coupling.apply(&c).scale(w.coupling_coupling)
    })
}

/// `−i[H, ·]` on `S` wrapped as a superoperator, for comparing with `Φ₁`.
pub fn effective_commutator(gen: &CycleGenerator, rho_a: &DensityMatrix) -> Result<SuperOperator> {
    crate::qcore::ham_super(&effective_hamiltonian(gen, rho_a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::test_util::{c, random_density, random_hermitian};
    use crate::qcore::{ham_super, trace_norm};
    use alloc::vec;
    use rand::SeedableRng;

    fn pauli(k: usize) -> CMatrix {
        match k {
            0 => CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            1 => CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
            _ => CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        }
    }

    fn op(m: CMatrix) -> Operator {
        Operator::from_matrix(m).unwrap()
    }

    fn ket0() -> DensityMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        DensityMatrix::new(op(m)).unwrap()
    }

    fn qubit_pair(h_sa: CMatrix, g: SwitchingFunction) -> CycleGenerator {
        CycleGenerator::closed(op(pauli(0).scale(0.3)), op(pauli(2).scale(0.5)), op(h_sa), g).unwrap()
    }

    #[test]
    fn zero_coupling_gives_bare_hamiltonian() {
        let gen = qubit_pair(CMatrix::zeros(4, 4), SwitchingFunction::constant(1.0));
        let h = effective_hamiltonian(&gen, &ket0()).unwrap();
        assert_eq!(h.matrix(), gen.h_s().matrix());
    }

    #[test]
    fn unbiased_actuator_cancels_coupling() {
        let gen = qubit_pair(pauli(0).kronecker(&pauli(0)), SwitchingFunction::sin_squared(2.0));
        let mixed = DensityMatrix::maximally_mixed(HilbertSpace::simple(2));
        let h = effective_hamiltonian(&gen, &mixed).unwrap();
        assert!((h.matrix() - gen.h_s().matrix()).norm() < 1e-15);
    }

    #[test]
    fn zz_coupling_with_ground_actuator() {
        let gen = qubit_pair(pauli(2).kronecker(&pauli(2)), SwitchingFunction::constant(1.0));
        let phi1 = phi1_super(&gen, &ket0()).unwrap();
        let want = ham_super(&op(pauli(0).scale(0.3) + pauli(2))).unwrap();
        assert!((phi1.matrix() - want.matrix()).norm() < 1e-12);
    }

    #[test]
    fn phi1_ignores_actuator_dissipation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let gen = qubit_pair(random_hermitian(&mut rng, 4), SwitchingFunction::sin_squared(1.0));
        let rho_a = DensityMatrix::new(op(random_density(&mut rng, 2))).unwrap();
        let base = phi1_super(&gen, &rho_a).unwrap();
        let noisy = gen
            .clone()
            .with_jumps_a(vec![op(random_hermitian(&mut rng, 2)), op(pauli(0).scale(2.0))])
            .unwrap();
        let other = phi1_super(&noisy, &rho_a).unwrap();
        assert!(trace_norm(&(base.matrix() - other.matrix())) <= 1e-12);
    }

    #[test]
    fn phi2_without_coupling_is_half_square() {
        let gen = CycleGenerator::closed(
            op(pauli(0).scale(0.7)),
            op(CMatrix::zeros(2, 2)),
            op(pauli(2).kronecker(&pauli(0))),
            SwitchingFunction::constant(0.0),
        )
        .unwrap();
        let phi2 = phi2_super(&gen, &ket0()).unwrap();
        let l = ham_super(gen.h_s()).unwrap();
        let want = l.compose(&l).unwrap().scale(0.5);
        assert!((phi2.matrix() - want.matrix()).norm() < 1e-12);
    }

    #[test]
    fn second_order_weights_for_constant_switching() {
        let w = SecondOrderWeights::new(&SwitchingFunction::constant(2.0)).unwrap();
        assert!((w.coupling_drift - 1.0).abs() < 1e-12);
        assert!((w.drift_coupling - 1.0).abs() < 1e-12);
        assert!((w.coupling_coupling - 2.0).abs() < 1e-12);
    }

    #[test]
    fn joint_dimension_is_checked() {
        let err = CycleGenerator::closed(
            op(pauli(0)),
            op(pauli(0)),
            op(CMatrix::zeros(3, 3)),
            SwitchingFunction::constant(1.0),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let gen = qubit_pair(CMatrix::zeros(4, 4), SwitchingFunction::constant(1.0));
        let wrong = DensityMatrix::maximally_mixed(HilbertSpace::simple(3));
        assert!(effective_hamiltonian(&gen, &wrong).is_err());
    }

    #[test]
    fn negative_switching_with_interaction_dissipator_warns() {
        let gen = qubit_pair(CMatrix::zeros(4, 4), SwitchingFunction::constant(-1.0));
        assert!(gen.validity_warnings().is_empty());
        let gen = gen.with_jumps_sa(vec![op(pauli(0).kronecker(&pauli(0)))]).unwrap();
        assert_eq!(gen.validity_warnings().len(), 1);
    }
}
