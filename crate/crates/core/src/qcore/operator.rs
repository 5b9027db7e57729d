use alloc::format;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::HilbertSpace;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Validation tolerances for Hermiticity, trace and positivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-8,
        }
    }
}

/// Largest entry-wise deviation `|m - m†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// A square complex matrix acting on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    space: HilbertSpace,
}

impl Operator {
    pub fn new(matrix: CMatrix, space: HilbertSpace) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix, space })
    }

    /// Operator on a single-subsystem space sized to the matrix.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("empty operator matrix".into()));
        }
        let space = HilbertSpace::simple(matrix.nrows());
        Self::new(matrix, space)
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            matrix: CMatrix::identity(d, d),
            space,
        }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            matrix: CMatrix::zeros(d, d),
            space,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            space: self.space.clone(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_deviation(&self.matrix) <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = hermiticity_deviation(&self.matrix);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Same matrix, re-tagged with another space of equal total dimension.
    pub fn with_space(self, space: HilbertSpace) -> Result<Self> {
        Self::new(self.matrix, space)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
            space: self.space.clone(),
        }
    }

    /// `self + other` on a common space.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            space: self.space.clone(),
        })
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b` on the concatenated space.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator {
        matrix: a.matrix.kronecker(&b.matrix),
        space: a.space.tensor(&b.space),
    }
}

/// Traces out every subsystem except `keep`.
pub fn partial_trace(m: &Operator, keep: usize) -> Result<Operator> {
    let dims = m.space.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidArgument(
            "partial trace needs at least two subsystems".into(),
        ));
    }
    if keep >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: keep,
            count: dims.len(),
        });
    }
    let left: usize = dims[..keep].iter().product();
    let kept = dims[keep];
    let right: usize = dims[keep + 1..].iter().product();
    let matrix = trace_out(&m.matrix, left, kept, right);
    Operator::new(matrix, HilbertSpace::simple(kept))
}

/// Raw partial trace of a `(left*kept*right)`-square matrix onto the middle factor.
pub(crate) fn trace_out(m: &CMatrix, left: usize, kept: usize, right: usize) -> CMatrix {
    let mut out = CMatrix::zeros(kept, kept);
    for b in 0..kept {
        for a in 0..kept {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..left {
                let row0 = (l * kept + a) * right;
                let col0 = (l * kept + b) * right;
                for r in 0..right {
                    acc += m[(row0 + r, col0 + r)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// `tr_A` of a matrix on `S ⊗ A` with `A` of dimension `dim_a`.
pub(crate) fn trace_second(m: &CMatrix, dim_a: usize) -> CMatrix {
    trace_out(m, 1, m.nrows() / dim_a, dim_a)
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::new_with(op, &Tolerances::default())
    }

    pub fn new_with(op: Operator, tol: &Tolerances) -> Result<Self> {
        let deviation = hermiticity_deviation(op.matrix());
        if deviation > tol.herm {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i differs from 1",
                tr.re, tr.im
            )));
        }
        let min_eig = min_eigenvalue(op.matrix());
        if min_eig < -tol.psd {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { op })
    }

    /// Skips validation. Intended for states produced by propagation loops.
    pub fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector `psi`.
    pub fn pure(psi: &CVector, space: HilbertSpace) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "state vector norm {norm} differs from 1"
            )));
        }
        let op = Operator::new(psi * psi.adjoint(), space)?;
        Ok(Self { op })
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        let matrix = CMatrix::identity(d, d).scale(1.0 / d as f64);
        Self {
            op: Operator { matrix, space },
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn space(&self) -> &HilbertSpace {
        self.op.space()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        let m = self.op.matrix();
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.op.matrix())
    }
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `√⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &CVector) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "state vector norm {norm} differs from 1"
        )));
    }
    let overlap = (psi.adjoint() * rho.matrix() * psi)[(0, 0)].re;
    Ok(libm::sqrt(overlap.max(0.0)).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::test_util::{c, random_matrix};
    use alloc::vec;
    use rand::SeedableRng;

    fn pauli_z() -> Operator {
        Operator::from_matrix(CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)])))
            .unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = Operator::identity(HilbertSpace::simple(2));
        let i4 = kron(&i2, &i2);
        assert_eq!(i4.matrix(), &CMatrix::identity(4, 4));
        assert_eq!(i4.space().dims(), &[2, 2]);
    }

    #[test]
    fn kron_block_structure() {
        let z = kron(&pauli_z(), &Operator::identity(HilbertSpace::simple(2)));
        let expected = [1.0, 1.0, -1.0, -1.0];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(z.matrix()[(k, k)], c(*e, 0.0));
        }
        assert_eq!(z.matrix().iter().filter(|v| v.norm() > 0.0).count(), 4);
    }

    #[test]
    fn kron_matches_element_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 2);
        let k = kron(&Operator::from_matrix(a.clone()).unwrap(), &Operator::from_matrix(b.clone()).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..2 {
                    for q in 0..2 {
                        let got = k.matrix()[(i * 2 + p, j * 2 + q)];
                        assert!((got - a[(i, j)] * b[(p, q)]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_state_is_mixed() {
        let s = 1.0 / libm::sqrt(2.0);
        let psi = CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let space = HilbertSpace::new(vec![2, 2]).unwrap();
        let rho = DensityMatrix::pure(&psi, space).unwrap();
        for keep in 0..2 {
            let r = partial_trace(rho.operator(), keep).unwrap();
            assert!((r.matrix() - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_matches_index_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 6);
        let op = Operator::new(m.clone(), HilbertSpace::new(vec![3, 2]).unwrap()).unwrap();
        let keep0 = partial_trace(&op, 0).unwrap();
        let keep1 = partial_trace(&op, 1).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = c(0.0, 0.0);
                for k in 0..2 {
                    acc += m[(a * 2 + k, b * 2 + k)];
                }
                assert!((keep0.matrix()[(a, b)] - acc).norm() < 1e-14);
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = c(0.0, 0.0);
                for k in 0..3 {
                    acc += m[(k * 2 + a, k * 2 + b)];
                }
                assert!((keep1.matrix()[(a, b)] - acc).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_errors() {
        let op = Operator::identity(HilbertSpace::simple(4));
        assert!(partial_trace(&op, 0).is_err());
        let op = Operator::identity(HilbertSpace::new(vec![2, 2]).unwrap());
        assert!(matches!(partial_trace(&op, 2), Err(Error::InvalidSubsystem { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        let space = HilbertSpace::simple(2);
        assert!(DensityMatrix::new(Operator::identity(space.clone())).is_err());
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(DensityMatrix::new(Operator::new(bad, space.clone()).unwrap()).is_err());
        let mixed = DensityMatrix::maximally_mixed(space);
        assert!((mixed.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_cases() {
        let space = HilbertSpace::simple(2);
        let zero = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let one = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let rho = DensityMatrix::pure(&zero, space.clone()).unwrap();
        assert!((fidelity_pure(&rho, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity_pure(&rho, &one).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(space);
        let plus = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!((fidelity_pure(&mixed, &plus).unwrap() - libm::sqrt(0.5)).abs() < 1e-15);
        let wrong = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(fidelity_pure(&mixed, &wrong), Err(Error::DimensionMismatch { .. })));
    }
}
