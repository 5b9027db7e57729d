//! Superoperators on column-stacked density matrices.
//!
//! Vectorization is column-stacking throughout: `vec(ρ)[i + d*j] = ρ[i, j]`,
//! so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Every constructor and consumer in the
//! crate uses this convention.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::expm::mat_exp;
use super::operator::{hermitian_part, hermiticity_deviation, CMatrix, CVector, Operator, Tolerances};
use super::space::HilbertSpace;
use crate::error::{Error, Result};

pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.sum()
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    // Differences of states are Hermitian; eigenvalues are cheaper than an SVD.
    if hermiticity_deviation(&diff) < 1e-12 {
        0.5 * hermitian_part(&diff)
            .symmetric_eigenvalues()
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    } else {
        0.5 * trace_norm(&diff)
    }
}

/// Linear map on operators of `space`, stored as a `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    matrix: CMatrix,
    space: HilbertSpace,
}

impl SuperOperator {
    pub fn new(matrix: CMatrix, space: HilbertSpace) -> Result<Self> {
        let side = space.total_dim() * space.total_dim();
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix, space })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let side = space.total_dim() * space.total_dim();
        Self {
            matrix: CMatrix::identity(side, side),
            space,
        }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let side = space.total_dim() * space.total_dim();
        Self {
            matrix: CMatrix::zeros(side, side),
            space,
        }
    }

    /// Builds the superoperator column by column from the action of `f` on
    /// the matrix units `|i⟩⟨j|`.
    pub fn from_action<F>(space: HilbertSpace, f: F) -> Self
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let d = space.total_dim();
        let mut matrix = CMatrix::zeros(d * d, d * d);
        let mut unit = CMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let image = f(&unit);
                unit[(i, j)] = Complex64::new(0.0, 0.0);
                matrix
                    .column_mut(i + d * j)
                    .copy_from_slice(image.as_slice());
            }
        }
        Self { matrix, space }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Dimension of the underlying Hilbert space (not the superoperator side).
    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            space: self.space.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            space: self.space.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            space: self.space.clone(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
            space: self.space.clone(),
        }
    }

    /// `e^{t·self}`.
    pub fn exp(&self, t: f64) -> Result<Self> {
        Ok(Self {
            matrix: mat_exp(&self.matrix.scale(t))?,
            space: self.space.clone(),
        })
    }

    /// `self^n` by binary powering.
    pub fn pow(&self, mut n: u64) -> Self {
        let side = self.matrix.nrows();
        let mut result = CMatrix::identity(side, side);
        let mut base = self.matrix.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        Self {
            matrix: result,
            space: self.space.clone(),
        }
    }

    /// Frobenius norm of the matrix representation.
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(())
    }
}

/// `ρ ↦ −i[H, ρ]` (ħ = 1).
pub fn ham_super(h: &Operator) -> Result<SuperOperator> {
    ham_super_with(h, Tolerances::default().herm)
}

pub fn ham_super_with(h: &Operator, tol_herm: f64) -> Result<SuperOperator> {
    h.ensure_hermitian(tol_herm)?;
    Ok(SuperOperator {
        matrix: commutator_matrix(h.matrix()),
        space: h.space().clone(),
    })
}

pub(crate) fn commutator_matrix(h: &CMatrix) -> CMatrix {
    let d = h.nrows();
    let ident = CMatrix::identity(d, d);
    let minus_i = Complex64::new(0.0, -1.0);
    (ident.kronecker(h) - h.transpose().kronecker(&ident)) * minus_i
}

/// `ρ ↦ LρL† − ½{L†L, ρ}`.
pub fn dissipator_super(l: &Operator) -> SuperOperator {
    SuperOperator {
        matrix: dissipator_matrix(l.matrix()),
        space: l.space().clone(),
    }
}

pub(crate) fn dissipator_matrix(l: &CMatrix) -> CMatrix {
    let d = l.nrows();
    let ident = CMatrix::identity(d, d);
    let ldl = l.adjoint() * l;
    l.conjugate().kronecker(l)
        - ident.kronecker(&ldl).scale(0.5)
        - ldl.transpose().kronecker(&ident).scale(0.5)
}

/// A Lindblad generator `−i[H, ·] + Σ_k D[L_k]` held as matrices, usable
/// either through its action or as a dense superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct Lindbladian {
    pub hamiltonian: CMatrix,
    pub jumps: Vec<CMatrix>,
}

impl Lindbladian {
    pub fn new(hamiltonian: CMatrix, jumps: Vec<CMatrix>) -> Self {
        Self { hamiltonian, jumps }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * Complex64::new(0.0, -1.0);
        for l in &self.jumps {
            let ldl = l.adjoint() * l;
            out += l * rho * l.adjoint() - (&ldl * rho + rho * &ldl).scale(0.5);
        }
        out
    }

    /// Upper bound on the Frobenius-induced norm of the action.
    pub fn norm_bound(&self) -> f64 {
        2.0 * self.hamiltonian.norm() + 2.0 * self.jumps.iter().map(|l| l.norm_squared()).sum::<f64>()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = commutator_matrix(&self.hamiltonian);
        for l in &self.jumps {
            m += dissipator_matrix(l);
        }
        m
    }
}

/// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ S(|i⟩⟨j|)`.
pub fn choi_matrix(s: &SuperOperator) -> CMatrix {
    let d = s.dim();
    let m = s.matrix();
    let mut choi = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let col = i + d * j;
            for k in 0..d {
                for l in 0..d {
                    choi[(i * d + k, j * d + l)] = m[(k + d * l, col)];
                }
            }
        }
    }
    choi
}

/// Outcome of a complete-positivity and trace-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub choi_min_eigenvalue: f64,
    pub choi_hermiticity: f64,
    pub trace_deviation: f64,
}

impl ChannelReport {
    pub fn is_cptp(&self, tol: &Tolerances) -> bool {
        self.choi_hermiticity <= tol.herm.max(tol.psd)
            && self.choi_min_eigenvalue >= -tol.psd
            && self.trace_deviation <= tol.trace
    }
}

pub fn channel_report(s: &SuperOperator) -> ChannelReport {
    let d = s.dim();
    let choi = choi_matrix(s);
    let choi_hermiticity = hermiticity_deviation(&choi);
    let choi_min_eigenvalue = hermitian_part(&choi)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    // trace preservation: tr_out(Choi) = I
    let mut trace_deviation = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                acc += choi[(i * d + k, j * d + k)];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            trace_deviation = trace_deviation.max((acc - target).norm());
        }
    }
    ChannelReport {
        choi_min_eigenvalue,
        choi_hermiticity,
        trace_deviation,
    }
}

pub fn is_cptp(s: &SuperOperator) -> bool {
    channel_report(s).is_cptp(&Tolerances::default())
}

pub fn is_cptp_with(s: &SuperOperator, tol: &Tolerances) -> bool {
    channel_report(s).is_cptp(tol)
}

/// Hermitian matrix units, each with unit trace norm: `|j⟩⟨j|`,
/// `(|j⟩⟨k| + |k⟩⟨j|)/2` and `i(|j⟩⟨k| − |k⟩⟨j|)/2` for `j < k`.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        out.push(m);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(0.5, 0.0);
            sym[(k, j)] = Complex64::new(0.5, 0.0);
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = Complex64::new(0.0, 0.5);
            anti[(k, j)] = Complex64::new(0.0, -0.5);
            out.push(anti);
        }
    }
    out
}
