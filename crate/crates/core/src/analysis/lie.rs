use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{commutator, hermiticity_deviation, CMatrix, Operator};

/// Dimension of the real Lie algebra generated by `{iH_k}` under commutation.
///
/// Maintains an orthonormal basis (Hilbert–Schmidt) of the span and adds the
/// component of every new commutator orthogonal to it, until closure.
pub fn lie_algebra_dimension(generators: &[Operator], tol: f64) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Ok(0);
    };
    let d = first.dim();
    let mut basis: Vec<CMatrix> = Vec::new();
    let mut pending: Vec<CMatrix> = Vec::new();
    for h in generators {
        if h.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: h.dim(),
            });
        }
        let dev = hermiticity_deviation(h.matrix());
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev });
        }
        pending.push(h.matrix() * Complex64::new(0.0, 1.0));
    }
    let limit = d * d;
    // each accepted element is commuted with every earlier one
    while let Some(x) = pending.pop() {
        let Some(unit) = orthogonal_component(&basis, &x, tol) else {
            continue;
        };
        for b in &basis {
            pending.push(commutator(b, &unit));
        }
        basis.push(unit);
        if basis.len() == limit {
            break;
        }
    }
    Ok(basis.len())
}

/// Real Hilbert–Schmidt inner product `Re tr(A†B)`.
fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn orthogonal_component(basis: &[CMatrix], x: &CMatrix, tol: f64) -> Option<CMatrix> {
    let mut r = x.clone();
    // two passes of Gram–Schmidt for stability
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &r);
            r -= b.scale(c);
        }
    }
    let norm = r.norm();
    (norm > tol).then(|| r.unscale(norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sigma_x, sigma_y, sigma_z};

    fn op(m: CMatrix) -> Operator {
        Operator::from_matrix(m).unwrap()
    }

    #[test]
    fn pauli_closures() {
        assert_eq!(lie_algebra_dimension(&[op(sigma_z())], 1e-10).unwrap(), 1);
        assert_eq!(lie_algebra_dimension(&[op(sigma_z()), op(sigma_x())], 1e-10).unwrap(), 3);
        let mixed = op(sigma_z() + sigma_x());
        assert_eq!(lie_algebra_dimension(&[op(sigma_z()), mixed], 1e-10).unwrap(), 3);
        let all = [op(sigma_x()), op(sigma_y()), op(sigma_z())];
        assert_eq!(lie_algebra_dimension(&all, 1e-10).unwrap(), 3);
    }

    #[test]
    fn identity_adds_a_central_direction() {
        let id = op(CMatrix::identity(2, 2));
        let dim = lie_algebra_dimension(&[op(sigma_z()), op(sigma_x()), id], 1e-10).unwrap();
        assert_eq!(dim, 4);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = crate::models::sigma_minus();
        let bad = Operator::new(m, crate::qcore::HilbertSpace::simple(2)).unwrap();
        assert!(matches!(
            lie_algebra_dimension(&[bad], 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }
}
