//! Finite-dimensional quantum linear algebra.

pub mod expm;
pub mod linalg;
pub mod operator;
pub mod random;
pub mod space;
pub mod superop;

pub use expm::{exp_action, mat_exp, norm1};
pub use linalg::matmul;
pub use num_complex::Complex64;
pub use operator::{
    commutator, fidelity_pure, hermitian_part, hermiticity_deviation, kron, min_eigenvalue,
    partial_trace, CMatrix, CVector, DensityMatrix, Operator, Tolerances,
};
pub use space::HilbertSpace;
pub use superop::{
    channel_report, choi_matrix, dissipator_super, ham_super, ham_super_with, hermitian_basis,
    is_cptp, is_cptp_with, trace_distance, trace_norm, unvectorize, vectorize, ChannelReport,
    Lindbladian, SuperOperator,
};

#[cfg(test)]
pub(crate) mod test_util {
    pub use super::random::*;
    use num_complex::Complex64;

    pub fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }
}
