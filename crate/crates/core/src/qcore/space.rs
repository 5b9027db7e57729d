use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tensor-product structure of a finite-dimensional Hilbert space.
///
/// Subsystems are ordered; basis index `(i_0, i_1, ...)` maps to the flat
/// index `((i_0 * d_1) + i_1) * d_2 + ...`, i.e. the first subsystem is the
/// most significant digit. This matches `kron(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("a Hilbert space needs at least one subsystem".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "subsystem dimension must be positive, got {bad}"
            )));
        }
        Ok(Self { dims })
    }

    /// Single-subsystem space of dimension `dim`.
    pub fn simple(dim: usize) -> Self {
        assert!(dim > 0, "Hilbert space dimension must be positive");
        Self { dims: alloc::vec![dim] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// The space of subsystem `index` on its own.
    pub fn subsystem(&self, index: usize) -> Result<Self> {
        self.dims
            .get(index)
            .map(|&d| Self::simple(d))
            .ok_or(Error::InvalidSubsystem {
                index,
                count: self.dims.len(),
            })
    }

    /// Concatenated space `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }
}
