//! Dense kernels that nalgebra does not specialize for complex scalars.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::CMatrix;

fn split(m: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// `a · b` via four real products, which use the optimized real kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    // small products are faster on the generic path
    if a.nrows() * a.ncols() * b.ncols() < 4096 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, Complex64::new)
}

/// Index sets of the connected components of the combined sparsity pattern
/// of `mats`: every matrix is block diagonal after permuting to this order.
pub fn block_components(mats: &[&CMatrix]) -> Vec<Vec<usize>> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in mats {
        for j in 0..n {
            for i in 0..n {
                if m[(i, j)] != Complex64::new(0.0, 0.0) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = alloc::vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

/// Submatrix on rows and columns `idx`.
pub fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Block-diagonal matrix of side `n` with `blocks[k]` placed on `idx[k]`.
pub fn assemble_blocks(n: usize, idx: &[Vec<usize>], blocks: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for (ix, b) in idx.iter().zip(blocks) {
        for (j, &cj) in ix.iter().enumerate() {
            for (i, &ri) in ix.iter().enumerate() {
                out[(ri, cj)] = b[(i, j)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::test_util::random_matrix;
    use rand::SeedableRng;

    #[test]
    fn matmul_matches_generic_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [3, 20, 33] {
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            assert!((matmul(&a, &b) - &a * &b).norm() < 1e-12 * (n as f64));
        }
    }

    #[test]
    fn components_of_parity_coupling() {
        // a chain 0-1, 2-3 and an isolated 4
        let mut m = CMatrix::zeros(5, 5);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(3, 2)] = Complex64::new(0.0, 1.0);
        let blocks = block_components(&[&m]);
        assert_eq!(blocks, alloc::vec![alloc::vec![0, 1], alloc::vec![2, 3], alloc::vec![4]]);
        let parts: Vec<CMatrix> = blocks.iter().map(|b| submatrix(&m, b)).collect();
        assert_eq!(assemble_blocks(5, &blocks, &parts), m);
    }
}
