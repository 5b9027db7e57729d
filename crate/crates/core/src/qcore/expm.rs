//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (Higham 2005), plus a Taylor-based action `exp(tL)x` for linear maps that
//! are only available through their action.

use alloc::format;

use num_complex::Complex64;

use super::linalg::matmul;
use super::operator::CMatrix;
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Beyond this many squarings the result has overflowed for any sane input.
const MAX_SQUARINGS: i32 = 1000;

/// Maximum absolute column sum.
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled_identity(n: usize, s: f64) -> CMatrix {
    CMatrix::identity(n, n).scale(s)
}

/// `e^m` for a general complex square matrix.
pub fn mat_exp(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("matrix exponential needs a square matrix".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = norm1(m);
    if !norm.is_finite() || m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalRange("input has non-finite entries".into()));
    }
    if norm == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }

    let a2 = matmul(m, m);
    let result = if norm <= THETA_3 {
        pade_low(m, &a2, &B3)?
    } else if norm <= THETA_5 {
        pade_low(m, &a2, &B5)?
    } else if norm <= THETA_7 {
        pade_low(m, &a2, &B7)?
    } else if norm <= THETA_9 {
        pade_low(m, &a2, &B9)?
    } else {
        let s = libm::ceil(libm::log2(norm / THETA_13)).max(0.0) as i32;
        if s > MAX_SQUARINGS {
            return Err(Error::NumericalRange(format!(
                "norm {norm:e} needs {s} squarings"
            )));
        }
        let scale = libm::pow(2.0, -f64::from(s));
        let a = m.scale(scale);
        let a2 = a2.scale(scale * scale);
        let mut r = pade13(&a, &a2)?;
        for _ in 0..s {
            r = matmul(&r, &r);
        }
        r
    };
    if result.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalRange(format!(
            "exponential overflowed (input 1-norm {norm:e})"
        )));
    }
    Ok(result)
}

/// `e^{z m}` for a complex scalar `z`.
pub fn mat_exp_scaled(m: &CMatrix, z: Complex64) -> Result<CMatrix> {
    mat_exp(&(m * z))
}

fn pade_low(a: &CMatrix, a2: &CMatrix, b: &[f64]) -> Result<CMatrix> {
    let n = a.nrows();
    // U = A * sum_k b[2k+1] A^{2k}, V = sum_k b[2k] A^{2k}
    let mut power = CMatrix::identity(n, n);
    let mut u = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    let mut k = 0;
    while 2 * k < b.len() {
        v += power.scale(b[2 * k]);
        if 2 * k + 1 < b.len() {
            u += power.scale(b[2 * k + 1]);
        }
        k += 1;
        if 2 * k < b.len() {
            power = matmul(&power, a2);
        }
    }
    let u = matmul(a, &u);
    solve_pade(&u, &v)
}

fn pade13(a: &CMatrix, a2: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let b = &B13;
    let a4 = matmul(a2, a2);
    let a6 = matmul(&a4, a2);
    let ident = CMatrix::identity(n, n);
    let inner_u = matmul(&a6, &(a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9])))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + scaled_identity(n, b[1]);
    let u = matmul(a, &inner_u);
    let v = matmul(&a6, &(a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8])))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + ident.scale(b[0]);
    solve_pade(&u, &v)
}

fn solve_pade(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericalRange("singular Padé denominator".into()))
}

/// `e^{t L} x` where `L` is given by its action `apply` and `norm_bound`
/// bounds its induced Frobenius norm.
///
/// Splits `t` into chunks with `|chunk| * norm_bound <= 1/2` and sums the
/// Taylor series on each chunk until terms fall below double precision.
pub fn exp_action<F>(apply: F, norm_bound: f64, t: f64, x: &CMatrix) -> Result<CMatrix>
where
    F: Fn(&CMatrix) -> CMatrix,
{
    if !norm_bound.is_finite() || !t.is_finite() {
        return Err(Error::NumericalRange("non-finite generator norm or time".into()));
    }
    let reach = t.abs() * norm_bound;
    let chunks = libm::ceil(reach / 0.5).max(1.0) as usize;
    let h = t / chunks as f64;
    let mut y = x.clone();
    for _ in 0..chunks {
        let mut term = y.clone();
        let mut acc = y.clone();
        let mut converged = false;
        for k in 1..=40 {
            term = apply(&term).scale(h / k as f64);
            acc += &term;
            if term.norm() <= 1e-17 * acc.norm().max(1e-300) {
                converged = true;
                break;
            }
        }
        if !converged && term.norm() > 1e-14 * acc.norm() {
            return Err(Error::NumericalRange("Taylor series did not converge".into()));
        }
        y = acc;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::test_util::{c, random_hermitian, random_matrix};
    use rand::SeedableRng;

    fn spectral_exp(h: &CMatrix, z: Complex64) -> CMatrix {
        let eig = h.clone().symmetric_eigen();
        let n = h.nrows();
        let mut d = CMatrix::zeros(n, n);
        for k in 0..n {
            d[(k, k)] = (z * eig.eigenvalues[k]).exp();
        }
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    #[test]
    fn zero_gives_identity() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(mat_exp(&z).unwrap(), CMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_rotation() {
        let theta = 0.7;
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.0, -theta / 2.0);
        m[(1, 1)] = c(0.0, theta / 2.0);
        let e = mat_exp(&m).unwrap();
        assert!((e[(0, 0)] - c(0.0, -theta / 2.0).exp()).norm() < 1e-15);
        assert!((e[(1, 1)] - c(0.0, theta / 2.0).exp()).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn matches_spectral_oracle_across_norms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &scale in &[1e-3, 0.1, 0.5, 1.5, 4.0, 20.0, 50.0] {
            let h = random_hermitian(&mut rng, 8);
            let h = h.scale(scale / norm1(&h));
            // real and imaginary exponent directions
            for z in [c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)] {
                let got = mat_exp(&(&h * z)).unwrap();
                let want = spectral_exp(&h, z);
                let rel = (&got - &want).norm() / want.norm();
                assert!(rel < 1e-12, "scale {scale} z {z}: rel err {rel:e}");
            }
        }
    }

    #[test]
    fn non_diagonalizable_jordan_block() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(2.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        m[(0, 1)] = c(1.0, 0.0);
        let e = mat_exp(&m).unwrap();
        let e2 = libm::exp(2.0);
        assert!((e[(0, 0)].re - e2).abs() < 1e-12 * e2);
        assert!((e[(0, 1)].re - e2).abs() < 1e-12 * e2);
        assert!(e[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn inverse_property() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 5);
            let m = m.scale(10.0 / m.norm());
            let prod = mat_exp(&m).unwrap() * mat_exp(&(-&m)).unwrap();
            assert!((prod - CMatrix::identity(5, 5)).norm() < 1e-10);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1e6, 0.0);
        assert!(matches!(mat_exp(&m), Err(Error::NumericalRange(_))));
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(mat_exp(&m), Err(Error::NumericalRange(_))));
    }

    #[test]
    fn taylor_action_matches_dense_exponential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let a = random_matrix(&mut rng, 4);
        let x = random_matrix(&mut rng, 4);
        let t = 1.3;
        let got = exp_action(|v| &a * v, a.norm(), t, &x).unwrap();
        let want = mat_exp(&a.scale(t)).unwrap() * &x;
        assert!((got - want).norm() < 1e-12);
    }
}
