//! Small dense linear-algebra helpers used throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, VardiffError};

pub type DMat = DMatrix<f64>;
pub type DVec = DVector<f64>;

/// Largest absolute entry (max norm).
pub fn max_abs(m: &DMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()))
}

/// Number of exactly nonzero entries.
pub fn count_nonzero(m: &DMat) -> usize {
    m.iter().filter(|&&v| v != 0.0).count()
}

/// Entry-wise sum of absolute values.
pub fn entry_l1(m: &DMat) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

/// Frobenius inner product tr(A B^T).
pub fn frob_inner(a: &DMat, b: &DMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Checks max-norm symmetry deviation against `tol`.
pub fn is_symmetric(m: &DMat, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    for j in 0..m.ncols() {
        for i in 0..j {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// (M + M^T) / 2.
pub fn symmetrize(m: &DMat) -> DMat {
    (m + m.transpose()).scale(0.5)
}

/// Spectral radius via complex eigenvalues of a general square matrix.
pub fn spectral_radius(m: &DMat) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMat) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMat) -> DVec {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    DVec::from_vec(ev)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_lambda_min(m: &DMat) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_lambda_max(m: &DMat) -> f64 {
    let ev = sym_eigenvalues(m);
    ev[ev.len() - 1]
}

/// True when all eigenvalues of the symmetric matrix exceed `tol`.
pub fn is_positive_definite(m: &DMat, tol: f64) -> bool {
    sym_lambda_min(m) > tol
}

/// Symmetric square root of a positive semi-definite matrix.
///
/// Eigenvalues below zero are clamped; callers pass covariance matrices that
/// may be singular (e.g. companion noise blocks).
pub fn sym_sqrt(m: &DMat) -> DMat {
    let eig = m.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| if v > 0.0 { v.sqrt() } else { 0.0 });
    &eig.eigenvectors * DMat::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

/// Solves the discrete Lyapunov equation `X = A^T X A + Q` by doubling.
///
/// Requires spectral radius of `A` strictly below 1. `Q` may be positive
/// semi-definite.
pub fn solve_discrete_lyapunov(a: &DMat, q: &DMat) -> Result<DMat> {
    let rho = spectral_radius(a);
    if rho >= 1.0 {
        return Err(VardiffError::InvalidModel(format!(
            "lyapunov solve needs spectral radius < 1, got {rho}"
        )));
    }
    let mut s = q.clone();
    let mut m = a.clone();
    let scale = max_abs(q).max(1.0);
    for _ in 0..128 {
        let update = m.transpose() * &s * &m;
        let delta = max_abs(&update);
        s += update;
        m = &m * &m;
        if delta <= 1e-15 * scale.max(max_abs(&s)) {
            return Ok(symmetrize(&s));
        }
    }
    Err(VardiffError::SolverDiverged(
        "lyapunov doubling did not converge in 128 steps".into(),
    ))
}

/// Reciprocal condition number from singular values.
pub fn reciprocal_condition(m: &DMat) -> f64 {
    let sv = m.clone().singular_values();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for &s in sv.iter() {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Scalar soft-thresholding operator.
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// splitmix64 step, used to derive independent sub-seeds from a root seed.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-task seed derived from a root seed and a stream index.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream.wrapping_add(0xA5A5_5A5A_0F0F_F0F0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(rng: &mut StdRng, d: usize) -> DMat {
        DMat::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0))
    }

    /// Independent route: vectorized Kronecker solve of X = A^T X A + Q.
    fn lyapunov_kron_oracle(a: &DMat, q: &DMat) -> DMat {
        let d = a.nrows();
        let at = a.transpose();
        // vec(A^T X A) = (A^T (x) A^T) vec(X) with column-major vec.
        let mut k = DMat::zeros(d * d, d * d);
        for i1 in 0..d {
            for j1 in 0..d {
                for i2 in 0..d {
                    for j2 in 0..d {
                        k[(i1 * d + i2, j1 * d + j2)] = at[(i1, j1)] * at[(i2, j2)];
                    }
                }
            }
        }
        let lhs = DMat::identity(d * d, d * d) - k;
        let qvec = DVec::from_iterator(d * d, q.iter().copied());
        let xvec = lhs.lu().solve(&qvec).expect("lyapunov oracle solve");
        DMat::from_iterator(d, d, xvec.iter().copied())
    }

    #[test]
    fn lyapunov_doubling_matches_kron_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for d in [2, 3, 5] {
            let raw = random_matrix(&mut rng, d);
            let a = raw.scale(0.6 / spectral_radius(&raw).max(1e-12));
            let w = random_matrix(&mut rng, d);
            let q = symmetrize(&(&w * w.transpose())).scale(1.0 / d as f64);
            let x = solve_discrete_lyapunov(&a, &q).unwrap();
            let oracle = lyapunov_kron_oracle(&a, &q);
            assert_relative_eq!(x, oracle, epsilon = 1e-10, max_relative = 1e-10);
            // residual check
            let resid = &x - a.transpose() * &x * &a - &q;
            assert!(max_abs(&resid) < 1e-10);
        }
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = DMat::identity(2, 2);
        let q = DMat::identity(2, 2);
        assert!(solve_discrete_lyapunov(&a, &q).is_err());
    }

    #[test]
    fn sym_sqrt_squares_back() {
        let mut rng = StdRng::seed_from_u64(3);
        let w = random_matrix(&mut rng, 4);
        let psd = symmetrize(&(&w * w.transpose()));
        let s = sym_sqrt(&psd);
        assert_relative_eq!(&s * &s, psd, epsilon = 1e-10);
        // zero matrix stays zero
        let z = DMat::zeros(3, 3);
        assert_eq!(sym_sqrt(&z), z);
    }

    #[test]
    fn spectral_radius_known_case() {
        // companion of a scalar AR(2): eigenvalues solve z^2 = 0.5 z + 0.2
        let m = DMat::from_row_slice(2, 2, &[0.5, 1.0, 0.2, 0.0]);
        let expect = (0.5 + (0.25_f64 + 0.8).sqrt()) / 2.0;
        assert_relative_eq!(spectral_radius(&m), expect, epsilon = 1e-12);
    }

    #[test]
    fn soft_threshold_basics() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
    }

    #[test]
    fn derive_seed_is_stable_and_spread() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
    }
}
