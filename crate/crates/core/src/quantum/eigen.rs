//! Eigenvalues of small Hermitian matrices.
//!
//! A Hermitian `H = A + iB` is embedded into the real symmetric matrix
//! `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. Cyclic Jacobi rotations then diagonalise the embedding.

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The caller is responsible for Hermiticity; only the lower triangle's
/// relation to the upper one is assumed, not checked.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    assert!(h.is_square(), "eigenvalues need a square matrix");
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0_f64; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h.get(r, c);
            a[r * m + c] = z.re;
            a[(r + n) * m + (c + n)] = z.re;
            a[r * m + (c + n)] = -z.im;
            a[(r + n) * m + c] = z.im;
        }
    }

    jacobi_symmetric(&mut a, m);

    let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    // each eigenvalue appears twice; take the mean of each pair
    diag.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(h)[0]
}

fn off_diagonal_norm(a: &[f64], m: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..m {
        for c in 0..m {
            if r != c {
                s += a[r * m + c] * a[r * m + c];
            }
        }
    }
    s.sqrt()
}

fn jacobi_symmetric(a: &mut [f64], m: usize) {
    let scale = a
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, m) <= 1e-15 * scale {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}
