use crate::error::{Error, Result};
use crate::operator::DenseMatrix;

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
///
/// Returns the eigenvalues (unsorted) and a matrix whose columns are the
/// corresponding orthonormal eigenvectors. Rotations are skipped for exactly
/// zero off-diagonal entries, so block-diagonal structure is preserved
/// exactly.
pub fn jacobi_eigen(mut a: DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = a.dim();
    let mut v = DenseMatrix::identity(n);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a.get(p, p), a.get(q, q));
                // negligible relative to both diagonal entries: drop it
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() * aqq.abs()).sqrt() {
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    if r != p && r != q {
                        let g = a.get(r, p);
                        let h = a.get(r, q);
                        let rp = g - s * (h + g * tau);
                        let rq = h + s * (g - h * tau);
                        a.set(r, p, rp);
                        a.set(p, r, rp);
                        a.set(r, q, rq);
                        a.set(q, r, rq);
                    }
                }
                for r in 0..n {
                    let g = v.get(r, p);
                    let h = v.get(r, q);
                    v.set(r, p, g - s * (h + g * tau));
                    v.set(r, q, h + s * (g - h * tau));
                }
            }
        }
        if !rotated {
            let values = (0..n).map(|i| a.get(i, i)).collect();
            return Ok((values, v));
        }
    }
    Err(Error::EigenNotConverged { sweeps: MAX_SWEEPS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &DenseMatrix, values: &[f64], v: &DenseMatrix) -> f64 {
        let n = a.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a.get(i, j) * v.get(j, k)).sum();
                worst = worst.max((av - values[k] * v.get(i, k)).abs());
            }
        }
        worst
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let (mut values, v) = jacobi_eigen(a.clone()).unwrap();
        assert!(residual(&a, &values, &v) < 1e-15);
        values.sort_by(f64::total_cmp);
        assert!(values[0].abs() < 1e-15);
        assert!((values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn preserves_block_structure() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, -1.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, -2.0],
            vec![0.0, 0.0, -2.0, 2.0],
        ]);
        let (_, v) = jacobi_eigen(a).unwrap();
        for k in 0..4 {
            let top = v.get(0, k) != 0.0 || v.get(1, k) != 0.0;
            let bottom = v.get(2, k) != 0.0 || v.get(3, k) != 0.0;
            assert!(!(top && bottom), "eigenvector {k} mixes components");
        }
    }

    #[test]
    fn dense_random_matrix() {
        let n = 12;
        let mut a = DenseMatrix::zeros(n);
        let mut state = 0x2545f4914f6cdd1du64;
        for i in 0..n {
            for j in 0..=i {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let x = (state % 2000) as f64 / 1000.0 - 1.0;
                a.set(i, j, x);
                a.set(j, i, x);
            }
        }
        let (values, v) = jacobi_eigen(a.clone()).unwrap();
        assert!(residual(&a, &values, &v) < 1e-13);
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = (0..n).map(|r| v.get(r, p) * v.get(r, q)).sum();
                let expected = if p == q { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-13);
            }
        }
    }
}
