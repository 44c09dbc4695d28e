use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Largest eigenvalue of a symmetric matrix by dense eigen-decomposition.
pub fn lambda_max(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest eigenvalue of a positive semidefinite matrix by power iteration,
/// an independent check on [`lambda_max`].
pub fn lambda_max_power(m: &DMatrix<f64>, iterations: usize) -> f64 {
    let n = m.nrows();
    // a fixed, non-symmetric start vector avoids orthogonality to the top
    // eigenvector for structured matrices
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.7548776662).fract());
    v /= v.norm();
    let mut value = 0.0;
    for _ in 0..iterations {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        value = v.dot(&w);
        v = w / norm;
    }
    value
}
