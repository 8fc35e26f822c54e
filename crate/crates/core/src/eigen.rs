//! Dense eigen-solves for the small matrices `M_X`.
//!
//! Eigenvalues come from a real Schur reduction; eigenvectors of real
//! eigenvalues from inverse iteration on a slightly shifted matrix.

use std::cmp::Ordering;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub const SCHUR_EPS: f64 = 1e-12;

fn max_iterations(n: usize) -> usize {
    100 * n.max(1)
}

/// Orders eigenvalues by descending modulus, then descending real part, then
/// descending imaginary part.
pub fn eigen_order(a: &Complex<f64>, b: &Complex<f64>) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// All eigenvalues of `m`, sorted by [`eigen_order`].
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::EigenNonConvergence { iterations: 0 });
    }
    let iterations = max_iterations(n);
    let schur = m
        .clone()
        .try_schur(SCHUR_EPS, iterations)
        .ok_or(Error::EigenNonConvergence { iterations })?;
    let mut values: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(eigen_order);
    Ok(values)
}

/// A right eigenvector of `m` for the real eigenvalue `lambda`, with unit
/// 2-norm and unspecified sign.
pub fn right_eigenvector(m: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n = m.nrows();
    let scale = m.amax().max(lambda.abs()).max(1.0);
    let shift = lambda + 1e-10 * scale;
    let shifted = m - DMatrix::identity(n, n) * shift;
    let lu = shifted.clone().lu();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // A generic start vector avoids accidental orthogonality with the target.
    for (i, vi) in v.iter_mut().enumerate() {
        *vi += 1e-3 * (i as f64 + 1.0);
    }
    v.normalize_mut();
    let mut solved = false;
    for _ in 0..4 {
        match lu.solve(&v) {
            Some(w) if w.iter().all(|x| x.is_finite()) && w.norm() > 0.0 => {
                v = w.normalize();
                solved = true;
            }
            _ => break,
        }
    }
    if !solved {
        v = null_vector(&shifted);
    }
    Ok(v)
}

/// A left eigenvector (`w^T m = lambda w^T`), unit 2-norm.
pub fn left_eigenvector(m: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    right_eigenvector(&m.transpose(), lambda)
}

fn null_vector(a: &DMatrix<f64>) -> DVector<f64> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty matrix");
    v_t.row(idx).transpose()
}

/// Spectral radius from a sorted eigenvalue list.
pub fn spectral_radius(values: &[Complex<f64>]) -> f64 {
    values.first().map_or(0.0, |v| v.norm())
}
