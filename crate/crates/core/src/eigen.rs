//! Dense real eigendecomposition for matrices with (numerically) real spectra.
//!
//! The spectrum is always computed from the real Schur form so the size of
//! any imaginary parts can be reported. Eigenvectors come from the symmetric
//! solver when the matrix is exactly symmetric, otherwise from back
//! substitution in the quasi-triangular Schur factor. Clusters of coincident
//! eigenvalues in the nonsymmetric path get an orthonormal null-space basis of
//! `A - lambda I` from the SVD.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, max, Real};

const MAX_ITER: usize = 10_000;

/// Eigenvalues sorted ascending with unit eigenvectors in matching columns.
#[derive(Debug, Clone)]
pub struct RealEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: DMatrix<T>,
    /// Spectrum as returned by the Schur form, unsorted.
    pub complex: Vec<Complex<T>>,
    /// Largest `|Im lambda|` of the Schur spectrum.
    pub max_imag: T,
    /// Largest `|lambda|` of the Schur spectrum.
    pub max_abs: T,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    Single(usize),
    Block,
}

/// Decomposes `m`. `cluster_tol` is the absolute spacing below which
/// eigenvalues are treated as one cluster in the nonsymmetric path.
pub fn real_eigen<T: Real>(m: &DMatrix<T>, cluster_tol: T) -> Result<RealEigen<T>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Domain("eigendecomposition needs a nonempty square matrix".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let schur = m
        .clone()
        .try_schur(T::eps(), MAX_ITER)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let spectrum = schur.complex_eigenvalues();
    let max_imag = spectrum.iter().fold(T::zero(), |a, z| max(a, z.im.abs()));
    let max_abs = spectrum.iter().fold(T::zero(), |a, z| max(a, cabs(*z)));
    let complex: Vec<Complex<T>> = spectrum.iter().cloned().collect();

    let symmetric = *m == m.transpose();
    if symmetric {
        let se = SymmetricEigen::try_new(m.clone(), T::eps(), MAX_ITER)
            .ok_or_else(|| Error::Numerical("symmetric eigen iteration did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
        return Ok(RealEigen { values, vectors, complex, max_imag, max_abs, symmetric });
    }

    let (q, t) = schur.unpack();
    let mut entries: Vec<(T, Origin)> = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != T::zero() {
            let re = (t[(i, i)] + t[(i + 1, i + 1)]) * T::lit(0.5);
            entries.push((re, Origin::Block));
            entries.push((re, Origin::Block));
            i += 2;
        } else {
            entries.push((t[(i, i)], Origin::Single(i)));
            i += 1;
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let smin = max(T::eps() * t.amax(), T::tiny());
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && entries[end].0 - entries[end - 1].0 <= cluster_tol {
            end += 1;
        }
        let cluster = &entries[start..end];
        if let [(lambda, Origin::Single(pos))] = cluster {
            let x = triangular_eigenvector(&t, *pos, *lambda, smin);
            let mut v = &q * x;
            v.normalize_mut();
            vectors.set_column(start, &v);
            values.push(*lambda);
        } else {
            let mean = cluster.iter().fold(T::zero(), |a, e| a + e.0)
                / T::from_usize_lossy(cluster.len());
            let basis = null_space(m, mean, cluster.len())?;
            for (k, v) in basis.into_iter().enumerate() {
                vectors.set_column(start + k, &v);
                values.push(mean);
            }
        }
        start = end;
    }
    Ok(RealEigen { values, vectors, complex, max_imag, max_abs, symmetric })
}

/// Eigenvector of the quasi-upper-triangular `t` for the real eigenvalue at
/// diagonal position `pos`.
fn triangular_eigenvector<T: Real>(t: &DMatrix<T>, pos: usize, lambda: T, smin: T) -> DVector<T> {
    let n = t.nrows();
    let mut x = DVector::zeros(n);
    x[pos] = T::one();
    let guard = |d: T| if d.abs() < smin { if d < T::zero() { -smin } else { smin } } else { d };
    let mut j = pos;
    while j > 0 {
        // a 2x2 block occupies rows j-2, j-1 when t[(j-1, j-2)] is nonzero
        if j >= 2 && t[(j - 1, j - 2)] != T::zero() {
            let (a, b) = (j - 2, j - 1);
            let mut r0 = T::zero();
            let mut r1 = T::zero();
            for k in j..=pos {
                r0 -= t[(a, k)] * x[k];
                r1 -= t[(b, k)] * x[k];
            }
            let m00 = t[(a, a)] - lambda;
            let m01 = t[(a, b)];
            let m10 = t[(b, a)];
            let m11 = t[(b, b)] - lambda;
            let det = guard(m00 * m11 - m01 * m10);
            x[a] = (r0 * m11 - m01 * r1) / det;
            x[b] = (m00 * r1 - m10 * r0) / det;
            j -= 2;
        } else {
            let row = j - 1;
            let mut r = T::zero();
            for k in j..=pos {
                r -= t[(row, k)] * x[k];
            }
            x[row] = r / guard(t[(row, row)] - lambda);
            j -= 1;
        }
    }
    x
}

/// Orthonormal basis of the `dim` right singular vectors of `m - lambda I`
/// with the smallest singular values.
fn null_space<T: Real>(m: &DMatrix<T>, lambda: T, dim: usize) -> Result<Vec<DVector<T>>> {
    let n = m.nrows();
    let shifted = m - DMatrix::identity(n, n) * lambda;
    let svd = shifted
        .try_svd(false, true, T::eps(), MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
    Ok(order[..dim]
        .iter()
        .map(|&i| v_t.row(i).transpose())
        .collect())
}
