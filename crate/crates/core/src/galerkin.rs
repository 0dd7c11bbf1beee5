//! Truncated Galerkin eigenproblem in vectorized (Kronecker) form.
//!
//! A mode shape is expanded as `W(x) = sum_kj C[k, j] phi_k(x1 / l1) psi_j(x2 / l2)`
//! where `phi` is the x1 basis and `psi` the x2 basis. The coefficient matrix
//! `C` is flattened column-major (`vec`), so `vec(A X B) = (B^T kron A) vec(X)`.

use nalgebra::{DMatrix, DVector};

use crate::beam_basis::{coupling_matrices, BeamBasis, CouplingMatrices};
use crate::eigen::real_eigen;
use crate::error::{domain, Error, Result};
use crate::plate::{Geometry, MechanicalParams, Stiffness};
use crate::scalar::{max, Real};

/// Relative threshold below which an eigenvalue counts as a rigid-body mode.
pub const ZERO_EIGENVALUE_REL: f64 = 1e-6;
/// Relative spacing below which two elastic eigenvalues are reported as repeated.
pub const REPEATED_REL: f64 = 1e-8;
/// Allowed `|Im lambda|` relative to `max(1, |Re lambda|)`.
pub const REALNESS_REL: f64 = 1e-6;

/// How the `d12` cross term enters the vectorized matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CrossCoupling {
    /// `kappa2^T kron kappa1 + kappa2 kron kappa1^T`: the exact projection of the
    /// bilinear form onto the tensor basis. The matrix is symmetric.
    #[default]
    Galerkin,
    /// `kappa^T kron kappa + (kappa kron kappa^T) K`, with `K` the commutation
    /// matrix, i.e. the second cross term acts on `C^T`. This is the form the
    /// reference frequency table was computed with. It needs equal basis
    /// sizes and is not symmetric.
    Published,
}

/// Permutation `K` of size `n^2 x n^2` with `K vec(A) = vec(A^T)` for `n x n` `A`.
pub fn commutation_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let mut k = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            // vec(A)[i + j n] = A[i, j]; vec(A^T)[j + i n] = A[i, j]
            k[(j + i * n, i + j * n)] = T::one();
        }
    }
    k
}

/// Column-major vectorization.
pub fn vectorize<T: Real>(c: &DMatrix<T>) -> DVector<T> {
    DVector::from_column_slice(c.as_slice())
}

/// Inverse of [`vectorize`] for an `n x n` matrix.
pub fn unvectorize<T: Real>(v: &DVector<T>, n: usize) -> DMatrix<T> {
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// The assembled matrix together with everything used to build it.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T: Real> {
    pub m_matrix: DMatrix<T>,
    pub n_trunc: usize,
    pub basis1: BeamBasis<T>,
    pub basis2: BeamBasis<T>,
    pub coupling1: CouplingMatrices<T>,
    pub coupling2: CouplingMatrices<T>,
    pub stiffness: Stiffness<T>,
    pub geometry: Geometry<T>,
    pub cross: CrossCoupling,
}

/// Builds `M` for the given bases; coupling matrices use the default rule.
pub fn assemble<T: Real>(
    params: &MechanicalParams<T>,
    geometry: Geometry<T>,
    basis1: BeamBasis<T>,
    basis2: BeamBasis<T>,
    cross: CrossCoupling,
) -> Result<AssembledSystem<T>> {
    let c1 = coupling_matrices(&basis1)?;
    let c2 = coupling_matrices(&basis2)?;
    assemble_with_couplings(params.stiffness()?, geometry, basis1, basis2, c1, c2, cross)
}

/// Builds `M` from explicit coupling matrices:
///
/// `M = d11/l1^4 (I kron B1^4) + d22/l2^4 (B2^4 kron I)
///    + 4 d66/(l1 l2)^2 (theta2^T kron theta1) + d12/(l1 l2)^2 X`
///
/// with `X` the cross term selected by `cross`.
pub fn assemble_with_couplings<T: Real>(
    stiffness: Stiffness<T>,
    geometry: Geometry<T>,
    basis1: BeamBasis<T>,
    basis2: BeamBasis<T>,
    coupling1: CouplingMatrices<T>,
    coupling2: CouplingMatrices<T>,
    cross: CrossCoupling,
) -> Result<AssembledSystem<T>> {
    geometry.validate()?;
    let n = basis1.size();
    if basis2.size() != n {
        return domain(format!(
            "basis sizes differ: {} along x1, {} along x2",
            n,
            basis2.size()
        ));
    }
    for c in [&coupling1, &coupling2] {
        if c.kappa.shape() != (n, n) || c.theta.shape() != (n, n) {
            return domain("coupling matrices do not match the basis size");
        }
    }
    let Stiffness { d11, d22, d12, d66 } = stiffness;
    let (l1, l2) = (geometry.ell1, geometry.ell2);
    let l1sq = l1 * l1;
    let l2sq = l2 * l2;
    let mixed = l1sq * l2sq;

    let b1 = DMatrix::from_diagonal(&DVector::from_iterator(n, basis1.beta().iter().map(|b| b.powi(4))));
    let b2 = DMatrix::from_diagonal(&DVector::from_iterator(n, basis2.beta().iter().map(|b| b.powi(4))));
    let eye = DMatrix::<T>::identity(n, n);
    let (k1, k2) = (&coupling1.kappa, &coupling2.kappa);
    let (t1, t2) = (&coupling1.theta, &coupling2.theta);

    let mut m = eye.kronecker(&b1) * (d11 / (l1sq * l1sq));
    m += b2.kronecker(&eye) * (d22 / (l2sq * l2sq));
    m += t2.transpose().kronecker(t1) * (T::lit(4.0) * d66 / mixed);
    let second = k2.kronecker(&k1.transpose());
    let cross_term = match cross {
        CrossCoupling::Galerkin => k2.transpose().kronecker(k1) + second,
        CrossCoupling::Published => {
            k2.transpose().kronecker(k1) + second * commutation_matrix::<T>(n)
        }
    };
    m += cross_term * (d12 / mixed);

    Ok(AssembledSystem {
        m_matrix: m,
        n_trunc: n - 1,
        basis1,
        basis2,
        coupling1,
        coupling2,
        stiffness,
        geometry,
        cross,
    })
}

/// Which sorted modes to keep.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ModeSelection {
    #[default]
    All,
    /// All modes with eigenvalue above the rigid-body threshold.
    Elastic,
    /// Explicit indices into the ascending eigenvalue order.
    Indices(Vec<usize>),
}

/// One eigenpair of the Galerkin system.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode<T: Real> {
    /// Position in the ascending eigenvalue order of the full system.
    pub index: usize,
    /// Eigenvalue, rad^2/s^2.
    pub lambda: T,
    /// Coefficient matrix with unit Frobenius norm; row = x1 function, column = x2 function.
    pub coeffs: DMatrix<T>,
    /// `||W||^2` over the plate, m^2.
    pub norm_sq: T,
    pub frequency_hz: T,
    pub rigid: bool,
}

/// Sorted eigenpairs with the bases needed to evaluate mode shapes.
#[derive(Debug, Clone)]
pub struct ModalModel<T: Real> {
    pub modes: Vec<Mode<T>>,
    pub geometry: Geometry<T>,
    pub basis1: BeamBasis<T>,
    pub basis2: BeamBasis<T>,
    /// Threshold `1e-6 max lambda` used for the rigid-body flag.
    pub eps_zero: T,
    /// Largest imaginary part seen in the spectrum before it was discarded.
    pub max_imag: T,
    pub max_lambda: T,
    /// Pairs of modes whose eigenvalues coincide within the repeated-eigenvalue tolerance.
    pub repeated: Vec<(usize, usize)>,
}

/// Eigen-solves an assembled system and packages the modes selected by `selection`.
pub fn solve_modes<T: Real>(sys: &AssembledSystem<T>, selection: &ModeSelection) -> Result<ModalModel<T>> {
    let n = sys.n_trunc + 1;
    let scale = sys.m_matrix.amax();
    let eig = real_eigen(&sys.m_matrix, T::lit(1e-9) * max(scale, T::one()))?;

    let floor = T::lit(100.0) * T::eps() * eig.max_abs;
    for (k, z) in eig.complex.iter().enumerate() {
        let allowed = T::lit(REALNESS_REL) * max(T::one(), z.re.abs()) + floor;
        if z.im.abs() > allowed {
            return Err(Error::Numerical(format!(
                "eigenvalue {k} has imaginary part {:.3e} (real part {:.6e}); the spectrum should be real",
                z.im, z.re
            )));
        }
    }

    let max_lambda = eig.values.iter().fold(T::zero(), |a, v| max(a, *v));
    let eps_zero = T::lit(ZERO_EIGENVALUE_REL) * max_lambda;
    let area = sys.geometry.area();
    let mut all = Vec::with_capacity(n * n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda < -eps_zero - floor {
            return Err(Error::Numerical(format!(
                "negative eigenvalue {lambda:.6e}; the stiffness operator must be positive semidefinite"
            )));
        }
        let mut coeffs = unvectorize(&eig.vectors.column(k).into_owned(), n);
        let fro = coeffs.norm();
        coeffs /= fro;
        let pivot = coeffs.iter().fold(T::zero(), |a, v| if v.abs() > a.abs() { *v } else { a });
        if pivot < T::zero() {
            coeffs.neg_mut();
        }
        let rigid = lambda <= eps_zero;
        let frequency_hz = if lambda > T::zero() { lambda.sqrt() / T::two_pi() } else { T::zero() };
        all.push(Mode { index: k, lambda, coeffs, norm_sq: area, frequency_hz, rigid });
    }

    let mut repeated = Vec::new();
    for w in all.windows(2) {
        if w[0].rigid || w[1].rigid {
            continue;
        }
        if (w[1].lambda - w[0].lambda).abs() <= T::lit(REPEATED_REL) * max(w[0].lambda.abs(), w[1].lambda.abs()) {
            repeated.push((w[0].index, w[1].index));
        }
    }

    let modes = match selection {
        ModeSelection::All => all,
        ModeSelection::Elastic => all.into_iter().filter(|m| !m.rigid).collect(),
        ModeSelection::Indices(idx) => {
            let mut out = Vec::with_capacity(idx.len());
            for &i in idx {
                let m = all
                    .get(i)
                    .ok_or_else(|| Error::Domain(format!("mode index {i} out of range 0..{}", n * n)))?;
                out.push(m.clone());
            }
            out
        }
    };

    Ok(ModalModel {
        modes,
        geometry: sys.geometry,
        basis1: sys.basis1.clone(),
        basis2: sys.basis2.clone(),
        eps_zero,
        max_imag: eig.max_imag,
        max_lambda,
        repeated,
    })
}

impl<T: Real> ModalModel<T> {
    /// Mode with the given eigenvalue-order index.
    pub fn mode(&self, index: usize) -> Result<&Mode<T>> {
        self.modes
            .iter()
            .find(|m| m.index == index)
            .ok_or_else(|| Error::Domain(format!("mode {index} is not part of this model")))
    }

    pub fn elastic_modes(&self) -> impl Iterator<Item = &Mode<T>> {
        self.modes.iter().filter(|m| !m.rigid)
    }

    pub fn rigid_count(&self) -> usize {
        self.modes.iter().filter(|m| m.rigid).count()
    }

    /// `d^(a+b) W / dx1^a dx2^b` of mode `index` at the physical point `x`.
    pub fn eval_mode_shape(&self, index: usize, deriv: (usize, usize), x: [T; 2]) -> Result<T> {
        let mode = self.mode(index)?;
        self.eval_coeffs(&mode.coeffs, deriv, x)
    }

    /// Evaluates the expansion with coefficient matrix `coeffs` at `x`.
    pub fn eval_coeffs(&self, coeffs: &DMatrix<T>, deriv: (usize, usize), x: [T; 2]) -> Result<T> {
        if deriv.0 > 2 || deriv.1 > 2 {
            return domain(format!("derivative orders {deriv:?} exceed 2"));
        }
        if !self.geometry.contains(x) {
            return domain(format!("point ({}, {}) lies outside the plate", x[0], x[1]));
        }
        let (l1, l2) = (self.geometry.ell1, self.geometry.ell2);
        let u = crate::scalar::min(x[0] / l1, T::one());
        let v = crate::scalar::min(x[1] / l2, T::one());
        let n = self.basis1.size();
        let f1: Vec<T> = (0..n).map(|k| self.basis1.eval_unchecked(k, deriv.0, u)).collect();
        let f2: Vec<T> = (0..n).map(|j| self.basis2.eval_unchecked(j, deriv.1, v)).collect();
        let mut acc = T::zero();
        for j in 0..n {
            for k in 0..n {
                acc += coeffs[(k, j)] * f1[k] * f2[j];
            }
        }
        Ok(acc / (l1.powi(deriv.0 as i32) * l2.powi(deriv.1 as i32)))
    }

    /// `integral_D W_a W_b dx`, exact through basis orthonormality.
    pub fn l2_inner(&self, a: usize, b: usize) -> Result<T> {
        let (ma, mb) = (self.mode(a)?, self.mode(b)?);
        Ok(self.geometry.area() * ma.coeffs.dot(&mb.coeffs))
    }
}
