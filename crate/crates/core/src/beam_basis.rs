//! One-dimensional orthonormal beam bases on `[0, 1]` and their coupling matrices.
//!
//! Two families are provided:
//!
//! * [`BasisKind::FreeFree`]: eigenfunctions of the Euler–Bernoulli beam with
//!   free ends. Indices 0 and 1 are the rigid translation `1` and rotation
//!   `sqrt(3)(2x - 1)`; for `n >= 2` the function is the Krylov combination
//!   `psi_n = sin + sinh - s_n (cos + cosh)` evaluated at `beta_n x`, divided
//!   by its `L2(0, 1)` norm.
//! * [`BasisKind::SimplySupported`]: `sqrt(2) sin((n + 1) pi x)`. Index 0 is the
//!   first sine mode; there are no rigid-body functions.
//!
//! The hyperbolic part of `psi_n` is evaluated through the factored forms
//! `e^{-beta (1 - x)}` and `e^{-beta x}` so that no intermediate grows like
//! `e^beta`.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::quadrature::UnitRule;
use crate::scalar::Real;

/// Largest number of free-free functions accepted (truncation index `N = 25`).
pub const MAX_FREE_FREE_COUNT: usize = 26;

/// Boundary condition family of a one-dimensional basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    FreeFree,
    SimplySupported,
}

impl BasisKind {
    /// Number of rigid-body functions at the start of the basis.
    pub fn rigid_count(self) -> usize {
        match self {
            BasisKind::FreeFree => 2,
            BasisKind::SimplySupported => 0,
        }
    }
}

/// Stabilized free-free characteristic residual `cos(beta) - 1/cosh(beta)`.
///
/// Has the same positive roots as `cos(beta) cosh(beta) = 1` and stays bounded.
pub fn characteristic_residual<T: Real>(beta: T) -> T {
    beta.cos() - T::one() / beta.cosh()
}

fn characteristic_derivative<T: Real>(beta: T) -> T {
    -beta.sin() + beta.tanh() / beta.cosh()
}

/// Eigenvalue parameters `beta_n` for the first `count` functions of a basis.
///
/// Free-free roots are bracketed in `[g - pi/4, g + pi/4]` around the
/// asymptotic guess `g = pi (2n - 1) / 2` and refined by safeguarded Newton
/// iteration on [`characteristic_residual`].
pub fn solve_beta<T: Real>(kind: BasisKind, count: usize) -> Result<Vec<T>> {
    if count == 0 {
        return domain("basis must contain at least one function");
    }
    match kind {
        BasisKind::SimplySupported => Ok((0..count)
            .map(|n| T::from_usize_lossy(n + 1) * T::pi())
            .collect()),
        BasisKind::FreeFree => {
            if count > MAX_FREE_FREE_COUNT {
                return domain(format!(
                    "free-free basis limited to {MAX_FREE_FREE_COUNT} functions, got {count}"
                ));
            }
            let mut beta = vec![T::zero(); count];
            for (n, b) in beta.iter_mut().enumerate().skip(2) {
                let guess = T::pi() * T::from_usize_lossy(2 * n - 1) * T::lit(0.5);
                *b = refine_root(guess - T::frac_pi_4(), guess + T::frac_pi_4())?;
            }
            Ok(beta)
        }
    }
}

/// Root of the characteristic residual inside a sign-changing bracket.
pub fn refine_root<T: Real>(lo: T, hi: T) -> Result<T> {
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = characteristic_residual(lo);
    let f_hi = characteristic_residual(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return Err(Error::Numerical(format!(
            "characteristic residual does not change sign on [{lo}, {hi}]"
        )));
    }
    let mut x = (lo + hi) * T::lit(0.5);
    let tol = T::lit(4.0) * T::eps();
    for _ in 0..200 {
        let f = characteristic_residual(x);
        if f == T::zero() {
            return Ok(x);
        }
        if (f > T::zero()) == (f_lo > T::zero()) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        let d = characteristic_derivative(x);
        let newton = x - f / d;
        let next = if d != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * T::lit(0.5)
        };
        if (next - x).abs() <= tol * x.abs() || hi - lo <= tol * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Numerical(format!(
        "root refinement did not converge in [{lo}, {hi}]"
    )))
}

/// Orthonormal one-dimensional basis of `size` functions on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamBasis<T> {
    kind: BasisKind,
    beta: Vec<T>,
    /// `L2(0, 1)` norm of the unnormalized function (1 for closed-form members).
    norms: Vec<T>,
    /// Krylov ratio `s_n = (cosh b - cos b) / (sinh b + sin b)`.
    ratio: Vec<T>,
    /// Coefficient of `e^{-beta (1 - x)}` in the hyperbolic part.
    grow: Vec<T>,
    /// Coefficient of `e^{-beta x}` in the hyperbolic part.
    decay: Vec<T>,
}

impl<T: Real> BeamBasis<T> {
    /// Basis of `count` functions normalized with the default quadrature rule.
    pub fn new(kind: BasisKind, count: usize) -> Result<Self> {
        let rule = UnitRule::for_basis_index(count.saturating_sub(1))?;
        Self::with_rule(kind, count, &rule)
    }

    /// Basis of `count` functions normalized numerically with `rule`.
    pub fn with_rule(kind: BasisKind, count: usize, rule: &UnitRule<T>) -> Result<Self> {
        let beta = solve_beta::<T>(kind, count)?;
        let mut basis = Self {
            kind,
            norms: vec![T::one(); count],
            ratio: vec![T::zero(); count],
            grow: vec![T::zero(); count],
            decay: vec![T::zero(); count],
            beta,
        };
        if kind == BasisKind::FreeFree {
            for n in 2..count {
                let b = basis.beta[n];
                let e = (-b).exp();
                let (sb, cb) = (b.sin(), b.cos());
                // Numerator and denominator of s_n scaled by 2 e^{-b}.
                let num = T::one() + e * e - T::lit(2.0) * e * cb;
                let den = T::one() - e * e + T::lit(2.0) * e * sb;
                let s = num / den;
                basis.ratio[n] = s;
                basis.grow[n] = -(e - cb - sb) / den;
                basis.decay[n] = (T::one() + s) * T::lit(0.5);
                let sq = rule.integrate(|x| {
                    let v = basis.psi(n, 0, x);
                    v * v
                });
                basis.norms[n] = sq.sqrt();
            }
        }
        Ok(basis)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of functions `N + 1`.
    pub fn size(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// Normalization constants `||psi_n||`, 1 for the closed-form members.
    pub fn norm_coeffs(&self) -> &[T] {
        &self.norms
    }

    /// `d`-th derivative (`d <= 3`) of function `n` at `x in [0, 1]`.
    pub fn eval(&self, n: usize, deriv: usize, x: T) -> Result<T> {
        if n >= self.size() {
            return domain(format!("basis index {n} out of range 0..{}", self.size()));
        }
        if deriv > 3 {
            return domain(format!("derivative order {deriv} not supported"));
        }
        if !(x >= T::zero() && x <= T::one()) {
            return domain(format!("point {x} outside [0, 1]"));
        }
        Ok(self.eval_unchecked(n, deriv, x))
    }

    /// [`Self::eval`] without argument checks.
    pub(crate) fn eval_unchecked(&self, n: usize, deriv: usize, x: T) -> T {
        match self.kind {
            BasisKind::SimplySupported => {
                let b = self.beta[n];
                let bx = b * x;
                let amp = T::lit(2.0).sqrt() * b.powi(deriv as i32);
                match deriv {
                    0 => amp * bx.sin(),
                    1 => amp * bx.cos(),
                    2 => -amp * bx.sin(),
                    _ => -amp * bx.cos(),
                }
            }
            BasisKind::FreeFree => match (n, deriv) {
                (0, 0) => T::one(),
                (0, _) => T::zero(),
                (1, 0) => T::lit(3.0).sqrt() * (T::lit(2.0) * x - T::one()),
                (1, 1) => T::lit(12.0).sqrt(),
                (1, _) => T::zero(),
                _ => self.psi(n, deriv, x) / self.norms[n],
            },
        }
    }

    /// Unnormalized Krylov function `psi_n` and its derivatives, `n >= 2`.
    fn psi(&self, n: usize, deriv: usize, x: T) -> T {
        let b = self.beta[n];
        let s = self.ratio[n];
        let bx = b * x;
        let (sn, cs) = (bx.sin(), bx.cos());
        let grow = self.grow[n] * (-(b * (T::one() - x))).exp();
        let decay = self.decay[n] * (-bx).exp();
        // sinh(bx) - s cosh(bx) and cosh(bx) - s sinh(bx)
        let h_odd = grow - decay;
        let h_even = grow + decay;
        match deriv {
            0 => sn - s * cs + h_odd,
            1 => b * (cs + s * sn + h_even),
            2 => b * b * (-sn + s * cs + h_odd),
            _ => b * b * b * (-cs - s * sn + h_even),
        }
    }

    /// Values of derivative `deriv` of every function at every node of `rule`;
    /// row `n`, column = node.
    fn table(&self, deriv: usize, rule: &UnitRule<T>) -> DMatrix<T> {
        DMatrix::from_fn(self.size(), rule.len(), |n, q| {
            self.eval_unchecked(n, deriv, rule.nodes[q])
        })
    }

    /// Gram matrix `<phi_n, phi_m>` under `rule`.
    pub fn gram(&self, rule: &UnitRule<T>) -> DMatrix<T> {
        let f = self.table(0, rule);
        weighted_products(&f, &f, rule)
    }
}

/// `A W B^T` with `W = diag(weights)`.
fn weighted_products<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, rule: &UnitRule<T>) -> DMatrix<T> {
    let mut aw = a.clone();
    for (q, w) in rule.weights.iter().enumerate() {
        aw.column_mut(q).scale_mut(*w);
    }
    &aw * b.transpose()
}

/// Derivative-coupling matrices of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices<T: Real> {
    /// `kappa[(n, k)] = <phi_n'', phi_k>`.
    pub kappa: DMatrix<T>,
    /// `theta[(n, k)] = <phi_n', phi_k'>`; symmetric.
    pub theta: DMatrix<T>,
}

/// Coupling matrices under the default rule for the basis size.
pub fn coupling_matrices<T: Real>(basis: &BeamBasis<T>) -> Result<CouplingMatrices<T>> {
    let rule = UnitRule::for_basis_index(basis.size().saturating_sub(1))?;
    Ok(coupling_matrices_with_rule(basis, &rule))
}

pub fn coupling_matrices_with_rule<T: Real>(
    basis: &BeamBasis<T>,
    rule: &UnitRule<T>,
) -> CouplingMatrices<T> {
    let f0 = basis.table(0, rule);
    let f1 = basis.table(1, rule);
    let f2 = basis.table(2, rule);
    let kappa = weighted_products(&f2, &f0, rule);
    let mut theta = weighted_products(&f1, &f1, rule);
    // enforce exact symmetry
    for n in 0..theta.nrows() {
        for k in 0..n {
            theta[(n, k)] = theta[(k, n)];
        }
    }
    CouplingMatrices { kappa, theta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ff(count: usize) -> BeamBasis<f64> {
        BeamBasis::new(BasisKind::FreeFree, count).unwrap()
    }

    #[test]
    fn free_free_beta_matches_published_values() {
        let beta = solve_beta::<f64>(BasisKind::FreeFree, 7).unwrap();
        let expected = [0.0, 0.0, 4.730, 7.853, 10.996, 14.137, 17.279];
        for (b, e) in beta.iter().zip(expected) {
            assert!((b - e).abs() < 5e-4, "{b} vs {e}");
        }
    }

    #[test]
    fn simply_supported_beta_are_multiples_of_pi() {
        let beta = solve_beta::<f64>(BasisKind::SimplySupported, 3).unwrap();
        assert_eq!(beta, vec![PI, 2.0 * PI, 3.0 * PI]);
    }

    /// Independent root oracle: 200-point sign-change scan of the residual
    /// followed by plain bisection.
    fn scanned_roots(upper: f64) -> Vec<f64> {
        let pts = 200;
        let mut roots = Vec::new();
        let h = upper / pts as f64;
        for i in 0..pts {
            let (mut a, mut b) = (0.5 + i as f64 * h, 0.5 + (i + 1) as f64 * h);
            let fa = characteristic_residual(a);
            if fa.signum() == characteristic_residual(b).signum() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if characteristic_residual(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        roots
    }

    #[test]
    fn free_free_high_roots_against_scan_oracle() {
        let beta = solve_beta::<f64>(BasisKind::FreeFree, 9).unwrap();
        let scan = scanned_roots(27.0);
        assert_eq!(scan.len(), 8);
        for n in 2..9 {
            assert!((beta[n] - scan[n - 2]).abs() < 1e-12, "n = {n}");
            assert!(characteristic_residual(beta[n]).abs() < 1e-10);
            if n >= 7 {
                let asym = PI * (2 * n - 1) as f64 / 2.0;
                assert!((beta[n] - asym).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn beta_count_guards() {
        assert!(solve_beta::<f64>(BasisKind::FreeFree, 0).is_err());
        assert!(solve_beta::<f64>(BasisKind::FreeFree, MAX_FREE_FREE_COUNT + 1).is_err());
        let beta = solve_beta::<f64>(BasisKind::FreeFree, MAX_FREE_FREE_COUNT).unwrap();
        for w in beta[2..].windows(2) {
            assert!(w[1] > w[0]);
        }
        for b in &beta[2..] {
            assert!(characteristic_residual(*b).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_form_members() {
        let b = ff(4);
        for x in [0.0, 0.3, 1.0] {
            assert!((b.eval(1, 1, x).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
            assert_eq!(b.eval(0, 2, x).unwrap(), 0.0);
            assert_eq!(b.eval(0, 0, x).unwrap(), 1.0);
        }
    }

    /// Naive Krylov form normalized by 2000-node composite Gauss quadrature.
    #[test]
    fn psi2_midpoint_matches_direct_quadrature() {
        let beta = solve_beta::<f64>(BasisKind::FreeFree, 3).unwrap()[2];
        let s = (beta.cosh() - beta.cos()) / (beta.sinh() + beta.sin());
        let psi = |x: f64| {
            (beta * x).sin() + (beta * x).sinh() - s * ((beta * x).cos() + (beta * x).cosh())
        };
        let rule = UnitRule::<f64>::with_min_nodes(2000).unwrap();
        let norm = rule.integrate(|x| psi(x) * psi(x)).sqrt();
        let direct = psi(0.5) / norm;
        let b = ff(3);
        assert!((b.eval(2, 0, 0.5).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn stabilized_form_stays_finite_at_large_beta() {
        let b = ff(MAX_FREE_FREE_COUNT);
        let n = MAX_FREE_FREE_COUNT - 1;
        for x in [0.0, 0.5, 0.999, 1.0] {
            for d in 0..4 {
                assert!(b.eval(n, d, x).unwrap().is_finite());
            }
        }
        // free-end conditions phi'' = phi''' = 0 at both ends
        for n in 2..MAX_FREE_FREE_COUNT {
            let scale = b.beta()[n].powi(3);
            for x in [0.0, 1.0] {
                assert!(b.eval(n, 2, x).unwrap().abs() < 1e-9 * scale, "n {n} x {x}");
                assert!(b.eval(n, 3, x).unwrap().abs() < 1e-9 * scale, "n {n} x {x}");
            }
        }
    }

    #[test]
    fn orthonormality() {
        for kind in [BasisKind::FreeFree, BasisKind::SimplySupported] {
            let b = BeamBasis::<f64>::new(kind, 11).unwrap();
            let rule = UnitRule::for_basis_index(10).unwrap();
            let g = b.gram(&rule);
            let err = (g - DMatrix::identity(11, 11)).amax();
            assert!(err < 1e-8, "{kind:?}: {err}");
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let b = ff(9);
        let h = 1e-6;
        for n in 0..9 {
            for x in [0.1, 0.37, 0.5, 0.81] {
                for d in 0..3 {
                    let fd = (b.eval(n, d, x + h).unwrap() - b.eval(n, d, x - h).unwrap()) / (2.0 * h);
                    let an = b.eval(n, d + 1, x).unwrap();
                    let scale = an.abs().max(b.beta()[n].powi(d as i32 + 1) * 1e-3).max(1.0);
                    assert!((fd - an).abs() / scale < 1e-4, "n {n} d {d} x {x}");
                }
            }
        }
    }

    #[test]
    fn argument_checks() {
        let b = ff(3);
        assert!(b.eval(3, 0, 0.5).is_err());
        assert!(b.eval(1, 0, 1.5).is_err());
        assert!(b.eval(1, 0, -0.1).is_err());
        assert!(b.eval(1, 4, 0.5).is_err());
    }

    #[test]
    fn published_coupling_entries() {
        let c = coupling_matrices(&ff(7)).unwrap();
        assert!((c.kappa[(2, 0)] + 18.59).abs() < 0.01);
        assert!((c.kappa[(2, 2)] + 12.30).abs() < 0.01);
        assert!((c.kappa[(3, 1)] - 40.59).abs() < 0.01);
        assert!((c.theta[(1, 1)] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn free_free_structural_zeros_and_symmetry() {
        let c = coupling_matrices(&ff(9)).unwrap();
        for k in 0..9 {
            assert_eq!(c.kappa[(0, k)], 0.0);
            assert_eq!(c.kappa[(1, k)], 0.0);
            assert_eq!(c.theta[(0, k)], 0.0);
            assert_eq!(c.theta[(k, 0)], 0.0);
        }
        assert_eq!(c.theta, c.theta.transpose());
    }

    #[test]
    fn simply_supported_coupling_is_diagonal() {
        let b = BeamBasis::<f64>::new(BasisKind::SimplySupported, 3).unwrap();
        let c = coupling_matrices(&b).unwrap();
        for n in 0..3 {
            for k in 0..3 {
                let b2 = b.beta()[n].powi(2);
                let (ek, et) = if n == k { (-b2, b2) } else { (0.0, 0.0) };
                assert!((c.kappa[(n, k)] - ek).abs() < 1e-10);
                assert!((c.theta[(n, k)] - et).abs() < 1e-10);
            }
        }
        assert!((c.kappa[(2, 2)] + 9.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn integration_by_parts_identity() {
        let b = ff(11);
        let c = coupling_matrices(&b).unwrap();
        for n in 0..11 {
            for k in 0..11 {
                let boundary = b.eval(n, 1, 1.0).unwrap() * b.eval(k, 0, 1.0).unwrap()
                    - b.eval(n, 1, 0.0).unwrap() * b.eval(k, 0, 0.0).unwrap();
                let r = c.kappa[(n, k)] + c.theta[(n, k)] - boundary;
                assert!(r.abs() < 1e-6, "({n},{k}) residual {r}");
            }
        }
    }

    #[test]
    fn quadrature_refinement_converged() {
        for kind in [BasisKind::FreeFree, BasisKind::SimplySupported] {
            let rule = UnitRule::<f64>::for_basis_index(10).unwrap();
            let fine = rule.refined().unwrap();
            let coarse = coupling_matrices_with_rule(&BeamBasis::with_rule(kind, 11, &rule).unwrap(), &rule);
            let refined = coupling_matrices_with_rule(&BeamBasis::with_rule(kind, 11, &fine).unwrap(), &fine);
            assert!((coarse.kappa - refined.kappa).amax() < 1e-8);
            assert!((coarse.theta - refined.theta).amax() < 1e-8);
        }
    }

    #[test]
    fn single_precision_basis() {
        let beta = solve_beta::<f32>(BasisKind::FreeFree, 7).unwrap();
        assert!((beta[6] - 17.279).abs() < 1e-3);
        let b = BeamBasis::<f32>::new(BasisKind::FreeFree, 7).unwrap();
        let c = coupling_matrices(&b).unwrap();
        assert!((c.kappa[(2, 0)] + 18.59).abs() < 0.01);
    }
}
