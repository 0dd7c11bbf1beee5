//! Modal transfer function from the point force at `s0` to the curvature
//! `w_x1x1` at `c0`:
//!
//! `H(s) = 1/(rho h) * sum_n W_n,x1x1(c0) W_n(s0) / ((s^2 + alpha s + lambda_n) ||W_n||^2)`.

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::galerkin::{ModalModel, REPEATED_REL};
use crate::plate::PlateConfig;
use crate::scalar::{cabs, carg, max, Real};

/// One modal term of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfTerm<T> {
    pub mode: usize,
    /// `W_x1x1(c0) * W(s0)`.
    pub residue: T,
    pub lambda: T,
    pub norm_sq: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction<T> {
    pub terms: Vec<TfTerm<T>>,
    pub alpha: T,
    pub rho_h: T,
    /// Output scale applied to `H`; 1 reports raw curvature per newton.
    pub gain: T,
    /// Mode pairs with coincident eigenvalues; the modal sum assumes distinct ones.
    pub repeated: Vec<(usize, usize)>,
}

/// One row of a frequency-response table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint<T> {
    pub frequency_hz: T,
    pub magnitude: T,
    /// `arg H` in `(-pi, pi]`.
    pub phase_rad: T,
}

/// Collects the modal terms for the modes in `mode_set` (eigenvalue-order indices).
pub fn build_transfer<T: Real>(
    model: &ModalModel<T>,
    config: &PlateConfig<T>,
    mode_set: &[usize],
) -> Result<TransferFunction<T>> {
    config.params.validate()?;
    let mut terms = Vec::with_capacity(mode_set.len());
    for &n in mode_set {
        let mode = model.mode(n)?;
        let curvature = model.eval_mode_shape(n, (2, 0), config.c0)?;
        let deflection = model.eval_mode_shape(n, (0, 0), config.s0)?;
        terms.push(TfTerm {
            mode: n,
            residue: curvature * deflection,
            lambda: mode.lambda,
            norm_sq: mode.norm_sq,
        });
    }
    let mut repeated = Vec::new();
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            let scale = max(a.lambda.abs(), b.lambda.abs());
            if (a.lambda - b.lambda).abs() <= T::lit(REPEATED_REL) * scale {
                repeated.push((a.mode, b.mode));
            }
        }
    }
    Ok(TransferFunction {
        terms,
        alpha: config.params.alpha,
        rho_h: config.params.rho_h(),
        gain: T::one(),
        repeated,
    })
}

impl<T: Real> TransferFunction<T> {
    /// Contribution of one term at `s`; errors on a pole.
    pub fn term_value(&self, term: &TfTerm<T>, s: Complex<T>) -> Result<Complex<T>> {
        let den = s * s + s * self.alpha + Complex::new(term.lambda, T::zero());
        let scale = s.norm_sqr() + self.alpha * cabs(s) + term.lambda.abs();
        if cabs(den) <= T::lit(64.0) * T::eps() * scale {
            return Err(Error::Pole { mode: term.mode, lambda: term.lambda.to_f64_lossy() });
        }
        Ok(Complex::new(term.residue, T::zero()) / (den * term.norm_sq))
    }

    /// `H(s)` for complex `s` in rad/s.
    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for term in &self.terms {
            acc += self.term_value(term, s)?;
        }
        Ok(acc * (self.gain / self.rho_h))
    }

    /// `H(2 pi i f)`.
    pub fn eval_hz(&self, f: T) -> Result<Complex<T>> {
        self.eval(Complex::new(T::zero(), T::two_pi() * f))
    }

    /// Magnitude and phase on `points` uniformly spaced frequencies in `[f_min, f_max]` Hz.
    pub fn frequency_response(&self, f_min: T, f_max: T, points: usize) -> Result<Vec<ResponsePoint<T>>> {
        if !(f_min >= T::zero() && f_min < f_max && f_max.is_finite()) {
            return domain(format!("need 0 <= f_min < f_max, got [{f_min}, {f_max}]"));
        }
        if points < 2 {
            return domain("a frequency grid needs at least two points");
        }
        let step = (f_max - f_min) / T::from_usize_lossy(points - 1);
        (0..points)
            .map(|i| {
                let f = if i + 1 == points { f_max } else { f_min + step * T::from_usize_lossy(i) };
                let h = self.eval_hz(f)?;
                Ok(ResponsePoint { frequency_hz: f, magnitude: cabs(h), phase_rad: principal_phase(carg(h)) })
            })
            .collect()
    }
}

/// Maps an angle from `atan2` into `(-pi, pi]`.
pub fn principal_phase<T: Real>(phi: T) -> T {
    if phi <= -T::pi() {
        phi + T::two_pi()
    } else {
        phi
    }
}

/// Removes `2 pi` jumps between consecutive phase samples in place.
pub fn unwrap_phase<T: Real>(phase: &mut [T]) {
    let mut offset = T::zero();
    for i in 1..phase.len() {
        let prev = phase[i - 1];
        let mut cur = phase[i] + offset;
        while cur - prev > T::pi() {
            cur -= T::two_pi();
            offset -= T::two_pi();
        }
        while cur - prev < -T::pi() {
            cur += T::two_pi();
            offset += T::two_pi();
        }
        phase[i] = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single(residue: f64, lambda: f64, alpha: f64) -> TransferFunction<f64> {
        TransferFunction {
            terms: vec![TfTerm { mode: 0, residue, lambda, norm_sq: 0.5 }],
            alpha,
            rho_h: 2.0,
            gain: 1.0,
            repeated: vec![],
        }
    }

    #[test]
    fn empty_set_is_zero() {
        let tf = TransferFunction::<f64> { terms: vec![], alpha: 1.0, rho_h: 1.0, gain: 1.0, repeated: vec![] };
        assert_eq!(tf.eval(Complex::new(0.3, 4.0)).unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn resonance_magnitude() {
        let (r, lam, a) = (3.0, 4.0e4, 0.7);
        let tf = single(r, lam, a);
        let h = tf.eval(Complex::new(0.0, lam.sqrt())).unwrap();
        let expect = r / (2.0 * a * lam.sqrt() * 0.5);
        assert!((h.norm() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn static_gain() {
        let tf = single(3.0, 400.0, 0.0);
        let h = tf.eval(Complex::new(0.0, 0.0)).unwrap();
        assert!((h.re - 3.0 / (2.0 * 400.0 * 0.5)).abs() < 1e-15);
        assert_eq!(h.im, 0.0);
    }

    #[test]
    fn conjugate_symmetry() {
        let tf = single(-1.5, 900.0, 0.3);
        for s in [Complex::new(0.1, 2.0), Complex::new(-3.0, 40.0), Complex::new(2.0, -7.0)] {
            let a = tf.eval(s.conj()).unwrap();
            let b = tf.eval(s).unwrap().conj();
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn pole_is_reported() {
        let tf = single(1.0, 100.0, 0.0);
        assert!(matches!(tf.eval(Complex::new(0.0, 10.0)), Err(Error::Pole { mode: 0, .. })));
        let f0 = 10.0 / (2.0 * PI);
        assert!(tf.frequency_response(0.0, 2.0 * f0, 3).is_err());
    }

    #[test]
    fn grid_endpoints_and_peak() {
        let tf = single(1.0, (2.0 * PI * 20.0f64).powi(2), 0.5);
        let two = tf.frequency_response(1.0, 5.0, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].frequency_hz, 1.0);
        assert_eq!(two[1].frequency_hz, 5.0);
        let grid = tf.frequency_response(0.0, 50.0, 1001).unwrap();
        let best = grid.iter().max_by(|a, b| a.magnitude.partial_cmp(&b.magnitude).unwrap()).unwrap();
        assert!((best.frequency_hz - 20.0).abs() <= 0.05);
        assert!(tf.frequency_response(5.0, 1.0, 10).is_err());
        assert!(tf.frequency_response(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn phase_helpers() {
        assert_eq!(principal_phase(-PI), PI);
        let mut p = vec![3.0f64, -3.0, 3.1, -3.0];
        unwrap_phase(&mut p);
        for w in p.windows(2) {
            assert!((w[1] - w[0]).abs() < PI);
        }
    }
}
