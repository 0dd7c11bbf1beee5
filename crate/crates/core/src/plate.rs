//! Physical plate description and the end-to-end modal workflow.

use crate::beam_basis::{BasisKind, BeamBasis};
use crate::error::{domain, Result};
use crate::galerkin::{assemble, solve_modes, CrossCoupling, ModalModel, ModeSelection};
use crate::scalar::Real;

/// Material and damping parameters of the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalParams<T> {
    /// Density, kg/m^3.
    pub rho: T,
    /// Thickness, m.
    pub h: T,
    /// Young's modulus along x1, Pa.
    pub e1: T,
    /// Young's modulus along x2, Pa.
    pub e2: T,
    /// Shear modulus, Pa.
    pub g: T,
    /// Poisson ratio `nu1`; `nu2 = nu1 e2 / e1` is derived.
    pub nu1: T,
    /// Viscous damping coefficient, 1/s.
    pub alpha: T,
}

/// Bending stiffness coefficients divided by `rho h`, in m^4/s^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stiffness<T> {
    pub d11: T,
    pub d22: T,
    pub d12: T,
    pub d66: T,
}

impl<T: Real> MechanicalParams<T> {
    /// Parameters of the graphite-epoxy/honeycomb sandwich plate used as the
    /// reference configuration (undamped).
    pub fn reference_sandwich() -> Self {
        Self {
            rho: T::lit(505.6),
            h: T::lit(3.6e-3),
            e1: T::lit(23e9),
            e2: T::lit(14e9),
            g: T::lit(2.2e9),
            nu1: T::lit(0.25),
            alpha: T::zero(),
        }
    }

    pub fn nu2(&self) -> T {
        self.nu1 * self.e2 / self.e1
    }

    /// Mass per unit area `rho h`, kg/m^2.
    pub fn rho_h(&self) -> T {
        self.rho * self.h
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("h", self.h),
            ("e1", self.e1),
            ("e2", self.e2),
            ("g", self.g),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.nu1 >= T::zero() && self.nu1 < T::lit(0.5)) {
            return domain(format!("nu1 must lie in [0, 0.5), got {}", self.nu1));
        }
        if !(self.alpha >= T::zero() && self.alpha.is_finite()) {
            return domain(format!("alpha must be nonnegative, got {}", self.alpha));
        }
        if !(T::one() - self.nu1 * self.nu2() > T::zero()) {
            return domain("1 - nu1 nu2 must be positive");
        }
        Ok(())
    }

    /// `d11 = E1 h^2 / (12 rho (1 - nu1 nu2))`, `d22` likewise with `E2`,
    /// `d12 = nu2 d11`, `d66 = G h^2 / (12 rho)`.
    pub fn stiffness(&self) -> Result<Stiffness<T>> {
        self.validate()?;
        let h2 = self.h * self.h;
        let twelve_rho = T::lit(12.0) * self.rho;
        let denom = twelve_rho * (T::one() - self.nu1 * self.nu2());
        let d11 = self.e1 * h2 / denom;
        let d22 = self.e2 * h2 / denom;
        let d12 = self.nu2() * d11;
        let d66 = self.g * h2 / twelve_rho;
        let alt = self.nu1 * d22;
        let scale = crate::scalar::max(d12.abs(), T::tiny());
        if (d12 - alt).abs() > T::lit(64.0) * T::eps() * scale {
            return Err(crate::Error::Numerical(format!(
                "reciprocity d12 = nu1 d22 violated: {d12} vs {alt}"
            )));
        }
        Ok(Stiffness { d11, d22, d12, d66 })
    }
}

/// Plate side lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry<T> {
    pub ell1: T,
    pub ell2: T,
}

impl<T: Real> Geometry<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.ell1 > T::zero() && self.ell2 > T::zero() && self.ell1.is_finite() && self.ell2.is_finite()) {
            return domain("side lengths must be positive and finite");
        }
        Ok(())
    }

    pub fn contains(&self, p: [T; 2]) -> bool {
        p[0] >= T::zero() && p[0] <= self.ell1 && p[1] >= T::zero() && p[1] <= self.ell2
    }

    pub fn area(&self) -> T {
        self.ell1 * self.ell2
    }
}

/// Complete description of a plate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateConfig<T> {
    pub params: MechanicalParams<T>,
    pub geometry: Geometry<T>,
    /// Boundary conditions at the edges `x1 = 0, ell1`.
    pub bc1: BasisKind,
    /// Boundary conditions at the edges `x2 = 0, ell2`.
    pub bc2: BasisKind,
    /// Actuator (point force) location.
    pub s0: [T; 2],
    /// Sensor (point curvature `w_x1x1`) location.
    pub c0: [T; 2],
    /// Truncation index `N`; each direction uses `N + 1` functions.
    pub n_trunc: usize,
    pub coupling: CrossCoupling,
}

impl<T: Real> PlateConfig<T> {
    /// The free-edge sandwich plate with shaker at (0.17, 0.25) m and sensor at
    /// (0.5, 0.21) m, `N = 6`, assembled with the published cross-coupling form.
    pub fn reference_free_plate() -> Self {
        Self {
            params: MechanicalParams::reference_sandwich(),
            geometry: Geometry { ell1: T::one(), ell2: T::lit(0.5) },
            bc1: BasisKind::FreeFree,
            bc2: BasisKind::FreeFree,
            s0: [T::lit(0.17), T::lit(0.25)],
            c0: [T::lit(0.5), T::lit(0.21)],
            n_trunc: 6,
            coupling: CrossCoupling::Published,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.geometry.validate()?;
        if !self.geometry.contains(self.s0) {
            return domain("actuator point s0 lies outside the plate");
        }
        if !self.geometry.contains(self.c0) {
            return domain("sensor point c0 lies outside the plate");
        }
        Ok(())
    }

    pub fn is_simply_supported(&self) -> bool {
        self.bc1 == BasisKind::SimplySupported && self.bc2 == BasisKind::SimplySupported
    }
}

/// Basis construction, coupling matrices, assembly and eigen-solve in one call.
pub fn build_modal_model<T: Real>(config: &PlateConfig<T>) -> Result<ModalModel<T>> {
    config.validate()?;
    let count = config.n_trunc + 1;
    let basis1 = BeamBasis::new(config.bc1, count)?;
    let basis2 = BeamBasis::new(config.bc2, count)?;
    let sys = assemble(&config.params, config.geometry, basis1, basis2, config.coupling)?;
    solve_modes(&sys, &ModeSelection::All)
}

/// Closed-form eigenvalue of the simply supported plate for half-wave
/// numbers `k, j >= 1`:
/// `d11 (k pi / l1)^4 + d22 (j pi / l2)^4 + 2 (d12 + 2 d66) (k pi / l1)^2 (j pi / l2)^2`.
pub fn navier_oracle<T: Real>(config: &PlateConfig<T>, k: usize, j: usize) -> Result<T> {
    if !config.is_simply_supported() {
        return domain("Navier solution requires simply supported edges in both directions");
    }
    if k == 0 || j == 0 {
        return domain("Navier mode indices start at 1");
    }
    config.geometry.validate()?;
    let d = config.params.stiffness()?;
    let a = T::from_usize_lossy(k) * T::pi() / config.geometry.ell1;
    let b = T::from_usize_lossy(j) * T::pi() / config.geometry.ell2;
    let (a2, b2) = (a * a, b * b);
    Ok(d.d11 * a2 * a2 + d.d22 * b2 * b2 + T::lit(2.0) * (d.d12 + T::lit(2.0) * d.d66) * a2 * b2)
}
