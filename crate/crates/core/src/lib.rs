//! Modal analysis, transfer functions and data-driven identification for a
//! force-actuated orthotropic Kirchhoff plate with a point curvature sensor.
//!
//! The pipeline is
//!
//! 1. [`beam_basis`]: one-dimensional orthonormal beam functions and their
//!    coupling matrices,
//! 2. [`galerkin`]: the vectorized Galerkin eigenproblem and sorted modes,
//! 3. [`transfer`]: the modal transfer function from force to curvature,
//! 4. [`modal_sim`]: exact zero-order-hold simulation of the modal equations,
//! 5. [`sysid`]: FFT transfer-function estimation, peak picking and
//!    half-power damping estimates.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam_basis;
pub mod eigen;
pub mod error;
pub mod galerkin;
pub mod io;
pub mod modal_sim;
pub mod plate;
pub mod quadrature;
pub mod scalar;
pub mod sysid;
pub mod transfer;
pub mod validation;

pub use beam_basis::{coupling_matrices, solve_beta, BasisKind, BeamBasis, CouplingMatrices};
pub use error::{Error, Result};
pub use galerkin::{
    assemble, commutation_matrix, solve_modes, AssembledSystem, CrossCoupling, ModalModel, Mode,
    ModeSelection,
};
pub use modal_sim::{simulate, Excitation, SignalRecord, SimOptions};
pub use plate::{build_modal_model, navier_oracle, Geometry, MechanicalParams, PlateConfig, Stiffness};
pub use scalar::Real;
pub use sysid::{estimate_tf, find_modal_peaks, fit_damping, EmpiricalTF, Peak, PeakReport, Window};
pub use transfer::{build_transfer, TransferFunction};

pub type BeamBasis64 = BeamBasis<f64>;
pub type CouplingMatrices64 = CouplingMatrices<f64>;
pub type MechanicalParams64 = MechanicalParams<f64>;
pub type PlateConfig64 = PlateConfig<f64>;
pub type ModalModel64 = ModalModel<f64>;
pub type TransferFunction64 = TransferFunction<f64>;
pub type SignalRecord64 = SignalRecord<f64>;
pub type EmpiricalTF64 = EmpiricalTF<f64>;
