//! Light-beam deflection in a tripod-EIT atomic ensemble, read out through a
//! weak measurement of the probe polarization.
//!
//! The crate is organised bottom-up:
//!
//! * [`physparams`]: every physical input (SI units, `ħ` explicit), the TOML
//!   configuration schema and the regime-validity report.
//! * [`medium`]: detunings, linear-response coherence and the effective
//!   Hamiltonian coefficients `b0ⱼ`, `b1ⱼ`.
//! * [`analytic`]: closed-form envelopes, postselected density and its
//!   moments.
//! * [`weakmeas`]: polarization-qubit algebra, weak values and the linearized
//!   meter shift.
//! * [`propagator`]: a grid-based spinor-field evolution used as an
//!   independent numeric oracle for everything in [`analytic`].

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod consts;
pub mod error;
pub mod medium;
pub mod physparams;
pub mod propagator;
pub mod weakmeas;

pub use analytic::{GaussianMeter, Postselection, ReshapeMode};
pub use error::{Error, Result};
pub use medium::{Affine, Detunings, EffectiveCoefficients, Polarization};
pub use num_complex::Complex64;
pub use physparams::{
    BeamConfig, EnsembleGeometry, FieldSet, LevelSet, MagnetProfile, PhysicalSystem, RegimeCheck,
    RegimeReport, RegimeThresholds, TfMode,
};
pub use propagator::{Grid1D, Moments, PostselectedField, Spectrum, SpinorField};
pub use weakmeas::{Observable2, Preselected, Qubit};
