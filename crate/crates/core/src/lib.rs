//! Geometric and dynamic phases of electron-spin rotations driven by 2π
//! hyperbolic-secant pulses in a quantum-dot Λ system.
//!
//! * [`model`]: parameter types, units and the Hamiltonian
//! * [`special`]: ₂F₁ and the closed-form single-pulse state
//! * [`propagator`]: numerical evolution of pulse trains
//! * [`phases`]: dynamic/geometric decomposition and ratio sweeps
//! * [`pulsedesign`]: two-pulse sequences with cancelling dynamic phase
//! * [`fidelity`]: gate reconstruction and average fidelity

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fidelity;
pub mod model;
pub mod phases;
pub mod propagator;
pub mod pulsedesign;
mod quad;
pub mod special;

pub use error::{Error, Result};
pub use fidelity::{gate_report, GateParams, GateReport, IdealConvention};
pub use model::{PulseParams, StateVector, SystemParams};
pub use phases::{Method, PhaseDecomposition};
pub use propagator::{IntegratorOpts, PulseSchedule, Trajectory};
pub use pulsedesign::CancelingPair;
