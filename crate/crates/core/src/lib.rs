//! Fock-space simulation of an entanglement-assisted, linear-optical nondemolition
//! detector for the presence of a single photon.
//!
//! A signal photon interacts with a polarization Bell pair through polarizing beam
//! splitters and half-wave plates. A coincidence between the two ancilla detectors
//! heralds the signal photon without absorbing it, and its polarization survives
//! after classical feed-forward. Rotating the ancilla measurement basis turns the
//! device into a tunable weak measurement of the signal polarization.
//!
//! ```
//! use qnd_core::{detect_presence, SignalInput, SignalQubit};
//!
//! let q = SignalQubit::from_bloch(1.0, 0.5);
//! let rep = detect_presence(&SignalInput::Photon(q), true).unwrap();
//! assert!((rep.success_probability - 0.5).abs() < 1e-12);
//! assert!(rep.min_retained_fidelity().unwrap() > 1.0 - 1e-12);
//! ```

pub mod circuit;
pub mod density;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod optics;
pub mod par;
pub mod reference;
pub mod report;
pub mod sampling;

pub use circuit::{
    detect_presence, deterministic_run, weak_measure, CircuitConfig, DetectionPattern,
    DeterministicReport, OutcomeClass, OutcomeRecord, PresenceReport, Regime, RegimeReport,
    SignalInput, SignalQubit, WeakMeasurement,
};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use fock::{FockVector, ModeLabel, ModeRegistry, Occupation, PathId, Polarization, C64};
pub use metrics::{haar_average_fidelity, tradeoff_curve, TradeoffPoint};
pub use par::Execution;
pub use reference::{ideal_qnd, resource_comparison, verify_against_optical};
pub use sampling::{sample_shots, ShotTable};
