use thiserror::Error;

use crate::fock::ModeLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode {0} appears more than once")]
    RegistryConflict(ModeLabel),

    #[error("mode {0} is not part of the registry")]
    UnknownMode(ModeLabel),

    #[error("registries differ")]
    RegistryMismatch,

    #[error("occupation tuple has {got} entries, registry has {expected}")]
    OccupationLength { expected: usize, got: usize },

    #[error("{0} photons exceed the simulator cap of {cap}", cap = crate::fock::MAX_PHOTONS)]
    PhotonCap(u32),

    #[error("components carry different photon numbers; build the state as a mixed-sector superposition")]
    MixedSectors,

    #[error("element matrix is {rows}x{cols}, expected {expected}x{expected}")]
    ElementShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("element matrix is not unitary (max deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("state norm {0} is not 1")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid signal amplitudes: |alpha|^2 + |beta|^2 = {0}")]
    SignalNorm(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("polarizing beam splitter needs two distinct paths, got {0} twice")]
    SamePath(u8),

    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("unsupported input: {0}")]
    UnsupportedInput(&'static str),

    #[error("empty grid")]
    EmptyGrid,

    #[error("optical output deviates from the ideal unitary on input {input}: {deviation:.3e} >= {tolerance:.3e}")]
    VerificationFailure {
        input: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("cannot sample: {0}")]
    Sampling(String),
}
