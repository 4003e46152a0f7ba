use thiserror::Error;

use crate::state::{BasisLabel, Particle};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ket has zero norm (norm = {0:e})")]
    ZeroNorm(f64),

    #[error("state is not normalized (squared norm = {0})")]
    NotNormalized(f64),

    #[error("label {label} does not belong to particle {expected:?}")]
    FamilyMismatch { label: BasisLabel, expected: Particle },

    #[error("overlap {0} lies outside [-1, 1]")]
    OutOfRange(f64),

    #[error("absorption channel is only defined on ground-state factors, got {0}")]
    ExcitedInput(BasisLabel),

    #[error("absorption channel is undefined on orthogonal-complement label {0}")]
    ComplementInput(BasisLabel),

    #[error("operation requires an entangled preparation")]
    WrongKind,

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("amplitude {name} has imaginary part {imag:e}; the Λ route needs real amplitudes")]
    ComplexAmplitudes { name: &'static str, imag: f64 },

    #[error("degenerate Λ spectrum: |αγ(ac+bd) + βδ| = {0:e}")]
    DegenerateSpectrum(f64),

    #[error("{relation} = {value}, expected 1")]
    Normalization { relation: &'static str, value: f64 },

    #[error("amplitude on {0} lies outside the requested basis")]
    OutsideBasis(String),

    #[error("mixture weights invalid: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
