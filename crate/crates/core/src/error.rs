use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::FourierIndex;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("noise level {0} is outside [0, 1)")]
    InvalidNoiseLevel(f64),

    #[error("truncation rule is undefined at noise level 0; supply the order explicitly")]
    DegenerateTruncation,

    #[error("samples were taken on a different quadrature mesh")]
    MeshMismatch,

    #[error("expected {expected} noise components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("the zero Fourier mode has its own formula")]
    ZeroModeNotAllowed,

    #[error("sin(pi * {0}) vanishes; the zero-mode offset must not be an integer")]
    SingularZeroMode(f64),

    #[error("Lamé parameters violate mu > 0, lambda + mu > 0 (lambda = {lambda}, mu = {mu})")]
    InvalidLame { lambda: f64, mu: f64 },

    #[error("accumulator holds no samples")]
    EmptyAccumulator,

    #[error("reference field has zero norm; relative error is undefined")]
    ZeroReference,

    #[error("measurement set is missing channels for indices {}", IndexList(.0))]
    MissingChannels(Vec<FourierIndex>),

    #[error("measurement set does not match the requested model: {0}")]
    WrongModel(String),
}

struct IndexList<'a>(&'a [FourierIndex]);

impl fmt::Display for IndexList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
