use thiserror::Error;

use crate::quantum::{Particle, Path};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode of particle {particle:?} cannot occupy path {path:?}")]
    InvalidMode { particle: Particle, path: Path },

    #[error("a ket needs at least one mode")]
    EmptyKet,

    #[error("particle {0:?} is absent from at least one term")]
    ParticleAbsent(Particle),

    #[error("particle B mode on {path:?} is expressed at {angle_deg}° instead of the 0° basis")]
    NotInComputationalBasis { path: Path, angle_deg: f64 },

    #[error("polarizer blocks the state completely (surviving norm² = {0:e})")]
    FullyBlocked(f64),

    #[error("combiner inputs use different polarization bases ({0}° vs {1}°)")]
    BasisMismatch(f64, f64),

    #[error("particle {particle:?} spans {count} modes; the 2×2 criterion needs at most 2")]
    TooManyModes { particle: Particle, count: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("reference intensity {0:e} is too small to form a ratio")]
    DegenerateRatio(f64),

    #[error("curves are sampled on different grids")]
    GridMismatch,

    #[error("{gate} gate does not define {what}")]
    Unsupported { gate: &'static str, what: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
