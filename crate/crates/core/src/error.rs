use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The state does not fit in the requested Fock basis.
    #[error("cutoff too small for a {cutoff}-level basis: {detail}")]
    CutoffTooSmall { cutoff: usize, detail: String },

    #[error("state is not pure (largest eigenvalue {largest_eigenvalue:.12})")]
    NotPure { largest_eigenvalue: f64 },

    #[error("degenerate superposition: the weighted sum of kets vanishes")]
    DegenerateSuperposition,

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("unsupported representation regime: negative diffusion radicand {radicand} ({channel} channel)")]
    UnsupportedRepresentationRegime { channel: &'static str, radicand: f64 },

    #[error("numerical blow-up at t = {t}: |alpha| = {modulus}")]
    NumericalBlowup { t: f64, modulus: f64 },

    #[error("deconvolution regime unsupported: filter variance {sigma2} < 0")]
    DeconvolutionRegimeUnsupported { sigma2: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("JPO fixed points not found: {0}")]
    JpoFixedPointsNotFound(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Name of the module-level error kind, used in structured CLI messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::CutoffTooSmall { .. } => "cutoff-too-small",
            Error::NotPure { .. } => "not-pure",
            Error::DegenerateSuperposition => "degenerate-superposition",
            Error::UnsupportedRepresentation(_) => "unsupported-representation",
            Error::UnsupportedRepresentationRegime { .. } => "unsupported-representation-regime",
            Error::NumericalBlowup { .. } => "numerical-blowup",
            Error::DeconvolutionRegimeUnsupported { .. } => "deconvolution-regime-unsupported",
            Error::InvalidSweep(_) => "invalid-sweep",
            Error::JpoFixedPointsNotFound(_) => "jpo-fixed-points-not-found",
            Error::InvalidConfig(_) => "invalid-config",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::Parse(e) => e.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
