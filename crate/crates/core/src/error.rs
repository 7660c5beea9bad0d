use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={len}")]
    Range { index: usize, len: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("box incommensurate with potential periods: {0}")]
    Box(String),

    #[error("empty dual lattice (cutoff {cutoff})")]
    EmptyLattice { cutoff: f64 },

    #[error("coefficients are not Hermitian: {0}")]
    NonHermitian(String),

    #[error("matrix dimension {dim} exceeds dense limit {limit}; use the recursive solver")]
    DenseLimit { dim: usize, limit: usize },

    #[error("recursive solve did not converge after {iterations} iterations (k = [{}, {}]): {reason}", k[0], k[1])]
    NonConvergent { k: [f64; 2], iterations: usize, reason: String },

    #[error("eigenvector not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("empty rectangle: {0}")]
    EmptyRect(String),

    #[error("blend width {width} below grid spacing {spacing}")]
    BlendWidth { width: f64, spacing: f64 },

    #[error("empty packet: integrand vanishes everywhere")]
    EmptyPacket,

    #[error("non-finite wave function at step {step}")]
    NonFinite { step: usize },

    #[error("insufficient time coverage: need t_max >= {required}, have {available}")]
    Coverage { required: f64, available: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("pre-asymptotic: packet width {width} exceeds ballistic displacement {displacement}")]
    PreAsymptotic { width: f64, displacement: f64 },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
