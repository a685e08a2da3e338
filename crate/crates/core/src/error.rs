//! Error type shared across the pipeline.

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
///
/// Variants are grouped by the category an operator would act on:
/// bad configuration, bad or missing data, or a numeric failure
/// (divergence, NaN, domain violation).
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: config errors are usage-level (2),
    /// data errors 3, numeric errors 4, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io(_) | Error::Image(_) | Error::Json(_) => 3,
            Error::Numeric(_) | Error::Shape(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
