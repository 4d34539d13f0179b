use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The expected point count of a sampling request exceeds what can be represented.
    #[error("scenario too dense: expected {expected:.3e} points in the window (limit {limit:.3e})")]
    TooDense { expected: f64, limit: f64 },

    #[error("non-integrable ATPF: {0}")]
    NonIntegrable(String),

    /// No event window below the hard radius cap meets the truncation tolerance.
    #[error("truncation impossible: omitted alarm mass still {bound:.3e} > {epsilon:.3e} at r = {cap} m")]
    TruncationImpossible { bound: f64, epsilon: f64, cap: f64 },

    #[error("degenerate series: sample variance is zero")]
    DegenerateSeries,

    #[error("mismatched ACF estimates: {0}")]
    MismatchedAcf(String),

    /// Bad configuration input; `origin` names the line, flag or preset.
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Config { .. }
                | Error::NonIntegrable(_)
                | Error::TruncationImpossible { .. }
        )
    }
}

pub(crate) fn ensure_probability(name: &'static str, p: f64) -> Result<f64> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::invalid(name, format!("{p} is not a probability in [0, 1]")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be finite and >= 0")))
    }
}

pub(crate) fn ensure_positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be finite and > 0")))
    }
}
