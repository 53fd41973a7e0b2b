use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature did not converge: last two refinements {previous} and {current} ({panels} panels)")]
    QuadratureNonConvergence {
        previous: f64,
        current: f64,
        panels: usize,
    },

    #[error("symmetric logarithmic derivative undefined: derivative {derivative:e} lies in the kernel of the state")]
    RankDeficient { derivative: f64 },

    #[error("rejection sampler stalled: acceptance rate {rate:e} below 1e-4")]
    RejectionStall { rate: f64 },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("histogram bin centred at {centre} has counts but model density {density:e} vanishes there")]
    ZeroDensityBin { centre: f64, density: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("optimisation did not converge: {0}")]
    NonConvergence(String),

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("{path}: unexpected header `{found}` (expected `{expected}`)")]
    UnitHeaderMismatch {
        path: String,
        found: String,
        expected: &'static str,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) => 2,
            Error::EmptyHistogram
            | Error::ZeroDensityBin { .. }
            | Error::InsufficientData(_)
            | Error::MalformedRow { .. }
            | Error::UnitHeaderMismatch { .. }
            | Error::Io { .. } => 3,
            Error::QuadratureNonConvergence { .. }
            | Error::RankDeficient { .. }
            | Error::RejectionStall { .. }
            | Error::NonConvergence(_) => 4,
        }
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

pub(crate) fn check_phase(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=std::f64::consts::PI).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, π]",
        })
    }
}
