use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("target {id} at {range_m:.6} m is beyond the unambiguous range {max_range_m:.6} m")]
    TargetOutOfRange {
        id: i64,
        range_m: f64,
        max_range_m: f64,
    },

    #[error("range must be non-negative, got {0}")]
    NegativeRange(f64),

    #[error("bin {bin} outside [0, {len})")]
    BinOutOfDomain { bin: f64, len: usize },

    #[error("profile of {len} bins is shorter than the CFAR window of {window}")]
    ProfileTooShort { len: usize, window: usize },

    #[error("frame has {got} samples, radar expects {expected}")]
    FrameLength { got: usize, expected: usize },

    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),

    #[error("innovation covariance of track {track_id} is singular")]
    SingularInnovation { track_id: u64 },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("frame {frame}: {source}")]
    Frame {
        frame: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at_frame(self, frame: u64) -> Self {
        match self {
            e @ Error::Frame { .. } => e,
            e => Error::Frame {
                frame,
                source: Box::new(e),
            },
        }
    }

    /// True for errors caused by bad configuration rather than bad data.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidConfig { .. } => true,
            Error::Frame { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
