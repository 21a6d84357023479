use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Sound-speed factor at or below one breaks the subcharacteristic condition.
    #[error("sound-speed factor theta must be greater than 1, got {0}")]
    Subcharacteristic(f64),

    #[error("degenerate wave fan: s_left = {0}, s_right = {1}")]
    DegenerateFan(f64, f64),

    #[error("non-positive star mass {0}")]
    InvalidStarMass(f64),

    #[error("numerical failure in cell {cell} at t = {time} s: {what}")]
    Numerical { cell: usize, time: f64, what: String },

    #[error("{0}")]
    Diagnostics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownKey(_)
            | Error::Parse { .. }
            | Error::Subcharacteristic(_) => 2,
            Error::DegenerateFan(..) | Error::InvalidStarMass(_) | Error::Numerical { .. } => 3,
            Error::Diagnostics(_) | Error::Io(_) | Error::Csv(_) => 1,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
