use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("theta4({x}) = {value} is not positive")]
    NonPositiveTheta { x: f64, value: f64 },

    #[error("requested {requested} series terms but the alpha table holds {available}")]
    AlphaTableTooShort { requested: usize, available: usize },

    #[error("waveform norm {0} is not finite and positive")]
    Normalization(f64),

    #[error("shift {shift} is not an integer multiple of the grid step {dt}")]
    Misaligned { shift: f64, dt: f64 },

    #[error(
        "grid [{t_min}, {t_max}] too small for |m| <= {m_max}: \
         edge margin {margin:.3} leaves atom tail energy {tail:.3e} (limit 1e-12)"
    )]
    GridTooSmall {
        t_min: f64,
        t_max: f64,
        m_max: usize,
        margin: f64,
        tail: f64,
    },

    #[error("invalid signal spec `{spec}`: {reason}")]
    SignalSpec { spec: String, reason: String },

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("flat correlation: best score {score:.4} < 0.5, input is not atom-like")]
    FlatCorrelation { score: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),
}
