use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("time {t} outside trajectory domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("trajectory speed {speed} is not below the sound speed {c}")]
    Supersonic { speed: f64, c: f64 },

    #[error("retarded time solve did not converge (residual {residual:e})")]
    RetardedNotConverged { residual: f64 },

    #[error("observation point lies on the emitter (distance {distance:e})")]
    SingularField { distance: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("sampling point coincides with a receiver")]
    ExcludedPoint,

    #[error("singular step matrix at step {step}: {msg}")]
    Assembly { step: usize, msg: String },

    #[error("invalid value for `{field}`: {msg}")]
    InvalidField { field: String, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data record is identically zero")]
    EmptyData,

    #[error("malformed {what}: {msg}")]
    Format { what: &'static str, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Png(#[from] png::EncodingError),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
