use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency {sigma} lies outside the pass band (0, {edge})")]
    OutOfBand { sigma: f64, edge: f64 },

    #[error("phase speed {c_ph} outside the admissible range: {reason}")]
    SpeedDomain { c_ph: f64, reason: &'static str },

    #[error("integration fault at t = {t}: {reason}")]
    IntegrationFault { t: f64, reason: String },

    #[error("requested interval [{start}, {end}] is outside the available range [{lo}, {hi}]")]
    Range {
        start: f64,
        end: f64,
        lo: f64,
        hi: f64,
    },

    #[error("asymptotic strains violate R+ > 0 > R- (R- = {r_minus}, R+ = {r_plus})")]
    WellsUndetermined { r_minus: f64, r_plus: f64 },

    #[error("operation requires a harmonic potential")]
    Unsupported,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Faults raised by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::IntegrationFault { .. })
    }
}
