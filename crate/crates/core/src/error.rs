use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("band [{low_hz} Hz, {high_hz} Hz] exceeds the Nyquist range of {nyquist_hz} Hz")]
    BandOutsideNyquist {
        low_hz: f64,
        high_hz: f64,
        nyquist_hz: f64,
    },

    #[error("pilot at {pilot_hz} Hz collides with the quantum band [{low_hz} Hz, {high_hz} Hz]")]
    PilotCollision {
        pilot_hz: f64,
        low_hz: f64,
        high_hz: f64,
    },

    #[error("frame schedule is infeasible: {0}")]
    Schedule(String),

    #[error("frequency estimation failed: peak is {peak_over_median_db:.2} dB above the in-band median (need > 10 dB)")]
    FrequencyEstimation { peak_over_median_db: f64 },

    #[error("timing synchronization failed: confidence {confidence:.3} below threshold {threshold:.3}")]
    SyncFailure { confidence: f64, threshold: f64 },

    #[error("equalizer needs at least {needed} training symbols, frame has {available}")]
    InsufficientTraining { needed: usize, available: usize },

    #[error("calibration failed: total variance {total} does not exceed electronic variance {electronic}")]
    Calibration { total: f64, electronic: f64 },

    #[error("Alice's quadrature variance {observed} is below half the modulation variance {v_mod}; frames look misaligned")]
    Misalignment { observed: f64, v_mod: f64 },

    #[error("unphysical covariance: symplectic eigenvalue {value} < 1")]
    Unphysical { value: f64 },

    #[error("waveform file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error comes from bad inputs rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::BandOutsideNyquist { .. }
                | Error::PilotCollision { .. }
                | Error::Schedule(_)
                | Error::Format(_)
                | Error::Json(_)
        )
    }
}
