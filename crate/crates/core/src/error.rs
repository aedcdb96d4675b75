use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion norm deviates from unity by {0:.3e}")]
    InvalidQuaternion(f64),
    #[error("inertia matrix is not symmetric positive definite")]
    InvalidInertia,
    #[error("deputy at {dist:.3} m is not outside the inspection sphere ({radius:.3} m)")]
    InsideInspectionSphere { dist: f64, radius: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("propagation diverged: state contains non-finite components")]
    PropagationDiverged,
    #[error(
        "controller file version {found} not supported (expected {expected}); \
         retrain the controller with this release"
    )]
    ControllerVersion { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
