use alloc::string::String;

pub type Result<T, E = GeoError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate tangent: 1 - sdot^2 = {0:e} is below the curvature floor")]
    DegenerateTangent(f64),
    #[error("integration failed at tau = {tau}: {reason}")]
    Integration { tau: f64, reason: &'static str },
    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),
    #[error("root finder failed: {0}")]
    Root(&'static str),
    #[error("design matrix is ill-conditioned (condition estimate {0:e})")]
    Conditioning(f64),
    #[error("invalid end: fitted leading coefficient a = {0} is not positive")]
    InvalidEnd(f64),
    #[error("point lies outside the graph domain")]
    OutOfDomain,
    #[error("not a horizon: boundary trace spread {0:e} exceeds tolerance")]
    NotAHorizon(f64),
    #[error("ellipticity failure: |D| = {0:e} at a horizon sample")]
    EllipticityFailure(f64),
    #[error("mass calibration spread {0:e} exceeds tolerance")]
    Calibration(f64),
    #[error("energy condition violated: mass profile decreases (rate {0:e})")]
    EnergyCondition(f64),
}

impl GeoError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GeoError::Domain(msg.into())
    }
}
