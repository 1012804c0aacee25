use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is outside its domain (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("cdf is not monotone non-decreasing near x = {x} ({before} then {after})")]
    NonMonotoneCdf { x: f64, before: f64, after: f64 },

    #[error("stability condition violated at theta = {theta:e}: ln(p_a q) = {log_load}")]
    StabilityViolation { theta: f64, log_load: f64 },

    #[error("no theta in the scanned range satisfies p_a(theta) q(theta) < 1")]
    Unstable,

    #[error("{what} did not converge: {detail}")]
    NotConverged { what: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
