use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid placement: {0}")]
    InvalidPlacement(&'static str),

    #[error("empty sampling range [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },

    #[error("Fresnel zone a = {a} m does not exceed the projected half focus distance u = {u} m")]
    ZoneOutOfDomain { a: f64, u: f64 },

    #[error("Fresnel zone a = {a} m does not reach the RIS plane")]
    ZoneBelowPlane { a: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("{n_sub} subarrays do not partition {rows} rows")]
    InvalidSubarrays { n_sub: usize, rows: usize },

    #[error("spectrum [{lo}, {hi}] Hz does not cover the band [{band_lo}, {band_hi}] Hz")]
    InsufficientCoverage {
        lo: f64,
        hi: f64,
        band_lo: f64,
        band_hi: f64,
    },

    #[error("the Fresnel fast path needs a zone phase profile, not per-element weights")]
    UnsupportedSource,

    #[error("invalid Gerchberg-Saxton parameters: {0}")]
    InvalidGsaParams(&'static str),

    #[error("normal equations stayed singular after ridge escalation")]
    SingularSystem,

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
}
