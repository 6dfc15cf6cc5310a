use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-finite value in cell {cell}")]
    NonFinite { cell: usize },
    #[error("invalid mesh: {0}")]
    Mesh(&'static str),
    #[error("invalid penalty configuration: {0}")]
    Penalty(&'static str),
    #[error("invalid boundary specification: {0}")]
    Boundary(&'static str),
    #[error("invalid run configuration: {0}")]
    Config(&'static str),
    #[error("run with eta = {eta} blew up at t = {t}")]
    Blowup { eta: f64, t: f64 },
}
