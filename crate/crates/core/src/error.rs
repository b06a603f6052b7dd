use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{scheme} is infeasible for M_R = {m_r}, M_T = {m_t}")]
    SchemeInfeasible {
        scheme: &'static str,
        m_r: usize,
        m_t: usize,
    },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
