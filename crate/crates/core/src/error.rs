use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VaesError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("matrix is not normal (relative defect {0:.3e})")]
    NotNormal(f64),

    #[error("matrix is defective: eigenvalue {eigenvalue} has algebraic multiplicity {algebraic}, geometric {geometric}")]
    Defective {
        eigenvalue: String,
        algebraic: usize,
        geometric: usize,
    },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation tail {tail:.3e} exceeds bound {bound:.1e} ({context}); increase the Fock dimension")]
    Tail {
        tail: f64,
        bound: f64,
        context: String,
    },
}

pub type Result<T> = std::result::Result<T, VaesError>;
