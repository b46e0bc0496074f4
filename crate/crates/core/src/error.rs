use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Ei overflows to -infinity at x = {0:e}")]
    OverflowToNegInfinity(f64),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("singular linear system at pivot {pivot}")]
    SingularSystem { pivot: usize },

    #[error("degenerate importance in cells {cells:?}")]
    DegenerateImportance { cells: Vec<(usize, usize)> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("quadrature did not converge on [{a:e}, {b:e}] (estimate {estimate:e})")]
    QuadratureNonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("need at least 2 samples, got {0}")]
    InsufficientSamples(u64),

    #[error("history {history} exceeded {limit} events")]
    EventLoopStall { history: u64, limit: u64 },

    #[error("point r = {0:e} sits on the source shell")]
    SingularPoint(f64),
}
