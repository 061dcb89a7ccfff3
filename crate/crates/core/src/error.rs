use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no concurrence")]
    ZeroVector,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("negative eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),
    #[error("trace deviates from one by {0:.3e}")]
    TraceDefect(f64),
    #[error("state is separable (concurrence {0:.3e}); no filter can produce entanglement")]
    Separable(f64),
    #[error(
        "lambda_{rank} = {lambda_n:.3e} vanishes: the state can only be driven to Bell diagonal form \
         asymptotically, with vanishing probability"
    )]
    LambdaNZero { rank: usize, lambda_n: f64 },
    #[error("degenerate completion geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid completion choice: {0}")]
    InvalidCompletion(String),
    #[error("operator is not a product (rank-one residual {0:.3e})")]
    NotProduct(f64),
    #[error("filter success probability {0:.3e} vanishes")]
    VanishingProbability(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}
