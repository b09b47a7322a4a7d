use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter ordering violated: {0}")]
    OrderingViolation(String),
    #[error("dimension n = {n} must exceed 4*sigma1 = {bound}")]
    DimensionTooSmall { n: u32, bound: f64 },
    #[error("rate case does not match parameters: {0}")]
    CaseMismatch(String),
    #[error("bisection failed: {0}")]
    BisectionFailure(String),

    #[error("jet order {0} too small for a variable jet")]
    OrderTooSmall(usize),
    #[error("jet order {order} exceeds supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("jet orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("constant term {0} not admissible for this composition")]
    SingularConstantTerm(f64),
    #[error("need {needed} outer derivatives, got {got}")]
    InsufficientOuterDerivs { needed: usize, got: usize },

    #[error("no closed form for order k = {0}")]
    UnsupportedOrder(usize),

    #[error("quadrature did not converge on [{lo:e}, {hi:e}]")]
    NonConvergence { lo: f64, hi: f64 },
    #[error("non-finite integrand value {value} at r = {r:e}")]
    NonFinite { r: f64, value: f64 },
    #[error("integrand singularity r^{exponent} not square integrable in dimension {n}")]
    SingularityTooStrong { exponent: f64, n: u32 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("lower-bound band requires data with P1 != 0")]
    RequiresNonzeroP1,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
