use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: {0}")]
    Convergence(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("derivative kind requires the order-m profile derivative")]
    MissingDerivative,
    #[error("expected {expected} boundary derivatives, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("shifted base requires an integer exponent, got {0}")]
    NonIntegerExponentWithShiftedBase(f64),
    #[error("evaluation point coincides with the kernel center")]
    DegenerateCenter,
    #[error("imaginary residual {residual:e} too large for value {value:e}")]
    ImagResidualTooLarge { value: f64, residual: f64 },
    #[error("derivative order {0} not supported")]
    UnsupportedOrder(usize),
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("step size underflow at t = {t}; reduce n or compare against the finite-difference reference")]
    StepSizeUnderflow { t: f64 },
    #[error("no convergence after refinement: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
