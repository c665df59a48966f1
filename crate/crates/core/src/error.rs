use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radius or semi-axis must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("invalid surface parameters: {0}")]
    InvalidParameter(String),
    #[error("polyline is not closed (gap {0:.3e})")]
    OpenCurve(f64),
    #[error("revolution profile is not embedded in the half-plane rho > 0: {0}")]
    NonMonotoneProfile(String),
    #[error("chart parameter out of range: {0}")]
    ChartOutOfRange(String),
    #[error("grid does not belong to this surface")]
    GridMismatch,
    #[error("resolution {0} is below the minimum of 8 nodes")]
    ResolutionTooLow(usize),
    #[error("region has no closed-form Gaussian volume: {0}")]
    UnboundedRegionWithoutClosedForm(String),
    #[error("no sign change in bracket [{0}, {1}]")]
    NoBracket(f64, f64),
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("operation not supported on this surface: {0}")]
    UnsupportedSurface(String),
    #[error("surface is not a lambda-hypersurface (max residual {0:.3e})")]
    NotLambdaSurface(f64),
    #[error("degenerate trial function: {0}")]
    DegenerateTrial(String),
    #[error("normal derivative of the variation field is required")]
    MissingNormalDerivative,
    #[error("varied surface would self-intersect: {0}")]
    SelfIntersection(String),
    #[error("test function is not mean zero (weighted mean {0:.3e})")]
    NotMeanZero(f64),
    #[error("test function is not symmetric under x -> -x (defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("function is not an eigenfunction of L (residual {0:.3e})")]
    NotEigenfunction(f64),
    #[error("denominator integral vanishes: {0}")]
    ZeroDenominator(String),
    #[error("grid has no adjacency structure")]
    AdjacencyUnavailable,
    #[error("ODE step size underflow at arclength {0}")]
    StepUnderflow(f64),
    #[error("no closure root in lambda bracket [{0}, {1}]")]
    NoRootInBracket(f64, f64),
    #[error("closed curve is not convex (min curvature {0:.3e})")]
    NonConvexSolution(f64),
    #[error("step limit {0} reached before stationarity")]
    StepLimitExceeded(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o or format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
