use num_complex::Complex64;
use thiserror::Error;

use crate::zerofind::Unresolved;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty boundary set")]
    EmptyBoundarySet,

    #[error("boundary point {0} is not on the unit circle")]
    NotUnitModulus(Complex64),

    #[error("boundary point {0} is listed twice")]
    DuplicatePoint(Complex64),

    #[error("{exponents} exponents given for {points} points")]
    ExponentCount { points: usize, exponents: usize },

    #[error("exponent {0} must be nonnegative and finite")]
    InvalidExponent(f64),

    #[error("boundary sets intersect at {0}")]
    SetsIntersect(Complex64),

    #[error("singular power: 0 raised to {0}")]
    SingularPower(f64),

    #[error("aperture must exceed 1, got {0}")]
    InvalidAperture(f64),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(Complex64),

    #[error("pole of the map at {0}")]
    Pole(Complex64),

    #[error("point {0} lies on the cut [0, +inf)")]
    OnCut(Complex64),

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("zero near contour, subdivide (min |f| = {min_abs:e})")]
    ZeroNearContour { min_abs: f64 },

    #[error("quadrature unresolved, increase n_points (residual {residual:.3} at n = {n_points})")]
    QuadratureUnresolved { residual: f64, n_points: usize },

    #[error("domain mismatch: {left:?} vs {right:?}")]
    DomainMismatch {
        left: crate::zerofind::DomainTag,
        right: crate::zerofind::DomainTag,
    },

    #[error("evaluation at declared singular point {0}")]
    SingularPoint(Complex64),

    #[error("zero {0} sits on a singular point of the weight")]
    SingularWeight(Complex64),

    #[error("normalize first: f vanishes at the anchor point")]
    NormalizeFirst,

    #[error("a zero lies on the integration circle |z| = {0}")]
    ZeroOnCircle(f64),

    #[error("non-finite value at {0}")]
    NonFinite(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{} unresolved cell(s) after subdivision", .0.cells.len())]
    Unresolved(Box<Unresolved>),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
