use crate::Complex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("exponent at position {position} is not a nonnegative integer: `{found}`")]
    BadExponent { position: usize, found: String },

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("function has a pole at {0}")]
    Pole(Complex),

    #[error("series division by a denominator with vanishing constant term at {0}")]
    SeriesPole(Complex),

    #[error("function is not rational")]
    NotRational,

    #[error("rational function has degree {0}, at least 2 is required")]
    DegreeTooSmall(usize),

    #[error(
        "rational type ({numerator}, {denominator}) is not covered by the global winding rule"
    )]
    UncoveredType {
        numerator: usize,
        denominator: usize,
    },

    #[error("f vanishes on the curve near {0}")]
    ZeroOnCurve(Complex),

    #[error("non-finite value of f on the curve near {0}")]
    NonFiniteOnCurve(Complex),

    #[error("argument tracking exceeded the bisection cap near {0}; move the curve")]
    BisectionCap(Complex),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("zero at {0} is not isolated")]
    NonIsolatedZero(Complex),

    #[error("index at {0} did not stabilize while shrinking the circle")]
    IndexUnstable(Complex),

    #[error("point {0} is singular; the regular rule does not apply")]
    SingularPoint(Complex),

    #[error("series precondition violated: {0}")]
    SeriesPrecondition(String),

    #[error("all coefficients a_2..a_{0} vanish; raise the order or use the numeric index")]
    AllCoefficientsVanish(usize),

    #[error("binomial coefficient must be nonzero")]
    ZeroBinomialCoefficient,

    #[error("point {0} is neither a zero of f nor a pole of h")]
    NotExceptional(Complex),

    #[error("exceptional point {0} lies on the curve")]
    PointOnCurve(Complex),

    #[error("indeterminate verdict at {0} has no numeric fallback value")]
    UnresolvedIndeterminate(Complex),

    #[error("invalid search region: {0}")]
    InvalidRegion(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("color cycle count failed: {0}")]
    ColorCycle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
