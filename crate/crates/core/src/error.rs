use thiserror::Error;

/// Errors raised by the pressure, measure and oracle computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected Z^{expected}, found Z^{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("exponent outside [0,1]: a[{index}] = {value}")]
    ExponentOutOfRange { index: usize, value: f64 },

    #[error("enumeration budget exceeded on a window of {sites} sites: up to {bound:.3e} patterns, budget {budget}")]
    Budget { sites: usize, bound: f64, budget: usize },

    #[error("window mismatch: {0}")]
    Window(String),

    #[error("empty cylinder: {0}")]
    EmptyCylinder(String),

    #[error("empty fiber at level {level}: {detail}")]
    EmptyFiber { level: usize, detail: String },

    #[error("inadmissible support: {0}")]
    InadmissibleSupport(String),

    #[error("family/system mismatch: {0}")]
    FamilyMismatch(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
