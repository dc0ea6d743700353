use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cylinder {index} has non-positive radius {radius}")]
    NonpositiveRadius { index: usize, radius: f64 },

    #[error("cylinders {first} and {second} overlap (center distance {distance}, radius sum {radius_sum})")]
    Overlap {
        first: usize,
        second: usize,
        distance: f64,
        radius_sum: f64,
    },

    #[error("flow computations require a strict domain; touching circles are only allowed for limit-set export")]
    LaxDomain,

    #[error("seed point lies inside or on cylinder {index}")]
    SeedInsideCylinder { index: usize },

    #[error("image tree needs {required} points at its deepest level, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("fixed-point equation of the composed inversion is degenerate")]
    DegenerateComposition,

    #[error("configuration is not well separated: (K-1)P^2 = {q} >= 1")]
    NonconvergentConfiguration { q: f64 },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid flow specification: {0}")]
    InvalidSpec(String),

    #[error("velocity is singular at a source position")]
    SingularPoint,

    #[error("contour passes within {distance} of a source")]
    ContourThroughSingularity { distance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
