use thiserror::Error;

use crate::geometry::{Complex, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid circle domain: {}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("invalid disk: radius {0} must be positive and finite")]
    InvalidDisk(f64),

    #[error("map has a pole at {0}: image is the point at infinity")]
    Pole(Complex),

    #[error("degenerate map: determinant vanishes")]
    DegenerateMap,

    #[error("point {0} is not in the domain")]
    OutsideDomain(Complex),

    #[error("resolution insufficient: {0}")]
    ResolutionInsufficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {len} disks")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("word is not reduced: index {0} repeats")]
    NotReduced(usize),

    #[error("enumeration of {count} words exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: usize },

    #[error("map does not send circles to circles: {0}")]
    NotCircleRespecting(String),

    #[error("transboundary chain: {0}")]
    Chain(String),

    #[error("no information: modulus {mod_a} does not exceed threshold {threshold}")]
    NoInformation { mod_a: f64, threshold: f64 },

    #[error("invalid nesting: {0}")]
    InvalidNesting(String),

    #[error("dilatation-singular: |∂z f| estimate {0:e} vanishes")]
    DilatationSingular(f64),

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("map evaluation failed at {0}")]
    EvaluationFailed(Complex),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
