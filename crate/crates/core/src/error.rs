use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::Expr;

/// Failures while turning text into an [`Expr`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected one of {}", expected.join(", "))]
    Syntax { position: usize, expected: Vec<&'static str> },
    #[error("unknown identifier `{name}` at offset {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("function `{function}` takes exactly one argument, found {found}")]
    Arity { function: &'static str, found: usize },
    #[error("exponent at offset {position} must be constant (no coordinates)")]
    NonConstantExponent { position: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    LogNonPositive,
    SqrtNegative,
    DivisionByZero,
    NegativeBase,
    NonFinite,
}

impl core::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            DomainKind::LogNonPositive => "log of a non-positive value",
            DomainKind::SqrtNegative => "sqrt of a negative value",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::NegativeBase => "non-integer power of a negative value",
            DomainKind::NonFinite => "non-finite value",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("domain error: {kind} in `{}`", subexpr.display_indexed())]
    Domain { kind: DomainKind, subexpr: Expr },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("not an almost Golden structure: Golden relation residual {residual:?} at {point:?}")]
    NotGolden { point: Vec<f64>, residual: f64 },
    #[error("not an almost product structure: J^2 - I residual {residual:?} at {point:?}")]
    NotAlmostProduct { point: Vec<f64>, residual: f64 },
    #[error("metric is not pure with respect to the structure: purity residual {residual:?} at {point:?}")]
    NotPure { point: Vec<f64>, residual: f64 },
    #[error("metric is not symmetric: g - g^T residual {residual:?} at {point:?}")]
    AsymmetricMetric { point: Vec<f64>, residual: f64 },
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },
    #[error("singular metric at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("eigen-rank of the structure is not constant: {first:?} vs {other:?}")]
    NonConstantRank { first: (usize, usize), other: (usize, usize) },
    #[error("degenerate eigenspace at {point:?}")]
    DegenerateEigenspace { point: Vec<f64> },
    #[error("derivation law is not torsion free (torsion {residual:e})")]
    NotTorsionFree { residual: f64 },
    #[error("well adapted solve residual {residual:e} too large at {point:?}")]
    SolverResidualTooLarge { point: Vec<f64>, residual: f64 },
    #[error("well adapted system has a {nullity}-dimensional nullspace at {point:?}")]
    NonUniqueSolution { point: Vec<f64>, nullity: usize },
    #[error("pointwise-solved field cannot be differentiated exactly")]
    NotDifferentiable,
    #[error("Lie algebra basis is linearly dependent")]
    DependentBasis,
    #[error("invalid rank: {0}")]
    InvalidRank(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
