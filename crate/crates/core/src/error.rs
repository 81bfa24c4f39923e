use thiserror::Error;

/// Errors raised by the algebra, geometry and I/O layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("operation undefined on the zero series")]
    ZeroSeries,
    #[error("y0 is not a root of E(0, y)")]
    NotARoot,
    #[error("E_y(0, y0) vanishes; supply the series coefficients directly")]
    SingularBranch,
    #[error("axis count {m} must be smaller than the variable count {n}")]
    BadAxisCount { m: usize, n: usize },
    #[error("section image has a term at {exponent:?} outside the lattice of C'")]
    SupportEscape { exponent: Vec<u32> },
    #[error("automaton closure exceeded {max_states} states")]
    StateBudgetExceeded {
        max_states: usize,
        /// Output values of the states discovered before the budget ran out.
        partial_outputs: Vec<Vec<u64>>,
    },
    #[error("no annihilator found within the search budgets")]
    NotFound,
    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("claimed relation fails at degree {degree}")]
    RelationCheckFailed { degree: usize },
    #[error("interrupted")]
    Interrupted,
}

impl Error {
    /// Stable machine-readable code used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrimeCharacteristic(_) => "NonPrimeCharacteristic",
            Error::ReducibleModulus { .. } => "ReducibleModulus",
            Error::MalformedInput(_) => "MalformedInput",
            Error::VariableCountMismatch { .. } => "VariableCountMismatch",
            Error::FieldMismatch => "FieldMismatch",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::ZeroSeries => "ZeroSeries",
            Error::NotARoot => "NotARoot",
            Error::SingularBranch => "SingularBranch",
            Error::BadAxisCount { .. } => "BadAxisCount",
            Error::SupportEscape { .. } => "SupportEscape",
            Error::StateBudgetExceeded { .. } => "StateBudgetExceeded",
            Error::NotFound => "NotFound",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::RelationCheckFailed { .. } => "RelationCheckFailed",
            Error::Interrupted => "Interrupted",
        }
    }

    /// True for errors caused by ill-formed input rather than by the mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_)
                | Error::NonPrimeCharacteristic(_)
                | Error::ReducibleModulus { .. }
                | Error::VariableCountMismatch { .. }
                | Error::FieldMismatch
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
