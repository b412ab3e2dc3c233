use thiserror::Error;

/// Broad failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input data.
    Data,
    /// A configured size, iteration or rejection budget was exceeded.
    Budget,
    /// A numerical procedure failed or a parameter is outside its domain.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("letter `{0}` is listed more than once")]
    DuplicateLetter(String),
    #[error("letter `{0}` cannot be independent of itself")]
    ReflexivePair(String),
    #[error("pair ({0}, {1}) is listed but ({1}, {0}) is not")]
    AsymmetricPair(String, String),
    #[error("independence pair mentions unknown letter `{0}`")]
    UnknownLetterInPair(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("alphabet has {0} letters, at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("clique count exceeds the cap of {cap}")]
    CliqueExplosion { cap: usize },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("layer {layer} is not a clique or breaks the Cartier-Foata chain")]
    InvalidTrace { layer: usize },

    #[error("principal root not found in (0, 1]")]
    NoRootFound,
    #[error("parameter {value} is outside {domain}")]
    ParameterOutOfRange { value: f64, domain: String },
    #[error("no convergence after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("clique #{index} has non-positive weight g = {value}")]
    DegenerateState { index: usize, value: f64 },
    #[error("operation requires an irreducible monoid, found {components} components")]
    ReducibleMonoid { components: usize },
    #[error("chain is not at the principal root (p = {p}, p0 = {p0})")]
    NotAtP0 { p: f64, p0: f64 },

    #[error("chain not absorbed after {0} steps")]
    IterationCap(u64),
    #[error("no trace of the requested length after {0} rejections")]
    RejectBudgetExhausted(u64),
    #[error("enumeration budget exceeded: {count} traces > {budget}")]
    BudgetExceeded { count: String, budget: u64 },
    #[error("expected count {expected} per cell is below 5")]
    InsufficientSamples { expected: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            DuplicateLetter(_)
            | ReflexivePair(_)
            | AsymmetricPair(..)
            | UnknownLetterInPair(_)
            | UnknownLetter(_)
            | AlphabetTooLarge(_)
            | EmptyAlphabet
            | Parse(_)
            | InvalidTrace { .. }
            | ReducibleMonoid { .. } => ErrorKind::Data,
            CliqueExplosion { .. }
            | IterationCap(_)
            | RejectBudgetExhausted(_)
            | BudgetExceeded { .. }
            | InsufficientSamples { .. } => ErrorKind::Budget,
            NoRootFound
            | ParameterOutOfRange { .. }
            | ConvergenceFailure { .. }
            | DegenerateState { .. }
            | NotAtP0 { .. } => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
