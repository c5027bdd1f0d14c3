use thiserror::Error;

/// Errors raised by the coded-shift computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("unknown symbol {symbol:?} in word {word:?}")]
    UnknownSymbol { symbol: String, word: String },

    #[error("pattern must be nonempty")]
    EmptyPattern,

    #[error("enumeration of generators of length {n} failed: {reason}")]
    Enumeration { n: usize, reason: String },

    #[error("enumeration budget exceeded at length {n} ({count} generators, budget {budget})")]
    Budget { n: usize, count: String, budget: usize },

    #[error("tail bound violated at n = {n}: c(n) = {count} exceeds {bound}")]
    TailViolation { n: usize, count: String, bound: f64 },

    #[error("characteristic series diverges at lambda = {lambda} (growth rate {rho})")]
    Divergent { lambda: f64, rho: f64 },

    #[error("empty code after truncation to length {0}")]
    EmptyCode(usize),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error("unknown generator {0}")]
    UnknownGenerator(String),

    #[error("normalizer series is not certified finite (Gurevich condition fails): {0}")]
    Gurevich(String),

    #[error("unique representation is neither certified nor verified: {0}")]
    NotUniquelyRepresented(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("sampling mass shortfall {shortfall:e} exceeds {threshold:e}")]
    Shortfall { shortfall: f64, threshold: f64 },

    #[error("automaton state budget {budget} exceeded after {explored} states ({transitions} transitions)")]
    StateBudget {
        budget: usize,
        explored: usize,
        transitions: usize,
    },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("malformed generating-set document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name: name.to_string(),
        reason: reason.into(),
    }
}
