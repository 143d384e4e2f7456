use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the shift is empty")]
    EmptyShift,
    #[error("resource limit: {what} exceeded budget {budget}")]
    ResourceLimit { what: String, budget: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("block oracle is inconsistent: {0}")]
    InconsistentOracle(String),
    #[error("word of length {got} is shorter than the window {need}")]
    WindowTooShort { need: usize, got: usize },
    #[error("window {0} is not in the code's table")]
    UndefinedWindow(String),
    #[error("alphabets do not match: {0}")]
    AlphabetMismatch(String),
    #[error("word {0} has no preimage")]
    NoPreimage(String),
    #[error("orbit {0} has no preimage of equal least period")]
    NoEqualPeriodPreimage(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("word is not locally periodic at scale {0}")]
    NotLocallyPeriodic(usize),
    #[error("periodic extension is not unique: {0}")]
    AmbiguousExtension(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("stamp invalid: {0}")]
    StampInvalid(String),
    #[error("no periodic point outside the subshift up to period {0}")]
    NoExcludablePoint(usize),
    #[error("no synchronizing word found")]
    NoSynchronizingWord,
    #[error("parameter search exhausted: {0}")]
    ParameterSearchExhausted(String),
    #[error("counting hypothesis violated: {0}")]
    CountingHypothesisViolated(String),
    #[error("not a conjugacy: {0}")]
    NotConjugate(String),
    #[error("no connector of the required length: {0}")]
    ConnectorNotFound(String),
    #[error("synchronization failed: {0}")]
    SyncFailure(String),
    #[error("decoded data is inconsistent: {0}")]
    DecodeMismatch(String),
    #[error("instance is not embeddable: {0}")]
    NotEmbeddable(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn limit(what: impl Into<String>, budget: u64) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            budget,
        }
    }

    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, looking through stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self.root(), Error::ResourceLimit { .. })
    }
}

/// Enumeration budgets shared by every exhaustive procedure, plus the worker count for
/// the checks that split their work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_words: u64,
    pub max_states: usize,
    pub threads: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_words: 10_000_000,
            max_states: 1 << 16,
            threads: 1,
        }
    }
}

impl Budget {
    pub fn check_words(&self, used: u64, what: &str) -> Result<()> {
        if used > self.max_words {
            Err(Error::limit(what, self.max_words))
        } else {
            Ok(())
        }
    }

    pub fn check_states(&self, used: usize, what: &str) -> Result<()> {
        if used > self.max_states {
            Err(Error::limit(what, self.max_states as u64))
        } else {
            Ok(())
        }
    }
}
