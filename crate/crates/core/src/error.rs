use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument {value} outside of domain (|x| <= {bound})")]
    Domain { value: f64, bound: f64 },

    #[error("duplicate interpolation nodes at positions {first} and {second}")]
    DuplicateNodes { first: usize, second: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("singular linear system (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("rank-deficient system: rank {rank} of {columns} columns (condition estimate {condition:.3e})")]
    RankDeficient {
        rank: usize,
        columns: usize,
        condition: f64,
    },

    #[error("implicit inner solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    InnerSolve { iterations: usize, residual: f64 },

    #[error("multistep scheme needs {needed} history levels, only {available} available")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("blow-up detected at step {step} (t = {time}): |u| = {magnitude:.3e}")]
    BlowUp {
        step: usize,
        time: f64,
        magnitude: f64,
    },

    #[error("non-finite value in {context} at step {step}")]
    NonFinite { context: String, step: usize },

    #[error("imaginary residue {residue:.3e} after inverse transform exceeds tolerance")]
    NotReal { residue: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("series truncation bound {bound:.3e} still above tolerance after {terms} terms")]
    SeriesTruncation { terms: usize, bound: f64 },

    #[error("unknown experiment `{name}`; valid names: {}", valid.join(", "))]
    UnknownExperiment { name: String, valid: Vec<String> },

    #[error("experiment `{name}` failed: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line runner: 2 for bad
    /// arguments, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::UnknownExperiment { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Experiment { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
