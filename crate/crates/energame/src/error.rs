use crate::format::edge_list::EdgeListError;
use crate::format::graph6::Graph6Error;
use thiserror::Error;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitCode {
    Ok = 0,
    /// A theorem-backed check failed.
    GuaranteedFailure = 1,
    Usage = 2,
    /// A conjecture-backed check produced a counterexample that survived
    /// re-verification.
    ConjectureCounterexample = 3,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Combines two statuses; a guaranteed failure outranks a conjecture
    /// counterexample.
    pub fn merge(self, other: ExitCode) -> ExitCode {
        let rank = |c: ExitCode| match c {
            ExitCode::Ok => 0,
            ExitCode::ConjectureCounterexample => 1,
            ExitCode::GuaranteedFailure => 2,
            ExitCode::Usage => 3,
        };
        if rank(other) > rank(self) { other } else { self }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    EdgeList {
        path: String,
        #[source]
        source: EdgeListError,
    },
    #[error("graph6: {0}")]
    Graph6(#[from] Graph6Error),
    #[error(transparent)]
    Core(#[from] energame_core::Error),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    /// Every error that stops a command before it produces a verdict is
    /// reported as a usage error.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::Usage
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
