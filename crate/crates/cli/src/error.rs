use std::fmt;

use hokcov::ErrorCategory;

/// A front-end error: a category that selects the exit status, plus a
/// one-line message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub category: ErrorCategory,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            category: ErrorCategory::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            category: ErrorCategory::Data,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        }
    }

    pub fn category_name(&self) -> &'static str {
        match self.category {
            ErrorCategory::Config => "config",
            ErrorCategory::Data => "data",
            ErrorCategory::Numerical => "numerical",
        }
    }
}

impl fmt::Display for CliError {
    /// `error[category]: message` on a single line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace('\n', " ");
        write!(f, "error[{}]: {}", self.category_name(), one_line)
    }
}

impl std::error::Error for CliError {}

impl From<hokcov::Error> for CliError {
    fn from(e: hokcov::Error) -> Self {
        Self {
            category: e.category(),
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
