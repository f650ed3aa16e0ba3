use std::fmt::{self, Debug};

use citeworthy::corpus::CorpusError;
use citeworthy::dataset::DatasetError;
use citeworthy::eval::EvalError;
use citeworthy::models::ModelError;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit_code: i32,
    pub usage: Option<String>,
}

impl CliError {
    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.into(), message: message.into(), exit_code: EXIT_USAGE, usage: None }
    }

    pub fn runtime(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.into(), message: message.into(), exit_code: EXIT_RUNTIME, usage: None }
    }

    pub fn with_usage(mut self, usage: String) -> Self {
        self.usage = Some(usage);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.code,
            "message": self.message,
            "exit_code": self.exit_code,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error [{}]: {}", self.code, self.message)?;
        if let Some(usage) = &self.usage {
            write!(f, "\n\n{usage}")?;
        }
        Ok(())
    }
}

/// Variant name of an error enum, read off its `Debug` form.
fn variant<T: Debug>(e: &T) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect()
}

fn dataset_exit(e: &DatasetError) -> i32 {
    match e {
        DatasetError::BadRatios { .. } | DatasetError::BadWindowLength { .. } => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        Self { code: variant(&e), message: e.to_string(), exit_code: dataset_exit(&e), usage: None }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        Self::runtime(&variant(&e), e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        Self::runtime(&variant(&e), e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let message = e.to_string();
        match e {
            ModelError::Dataset(inner) => Self { message, ..inner.into() },
            ModelError::Eval(inner) => Self { message, ..inner.into() },
            ModelError::Nn(inner) => Self::runtime(&variant(&inner), message),
            ModelError::InvalidConfig(_) => Self::usage("InvalidConfig", message),
            other => Self::runtime(&variant(&other), message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::runtime("Io", e.to_string())
    }
}
