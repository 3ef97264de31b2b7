use std::path::Path;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: row {row}, column {column:?}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("column {name:?} is constant")]
    ConstantColumn { name: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("column {name:?}: {source}")]
    Column {
        name: String,
        #[source]
        source: scalemix::Error,
    },

    #[error(transparent)]
    Model(#[from] scalemix::Error),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse_error",
            CliError::ConstantColumn { .. } => "constant_column",
            CliError::SchemaMismatch(_) => "schema_mismatch",
            CliError::Config(_) => "invalid_config",
            CliError::Column { .. } => "column_error",
            CliError::Model(_) => "model_error",
            CliError::Io { .. } => "io_error",
        }
    }

    /// One-line JSON error report.
    pub fn report(&self) -> String {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            CliError::Parse { row, column, .. } => {
                v["row"] = json!(row);
                v["column"] = json!(column);
            }
            CliError::ConstantColumn { name } | CliError::Column { name, .. } => {
                v["column"] = json!(name);
            }
            _ => {}
        }
        v.to_string()
    }
}
