use std::path::PathBuf;

use mobplan_core::domain::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{what}: {message} at `{path}` (line {line}, column {column})")]
    Schema { what: &'static str, path: String, line: usize, column: usize, message: String },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("problem lists task `{0}` more than once")]
    DuplicateTask(String),
    #[error("plan line {line}: unknown action `{keyword}`")]
    UnknownAction { line: usize, keyword: String },
    #[error("plan line {line}: {message}")]
    PlanSyntax { line: usize, message: String },
}

/// Deserializes JSON, reporting the document path of any schema error.
pub(crate) fn from_json<T: serde::de::DeserializeOwned>(what: &'static str, text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        IoError::Schema {
            what,
            path,
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }
    })?;
    de.end().map_err(|e| IoError::Schema {
        what,
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    Ok(value)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}
