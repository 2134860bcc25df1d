use std::fmt::Display;

use serde_json::{json, Value};
use thiserror::Error;

/// Failure of a command, classified by who has to fix it.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration. Exit status 2.
    #[error("{stage}: {message}")]
    Usage { stage: &'static str, message: String },
    /// The command was well formed but its input or environment was not.
    /// Exit status 1.
    #[error("{stage}{}: {message}", doc_id.as_ref().map(|d| format!(" (document {d:?})")).unwrap_or_default())]
    Data {
        stage: &'static str,
        doc_id: Option<String>,
        message: String,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn usage(stage: &'static str, message: impl Display) -> Self {
        Self::Usage {
            stage,
            message: message.to_string(),
        }
    }

    pub fn data(stage: &'static str, message: impl Display) -> Self {
        Self::Data {
            stage,
            doc_id: None,
            message: message.to_string(),
        }
    }

    pub fn doc(stage: &'static str, doc_id: impl Into<String>, message: impl Display) -> Self {
        Self::Data {
            stage,
            doc_id: Some(doc_id.into()),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage { .. } => 2,
            Self::Data { .. } => 1,
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            Self::Usage { stage, .. } | Self::Data { stage, .. } => stage,
        }
    }

    /// `{"error": {"kind", "stage", "doc_id", "message"}}`, as written to
    /// stderr.
    pub fn to_json(&self) -> Value {
        let (kind, doc_id, message) = match self {
            Self::Usage { message, .. } => ("usage", None, message),
            Self::Data { doc_id, message, .. } => ("data", doc_id.as_ref(), message),
        };
        json!({
            "error": {
                "kind": kind,
                "stage": self.stage(),
                "doc_id": doc_id,
                "message": message,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_and_exit_codes() {
        let e = CliError::doc("anonymize", "d-1", "overlapping spans");
        assert_eq!(e.exit_code(), 1);
        let v = e.to_json();
        assert_eq!(v["error"]["kind"], "data");
        assert_eq!(v["error"]["stage"], "anonymize");
        assert_eq!(v["error"]["doc_id"], "d-1");
        assert!(e.to_string().contains("\"d-1\""));

        let u = CliError::usage("config", "unknown field");
        assert_eq!(u.exit_code(), 2);
        assert!(u.to_json()["error"]["doc_id"].is_null());
    }
}
