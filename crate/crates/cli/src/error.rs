use std::fmt;

use postedit_core::alignment::AlignmentError;
use postedit_core::corpus::CorpusError;
use postedit_core::corrector::{ExternalError, LmError};
use postedit_core::dataprep::DataprepError;
use postedit_core::gleu::GleuError;
use postedit_core::lexicon::LexiconError;
use postedit_core::rover::RoverError;
use postedit_core::synthesis::SynthesisError;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Validation,
    Io,
    Protocol,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Validation => 2,
            Kind::Io => 3,
            Kind::Protocol => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Kind::Validation => "validation",
            Kind::Io => "io",
            Kind::Protocol => "protocol",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Io,
            message: message.into(),
        }
    }

    pub fn protocol(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Protocol,
            message: message.into(),
        }
    }

    /// One JSON object for stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind.label(), "message": self.message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.message)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::Io(io) => CliError::io(io.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(io) => CliError::io(io.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<ExternalError> for CliError {
    fn from(e: ExternalError) -> Self {
        CliError::protocol(e.to_string())
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::validation(e.to_string())
            }
        })*
    };
}

validation_from!(
    AlignmentError,
    DataprepError,
    GleuError,
    LmError,
    RoverError,
    SynthesisError,
    toml::de::Error
);
