use std::fmt;

use serde_json::json;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or family mismatch.
    Usage(String),
    /// Missing or unreadable files.
    Io(String),
    /// Input that does not have the expected shape.
    Schema(String),
    /// Everything else, e.g. an undefined statistic.
    Runtime(String),
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Schema(_) => 4,
            Failure::Runtime(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Schema(_) => "schema",
            Failure::Runtime(_) => "runtime",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Schema(m) | Failure::Runtime(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind(), "code": self.code(), "message": self.message()}}).to_string()
    }

    pub fn io(context: impl fmt::Display, e: std::io::Error) -> Self {
        Failure::Io(format!("{context}: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<drivelife::Error> for Failure {
    fn from(e: drivelife::Error) -> Self {
        use drivelife::Error as E;
        let msg = e.to_string();
        match e {
            E::Argument(_) | E::Config(_) | E::Family { .. } => Failure::Usage(msg),
            E::Io(_) => Failure::Io(msg),
            E::Schema(_) | E::Csv(_) | E::Json(_) => Failure::Schema(msg),
            E::Empty(_) | E::Dimension { .. } | E::NonFinite(_) | E::Undefined(_) => Failure::Runtime(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Failure::Io(e.to_string())
        } else {
            Failure::Schema(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Schema(e.to_string())
        }
    }
}
