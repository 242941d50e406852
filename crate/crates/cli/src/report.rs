//! Report envelope, error classification and atomic output.

use std::fmt;
use std::io::Write;
use std::path::Path;

use gframemod_core::document::to_canonical_json;
use gframemod_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const PRECONDITION: u8 = 2;
    pub const VERIFICATION: u8 = 3;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => exit::USAGE,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::InvalidDimensions(_)
                | Error::InvalidParams(_)
                | Error::DimensionMismatch(_)
                | Error::LengthMismatch { .. }
                | Error::IndexOutOfRange { .. } => exit::USAGE,
                Error::InequalityNotVerified => exit::VERIFICATION,
                _ => exit::PRECONDITION,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub struct Report {
    pub command: &'static str,
    pub inputs_digest: String,
    pub results: Value,
    pub caveats: Vec<String>,
    pub seed: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let value = json!({
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "caveats": self.caveats,
            "seed": self.seed,
            "version": VERSION,
        });
        to_canonical_json(&value).expect("reports are plain JSON")
    }
}

/// SHA-256 over the input files, each prefixed by its byte length.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Writes `text` to `path` via a temporary file in the same directory, or to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(io)
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.write_all(b"\n").map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
