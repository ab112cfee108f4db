use std::fmt;
use std::path::Path;

use glauberk_core::Error;

/// Documented exit codes.
pub mod code {
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const SPEC: u8 = 3;
    pub const CATALOG_CAP: u8 = 4;
    pub const IO: u8 = 5;
    pub const VERBOSITY: u8 = 6;
    pub const REGION_CAP: u8 = 7;
    pub const SWEEP_PARTIAL: u8 = 8;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: code::USAGE,
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            code: code::IO,
            msg: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::InvalidSpec(_)
            | Error::InvalidWindow(_)
            | Error::Disconnected { .. }
            | Error::IncompleteAssignment(_) => code::SPEC,
            Error::CatalogCap { .. } => code::CATALOG_CAP,
            Error::RegionCap { .. } => code::REGION_CAP,
            Error::InsufficientVerbosity(_) => code::VERBOSITY,
            Error::InvalidArgument(_) | Error::VertexNotInWindow(_) | Error::MissingCheckpoint => code::USAGE,
        };
        CliError { code, msg: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
