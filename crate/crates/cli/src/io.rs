use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Exhaustive search found nothing.
    #[error("{0}")]
    None(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::None(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(
    ipr_core::matrix::MatrixError,
    ipr_core::coloring::ColoringError,
    ipr_core::numeric::NumericError,
    ipr_core::construct::ConstructError,
    std::io::Error
);

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Pretty JSON to `path` (written to a sibling temporary file, then renamed
/// into place) or to standard output.
pub fn emit<T: Serialize + ?Sized>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    text.push('\n');
    match path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            fs::write(&tmp, text)?;
            fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_replaces_target_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        std::fs::write(&path, "old").unwrap();
        emit(&vec!["1/2"], Some(&path)).unwrap();
        let back: Vec<String> = read_json(&path).unwrap();
        assert_eq!(back, ["1/2"]);
        assert!(!dir.path().join("out.json.partial").exists());
    }

    #[test]
    fn codes() {
        assert_eq!(CliError::None(String::new()).code(), 1);
        assert_eq!(CliError::Budget(String::new()).code(), 2);
        assert_eq!(CliError::Invalid(String::new()).code(), 3);
        let missing: Result<Vec<String>, _> = read_json(Path::new("/nonexistent/x.json"));
        assert_eq!(missing.unwrap_err().code(), 3);
    }
}
