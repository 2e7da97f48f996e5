use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qrainbow::ChainSpec;

use crate::error::{CliError, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Chain description as accepted on input; `pairs` may be omitted.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecInput {
    #[serde(default)]
    pub pairs: Option<usize>,
    #[serde(rename = "J")]
    pub couplings: Vec<f64>,
    #[serde(rename = "h")]
    pub fields: Vec<f64>,
}

impl SpecInput {
    pub fn into_spec(self) -> Result<ChainSpec> {
        if let Some(n) = self.pairs {
            if n != self.couplings.len() {
                return Err(CliError::Input(format!(
                    "\"pairs\" is {n} but {} couplings were given",
                    self.couplings.len()
                )));
            }
        }
        ChainSpec::new(self.couplings, self.fields).map_err(CliError::from_core)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_owned(), source })
}

/// Write to `out` when given, stdout otherwise.
pub fn emit(out: Option<&PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
        }
    }
}
