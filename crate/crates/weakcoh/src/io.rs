//! State files: `{"d_a": 2, "d_b": 2, "matrix": [[re, im], ...]}`, row-major.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use weakcoh_core::states::DensityMatrix;
use weakcoh_core::{Complex64, ComplexMatrix};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d_a: usize,
    pub d_b: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self { d_a: rho.d_a(), d_b: rho.d_b(), matrix: rho.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn into_state(self, path: &Path) -> Result<DensityMatrix> {
        let invalid = |source| CliError::InvalidState { path: path.to_path_buf(), source };
        let entries: Vec<Complex64> = self.matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let dim = self.d_a * self.d_b;
        if entries.len() != dim * dim {
            return Err(CliError::Schema {
                path: path.to_path_buf(),
                at: "matrix".into(),
                message: format!("expected {} entries for d_a·d_b = {dim}, found {}", dim * dim, entries.len()),
            });
        }
        let m = ComplexMatrix::from_row_major(entries).map_err(invalid)?;
        DensityMatrix::new(m, self.d_a, self.d_b).map_err(invalid)
    }
}

pub fn parse_state(text: &str, path: &Path) -> Result<DensityMatrix> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: StateFile = serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    file.into_state(path)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_state(&text, path)
}

/// Writes `contents` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, contents).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
