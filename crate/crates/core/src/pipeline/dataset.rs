use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::{Dataset, ModelKind};

/// Environment variable naming the directory searched for dataset files.
pub const DATA_DIR_ENV: &str = "BAYES_INFO_DATA_DIR";

/// Predictor columns expected in both datasets.
pub const N_PREDICTORS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    /// Eight numeric predictors and a `{0, 1}` diabetes label.
    Diabetes,
    /// Eight numeric predictors and log-cancer volume as the outcome.
    Prostate,
}

impl DatasetKind {
    pub fn model_kind(self) -> ModelKind {
        match self {
            Self::Diabetes => ModelKind::Logistic,
            Self::Prostate => ModelKind::Linear,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Self::Diabetes => "diabetes.csv",
            Self::Prostate => "prostate.csv",
        }
    }

    /// Training-set size used when none is configured.
    pub fn default_train_size(self) -> usize {
        match self {
            Self::Diabetes => 500,
            Self::Prostate => 75,
        }
    }

    /// `$BAYES_INFO_DATA_DIR/<file>`, or `data/<file>` when the variable is
    /// unset.
    pub fn default_path(self) -> PathBuf {
        let dir =
            std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("data"), PathBuf::from);
        dir.join(self.file_name())
    }
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diabetes" => Ok(Self::Diabetes),
            "prostate" => Ok(Self::Prostate),
            other => Err(Error::InvalidParameter(format!(
                "unknown dataset {other:?}; expected diabetes or prostate"
            ))),
        }
    }
}

/// Reads a comma-separated file with a header row: eight predictor columns
/// followed by the outcome.
pub fn load_dataset(path: &Path, kind: DatasetKind) -> Result<Dataset> {
    let schema = |message: String| Error::Schema {
        path: path.to_path_buf(),
        message,
    };
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers()?.clone();
    if header.len() != N_PREDICTORS + 1 {
        return Err(schema(format!(
            "expected {} columns ({N_PREDICTORS} predictors and the outcome), found {}",
            N_PREDICTORS + 1,
            header.len()
        )));
    }
    let names: Vec<String> = header
        .iter()
        .take(N_PREDICTORS)
        .map(str::to_owned)
        .collect();

    let mut values = Vec::new();
    let mut y = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        if record.len() != N_PREDICTORS + 1 {
            return Err(schema(format!(
                "line {line}: expected {} fields, found {}",
                N_PREDICTORS + 1,
                record.len()
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    schema(format!(
                        "line {line}, column {}: {cell:?} is not a number",
                        col + 1
                    ))
                })?;
            if col < N_PREDICTORS {
                values.push(v);
            } else {
                if kind == DatasetKind::Diabetes && v != 0.0 && v != 1.0 {
                    return Err(schema(format!("line {line}: label {cell:?} is not 0 or 1")));
                }
                y.push(v);
            }
        }
    }
    if y.is_empty() {
        return Err(schema("no data rows".into()));
    }
    let x = DMatrix::from_row_slice(y.len(), N_PREDICTORS, &values);
    Dataset::new(x, y, names)
}
