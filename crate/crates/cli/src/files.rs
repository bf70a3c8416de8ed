//! Parameter and design JSON files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rasch_doe::{BinarySetting, Design, InteractionModel, ParameterVector, Subset};

use crate::error::{CliError, Result};

/// `{"k": 3, "d": 2, "beta": {"": 0.0, "1": -0.3, "1,2": -0.1}}`; missing
/// subsets are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterFile {
    pub k: usize,
    pub d: usize,
    pub beta: BTreeMap<String, f64>,
}

impl ParameterFile {
    pub fn model(&self) -> Result<InteractionModel> {
        Ok(InteractionModel::new(self.k, self.d)?)
    }

    pub fn to_parameters(&self, m: &InteractionModel) -> Result<ParameterVector> {
        beta_from_map(m, &self.beta)
    }

    /// Every coefficient listed, in canonical subset order.
    pub fn from_parameters(m: &InteractionModel, theta: &ParameterVector) -> Self {
        let beta = m.subsets().iter().zip(theta.beta()).map(|(s, b)| (s.key(), *b)).collect();
        ParameterFile { k: m.k(), d: m.d(), beta }
    }
}

pub fn beta_from_map(m: &InteractionModel, beta: &BTreeMap<String, f64>) -> Result<ParameterVector> {
    let mut pairs = Vec::with_capacity(beta.len());
    for (key, value) in beta {
        let s = Subset::parse_key(key)?;
        if m.position(s).is_none() {
            return Err(CliError::usage(format!(
                "subset {{{key}}} is not a term of the k={}, d={} model",
                m.k(),
                m.d()
            )));
        }
        pairs.push((s, *value));
    }
    Ok(ParameterVector::from_pairs(m, pairs)?)
}

/// `{"k": 2, "weights": {"10": 0.5, "01": 0.5}}`, keys are bit strings with
/// `x_1` first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub k: usize,
    pub weights: BTreeMap<String, f64>,
}

impl DesignFile {
    pub fn to_design(&self) -> Result<Design> {
        let mut entries = Vec::with_capacity(self.weights.len());
        for (key, w) in &self.weights {
            let x: BinarySetting = key.parse()?;
            if x.k() != self.k {
                return Err(CliError::usage(format!(
                    "setting {key} has {} rules, file declares k = {}",
                    x.k(),
                    self.k
                )));
            }
            entries.push((x, *w));
        }
        Ok(Design::new(self.k, entries)?)
    }

    /// Weights are kept at full precision so that a written design reads back
    /// bit-for-bit.
    pub fn from_design(w: &Design) -> Self {
        DesignFile { k: w.k(), weights: w.iter().map(|(x, wx)| (x.to_string(), wx)).collect() }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
