use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Record of one invocation, written next to its outputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, program name excluded.
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub flags: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        RunManifest {
            command: command.into(),
            args: args.to_vec(),
            version: env!("CARGO_PKG_VERSION").into(),
            threads: 1,
            ..Default::default()
        }
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) {
        self.flags.insert(name.into(), value.to_string());
    }
}
