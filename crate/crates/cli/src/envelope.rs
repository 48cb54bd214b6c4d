use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A digest of one input file, tagged with its role in the command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub sha256: String,
}

/// The JSON document printed by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    /// Scalar arguments, enough to repeat the computation given the inputs.
    pub params: Map<String, Value>,
    /// `yes`, `no` or `value`.
    pub answer: String,
    pub witness: Value,
    pub version: String,
}

/// A command with its inputs loaded.
pub struct Invocation {
    pub command: String,
    pub params: Map<String, Value>,
    pub inputs: Vec<(String, PathBuf, String)>,
}

impl Invocation {
    pub fn new(command: &str) -> Self {
        Invocation { command: command.to_string(), params: Map::new(), inputs: Vec::new() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn input(mut self, role: &str, path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push((role.to_string(), path.to_path_buf(), text));
        Ok(self)
    }

    /// Contents of the input with this role.
    pub fn text(&self, role: &str) -> &str {
        &self.inputs.iter().find(|i| i.0 == role).expect("role registered by the command").2
    }

    pub fn get<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<T, CliError> {
        let v = self.params.get(key).ok_or_else(|| CliError::Input(format!("missing parameter {key}")))?;
        serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("parameter {key}: {e}")))
    }

    pub fn digests(&self) -> Vec<InputDigest> {
        self.inputs.iter().map(|(role, _, text)| InputDigest { role: role.clone(), sha256: sha256_hex(text) }).collect()
    }

    pub fn envelope(&self, answer: &str, witness: Value) -> Envelope {
        Envelope {
            command: self.command.clone(),
            params: self.params.clone(),
            inputs: self.digests(),
            answer: answer.to_string(),
            witness,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
