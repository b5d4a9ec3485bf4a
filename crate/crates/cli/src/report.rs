//! The JSON run report and the inputs it digests.

use std::path::Path;

use amas_core::compose::{Model, TransitionGraph};
use amas_core::{bundled, ModelKind};
use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A source text together with where it came from.
#[derive(Clone, Debug)]
pub struct Input {
    pub name: String,
    pub origin: &'static str,
    pub text: String,
}

impl Input {
    /// A file path, or failing that a bundled model name (`conference`,
    /// `voting`, `voting_explicit`, `chains:K:LEN`).
    pub fn model(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.exists() {
            return Self::file(arg);
        }
        if let Some(src) = bundled::by_name(arg) {
            return Ok(Input {
                name: arg.to_string(),
                origin: "bundled",
                text: src.to_string(),
            });
        }
        if let Some(rest) = arg.strip_prefix("chains:") {
            let parsed = rest
                .split_once(':')
                .and_then(|(k, len)| Some((k.parse::<usize>().ok()?, len.parse::<usize>().ok()?)));
            match parsed {
                Some((k, len)) if k > 0 && len > 0 => {
                    return Ok(Input {
                        name: arg.to_string(),
                        origin: "bundled",
                        text: bundled::chains(k, len),
                    })
                }
                _ => bail!("`{arg}`: expected chains:K:LEN with positive K and LEN"),
            }
        }
        bail!("`{arg}` is neither a readable file nor a bundled model (conference, voting, voting_explicit, chains:K:LEN)")
    }

    pub fn file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))?;
        Ok(Input {
            name: path.to_string(),
            origin: "file",
            text,
        })
    }

    pub fn digest(&self) -> InputDigest {
        InputDigest {
            name: self.name.clone(),
            origin: self.origin,
            sha256: hex::encode(Sha256::digest(self.text.as_bytes())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub origin: &'static str,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelStats {
    pub kind: ModelKind,
    pub agents: usize,
    pub states: usize,
    pub transitions: usize,
    pub epsilon_states: Vec<String>,
}

impl ModelStats {
    pub fn of(model: &Model) -> Self {
        let mut epsilon_states: Vec<String> = model.epsilon_states().iter().map(|&s| model.state_name(s)).collect();
        epsilon_states.sort();
        ModelStats {
            kind: model.kind(),
            agents: model.amas().agents().iter().filter(|a| !a.is_auxiliary()).count(),
            states: model.num_states(),
            transitions: (0..model.num_states()).map(|s| model.successors(s).len()).sum(),
            epsilon_states,
        }
    }
}

/// Everything printed on stdout. Field order is fixed, and nothing depends on
/// the clock unless timing was requested.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub result: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            seed: None,
            model: None,
            warnings: Vec::new(),
            result: serde_json::Value::Null,
            timing_ms: None,
        }
    }
}
