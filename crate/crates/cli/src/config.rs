//! Parameter and configuration files, report envelopes and output hashing.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use autog::automodel::ModelParams;
use autog::io::read_text;
use autog::study::StudyConfig;
use autog::{Error, Result};

/// Wrapper written around every JSON result: tool version, seed and the
/// hash of the effective configuration. No timestamps, so reruns are
/// byte-identical.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, seed: u64, config_hash: String, result: T) -> Self {
        Self { tool: "autog", version: env!("CARGO_PKG_VERSION"), command, seed, config_hash, result }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 of the canonical JSON form of a configuration.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn write_file(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, contents)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Reads a JSON or TOML file into a JSON value (TOML when the extension is
/// `.toml`).
fn read_structured(path: &Path) -> Result<serde_json::Value> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str::<serde_json::Value>(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// `baseline`, `sharp-null`, or a JSON/TOML parameter file.
pub fn load_params(spec: &str) -> Result<ModelParams> {
    match spec {
        "baseline" => Ok(ModelParams::baseline()),
        "sharp-null" => Ok(ModelParams::sharp_null()),
        path => ModelParams::from_json(&read_structured(Path::new(path))?.to_string()),
    }
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Overlays the keys present in a config file onto `base`.
pub fn load_study_config(path: &Path, base: StudyConfig) -> Result<StudyConfig> {
    let mut v = serde_json::to_value(&base).expect("config serializes");
    merge(&mut v, read_structured(path)?);
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overrides_nested_keys_only() {
        let mut base = serde_json::json!({"a": 1, "b": {"c": 2, "d": 3}});
        merge(&mut base, serde_json::json!({"b": {"d": 4}, "e": 5}));
        assert_eq!(base, serde_json::json!({"a": 1, "b": {"c": 2, "d": 4}, "e": 5}));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash(&[1, 2]), config_hash(&[1, 2]));
        assert_ne!(config_hash(&[1, 2]), config_hash(&[2, 1]));
        assert_eq!(config_hash(&0).len(), 64);
    }
}
