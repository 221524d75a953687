//! Run metadata written next to every output as `<output>.meta.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use discrim::association::LOG_BASE;

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub corpus_sha256: Option<String>,
    pub window: Option<usize>,
    pub log_base: f64,
    pub thresholds: BTreeMap<&'static str, serde_json::Value>,
    pub seeds: BTreeMap<&'static str, u64>,
    /// Input path → sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub settings: BTreeMap<&'static str, serde_json::Value>,
}

impl RunMeta {
    pub fn new(command: &'static str) -> Self {
        RunMeta {
            tool: "discrim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            corpus_sha256: None,
            window: None,
            log_base: LOG_BASE,
            thresholds: BTreeMap::new(),
            seeds: BTreeMap::new(),
            inputs: BTreeMap::new(),
            settings: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<String> {
        let hash = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), hash.clone());
        Ok(hash)
    }

    pub fn corpus(&mut self, path: &Path) -> Result<()> {
        self.corpus_sha256 = Some(self.input(path)?);
        Ok(())
    }

    /// Takes the corpus hash and window from an upstream artifact's
    /// metadata when this run did not read the corpus itself.
    pub fn inherit(&mut self, artifact: &Path) {
        let Ok(text) = fs::read_to_string(meta_path(artifact)) else {
            return;
        };
        let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) else {
            return;
        };
        if self.corpus_sha256.is_none() {
            self.corpus_sha256 = v["corpus_sha256"].as_str().map(str::to_string);
        }
        if self.window.is_none() {
            self.window = v["window"].as_u64().map(|w| w as usize);
        }
    }

    pub fn threshold(&mut self, name: &'static str, v: impl Serialize) {
        self.thresholds
            .insert(name, serde_json::to_value(v).expect("serializable"));
    }

    pub fn setting(&mut self, name: &'static str, v: impl Serialize) {
        self.settings
            .insert(name, serde_json::to_value(v).expect("serializable"));
    }

    pub fn write(&self, output: &Path) -> Result<()> {
        let path = meta_path(output);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn meta_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}
