//! Reproducibility metadata for emitted artifacts.
//!
//! Every file the command-line tool writes — CSV series, JSON reports, SVG
//! plots — carries the same metadata block: tool name and version, the master
//! seed, a SHA-256 digest of every input file, and (unless suppressed) the
//! wall-clock timestamp. With the timestamp suppressed, rerunning the same
//! command on the same inputs reproduces every artifact byte for byte.
//!
//! - CSV artifacts start with `# key: value` comment lines.
//! - JSON artifacts are an object whose first key is `"meta"`.
//! - SVG artifacts start with an XML comment.

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Digest of one input file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    /// Short name (usually the file name).
    pub name: String,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

/// Metadata stamped into every artifact of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    /// Tool name and version.
    pub tool: String,
    /// Master seed for the run.
    pub seed: u64,
    /// Digests of the input files, in the order they were registered.
    pub inputs: Vec<InputDigest>,
    /// Emission time; `None` when suppressed for byte-stable output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
}

impl RunMeta {
    /// Metadata with no inputs and no timestamp.
    pub fn new(seed: u64) -> Self {
        RunMeta {
            tool: concat!("reviewlab ", env!("CARGO_PKG_VERSION")).to_string(),
            seed,
            inputs: Vec::new(),
            timestamp: None,
        }
    }

    /// Stamps the current time.
    pub fn with_timestamp(mut self) -> Self {
        self.timestamp = Some(Utc::now());
        self
    }

    /// Registers an input file: digests its bytes under its file name.
    pub fn add_input(&mut self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let sha256: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let name = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.inputs.push(InputDigest { name, sha256 });
        Ok(())
    }

    fn timestamp_string(&self) -> Option<String> {
        self.timestamp.map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    /// `# key: value` comment lines for CSV artifacts (with trailing newline).
    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool: {}\n", self.tool));
        out.push_str(&format!("# seed: {}\n", self.seed));
        for input in &self.inputs {
            out.push_str(&format!("# input: {} sha256={}\n", input.name, input.sha256));
        }
        if let Some(ts) = self.timestamp_string() {
            out.push_str(&format!("# timestamp: {ts}\n"));
        }
        out
    }

    /// XML comment for SVG artifacts (with trailing newline).
    pub fn svg_comment(&self) -> String {
        let mut parts = vec![format!("tool: {}", self.tool), format!("seed: {}", self.seed)];
        for input in &self.inputs {
            parts.push(format!("input: {} sha256={}", input.name, input.sha256));
        }
        if let Some(ts) = self.timestamp_string() {
            parts.push(format!("timestamp: {ts}"));
        }
        format!("<!-- {} -->\n", parts.join(" | "))
    }
}

/// A CSV artifact: metadata comment lines, then the CSV body.
pub fn csv_with_meta(meta: &RunMeta, body: &str) -> String {
    format!("{}{body}", meta.csv_header())
}

/// A JSON artifact: pretty-printed object with `"meta"` first (with trailing
/// newline).
pub fn json_with_meta(meta: &RunMeta, payload: serde_json::Value) -> String {
    let mut root = serde_json::Map::new();
    root.insert("meta".to_string(), serde_json::to_value(meta).expect("meta serializes"));
    match payload {
        serde_json::Value::Object(map) => root.extend(map),
        other => {
            root.insert("results".to_string(), other);
        }
    }
    let mut text =
        serde_json::to_string_pretty(&serde_json::Value::Object(root)).expect("payload serializes");
    text.push('\n');
    text
}

/// An SVG artifact: metadata comment, then the SVG document.
pub fn svg_with_meta(meta: &RunMeta, svg: &str) -> String {
    format!("{}{svg}", meta.svg_comment())
}

/// Writes an artifact, creating parent directories as needed.
pub fn write_artifact(path: impl AsRef<Path>, content: &str) -> std::io::Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)
}
