//! Run reports, input digests and exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use qcmark_core::qasm::{parse, QasmSource};
use qcmark_core::Circuit;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_ARGS: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;
pub const EXIT_ABSENT: u8 = 4;

/// A command failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn args(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ARGS,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CmdResult<T> = Result<T, Failure>;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub outputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    pub tool_version: &'static str,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            seed,
            outputs: BTreeMap::new(),
            wall_time_ms: None,
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }

    /// Reads a file and records its digest.
    pub fn read(&mut self, path: &Path) -> CmdResult<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    pub fn read_circuit(&mut self, path: &Path) -> CmdResult<Circuit> {
        let bytes = self.read(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Failure::io(format!("{}: not UTF-8 text", path.display())))?;
        parse(&QasmSource::new(text, path.display().to_string())).map_err(|diags| {
            let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
            Failure::io(lines.join("\n"))
        })
    }

    pub fn read_json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> CmdResult<T> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
    }
}

pub fn write_file(path: &Path, contents: &str) -> CmdResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("plain data serializes")
}

pub fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256_hex() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        std::fs::write(&p, "abc").unwrap();
        let mut r = RunReport::new("t", 0);
        r.read(&p).unwrap();
        let d = r.inputs.values().next().unwrap();
        assert_eq!(d, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn time_is_omitted_unless_set() {
        let r = RunReport::new("t", 3);
        let v = to_json(&r);
        assert!(v.get("wall_time_ms").is_none());
        assert_eq!(v["seed"], 3);
    }

    #[test]
    fn parse_failure_is_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.qasm");
        std::fs::write(&p, "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n").unwrap();
        let e = RunReport::new("t", 0).read_circuit(&p).unwrap_err();
        assert_eq!(e.code, EXIT_IO);
        assert!(e.message.contains("bad.qasm:3:"), "{}", e.message);
    }
}
