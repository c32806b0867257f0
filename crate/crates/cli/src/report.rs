//! Report envelope: everything except the timing is a function of the
//! input bytes, the seed and the tool version.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    artifact_version: &'a str,
    command: &'a str,
    input_digest: &'a str,
    seed: u64,
    outputs: &'a Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: &'static str,
    pub command: &'static str,
    pub input_digest: String,
    pub seed: u64,
    pub outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub report_digest: String,
}

impl Report {
    pub fn new(command: &'static str, input_digest: String, seed: u64, outputs: Value) -> Self {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION,
            command,
            input_digest: &input_digest,
            seed,
            outputs: &outputs,
        };
        let report_digest = sha256_hex(&serde_json::to_vec(&envelope).expect("report serializes"));
        Report {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION,
            command,
            input_digest,
            seed,
            outputs,
            wall_time_ms: None,
            report_digest,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Digest for commands whose input is their parameters.
pub fn params_digest(params: &Value) -> String {
    sha256_hex(&serde_json::to_vec(params).expect("parameters serialize"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_timing() {
        let a = Report::new("search", "sha256:00".into(), 3, json!({"x": 1}));
        let mut b = a.clone();
        b.wall_time_ms = Some(17);
        let c = Report::new("search", "sha256:00".into(), 3, json!({"x": 1}));
        assert_eq!(a.report_digest, c.report_digest);
        assert_eq!(a.to_json(), c.to_json());
        assert_ne!(a.to_json(), b.to_json());
        let d = Report::new("search", "sha256:00".into(), 4, json!({"x": 1}));
        assert_ne!(a.report_digest, d.report_digest);
    }
}
