//! Provenance headers and CSV emission.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Canonical JSON of a fully resolved config and its SHA-256.
pub fn config_digest<T: Serialize>(cfg: &T) -> (String, String) {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let hex = digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    (json, hex)
}

/// `# `-prefixed header lines. The resolved config is echoed so every
/// default is visible in the file itself.
pub fn provenance<T: Serialize>(command: &str, seed: u64, cfg: &T) -> String {
    let (json, hex) = config_digest(cfg);
    format!(
        "# medbandits {VERSION}\n# command: {command}\n# config-sha256: {hex}\n# seed: {seed}\n# config: {json}\n"
    )
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip float text, scientific outside `[1e-4, 1e15)`.
pub fn float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// As [`float`]; empty for missing values.
pub fn num(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}
