//! Flat key=value experiment configuration and its stable digest.
//!
//! Configs are exchanged as plain text, one `key=value` per line, `#`
//! comments and blank lines ignored. The digest is the SHA-256 of the
//! canonical form (keys sorted, exactly one `key=value` per line, no
//! comments), so any tool in any language can reproduce it. Volatile
//! fields like timestamps must never be part of the digested pairs.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Canonical text form: sorted keys, one `key=value` line each.
pub fn canonical(pairs: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push('=');
        out.push_str(v);
        out.push('\n');
    }
    out
}

/// Hex SHA-256 of the canonical form.
pub fn digest(pairs: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical(pairs).as_bytes());
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Convenience for building the pair map from slices.
pub fn pairs(items: &[(&str, String)]) -> BTreeMap<String, String> {
    items
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Parse `key=value` lines; later duplicates override earlier ones.
pub fn parse_kv(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(Error::Format {
                    path: origin.to_string(),
                    detail: format!("line {}: expected key=value, got {raw:?}", ln + 1),
                });
            }
        }
    }
    Ok(map)
}
