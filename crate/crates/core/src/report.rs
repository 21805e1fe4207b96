//! Deterministic output formatting: fixed 17-significant-digit floats, CSV
//! lines with minimal RFC-4180 quoting, a tiny JSON emitter, and the run
//! manifest embedded in (or referenced next to) every output file.

use std::collections::BTreeMap;

/// Fixed float formatting: 17 significant digits, '.' decimal, exponent
/// form. Identical inputs always produce identical bytes.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// FNV-1a over the canonical parameter encoding.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Run provenance attached to every output: the command, its parameters, a
/// hash of the canonical parameter encoding and the tool version. The
/// timestamp is optional and off by default so identical runs stay
/// byte-identical.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub config_hash: String,
    pub tool_version: String,
    pub timestamp: Option<String>,
}

impl Manifest {
    pub fn new(command: &str, parameters: BTreeMap<String, String>) -> Self {
        let mut canon = String::new();
        canon.push_str(command);
        canon.push('\n');
        for (k, v) in &parameters {
            canon.push_str(k);
            canon.push('=');
            canon.push_str(v);
            canon.push('\n');
        }
        let config_hash = format!("{:016x}", fnv1a64(canon.as_bytes()));
        Self {
            command: command.to_string(),
            parameters,
            config_hash,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
        }
    }

    pub fn with_timestamp(mut self) -> Self {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_else(|_| "0".to_string());
        self.timestamp = Some(now);
        self
    }

    pub fn to_json(&self) -> String {
        let mut fields = vec![
            ("command".to_string(), json_string(&self.command)),
            ("config_hash".to_string(), json_string(&self.config_hash)),
            ("tool_version".to_string(), json_string(&self.tool_version)),
        ];
        let params: Vec<(String, String)> = self
            .parameters
            .iter()
            .map(|(k, v)| (k.clone(), json_string(v)))
            .collect();
        fields.push(("parameters".to_string(), json_object(&params)));
        if let Some(ts) = &self.timestamp {
            fields.push(("timestamp".to_string(), json_string(ts)));
        }
        json_object(&fields)
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// `-1.7320508075688772e0` is a valid JSON number, so the fixed float
/// format doubles as the JSON encoding.
pub fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_float(x)
    } else {
        json_string(&fmt_float(x))
    }
}

pub fn json_object(fields: &[(String, String)]) -> String {
    let inner: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}: {}", json_string(k), v))
        .collect();
    format!("{{{}}}", inner.join(", "))
}

pub fn json_array(items: &[String]) -> String {
    format!("[{}]", items.join(", "))
}

/// One CSV record with RFC-4180 quoting where needed.
pub fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains(',') || f.contains('"') || f.contains('\n') {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",")
}
