//! Report serialization: a stable JSON envelope around each command's
//! payload, with deterministic field order so identical runs produce
//! byte-identical documents once the wall-time line is stripped.

use std::io::Write;
use std::path::Path;

use crate::Result;

/// Bumped only when the envelope or a payload changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope for every JSON document the toolkit writes. Field order is
/// declaration order under serde, so `wall_time_seconds` always lands on
/// the final line of the pretty-printed output.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Document<T: serde::Serialize> {
    pub schema_version: u32,
    pub command: String,
    pub report: T,
    pub wall_time_seconds: f64,
}

impl<T: serde::Serialize> Document<T> {
    pub fn new(command: &str, report: T, wall_time_seconds: f64) -> Self {
        Document { schema_version: SCHEMA_VERSION, command: command.to_string(), report, wall_time_seconds }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| crate::Error::Config(format!("serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = self.to_json()?;
        let mut f = std::fs::File::create(path)
            .map_err(|e| crate::Error::Config(format!("cannot create {}: {e}", path.display())))?;
        f.write_all(json.as_bytes())
            .map_err(|e| crate::Error::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Drop the wall-time line so documents from identical runs compare
/// byte-for-byte.
pub fn strip_wall_time(json: &str) -> String {
    json.lines()
        .filter(|line| !line.contains("\"wall_time_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Serialize)]
    struct Payload {
        value: f64,
    }

    #[test]
    fn wall_time_is_last_and_strippable() {
        let doc = Document::new("probe", Payload { value: 1.5 }, 0.25);
        let json = doc.to_json().unwrap();
        let lines: Vec<&str> = json.trim_end().lines().collect();
        assert!(lines[lines.len() - 2].contains("wall_time_seconds"));
        let a = strip_wall_time(&json);
        let doc2 = Document::new("probe", Payload { value: 1.5 }, 99.0);
        let b = strip_wall_time(&doc2.to_json().unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn identical_documents_serialize_identically() {
        let a = Document::new("x", Payload { value: 0.1 + 0.2 }, 0.0).to_json().unwrap();
        let b = Document::new("x", Payload { value: 0.1 + 0.2 }, 0.0).to_json().unwrap();
        assert_eq!(a, b);
    }
}
