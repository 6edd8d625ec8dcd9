//! Append-only component database, one JSON object per line.
//!
//! Single-writer: concurrent appends to the same file are not supported.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::screening::VerdictKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub id: String,
    pub label_manufacturer: String,
    pub date_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icc_quiescent_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icc_active_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gbwp_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_v_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vom_pos_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vom_neg_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictKind>,
}

impl ComponentRecord {
    pub fn new(
        id: impl Into<String>,
        label_manufacturer: impl Into<String>,
        date_code: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            label_manufacturer: label_manufacturer.into(),
            date_code: date_code.into(),
            icc_quiescent_a: None,
            icc_active_a: None,
            gbwp_hz: None,
            sr_v_per_s: None,
            vom_pos_v: None,
            vom_neg_v: None,
            verdict: None,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |message: String| DataError::InvalidRecord {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(bad("id must not be empty".into()));
        }
        let positive = [
            ("icc_quiescent_a", self.icc_quiescent_a),
            ("icc_active_a", self.icc_active_a),
            ("gbwp_hz", self.gbwp_hz),
            ("sr_v_per_s", self.sr_v_per_s),
            ("vom_pos_v", self.vom_pos_v),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(bad(format!("{name} must be finite and positive, got {v}")));
                }
            }
        }
        if let Some(v) = self.vom_neg_v {
            if !(v.is_finite() && v < 0.0) {
                return Err(bad(format!(
                    "vom_neg_v must be finite and negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Parses a whole database. Any malformed, invalid or duplicate record
/// fails the load; nothing is partially returned.
pub fn read_component_db(mut source: impl Read) -> Result<Vec<ComponentRecord>, DataError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let l = l.strip_suffix('\r').unwrap_or(l);
        let rec: ComponentRecord =
            serde_json::from_str(l).map_err(|e| DataError::MalformedRecord {
                line,
                message: e.to_string(),
            })?;
        rec.validate().map_err(|e| DataError::MalformedRecord {
            line,
            message: e.to_string(),
        })?;
        if !seen.insert(rec.id.clone()) {
            return Err(DataError::DuplicateId { line, id: rec.id });
        }
        records.push(rec);
    }
    Ok(records)
}

/// Serializes one record as a single LF-terminated line.
pub fn write_component_record(
    record: &ComponentRecord,
    mut sink: impl Write,
) -> Result<(), DataError> {
    record.validate()?;
    let mut line = serde_json::to_string(record).expect("record serializes");
    line.push('\n');
    sink.write_all(line.as_bytes())?;
    Ok(())
}

pub fn component_db_load(path: impl AsRef<Path>) -> Result<Vec<ComponentRecord>, DataError> {
    read_component_db(std::fs::File::open(path)?)
}

/// Appends a record, creating the file if needed. A duplicate id leaves
/// the file untouched.
pub fn component_db_append(
    path: impl AsRef<Path>,
    record: &ComponentRecord,
) -> Result<(), DataError> {
    let path = path.as_ref();
    record.validate()?;
    let existing = match std::fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let records = read_component_db(existing.as_slice())?;
    if records.iter().any(|r| r.id == record.id) {
        return Err(DataError::DuplicateId {
            line: records.len() + 1,
            id: record.id.clone(),
        });
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if existing.last().is_some_and(|&b| b != b'\n') {
        file.write_all(b"\n")?;
    }
    write_component_record(record, &mut file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str) -> ComponentRecord {
        ComponentRecord {
            icc_quiescent_a: Some(1.89e-3),
            verdict: Some(VerdictKind::Pass),
            ..ComponentRecord::new(id, "Motorola", "8837")
        }
    }

    #[test]
    fn append_and_load_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        for i in 0..21 {
            component_db_append(&path, &rec(&format!("ic-{i:02}"))).unwrap();
        }
        let recs = component_db_load(&path).unwrap();
        assert_eq!(recs.len(), 21);
        assert!(recs
            .iter()
            .enumerate()
            .all(|(i, r)| r.id == format!("ic-{i:02}")));
    }

    #[test]
    fn duplicate_append_leaves_file_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        component_db_append(&path, &rec("a")).unwrap();
        let before = std::fs::read(&path).unwrap();
        let e = component_db_append(&path, &rec("a")).unwrap_err();
        assert!(matches!(e, DataError::DuplicateId { .. }));
        assert_eq!(std::fs::read(&path).unwrap(), before);
    }

    #[test]
    fn empty_file_and_malformed_line() {
        assert!(read_component_db("".as_bytes()).unwrap().is_empty());
        let good = serde_json::to_string(&rec("a")).unwrap();
        let text = format!("{good}\n{{not json\n");
        let e = read_component_db(text.as_bytes()).unwrap_err();
        assert!(matches!(e, DataError::MalformedRecord { line: 2, .. }));
        assert!(e.to_string().starts_with("line 2"));
        let text = format!("{good}\n{good}\n");
        assert!(matches!(
            read_component_db(text.as_bytes()),
            Err(DataError::DuplicateId { line: 2, .. })
        ));
    }

    #[test]
    fn record_validation() {
        let mut r = rec("x");
        r.vom_neg_v = Some(13.0);
        assert!(r.validate().is_err());
        let r = ComponentRecord::new("", "TI", "");
        assert!(r.validate().is_err());
        let text = r#"{"id":"a","label_manufacturer":"TI","date_code":"1","icc_quiescent_a":-1}"#;
        assert!(matches!(
            read_component_db(text.as_bytes()),
            Err(DataError::MalformedRecord { line: 1, .. })
        ));
        let text = r#"{"id":"a","label_manufacturer":"TI","date_code":"1","extra":1}"#;
        assert!(read_component_db(text.as_bytes()).is_err());
    }
}
