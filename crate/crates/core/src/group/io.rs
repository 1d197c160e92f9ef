//! JSON group files and `builtin:` references.
//!
//! ```json
//! {"name": "Z2", "order": 2, "identity": 0, "table": [[0,1],[1,0]],
//!  "names": ["e","g"], "tags": {"g": 1}}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::build::builtin;
use super::{validate_group, GroupError, GroupTable, RawTable};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<BTreeMap<String, usize>>,
}

impl GroupFile {
    pub fn into_group(self) -> Result<GroupTable, GroupError> {
        if self.order != self.table.len() {
            return Err(GroupError::Format(format!(
                "declared order {} but table has {} rows",
                self.order,
                self.table.len()
            )));
        }
        validate_group(RawTable {
            name: self.name,
            table: self.table,
            identity: Some(self.identity),
            names: self.names,
            tags: self.tags.unwrap_or_default(),
        })
    }

    pub fn from_group(g: &GroupTable) -> GroupFile {
        let raw = g.to_raw();
        GroupFile {
            name: raw.name,
            order: g.order(),
            identity: g.identity(),
            table: raw.table,
            names: raw.names,
            tags: (!raw.tags.is_empty()).then_some(raw.tags),
        }
    }
}

/// Parses and validates a group from JSON text.
pub fn parse_group_json(text: &str) -> Result<GroupTable, GroupError> {
    let file: GroupFile =
        serde_json::from_str(text).map_err(|e| GroupError::Format(e.to_string()))?;
    file.into_group()
}

pub fn group_to_json(g: &GroupTable) -> String {
    serde_json::to_string(&GroupFile::from_group(g)).expect("group files always serialize")
}

/// `builtin:NAME` or a path to a JSON group file.
pub fn load_group(reference: &str) -> Result<GroupTable, GroupError> {
    if let Some(name) = reference.strip_prefix("builtin:") {
        return builtin(name);
    }
    let path = Path::new(reference);
    let text = std::fs::read_to_string(path)
        .map_err(|e| GroupError::UnknownGroup(format!("{reference}: {e}")))?;
    parse_group_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let g = builtin("D4").unwrap();
        let back = parse_group_json(&group_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn declared_order_must_match() {
        let text = r#"{"name":"bad","order":3,"identity":0,"table":[[0,1],[1,0]]}"#;
        assert!(matches!(parse_group_json(text), Err(GroupError::Format(_))));
    }

    #[test]
    fn wrong_identity_is_rejected() {
        let text = r#"{"name":"z2","order":2,"identity":1,"table":[[0,1],[1,0]]}"#;
        assert_eq!(parse_group_json(text), Err(GroupError::NoIdentity));
    }

    #[test]
    fn builtin_reference() {
        assert_eq!(load_group("builtin:AGL1_7").unwrap().order(), 42);
        assert!(load_group("builtin:nope").is_err());
        assert!(load_group("/nonexistent/file.json").is_err());
    }
}
