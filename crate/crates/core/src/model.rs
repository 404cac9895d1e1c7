//! Data types shared by every format engine.

use serde::Serialize;

use crate::error::Error;

/// How a discovered field relates to the file's integrity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Category {
    /// Producer-inserted enrichment: authors, software, dates, locations.
    Contextual,
    /// Required to decode the content. Reported, never removed.
    StructuralRequired,
    /// Not recognized by the format whitelist.
    Unknown,
}

impl Category {
    /// Whether an entry of this category counts as a leak for closure checks.
    pub fn is_leak(self) -> bool {
        !matches!(self, Category::StructuralRequired)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Contextual => "Contextual",
            Category::StructuralRequired => "StructuralRequired",
            Category::Unknown => "Unknown",
        }
    }
}

/// One metadata field discovered in a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetadataEntry {
    pub key: String,
    pub value: String,
    pub location: String,
    pub category: Category,
}

impl MetadataEntry {
    pub fn new(
        key: impl Into<String>,
        value: impl Into<String>,
        location: impl Into<String>,
        category: Category,
    ) -> Self {
        MetadataEntry {
            key: key.into(),
            value: value.into(),
            location: location.into(),
            category,
        }
    }

    pub fn contextual(key: impl Into<String>, value: impl Into<String>, location: impl Into<String>) -> Self {
        Self::new(key, value, location, Category::Contextual)
    }

    pub fn unknown(key: impl Into<String>, value: impl Into<String>, location: impl Into<String>) -> Self {
        Self::new(key, value, location, Category::Unknown)
    }

    /// Re-anchors the entry under a container member path.
    pub(crate) fn nested_in(mut self, member: &str) -> Self {
        self.location = format!("{member} \u{25B8} {}", self.location);
        self
    }
}

/// What to do with an archive member whose format is not recognized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnknownMemberAction {
    #[default]
    Abort,
    Omit,
    CopyVerbatim,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanPolicy {
    pub unknown_member_action: UnknownMemberAction,
    /// Honoured by the CLI when it writes files; the library never touches the filesystem.
    pub normalize_fs_times: bool,
    /// Report what would be removed without producing output bytes.
    pub dry_run: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CleanStatus {
    Cleaned,
    AlreadyClean,
    Unsupported,
    Failed,
}

#[derive(Debug)]
pub struct CleanResult {
    pub status: CleanStatus,
    /// Present iff status is `Cleaned` or `AlreadyClean` and the policy is not a dry run.
    pub output: Option<Vec<u8>>,
    pub removed: Vec<MetadataEntry>,
    pub warnings: Vec<String>,
    /// The failure behind an `Unsupported` or `Failed` status.
    pub error: Option<Error>,
}

impl CleanResult {
    pub(crate) fn unsupported(err: Error, mut warnings: Vec<String>) -> Self {
        warnings.push(err.to_string());
        CleanResult {
            status: CleanStatus::Unsupported,
            output: None,
            removed: Vec::new(),
            warnings,
            error: Some(err),
        }
    }

    pub(crate) fn failed(err: Error, mut warnings: Vec<String>) -> Self {
        warnings.push(err.to_string());
        CleanResult {
            status: CleanStatus::Failed,
            output: None,
            removed: Vec::new(),
            warnings,
            error: Some(err),
        }
    }
}

/// A field value that cannot be deleted and must instead be neutralized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldValue {
    Numeric(i64),
    /// Seconds since 1970-01-01T00:00:00Z.
    Timestamp(i64),
    Text(String),
}

/// Numbers become 0, dates the Unix epoch, strings empty.
///
/// Never substitutes random or plausible values: fabricated data would
/// itself identify the tool that produced it.
pub fn anonymize_field(value: FieldValue) -> FieldValue {
    match value {
        FieldValue::Numeric(_) => FieldValue::Numeric(0),
        FieldValue::Timestamp(_) => FieldValue::Timestamp(0),
        FieldValue::Text(_) => FieldValue::Text(String::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn anonymize_examples() {
        assert_eq!(anonymize_field(FieldValue::Numeric(7172)), FieldValue::Numeric(0));
        assert_eq!(anonymize_field(FieldValue::Timestamp(0)), FieldValue::Timestamp(0));
        assert_eq!(
            anonymize_field(FieldValue::Text("Adobe Photoshop CS3 Windows".into())),
            FieldValue::Text(String::new())
        );
    }

    fn field_value() -> impl Strategy<Value = FieldValue> {
        prop_oneof![
            any::<i64>().prop_map(FieldValue::Numeric),
            any::<i64>().prop_map(FieldValue::Timestamp),
            ".*".prop_map(FieldValue::Text),
        ]
    }

    proptest! {
        #[test]
        fn anonymize_is_idempotent(v in field_value()) {
            let once = anonymize_field(v);
            prop_assert_eq!(anonymize_field(once.clone()), once);
        }

        #[test]
        fn anonymize_preserves_variant(v in field_value()) {
            let out = anonymize_field(v.clone());
            prop_assert_eq!(std::mem::discriminant(&out), std::mem::discriminant(&v));
        }
    }

    #[test]
    fn nested_location() {
        let e = MetadataEntry::contextual("EXIF.Software", "x", "segment APP1 @0x0002").nested_in("inner.jpg");
        assert_eq!(e.location, "inner.jpg \u{25B8} segment APP1 @0x0002");
    }
}
